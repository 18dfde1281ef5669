// lyapunov.hpp - steady-state cumulants of VAR(1) processes, noise recovery and simulation.
#pragma once

#include "dlyap/graph.hpp"
#include "dlyap/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace dlyap {

/// Spectral radius below which a matrix is certified stable.
inline constexpr double kStabilityMargin = 1e-9;

/// Largest eigenvalue modulus.
double spectral_radius(const Eigen::MatrixXd& A);

/// Real matrix A supported on a graph: entry (j,i) holds the weight of edge i->j.
class ParameterMatrix {
public:
    ParameterMatrix() = default;
    /// Throws DimensionMismatch on shape errors and InvalidArgument when a
    /// nonzero entry lies off the edge pattern.
    ParameterMatrix(DirectedGraph g, Eigen::MatrixXd entries);
    /// Weights listed in the order of g.edges().
    static ParameterMatrix from_edge_weights(const DirectedGraph& g, const std::vector<double>& weights);

    const DirectedGraph& graph() const noexcept { return g_; }
    const Eigen::MatrixXd& entries() const noexcept { return A_; }
    int p() const noexcept { return g_.p(); }
    /// Weight of edge from->to.
    double weight(int from, int to) const { return A_(to, from); }
    /// Weights in the order of graph().edges().
    std::vector<double> edge_weights() const;

    double radius() const noexcept { return radius_; }
    bool is_stable() const noexcept { return radius_ < 1.0 - kStabilityMargin; }
    /// Throws Unstable unless is_stable().
    void require_stable() const;

private:
    DirectedGraph g_;
    Eigen::MatrixXd A_;
    double radius_ = 0.0;
};

/// Diagonal noise cumulant of a given order, stored as its p diagonal entries.
struct DiagonalCumulant {
    int order = 2;
    Eigen::VectorXd w;

    DiagonalCumulant() = default;
    DiagonalCumulant(int n, Eigen::VectorXd diagonal);
    int p() const noexcept { return static_cast<int>(w.size()); }
    SymmetricTensor to_tensor() const;
};

/// Solution of the vectorized system together with its numerical diagnostics.
struct CumulantSolution {
    SymmetricTensor tensor;
    /// Largest deviation of the dense solution from its symmetric fold, relative to its max entry.
    double symmetry_defect = 0.0;
    /// Reciprocal condition estimate of I - A^{⊗n}.
    double rcond = 1.0;
};

/// Dense solve of (I - A⊗...⊗A) vec(T) = vec(Ω) with symmetric folding.
/// Throws Unstable, SingularSystem or DimensionMismatch.
CumulantSolution solve_cumulant_detailed(const ParameterMatrix& A, const DiagonalCumulant& omega);
SymmetricTensor solve_cumulant(const ParameterMatrix& A, const DiagonalCumulant& omega);

/// Partial sum of Ω ×₁ Aᴸ ... ×ₙ Aᴸ over L = 0..terms-1.
SymmetricTensor series_cumulant(const ParameterMatrix& A, const DiagonalCumulant& omega, int terms);
/// Series truncated once ρ^{nL}·‖Ω‖ < 1e-14, or at L = 500.
SymmetricTensor series_cumulant(const ParameterMatrix& A, const DiagonalCumulant& omega);
/// Number of terms used by the default truncation.
int default_series_terms(const ParameterMatrix& A, const DiagonalCumulant& omega);

/// Squaring iteration X ← X + X ×(B,...,B), B ← B², summing 2^k series terms per step.
/// Iterates until the increment falls below 1e-16 relative. Throws Unstable.
SymmetricTensor doubling_cumulant(const ParameterMatrix& A, const DiagonalCumulant& omega);

/// T ×₁ A ... ×ₙ A, folded to symmetric storage.
SymmetricTensor multilinear_image(const SymmetricTensor& T, const Eigen::MatrixXd& A);

/// ‖T - (T ×₁A...×ₙA + Ω)‖∞.
double recursive_residual(const SymmetricTensor& T, const ParameterMatrix& A, const DiagonalCumulant& omega);

struct NoiseRecovery {
    DiagonalCumulant omega;
    /// Largest off-diagonal magnitude of T - T ×₁A...×ₙA.
    double offdiag_defect = 0.0;
};

NoiseRecovery recover_noise(const SymmetricTensor& T, const Eigen::MatrixXd& A);
NoiseRecovery recover_noise(const SymmetricTensor& T, const ParameterMatrix& A);

/// Second, third and optional fourth order cumulants of one model point.
struct CumulantStack {
    SymmetricTensor S;
    SymmetricTensor T;
    std::optional<SymmetricTensor> R;

    int p() const noexcept { return S.p(); }
    /// Validates orders and a shared dimension; throws DimensionMismatch.
    void validate() const;
};

/// A parameter matrix with noise cumulants of orders 2, 3 and 4.
struct ModelPoint {
    ParameterMatrix A;
    DiagonalCumulant omega2;
    DiagonalCumulant omega3;
    DiagonalCumulant omega4;

    /// Exact cumulants of orders 2 and 3, and 4 when requested.
    CumulantStack forward(bool with_fourth = true) const;
};

/// Entries on the pattern drawn uniformly from [-1,1] minus (-0.05,0.05), rescaled to
/// the target spectral radius. Deterministic per seed. Throws InvalidArgument.
ParameterMatrix sample_stable_matrix(const DirectedGraph& g, std::uint64_t seed, double target_radius);

/// Stable matrix from sample_stable_matrix plus noise cumulants with magnitudes drawn
/// from [noise_low, noise_high]; third-order entries get a random sign.
ModelPoint sample_model_point(const DirectedGraph& g, std::uint64_t seed, double target_radius = 0.6,
                              double noise_low = 0.5, double noise_high = 2.0);

/// Independent noise law used by the simulator.
struct NoiseSpec {
    enum class Kind { Zero, Gaussian, CenteredExponential };
    Kind kind = Kind::Gaussian;
    /// Per-coordinate scale c: Gaussian N(0,c²), or c·(Exp(1) - 1).
    Eigen::VectorXd scale;

    /// Exact noise cumulant of order n (2 <= n <= 4).
    DiagonalCumulant cumulant(int n) const;
};

struct SimulationEstimate {
    SymmetricTensor estimate;
    /// Batch-means standard error per entry.
    SymmetricTensor standard_error;
    std::size_t samples = 0;
    int batches = 0;
};

/// Simulates X_t = A X_{t-1} + ε_t from X_0 = 0, drops burn_in steps and returns the
/// k-statistic of the given order (2 or 3) over the remaining t_max samples.
SimulationEstimate simulate_and_estimate(const ParameterMatrix& A, const NoiseSpec& noise, std::size_t t_max,
                                         std::size_t burn_in, int order, std::uint64_t seed, int batches = 200);

} // namespace dlyap
