// jacobian.hpp - modified Jacobian of the cumulant map and generic-rank verdicts.
#pragma once

#include "dlyap/graph.hpp"
#include "dlyap/linalg.hpp"
#include "dlyap/lyapunov.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dlyap {

/// Column of J₂ for edge α->β at row (i,j): δ_j(β) Σ_l a_{il}s_{lα} + δ_i(β) Σ_k a_{jk}s_{kα}.
double j2_entry(const Eigen::MatrixXd& A, const SymmetricTensor& S, int i, int j, const Edge& col);

/// Column of J₃ for edge α->β at row (i,j,k), the three-term δ sum over T entries.
double j3_entry(const Eigen::MatrixXd& A, const SymmetricTensor& T, int i, int j, int k, const Edge& col);

struct JacobianRow {
    int order = 2;
    std::vector<int> index;
    bool diagonal = false;
};

struct JacobianColumn {
    enum class Kind { Edge, Omega };
    Kind kind = Kind::Edge;
    Edge edge{};
    int order = 0;
    int vertex = 0;
};

struct ModifiedJacobian {
    std::vector<int> orders;
    std::vector<JacobianRow> rows;
    std::vector<JacobianColumn> columns;
    Eigen::MatrixXd matrix;
    std::size_t num_edges = 0;
    /// True when order-4 rows come from the per-two-cycle recipe only.
    bool augmented = false;

    /// Rows on off-diagonal multisets restricted to the edge columns.
    Eigen::MatrixXd offdiag_block() const;
    std::size_t num_omega_columns() const { return columns.size() - num_edges; }
    /// Number of rows of the given order.
    std::size_t rows_of_order(int order) const;
};

struct JacobianOptions {
    /// Orders whose rows and noise columns are all included (subset of {2,3,4}).
    std::vector<int> orders{2, 3};
    /// Adds rows (uuuu), (vvvv), (uuuv) and ω⁽⁴⁾ columns for u,v per two-cycle component.
    bool fourth_order_augmentation = false;
    /// Relative tolerance of the permutation-symmetry assertion during row folding.
    double symmetry_tol = 1e-10;
};

/// Assembles the modified Jacobian at (A, ω). omegas must contain every order used.
/// Throws InvalidArgument, Unstable and Error (row folding asymmetry).
ModifiedJacobian build_modified_jacobian(const ParameterMatrix& A, const std::map<int, DiagonalCumulant>& omegas,
                                         const JacobianOptions& opt = {});

/// Numeric rank of the off-diagonal edge block.
RankResult offdiag_rank(const ModifiedJacobian& mj, const RankPolicy& policy = {});

/// Two-vertex weak components whose vertices point at each other.
std::vector<std::pair<int, int>> two_cycle_components(const DirectedGraph& g);

struct TrialRank {
    std::uint64_t seed = 0;
    double radius = 0.0;
    int rank = 0;
    double gap = 0.0;
    double sigma_max = 0.0;
    double sigma_min = 0.0;
};

struct LocalIdentifiabilityReport {
    /// "locally identifiable", "not locally identifiable" or "inconclusive".
    std::string verdict;
    bool locally_identifiable = false;
    bool structural = false;
    bool augmented = false;
    std::vector<int> orders;
    std::size_t edges = 0;
    std::size_t offdiag_rows = 0;
    int generic_rank = 0;
    int deficiency = 0;
    std::vector<TrialRank> trials;
    std::string note;
};

struct VerdictOptions {
    std::vector<int> orders{2, 3};
    /// Escalate to the order-4 recipe when a two-cycle component is present.
    bool allow_augmentation = true;
    RankPolicy rank_policy{};
    /// Minimal singular-value gap for a structural deficiency.
    double structural_gap = 1e6;
    /// Workers used for the independent trials.
    int threads = 1;
};

/// Generic rank over `trials` random stable points at radii 0.6 and 0.3 (alternating).
LocalIdentifiabilityReport local_identifiability_verdict(const DirectedGraph& g, int trials, std::uint64_t seed,
                                                         const VerdictOptions& opt = {});

/// Outcome of a full-rank sweep over many graphs.
struct FullRankSweep {
    std::size_t graphs = 0;
    std::size_t evaluations = 0;
    /// Graphs with some trial below |E|, described as edge lists.
    std::vector<std::string> deficient;
    /// Graphs whose trials disagree on the rank.
    std::vector<std::string> non_unanimous;
    double min_gap = 0.0;
};

/// Off-diagonal rank at orders {2,3} for `seeds` model points per graph (radius 0.6),
/// solving the cumulants by repeated squaring. Graphs are spread over `threads` workers.
FullRankSweep full_rank_sweep(const std::vector<DirectedGraph>& graphs, int seeds, std::uint64_t seed, int threads = 1,
                              const RankPolicy& policy = {});

} // namespace dlyap
