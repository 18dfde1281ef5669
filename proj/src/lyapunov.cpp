// lyapunov.cpp - cumulant solvers, noise recovery, model sampling and simulation.
#include "dlyap/lyapunov.hpp"

#include "dlyap/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace dlyap {

double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    double r = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) r = std::max(r, std::abs(es.eigenvalues()[k]));
    return r;
}

ParameterMatrix::ParameterMatrix(DirectedGraph g, Eigen::MatrixXd entries) : g_(std::move(g)), A_(std::move(entries)) {
    if (A_.rows() != g_.p() || A_.cols() != g_.p()) throw DimensionMismatch("parameter matrix must be p x p");
    for (int j = 0; j < g_.p(); ++j) {
        for (int i = 0; i < g_.p(); ++i) {
            if (!std::isfinite(A_(j, i))) throw InvalidArgument("parameter matrix has a non-finite entry");
            if (A_(j, i) != 0.0 && !g_.has_edge(i, j)) {
                throw InvalidArgument("nonzero weight on missing edge " + std::to_string(i) + "->" + std::to_string(j));
            }
        }
    }
    // Acyclic supports permute to triangular form, so the radius is the largest loop weight.
    if (g_.is_dag()) {
        radius_ = A_.size() == 0 ? 0.0 : A_.diagonal().cwiseAbs().maxCoeff();
    } else {
        radius_ = spectral_radius(A_);
    }
}

ParameterMatrix ParameterMatrix::from_edge_weights(const DirectedGraph& g, const std::vector<double>& weights) {
    if (weights.size() != g.num_edges()) throw DimensionMismatch("one weight per edge is required");
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.p(), g.p());
    for (std::size_t k = 0; k < weights.size(); ++k) A(g.edges()[k].to, g.edges()[k].from) = weights[k];
    return ParameterMatrix(g, A);
}

std::vector<double> ParameterMatrix::edge_weights() const {
    std::vector<double> out;
    out.reserve(g_.num_edges());
    for (const Edge& e : g_.edges()) out.push_back(A_(e.to, e.from));
    return out;
}

void ParameterMatrix::require_stable() const {
    if (!is_stable()) throw Unstable("spectral radius " + std::to_string(radius_) + " is not below 1");
}

DiagonalCumulant::DiagonalCumulant(int n, Eigen::VectorXd diagonal) : order(n), w(std::move(diagonal)) {
    if (n < 2) throw InvalidArgument("cumulant order must be at least 2");
    if (w.size() == 0) throw InvalidArgument("noise cumulant needs at least one entry");
}

SymmetricTensor DiagonalCumulant::to_tensor() const {
    SymmetricTensor T(order, p());
    for (int i = 0; i < p(); ++i) T.set(std::vector<int>(static_cast<std::size_t>(order), i), w[i]);
    return T;
}

namespace {

void check_shapes(const ParameterMatrix& A, const DiagonalCumulant& omega) {
    if (omega.p() != A.p()) throw DimensionMismatch("noise dimension differs from the parameter matrix");
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    Eigen::MatrixXd K(X.rows() * Y.rows(), X.cols() * Y.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            K.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
    return K;
}

} // namespace

CumulantSolution solve_cumulant_detailed(const ParameterMatrix& A, const DiagonalCumulant& omega) {
    check_shapes(A, omega);
    A.require_stable();
    const int p = A.p();
    const int n = omega.order;
    Eigen::MatrixXd K = A.entries();
    for (int k = 1; k < n; ++k) K = kron(K, A.entries());
    const Eigen::Index N = K.rows();
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N) - K;

    const DenseTensor omega_dense = omega.to_tensor().to_dense();
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(omega_dense.data.data(), N);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    CumulantSolution out;
    out.rcond = lu.rcond();
    if (!(out.rcond > 1e-14)) throw SingularSystem("Lyapunov system is numerically singular");
    Eigen::VectorXd x = lu.solve(b);

    DenseTensor dense(std::vector<int>(static_cast<std::size_t>(n), p));
    std::copy(x.data(), x.data() + N, dense.data.begin());
    double defect = 0.0;
    out.tensor = SymmetricTensor::from_dense(dense, &defect);
    const double scale = std::max(out.tensor.max_abs(), 1e-300);
    out.symmetry_defect = defect / scale;
    return out;
}

SymmetricTensor solve_cumulant(const ParameterMatrix& A, const DiagonalCumulant& omega) {
    return solve_cumulant_detailed(A, omega).tensor;
}

SymmetricTensor series_cumulant(const ParameterMatrix& A, const DiagonalCumulant& omega, int terms) {
    check_shapes(A, omega);
    if (terms < 1) throw InvalidArgument("series needs at least one term");
    const int p = A.p();
    SymmetricTensor out(omega.order, p);
    const auto& multisets = out.index().multisets();
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p, p);
    for (int L = 0; L < terms; ++L) {
        for (std::size_t c = 0; c < multisets.size(); ++c) {
            double sum = 0.0;
            for (int t = 0; t < p; ++t) {
                double prod = omega.w[t];
                for (int i : multisets[c]) prod *= power(i, t);
                sum += prod;
            }
            out.values()[c] += sum;
        }
        power = A.entries() * power;
    }
    return out;
}

int default_series_terms(const ParameterMatrix& A, const DiagonalCumulant& omega) {
    check_shapes(A, omega);
    const double rho = A.radius();
    const double norm = omega.w.cwiseAbs().maxCoeff();
    int terms = A.p() + 1;
    if (norm > 0.0 && rho > 0.0) {
        int L = 0;
        while (L < 500 && std::pow(rho, omega.order * L) * norm >= 1e-14) ++L;
        terms = std::max(terms, L + 1);
    }
    return std::min(terms, 500);
}

SymmetricTensor series_cumulant(const ParameterMatrix& A, const DiagonalCumulant& omega) {
    return series_cumulant(A, omega, default_series_terms(A, omega));
}

SymmetricTensor multilinear_image(const SymmetricTensor& T, const Eigen::MatrixXd& A) {
    if (A.rows() != T.p() || A.cols() != T.p()) throw DimensionMismatch("matrix must be p x p");
    return SymmetricTensor::from_dense(tucker_product(T.to_dense(), A));
}

SymmetricTensor doubling_cumulant(const ParameterMatrix& A, const DiagonalCumulant& omega) {
    check_shapes(A, omega);
    A.require_stable();
    SymmetricTensor X = omega.to_tensor();
    Eigen::MatrixXd B = A.entries();
    for (int step = 0; step < 64; ++step) {
        if (B.cwiseAbs().maxCoeff() == 0.0) break;
        SymmetricTensor inc = multilinear_image(X, B);
        double inc_max = 0.0;
        for (std::size_t k = 0; k < X.size(); ++k) {
            X.values()[k] += inc.values()[k];
            inc_max = std::max(inc_max, std::abs(inc.values()[k]));
        }
        if (inc_max <= 1e-16 * X.max_abs()) break;
        B = B * B;
    }
    return X;
}

double recursive_residual(const SymmetricTensor& T, const ParameterMatrix& A, const DiagonalCumulant& omega) {
    check_shapes(A, omega);
    if (T.order() != omega.order || T.p() != A.p()) throw DimensionMismatch("tensor shape differs from the model");
    const SymmetricTensor image = multilinear_image(T, A.entries());
    const SymmetricTensor W = omega.to_tensor();
    double r = 0.0;
    for (std::size_t k = 0; k < T.size(); ++k) {
        r = std::max(r, std::abs(T.values()[k] - image.values()[k] - W.values()[k]));
    }
    return r;
}

NoiseRecovery recover_noise(const SymmetricTensor& T, const Eigen::MatrixXd& A) {
    const SymmetricTensor image = multilinear_image(T, A);
    NoiseRecovery out;
    Eigen::VectorXd w(T.p());
    for (std::size_t k = 0; k < T.size(); ++k) {
        const double d = T.values()[k] - image.values()[k];
        if (T.is_diagonal_position(k)) {
            w[T.index().multiset(k).front()] = d;
        } else {
            out.offdiag_defect = std::max(out.offdiag_defect, std::abs(d));
        }
    }
    out.omega = DiagonalCumulant(T.order(), w);
    return out;
}

NoiseRecovery recover_noise(const SymmetricTensor& T, const ParameterMatrix& A) {
    if (T.p() != A.p()) throw DimensionMismatch("tensor dimension differs from the parameter matrix");
    return recover_noise(T, A.entries());
}

void CumulantStack::validate() const {
    if (S.order() != 2) throw DimensionMismatch("S must have order 2");
    if (T.order() != 3) throw DimensionMismatch("T must have order 3");
    if (T.p() != S.p()) throw DimensionMismatch("S and T dimensions differ");
    if (R) {
        if (R->order() != 4) throw DimensionMismatch("R must have order 4");
        if (R->p() != S.p()) throw DimensionMismatch("S and R dimensions differ");
    }
}

CumulantStack ModelPoint::forward(bool with_fourth) const {
    CumulantStack stack;
    stack.S = solve_cumulant(A, omega2);
    stack.T = solve_cumulant(A, omega3);
    if (with_fourth) stack.R = solve_cumulant(A, omega4);
    return stack;
}

ParameterMatrix sample_stable_matrix(const DirectedGraph& g, std::uint64_t seed, double target_radius) {
    if (!(target_radius > 0.0 && target_radius < 1.0)) throw InvalidArgument("target radius must lie in (0,1)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> magnitude(0.05, 1.0);
    std::bernoulli_distribution negative(0.5);
    std::vector<double> weights;
    bool diagonal_only = true;
    for (const Edge& e : g.edges()) {
        const double m = magnitude(rng);
        weights.push_back(negative(rng) ? -m : m);
        if (e.from != e.to) diagonal_only = false;
    }
    ParameterMatrix A = ParameterMatrix::from_edge_weights(g, weights);
    const double rho = A.radius();
    if (rho == 0.0) return A;
    if (diagonal_only && rho <= target_radius) return A;
    for (double& w : weights) w *= target_radius / rho;
    return ParameterMatrix::from_edge_weights(g, weights);
}

ModelPoint sample_model_point(const DirectedGraph& g, std::uint64_t seed, double target_radius, double noise_low,
                              double noise_high) {
    if (!(noise_low > 0.0 && noise_high >= noise_low)) throw InvalidArgument("noise range must be positive");
    ModelPoint m;
    m.A = sample_stable_matrix(g, seed, target_radius);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> magnitude(noise_low, noise_high);
    std::bernoulli_distribution negative(0.5);
    const int p = g.p();
    Eigen::VectorXd w2(p), w3(p), w4(p);
    for (int i = 0; i < p; ++i) {
        w2[i] = magnitude(rng);
        const double m3 = magnitude(rng);
        w3[i] = negative(rng) ? -m3 : m3;
        w4[i] = magnitude(rng);
    }
    m.omega2 = DiagonalCumulant(2, w2);
    m.omega3 = DiagonalCumulant(3, w3);
    m.omega4 = DiagonalCumulant(4, w4);
    return m;
}

DiagonalCumulant NoiseSpec::cumulant(int n) const {
    if (n < 2 || n > 4) throw InvalidArgument("noise cumulants are available for orders 2 to 4");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(scale.size());
    for (Eigen::Index i = 0; i < scale.size(); ++i) {
        const double c = scale[i];
        switch (kind) {
        case Kind::Zero:
            break;
        case Kind::Gaussian:
            w[i] = n == 2 ? c * c : 0.0;
            break;
        case Kind::CenteredExponential:
            // Cumulants of Exp(1) are (n-1)!.
            w[i] = std::tgamma(n) * std::pow(c, n);
            break;
        }
    }
    return DiagonalCumulant(n, w);
}

namespace {

// k-statistic of order 2 or 3 for every multiset over samples [begin, end).
std::vector<double> k_statistics(const std::vector<double>& x, int p, std::size_t begin, std::size_t end,
                                 const MultisetIndex& idx) {
    const std::size_t count = end - begin;
    const auto P = static_cast<std::size_t>(p);
    std::vector<double> mean(P, 0.0);
    for (std::size_t t = begin; t < end; ++t)
        for (std::size_t i = 0; i < P; ++i) mean[i] += x[t * P + i];
    for (double& m : mean) m /= static_cast<double>(count);

    const auto& multisets = idx.multisets();
    std::vector<double> moment(multisets.size(), 0.0);
    std::vector<double> centered(P);
    for (std::size_t t = begin; t < end; ++t) {
        for (std::size_t i = 0; i < P; ++i) centered[i] = x[t * P + i] - mean[i];
        for (std::size_t c = 0; c < multisets.size(); ++c) {
            double prod = 1.0;
            for (int i : multisets[c]) prod *= centered[static_cast<std::size_t>(i)];
            moment[c] += prod;
        }
    }
    const double N = static_cast<double>(count);
    const double factor = idx.order() == 2 ? 1.0 / (N - 1.0) : N / ((N - 1.0) * (N - 2.0));
    for (double& m : moment) m *= factor;
    return moment;
}

} // namespace

SimulationEstimate simulate_and_estimate(const ParameterMatrix& A, const NoiseSpec& noise, std::size_t t_max,
                                         std::size_t burn_in, int order, std::uint64_t seed, int batches) {
    A.require_stable();
    if (order != 2 && order != 3) throw InvalidArgument("simulation estimates orders 2 and 3");
    if (noise.scale.size() != A.p()) throw DimensionMismatch("noise dimension differs from the parameter matrix");
    if (batches < 2 || t_max < static_cast<std::size_t>(batches) * 3) throw InvalidArgument("too few samples");
    const int p = A.p();
    const auto P = static_cast<std::size_t>(p);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    auto draw = [&](std::size_t i) {
        const double c = noise.scale[static_cast<Eigen::Index>(i)];
        switch (noise.kind) {
        case NoiseSpec::Kind::Zero:
            return 0.0;
        case NoiseSpec::Kind::Gaussian:
            return c * gauss(rng);
        case NoiseSpec::Kind::CenteredExponential:
            return c * (expo(rng) - 1.0);
        }
        return 0.0;
    };

    std::vector<double> samples(t_max * P);
    std::vector<double> state(P, 0.0), next(P);
    const Eigen::MatrixXd& M = A.entries();
    for (std::size_t t = 0; t < burn_in + t_max; ++t) {
        for (std::size_t j = 0; j < P; ++j) {
            double v = draw(j);
            for (std::size_t i = 0; i < P; ++i) {
                v += M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) * state[i];
            }
            next[j] = v;
        }
        state.swap(next);
        if (t >= burn_in) std::copy(state.begin(), state.end(), samples.begin() + static_cast<std::ptrdiff_t>((t - burn_in) * P));
    }

    const auto idx = MultisetIndex::get(p, order);
    SimulationEstimate out;
    out.samples = t_max;
    out.batches = batches;
    out.estimate = SymmetricTensor(order, p);
    out.standard_error = SymmetricTensor(order, p);
    out.estimate.values() = k_statistics(samples, p, 0, t_max, *idx);

    const std::size_t batch_len = t_max / static_cast<std::size_t>(batches);
    std::vector<double> sum(idx->size(), 0.0), sum_sq(idx->size(), 0.0);
    for (int b = 0; b < batches; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * batch_len;
        const std::vector<double> kb = k_statistics(samples, p, begin, begin + batch_len, *idx);
        for (std::size_t c = 0; c < kb.size(); ++c) {
            sum[c] += kb[c];
            sum_sq[c] += kb[c] * kb[c];
        }
    }
    const double B = static_cast<double>(batches);
    for (std::size_t c = 0; c < idx->size(); ++c) {
        const double mean = sum[c] / B;
        const double var = std::max(0.0, (sum_sq[c] - B * mean * mean) / (B - 1.0));
        out.standard_error.values()[c] = std::sqrt(var / B);
    }
    return out;
}

} // namespace dlyap
