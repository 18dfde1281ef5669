// test_lyapunov.cpp - steady-state cumulants, k-mode products, noise recovery and simulation.
#include "dlyap/error.hpp"
#include "dlyap/fixtures.hpp"
#include "dlyap/lyapunov.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace dlyap;

namespace {

ParameterMatrix source_loop_point() {
    return ParameterMatrix::from_edge_weights(fixtures::source_loop_edge(), {0.5, 1.0});
}

DiagonalCumulant ones(int n, int p) { return DiagonalCumulant(n, Eigen::VectorXd::Ones(p)); }

Eigen::VectorXd random_vector(int p, std::uint64_t seed, double low, double high) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(low, high);
    Eigen::VectorXd v(p);
    for (int i = 0; i < p; ++i) v(i) = u(rng);
    return v;
}

DenseTensor random_dense(std::vector<int> dims, std::uint64_t seed) {
    DenseTensor T(std::move(dims));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& x : T.data) x = u(rng);
    return T;
}

} // namespace

TEST_CASE("spectral radius examples") {
    CHECK(spectral_radius(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
    CHECK(spectral_radius(Eigen::Vector2d(0.5, 0.5).asDiagonal().toDenseMatrix()) == doctest::Approx(0.5));
    std::vector<double> w;
    const auto path = fixtures::looped_path(4);
    for (const auto& e : path.edges()) w.push_back(e.from == e.to ? 0.5 : 1.0);
    const auto A = ParameterMatrix::from_edge_weights(path, w);
    CHECK(A.radius() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(A.is_stable());
}

TEST_CASE("parameter matrix rejects weights off the pattern and instability") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 1) = 0.3;  // edge 1->0 is absent from the source-loop edge
    CHECK_THROWS_AS(ParameterMatrix(fixtures::source_loop_edge(), A), InvalidArgument);
    const auto unstable = ParameterMatrix::from_edge_weights(fixtures::source_loop_edge(), {1.2, 1.0});
    CHECK_FALSE(unstable.is_stable());
    CHECK_THROWS_AS(unstable.require_stable(), Unstable);
    CHECK_THROWS_AS(solve_cumulant(unstable, ones(2, 2)), Unstable);
    CHECK(source_loop_point().weight(0, 1) == 1.0);
}

TEST_CASE("k-mode product with the identity returns the tensor") {
    const DenseTensor T = random_dense({3, 3, 3}, 1);
    for (int k = 0; k < 3; ++k) CHECK(k_mode_product(T, Eigen::MatrixXd::Identity(3, 3), k).data == T.data);
}

TEST_CASE("order-two k-mode products are matrix products") {
    const DenseTensor T = random_dense({3, 3}, 2);
    const Eigen::MatrixXd M = Eigen::MatrixXd::Random(2, 3);
    Eigen::MatrixXd Tm(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Tm(i, j) = T({i, j});
    const Eigen::MatrixXd left = M * Tm;
    const Eigen::MatrixXd right = Tm * M.transpose();
    const DenseTensor a = k_mode_product(T, M, 0);
    const DenseTensor b = k_mode_product(T, M, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(a({i, j}) == doctest::Approx(left(i, j)).epsilon(1e-14));
            CHECK(b({j, i}) == doctest::Approx(right(j, i)).epsilon(1e-14));
        }
}

TEST_CASE("k-mode product matches a direct triple loop") {
    const DenseTensor T = random_dense({2, 2, 2}, 3);
    const Eigen::MatrixXd M = Eigen::MatrixXd::Random(2, 2);
    for (int k = 0; k < 3; ++k) {
        const DenseTensor out = k_mode_product(T, M, k);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    double expected = 0.0;
                    for (int s = 0; s < 2; ++s) {
                        std::vector<int> idx{a, b, c};
                        const int row = idx[static_cast<std::size_t>(k)];
                        idx[static_cast<std::size_t>(k)] = s;
                        expected += M(row, s) * T(idx);
                    }
                    CHECK(out({a, b, c}) == doctest::Approx(expected).epsilon(1e-14));
                }
    }
    CHECK_THROWS_AS(k_mode_product(T, Eigen::MatrixXd::Zero(2, 3), 0), DimensionMismatch);
}

TEST_CASE("symmetric tensors expand to every permuted index") {
    SymmetricTensor T(3, 3);
    T.set({2, 0, 1}, 1.5);
    T.set({1, 1, 0}, -2.0);
    const DenseTensor D = T.to_dense();
    CHECK(D({0, 1, 2}) == 1.5);
    CHECK(D({1, 2, 0}) == 1.5);
    CHECK(D({0, 1, 1}) == -2.0);
    CHECK(D({1, 0, 1}) == -2.0);
    double defect = -1.0;
    const SymmetricTensor back = SymmetricTensor::from_dense(D, &defect);
    CHECK(defect == 0.0);
    CHECK(back.values() == T.values());
    CHECK(T.index().multisets().size() == 10);
    CHECK(index_key({0, 0, 1}) == "0,0,1");
}

TEST_CASE("covariance of the source-loop edge") {
    const SymmetricTensor S = solve_cumulant(source_loop_point(), ones(2, 2));
    CHECK(S({0, 0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
    CHECK(S({0, 1}) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(S({1, 1}) == doctest::Approx(7.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("zero parameter matrix returns the noise cumulant") {
    const auto A = ParameterMatrix(fixtures::two_node_both_loops(), Eigen::MatrixXd::Zero(2, 2));
    for (int n = 2; n <= 4; ++n) {
        const DiagonalCumulant w(n, Eigen::Vector2d(1.5, -0.5));
        const SymmetricTensor T = solve_cumulant(A, w);
        CHECK(max_abs_difference(T, w.to_tensor()) == 0.0);
        const auto rec = recover_noise(T, A);
        CHECK(rec.omega.w == w.w);
    }
}

TEST_CASE("covariance minor of the four-vertex independence example") {
    std::vector<double> w;
    const auto g = fixtures::ci_four_vertex();
    for (const auto& e : g.edges()) w.push_back(e.from == e.to ? 0.5 : 1.0);
    const SymmetricTensor S = solve_cumulant(ParameterMatrix::from_edge_weights(g, w), ones(2, 4));
    Eigen::Matrix2d M;
    M << S({1, 3}), S({1, 0}), S({0, 3}), S({0, 0});
    CHECK(M.determinant() == doctest::Approx(256.0 / 81.0).epsilon(1e-12));
}

TEST_CASE("solve agrees with the Kronecker oracle and the truncated series") {
    for (int p = 1; p <= 4; ++p)
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            const auto g = oracle::random_graph(p, seed * 13 + static_cast<std::uint64_t>(p), 0.4);
            const auto A = sample_stable_matrix(g, seed, 0.6);
            for (int n = 2; n <= 4; ++n) {
                const DiagonalCumulant w(n, random_vector(p, seed + 77, 0.5, 2.0));
                const auto sol = solve_cumulant_detailed(A, w);
                const double scale = sol.tensor.max_abs();
                CHECK(sol.symmetry_defect <= 1e-10 * scale);
                CHECK(max_abs_difference(sol.tensor, series_cumulant(A, w, 200)) <= 1e-10 * scale);
                CHECK(oracle::max_dense_gap(sol.tensor, oracle::kron_cumulant(A.entries(), w.w, n)) <= 1e-10 * scale);
                CHECK(max_abs_difference(sol.tensor, doubling_cumulant(A, w)) <= 1e-10 * scale);
                CHECK(recursive_residual(sol.tensor, A, w) <= 1e-12 * std::max(1.0, scale));
            }
        }
}

TEST_CASE("series with one term is the noise and converges with more terms") {
    const auto A = source_loop_point();
    const auto w = ones(2, 2);
    CHECK(max_abs_difference(series_cumulant(A, w, 1), w.to_tensor()) == 0.0);
    const SymmetricTensor exact = solve_cumulant(A, w);
    CHECK(max_abs_difference(series_cumulant(A, w, 200), exact) <= 1e-12 * exact.max_abs());
    double previous = 1e300;
    for (int L = 5; L <= 60; L += 5) {
        const double err = max_abs_difference(series_cumulant(A, w, L), exact);
        CHECK(err <= previous);
        previous = err;
    }
}

TEST_CASE("recursive residual responds linearly to a perturbation") {
    const auto A = source_loop_point();
    const auto w = ones(3, 2);
    SymmetricTensor T = solve_cumulant(A, w);
    CHECK(recursive_residual(w.to_tensor(), A, w) > 0.0);
    const double eps = 1e-6;
    for (std::size_t k = 0; k < T.size(); ++k) {
        SymmetricTensor bumped = T;
        bumped.values()[k] += eps;
        const double r = recursive_residual(bumped, A, w);
        CHECK(r >= 0.1 * eps);
        CHECK(r <= 10.0 * eps);
    }
}

TEST_CASE("noise recovery inverts the solve") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = fixtures::random_dag_all_loops(4, seed, 0.5);
        const auto A = sample_stable_matrix(g, seed, 0.6);
        for (int n = 2; n <= 4; ++n) {
            const DiagonalCumulant w(n, random_vector(4, seed, 0.5, 2.0));
            const auto rec = recover_noise(solve_cumulant(A, w), A);
            CHECK((rec.omega.w - w.w).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK(rec.offdiag_defect <= 1e-10);
        }
    }
}

TEST_CASE("noise recovery with a wrong matrix leaves an off-diagonal defect") {
    const auto g = DirectedGraph(3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto A = sample_stable_matrix(g, seed, 0.6);
        const auto wrong = sample_stable_matrix(g, seed + 1000, 0.6);
        const auto rec = recover_noise(solve_cumulant(A, ones(3, 3)), wrong);
        CHECK(rec.offdiag_defect > 1e-6);
    }
}

TEST_CASE("negating the matrix keeps the covariance and flips the third cumulant") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto g = fixtures::random_dag_all_loops(4, seed + 40, 0.5);
        const auto A = sample_stable_matrix(g, seed, 0.6);
        const ParameterMatrix neg(g, -A.entries());
        const auto w2 = ones(2, 4);
        const auto w3 = DiagonalCumulant(3, random_vector(4, seed, 0.5, 2.0));
        CHECK(max_abs_difference(solve_cumulant(A, w2), solve_cumulant(neg, w2)) <= 1e-12);
        const SymmetricTensor S = solve_cumulant(A, w2);
        Eigen::MatrixXd Sm(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) Sm(i, j) = S({i, j});
        CHECK((A.entries() * Sm * A.entries().transpose() + Eigen::MatrixXd(w2.w.asDiagonal()) - Sm).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(max_abs_difference(solve_cumulant(A, w3), solve_cumulant(neg, w3)) > 0.0);
    }
}

TEST_CASE("negating a diagonal parameter matrix flips the sign of every third cumulant") {
    const auto g = fixtures::loops_only(3);
    const auto A = sample_stable_matrix(g, 5, 0.6);
    const ParameterMatrix neg(g, -A.entries());
    const DiagonalCumulant w3(3, Eigen::Vector3d(1.0, -0.7, 0.4));
    const SymmetricTensor T = solve_cumulant(A, w3);
    const SymmetricTensor U = solve_cumulant(neg, w3);
    // w / (1 - a^3) versus w / (1 + a^3)
    for (int i = 0; i < 3; ++i) {
        const double a = A.entries()(i, i);
        CHECK(T({i, i, i}) == doctest::Approx(w3.w(i) / (1.0 - a * a * a)).epsilon(1e-13));
        CHECK(U({i, i, i}) == doctest::Approx(w3.w(i) / (1.0 + a * a * a)).epsilon(1e-13));
    }
}

TEST_CASE("stable matrix sampler respects pattern, determinism and radius") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto g = oracle::random_graph(5, seed + 3000, 0.3);
        const auto A = sample_stable_matrix(g, seed, 0.6);
        const auto B = sample_stable_matrix(g, seed, 0.6);
        CHECK(A.entries() == B.entries());
        CHECK(A.is_stable());
        CHECK(spectral_radius(A.entries()) <= 0.6 + 1e-8);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                if (!g.has_edge(i, j)) CHECK(A.weight(i, j) == 0.0);
        if (!g.is_dag()) CHECK(A.radius() == doctest::Approx(0.6).epsilon(1e-9));
    }
    const auto diag = sample_stable_matrix(fixtures::loops_only(3), 1, 0.6);
    CHECK(diag.radius() <= 0.6 + 1e-12);
    const auto nilpotent = sample_stable_matrix(fixtures::star(4), 2, 0.6);
    CHECK(nilpotent.radius() == 0.0);
    for (int v = 1; v <= 4; ++v) {
        CHECK(std::abs(nilpotent.weight(0, v)) >= 0.05);
        CHECK(std::abs(nilpotent.weight(0, v)) <= 1.0);
    }
    CHECK_THROWS_AS(sample_stable_matrix(fixtures::star(2), 0, 1.2), InvalidArgument);
}

TEST_CASE("model point draws positive even-order noise and nonzero third-order noise") {
    const auto mp = sample_model_point(fixtures::diamond(), 9);
    for (int i = 0; i < 4; ++i) {
        CHECK(mp.omega2.w(i) > 0.0);
        CHECK(mp.omega4.w(i) > 0.0);
        CHECK(mp.omega3.w(i) != 0.0);
    }
    const auto stack = mp.forward(true);
    REQUIRE(stack.R.has_value());
    CHECK(stack.R->order() == 4);
    CHECK(recursive_residual(stack.T, mp.A, mp.omega3) <= 1e-12 * std::max(1.0, stack.T.max_abs()));
}

TEST_CASE("noise spec cumulants") {
    NoiseSpec exp_noise{NoiseSpec::Kind::CenteredExponential, Eigen::Vector2d(1.0, 2.0)};
    CHECK(exp_noise.cumulant(2).w(1) == doctest::Approx(4.0));
    CHECK(exp_noise.cumulant(3).w(1) == doctest::Approx(16.0));
    CHECK(exp_noise.cumulant(4).w(0) == doctest::Approx(6.0));
    NoiseSpec gauss{NoiseSpec::Kind::Gaussian, Eigen::Vector2d(1.0, 3.0)};
    CHECK(gauss.cumulant(2).w(1) == doctest::Approx(9.0));
    CHECK(gauss.cumulant(3).w.isZero());
}

TEST_CASE("simulation with zero noise gives zero cumulants") {
    const NoiseSpec zero{NoiseSpec::Kind::Zero, Eigen::Vector2d::Ones()};
    const auto est = simulate_and_estimate(source_loop_point(), zero, 20000, 100, 2, 1);
    CHECK(est.estimate.max_abs() == 0.0);
}

TEST_CASE("simulation with Gaussian noise matches the covariance and has no third cumulant") {
    const NoiseSpec gauss{NoiseSpec::Kind::Gaussian, Eigen::Vector2d::Ones()};
    const auto A = source_loop_point();
    const auto cov = simulate_and_estimate(A, gauss, 400000, 1000, 2, 11);
    const SymmetricTensor S = solve_cumulant(A, gauss.cumulant(2));
    for (std::size_t k = 0; k < S.size(); ++k)
        CHECK(std::abs(cov.estimate.values()[k] - S.values()[k]) <= 4.0 * cov.standard_error.values()[k]);
    const auto third = simulate_and_estimate(A, gauss, 400000, 1000, 3, 12);
    for (std::size_t k = 0; k < third.estimate.size(); ++k)
        CHECK(std::abs(third.estimate.values()[k]) <= 4.0 * third.standard_error.values()[k]);
}
