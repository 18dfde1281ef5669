// test_jacobian.cpp - modified Jacobian entries, ranks and local identifiability verdicts.
#include "dlyap/error.hpp"
#include "dlyap/fixtures.hpp"
#include "dlyap/jacobian.hpp"
#include "dlyap/lyapunov.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace dlyap;

namespace {

std::map<int, DiagonalCumulant> noise_map(const ModelPoint& mp) {
    return {{2, mp.omega2}, {3, mp.omega3}, {4, mp.omega4}};
}

std::map<int, DiagonalCumulant> unit_noise(int p) {
    std::map<int, DiagonalCumulant> out;
    for (int n = 2; n <= 4; ++n) out.emplace(n, DiagonalCumulant(n, Eigen::VectorXd::Ones(p)));
    return out;
}

// (I - A^{⊗n}) times the central difference of vec(T_n) in the weight of edge col.
Eigen::VectorXd premultiplied_difference(const ParameterMatrix& A, const DiagonalCumulant& w, const Edge& col, double h) {
    Eigen::MatrixXd plus = A.entries(), minus = A.entries();
    plus(col.to, col.from) += h;
    minus(col.to, col.from) -= h;
    const int n = w.order;
    const Eigen::VectorXd dp = oracle::kron_cumulant(plus, w.w, n);
    const Eigen::VectorXd dm = oracle::kron_cumulant(minus, w.w, n);
    const Eigen::VectorXd d = (dp - dm) / (2.0 * h);
    const Eigen::MatrixXd K = oracle::kron_power(A.entries(), n);
    return d - K * d;
}

int rank_of(const Eigen::MatrixXd& M) { return numeric_rank(M).rank; }

} // namespace

TEST_CASE("second-order entries match premultiplied finite differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = oracle::random_graph(3, seed + 70, 0.5);
        const auto mp = sample_model_point(g, seed, 0.6);
        const SymmetricTensor S = solve_cumulant(mp.A, mp.omega2);
        for (const Edge& col : g.edges()) {
            const Eigen::VectorXd fd = premultiplied_difference(mp.A, mp.omega2, col, 1e-6);
            const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    CHECK(std::abs(j2_entry(mp.A.entries(), S, i, j, col) - fd(i * 3 + j)) <= 1e-5 * scale);
        }
    }
}

TEST_CASE("third-order entries match premultiplied finite differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = oracle::random_graph(3, seed + 170, 0.5);
        const auto mp = sample_model_point(g, seed, 0.6);
        const SymmetricTensor T = solve_cumulant(mp.A, mp.omega3);
        for (const Edge& col : g.edges()) {
            const Eigen::VectorXd fd = premultiplied_difference(mp.A, mp.omega3, col, 1e-6);
            const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        CHECK(std::abs(j3_entry(mp.A.entries(), T, i, j, k, col) - fd(i * 9 + j * 3 + k)) <= 1e-5 * scale);
        }
    }
}

TEST_CASE("assembled Jacobian rows agree with the entry formulas, including order four") {
    const auto g = fixtures::two_cycle_both_loops();
    const auto mp = sample_model_point(g, 12, 0.6);
    JacobianOptions opt;
    opt.orders = {2, 3, 4};
    const auto mj = build_modified_jacobian(mp.A, noise_map(mp), opt);
    const SymmetricTensor S = solve_cumulant(mp.A, mp.omega2);
    const SymmetricTensor T = solve_cumulant(mp.A, mp.omega3);
    for (std::size_t r = 0; r < mj.rows.size(); ++r) {
        const auto& row = mj.rows[r];
        for (std::size_t c = 0; c < mj.num_edges; ++c) {
            const Edge& e = mj.columns[c].edge;
            const double v = mj.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (row.order == 2) CHECK(v == doctest::Approx(j2_entry(mp.A.entries(), S, row.index[0], row.index[1], e)).epsilon(1e-10).scale(1.0));
            if (row.order == 3)
                CHECK(v == doctest::Approx(j3_entry(mp.A.entries(), T, row.index[0], row.index[1], row.index[2], e)).epsilon(1e-10).scale(1.0));
            if (row.order == 4) {
                const Eigen::VectorXd fd = premultiplied_difference(mp.A, mp.omega4, e, 1e-6);
                CHECK(std::abs(v - fd(static_cast<Eigen::Index>(oracle::dense_position(row.index, 2)))) <= 1e-5 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
            }
        }
    }
}

TEST_CASE("diagonal parameter matrices give the collapsed entry pattern") {
    const auto g = DirectedGraph(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}});
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
    A.diagonal() << 0.5, -0.4, 0.3;
    const ParameterMatrix pm(g, A);
    const DiagonalCumulant w2(2, Eigen::Vector3d(1.0, 2.0, 0.5));
    const DiagonalCumulant w3(3, Eigen::Vector3d(1.0, -2.0, 0.5));
    const SymmetricTensor S = solve_cumulant(pm, w2);
    const SymmetricTensor T = solve_cumulant(pm, w3);
    for (const Edge& col : g.edges())
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double v = j2_entry(A, S, i, j, col);
                double expected = 0.0;
                if (j == col.to) expected += A(i, i) * S({i, col.from}) * (i == col.from ? 1.0 : 0.0);
                if (i == col.to) expected += A(j, j) * S({j, col.from}) * (j == col.from ? 1.0 : 0.0);
                CHECK(v == doctest::Approx(expected).scale(1.0));
                for (int k = 0; k < 3; ++k) {
                    const double u = j3_entry(A, T, i, j, k, col);
                    if (col.to != i && col.to != j && col.to != k) CHECK(u == 0.0);
                }
            }
    // rows (l,l,m) against the edge l -> m
    CHECK(j3_entry(A, T, 0, 0, 1, {0, 1}) == doctest::Approx(A(0, 0) * A(0, 0) * T({0, 0, 0})));
    CHECK(j3_entry(A, T, 1, 1, 2, {1, 2}) == doctest::Approx(A(1, 1) * A(1, 1) * T({1, 1, 1})));
}

TEST_CASE("column and row bookkeeping") {
    const auto g = fixtures::two_cycle_both_loops();
    const auto mj = build_modified_jacobian(sample_stable_matrix(g, 1, 0.6), unit_noise(2));
    CHECK(mj.columns.size() == 8);
    CHECK(mj.num_edges == 4);
    CHECK(mj.num_omega_columns() == 4);
    CHECK(mj.rows_of_order(2) == 3);
    CHECK(mj.rows_of_order(3) == 4);
    CHECK(mj.offdiag_block().rows() == 3);
    CHECK(mj.offdiag_block().cols() == 4);
}

TEST_CASE("loops-only graph has an all-zero off-diagonal block") {
    const auto g = fixtures::loops_only(3);
    const auto mj = build_modified_jacobian(sample_stable_matrix(g, 2, 0.6), unit_noise(3));
    CHECK(mj.offdiag_block().cwiseAbs().maxCoeff() == 0.0);
    CHECK(offdiag_rank(mj).rank == 0);
}

TEST_CASE("two-node fixtures at the half-unit point have full-rank three-by-three minors") {
    Eigen::MatrixXd A(2, 2);
    A << 0.5, 0.0, 1.0, 0.5;
    for (const auto& g : {fixtures::two_node_both_loops(), fixtures::two_cycle_both_loops()}) {
        const auto mj = build_modified_jacobian(ParameterMatrix(g, A), unit_noise(2));
        const Eigen::MatrixXd off = mj.offdiag_block();
        REQUIRE(off.rows() == 3);
        const int m = static_cast<int>(off.cols());
        int minors = 0;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                for (int c = b + 1; c < m; ++c) {
                    Eigen::MatrixXd sub(3, 3);
                    sub << off.col(a), off.col(b), off.col(c);
                    CHECK(rank_of(sub) == 3);
                    CHECK(std::abs(sub.determinant()) > 1e-8);
                    ++minors;
                }
        CHECK(minors == (m == 3 ? 1 : 4));
    }
}

TEST_CASE("full rank equals omega columns plus the off-diagonal rank") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const int p = 2 + static_cast<int>(seed % 3);
        const auto g = oracle::random_graph(p, seed + 2000, 0.45);
        const auto mp = sample_model_point(g, seed, 0.6);
        JacobianOptions opt;
        opt.orders = seed % 2 ? std::vector<int>{2, 3} : std::vector<int>{2, 3, 4};
        const auto mj = build_modified_jacobian(mp.A, noise_map(mp), opt);
        const int full = rank_of(mj.matrix);
        const int off = offdiag_rank(mj).rank;
        CHECK(full == static_cast<int>(opt.orders.size()) * p + off);
    }
}

TEST_CASE("adding orders never lowers the off-diagonal rank") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = oracle::random_graph(3, seed + 4000, 0.5);
        const auto mp = sample_model_point(g, seed, 0.6);
        int previous = -1;
        for (const auto& orders : {std::vector<int>{2}, std::vector<int>{2, 3}, std::vector<int>{2, 3, 4}}) {
            JacobianOptions opt;
            opt.orders = orders;
            const int r = offdiag_rank(build_modified_jacobian(mp.A, noise_map(mp), opt)).rank;
            CHECK(r >= previous);
            previous = r;
        }
    }
}

TEST_CASE("two-cycle with loops is deficient at orders two and three and repaired by fourth-order rows") {
    const auto g = fixtures::two_cycle_both_loops();
    CHECK(two_cycle_components(g) == std::vector<std::pair<int, int>>{{0, 1}});
    const auto mp = sample_model_point(g, 5, 0.6);
    const auto plain = build_modified_jacobian(mp.A, noise_map(mp));
    CHECK(offdiag_rank(plain).rank == 3);
    JacobianOptions opt;
    opt.fourth_order_augmentation = true;
    const auto aug = build_modified_jacobian(mp.A, noise_map(mp), opt);
    CHECK(aug.augmented);
    CHECK(aug.rows.size() == plain.rows.size() + 3);
    CHECK(aug.num_omega_columns() == plain.num_omega_columns() + 2);
    CHECK(offdiag_rank(aug).rank == 4);
    CHECK(rank_of(aug.matrix) == static_cast<int>(aug.columns.size()));

    VerdictOptions vo;
    const auto rep = local_identifiability_verdict(g, 6, 9, vo);
    CHECK(rep.locally_identifiable);
    CHECK(rep.augmented);
    CHECK(rep.verdict == "locally identifiable");
    vo.allow_augmentation = false;
    const auto bare = local_identifiability_verdict(g, 6, 9, vo);
    CHECK_FALSE(bare.locally_identifiable);
    CHECK(bare.deficiency == 1);
}

TEST_CASE("verdicts on named fixtures") {
    const auto ci = local_identifiability_verdict(fixtures::ci_four_vertex(), 5, 1);
    CHECK(ci.locally_identifiable);
    CHECK(ci.generic_rank == 7);
    CHECK_FALSE(ci.augmented);

    const auto single = local_identifiability_verdict(fixtures::loops_only(1), 3, 1);
    CHECK_FALSE(single.locally_identifiable);
    CHECK(single.structural);
    CHECK(single.verdict == "not locally identifiable");

    VerdictOptions vo;
    vo.orders = {2, 3, 4};
    vo.allow_augmentation = false;
    const auto diamond = local_identifiability_verdict(fixtures::diamond(), 8, 3, vo);
    CHECK_FALSE(diamond.locally_identifiable);
    CHECK(diamond.deficiency == 1);
    CHECK(diamond.generic_rank == 4);
}

TEST_CASE("verdicts do not depend on the thread count") {
    VerdictOptions one, many;
    many.threads = 3;
    const auto a = local_identifiability_verdict(fixtures::five_node_two_paths(), 6, 21, one);
    const auto b = local_identifiability_verdict(fixtures::five_node_two_paths(), 6, 21, many);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t k = 0; k < a.trials.size(); ++k) {
        CHECK(a.trials[k].seed == b.trials[k].seed);
        CHECK(a.trials[k].rank == b.trials[k].rank);
        CHECK(a.trials[k].sigma_min == b.trials[k].sigma_min);
    }
    CHECK(a.verdict == b.verdict);
}

TEST_CASE("a bridge between two looped components leaves exact zero blocks") {
    // component {0,1,2} feeds component {3,4,5} through the single edge 2 -> 3
    const DirectedGraph g(6, {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}, {0, 1}, {1, 2}, {2, 0},
                              {3, 4}, {4, 5}, {5, 4}, {2, 3}});
    const auto mp = sample_model_point(g, 8, 0.6);
    const auto mj = build_modified_jacobian(mp.A, noise_map(mp));
    int zeros = 0;
    for (std::size_t r = 0; r < mj.rows.size(); ++r) {
        const auto& idx = mj.rows[r].index;
        const bool upstream_row = std::all_of(idx.begin(), idx.end(), [](int v) { return v <= 2; });
        if (!upstream_row) continue;
        for (std::size_t c = 0; c < mj.num_edges; ++c) {
            if (mj.columns[c].edge.to <= 2) continue;
            CHECK(mj.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) == 0.0);
            ++zeros;
        }
    }
    CHECK(zeros > 0);
    CHECK(local_identifiability_verdict(g, 4, 2).locally_identifiable);
}

TEST_CASE("full-rank sweep over connected looped classes on three vertices") {
    const auto classes = fixtures::connected_all_loop_classes(3);
    CHECK(classes.size() == 13);
    const auto sweep = full_rank_sweep(classes, 5, 1);
    CHECK(sweep.graphs == 13);
    CHECK(sweep.evaluations == 65);
    CHECK(sweep.deficient.empty());
    CHECK(sweep.non_unanimous.empty());
    CHECK(sweep.min_gap > 0.0);
}
