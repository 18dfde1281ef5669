// test_constraints.cpp - toric tree matrices, vanishing polynomials, tree equivalence and rank constraints.
#include "dlyap/constraints.hpp"
#include "dlyap/error.hpp"
#include "dlyap/fixtures.hpp"
#include "dlyap/linalg.hpp"
#include "dlyap/lyapunov.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

using namespace dlyap;

namespace {

// Order-3 exponent matrix of the four-vertex tree 0->1, 1->2, 1->3 (loop at 0), frozen by hand
// from the shortest-equitrek rule. Rows: v2_0..v2_3, v3_0..v3_3, a00, a10, a21, a31.
// Columns: s00 s01 s02 s03 s11 s12 s13 s22 s23 s33, then t000..t333 lexicographic.
const IntMatrix four_vertex_tree_display = {
    {1, 1, 1, 1, 0, 1, 1, 0, 1, 0, /**/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 1, 0, 0, 0, 1, 0, /**/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 1, 0, 0, /**/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, /**/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, /**/ 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, /**/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, /**/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, /**/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1},
    {0, 1, 2, 2, 0, 1, 1, 0, 0, 0, /**/ 0, 2, 4, 4, 1, 3, 3, 2, 2, 2, 0, 2, 2, 1, 1, 1, 0, 0, 0, 0},
    {0, 1, 1, 1, 0, 2, 2, 0, 0, 0, /**/ 0, 1, 1, 1, 2, 2, 2, 2, 2, 2, 0, 3, 3, 3, 3, 3, 0, 0, 0, 0},
    {0, 0, 1, 0, 0, 1, 0, 0, 1, 0, /**/ 0, 0, 1, 0, 0, 1, 0, 2, 1, 0, 0, 1, 0, 2, 1, 0, 0, 2, 1, 0},
    {0, 0, 0, 1, 0, 0, 1, 0, 1, 0, /**/ 0, 0, 0, 1, 0, 0, 1, 0, 1, 2, 0, 0, 1, 0, 1, 2, 0, 1, 2, 0},
};

// Column of s23. The frozen rows above carry a stray 1 in row v2_0 here; the shortest
// (2,3)-equitrek is topped by vertex 1, so only v2_1 belongs in this column.
constexpr std::size_t s23_column = 8;

std::map<int, DiagonalCumulant> noise_map(const ModelPoint& mp) {
    return {{2, mp.omega2}, {3, mp.omega3}, {4, mp.omega4}};
}

std::size_t column_of(const ToricMatrix& P, const std::string& label) {
    const auto it = std::find(P.column_labels.begin(), P.column_labels.end(), label);
    REQUIRE_MESSAGE(it != P.column_labels.end(), label);
    return static_cast<std::size_t>(it - P.column_labels.begin());
}

std::string label(std::vector<int> idx, int p) {
    std::sort(idx.begin(), idx.end());
    return cumulant_label(idx, p);
}

// Binomial x^plus - x^minus with cancellation of shared factors.
Binomial binomial_from(const ToricMatrix& P, const std::vector<std::vector<int>>& plus,
                       const std::vector<std::vector<int>>& minus) {
    std::map<std::size_t, long> net;
    for (const auto& m : plus) ++net[column_of(P, label(m, P.p))];
    for (const auto& m : minus) --net[column_of(P, label(m, P.p))];
    Binomial b;
    for (const auto& [c, e] : net) {
        if (e > 0) b.plus.emplace_back(c, e);
        if (e < 0) b.minus.emplace_back(c, -e);
    }
    return b;
}

// Breadth-first depths from the unique looped source.
std::vector<int> bfs_depths(const DirectedGraph& g, int source) {
    std::vector<int> d(static_cast<std::size_t>(g.p()), -1);
    std::queue<int> q;
    d[static_cast<std::size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (const Edge& e : g.edges())
            if (e.from == v && e.to != v && d[static_cast<std::size_t>(e.to)] < 0) {
                d[static_cast<std::size_t>(e.to)] = d[static_cast<std::size_t>(v)] + 1;
                q.push(e.to);
            }
    }
    return d;
}

DirectedGraph tree_from_parents(const std::vector<int>& parent) {
    std::vector<Edge> edges{{0, 0}};
    for (std::size_t v = 1; v < parent.size(); ++v) edges.push_back({parent[v], static_cast<int>(v)});
    return DirectedGraph(static_cast<int>(parent.size()), edges);
}

// All trees on {0..p-1} rooted at 0 with a loop at the root.
std::vector<DirectedGraph> all_rooted_trees(int p) {
    std::vector<DirectedGraph> out;
    std::vector<int> parent(static_cast<std::size_t>(p), 0);
    const long total = static_cast<long>(std::pow(p, p - 1));
    for (long code = 0; code < total; ++code) {
        long c = code;
        bool ok = true;
        for (int v = 1; v < p; ++v) {
            parent[static_cast<std::size_t>(v)] = static_cast<int>(c % p);
            c /= p;
            if (parent[static_cast<std::size_t>(v)] == v) ok = false;
        }
        if (!ok) continue;
        for (int v = 1; v < p && ok; ++v) {
            int u = v;
            for (int steps = 0; u != 0 && steps <= p; ++steps) u = parent[static_cast<std::size_t>(u)];
            if (u != 0) ok = false;
        }
        if (ok) out.push_back(tree_from_parents(parent));
    }
    return out;
}

double max_minor(const Eigen::MatrixXd& M, int size) {
    double worst = 0.0;
    const double scale = M.cwiseAbs().maxCoeff();
    std::vector<bool> rsel(static_cast<std::size_t>(M.rows()), false), csel(static_cast<std::size_t>(M.cols()), false);
    std::fill(rsel.begin(), rsel.begin() + size, true);
    do {
        std::fill(csel.begin(), csel.end(), false);
        std::fill(csel.begin(), csel.begin() + size, true);
        do {
            Eigen::MatrixXd sub(size, size);
            int a = 0;
            for (Eigen::Index r = 0; r < M.rows(); ++r) {
                if (!rsel[static_cast<std::size_t>(r)]) continue;
                int b = 0;
                for (Eigen::Index c = 0; c < M.cols(); ++c)
                    if (csel[static_cast<std::size_t>(c)]) sub(a, b++) = M(r, c);
                ++a;
            }
            worst = std::max(worst, std::abs(sub.determinant()) / std::pow(scale, size));
        } while (std::prev_permutation(csel.begin(), csel.end()));
    } while (std::prev_permutation(rsel.begin(), rsel.end()));
    return worst;
}

} // namespace

TEST_CASE("cumulant labels") {
    CHECK(cumulant_label({0, 1}, 4) == "s01");
    CHECK(cumulant_label({0, 0, 1}, 4) == "t001");
    CHECK(cumulant_label({0, 1, 2, 3}, 4) == "r0123");
    CHECK(cumulant_label({3, 11}, 12) == "s3,11");
}

TEST_CASE("four-vertex tree exponent matrix at order three") {
    const ToricMatrix P = toric_matrix(fixtures::four_vertex_tree(), 3);
    REQUIRE(P.num_rows() == 12);
    REQUIRE(P.num_cols() == 30);
    CHECK(P.row_labels == std::vector<std::string>{"v2_0", "v2_1", "v2_2", "v2_3", "v3_0", "v3_1", "v3_2", "v3_3",
                                                   "a00", "a10", "a21", "a31"});
    CHECK(P.column_labels.front() == "s00");
    CHECK(P.column_labels[s23_column] == "s23");
    CHECK(P.column_labels[10] == "t000");
    CHECK(P.column_labels.back() == "t333");

    for (std::size_t r = 0; r < 12; ++r)
        for (std::size_t c = 0; c < 30; ++c) {
            if (c == s23_column && r == 0) continue;
            CHECK_MESSAGE(P.entries[r][c] == four_vertex_tree_display[r][c],
                          P.row_labels[r] << " / " << P.column_labels[c]);
        }
    // s23 = v2_1 * a21 * a31: the two leaves meet at vertex 1.
    CHECK(P.entries[0][s23_column] == 0);
    CHECK(four_vertex_tree_display[0][s23_column] == 1);
    CHECK(shortest_equitrek_top(fixtures::four_vertex_tree(), {2, 3}) == 1);
}

TEST_CASE("single edge exponent matrix at order two") {
    const ToricMatrix P = toric_matrix(fixtures::source_loop_edge(), 2);
    const IntMatrix expected = {{1, 1, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 0}};
    CHECK(P.column_labels == std::vector<std::string>{"s00", "s01", "s11"});
    CHECK(P.row_labels == std::vector<std::string>{"v2_0", "v2_1", "a00", "a10"});
    CHECK(P.entries == expected);
}

TEST_CASE("level partitions") {
    CHECK(level_partition(fixtures::five_node_tree()) == std::vector<std::vector<int>>{{0}, {1, 2}, {3, 4}});
    CHECK(level_partition(fixtures::four_vertex_tree()) == std::vector<std::vector<int>>{{0}, {1}, {2, 3}});
    CHECK(level_partition(DirectedGraph(1, {{0, 0}})) == std::vector<std::vector<int>>{{0}});
    const DirectedGraph path4(4, {{0, 0}, {0, 1}, {1, 2}, {2, 3}});
    CHECK(level_partition(path4) == std::vector<std::vector<int>>{{0}, {1}, {2}, {3}});
}

TEST_CASE("shortest equitrek tops") {
    const DirectedGraph g = fixtures::five_node_tree();
    CHECK(shortest_equitrek_top(g, {3, 4}) == 2);
    CHECK(shortest_equitrek_top(g, {1, 2}) == 0);
    CHECK(shortest_equitrek_top(g, {1, 3}) == 0);
    CHECK(shortest_equitrek_top(g, {3, 3}) == 3);
    CHECK(shortest_equitrek_top(g, {2, 3, 4}) == 0);
    CHECK(shortest_equitrek_top(g, {1, 3, 4}) == 0);
}

TEST_CASE("toric monomials reproduce the cumulants of random trees") {
    for (int p = 1; p <= 5; ++p)
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            const DirectedGraph g = fixtures::random_rooted_tree(p, seed);
            const ModelPoint mp = sample_model_point(g, seed * 31 + static_cast<std::uint64_t>(p));
            const CumulantStack stack = mp.forward(false);
            for (int n = 2; n <= 3; ++n) {
                const ToricMatrix P = toric_matrix(g, n);
                const auto monomials = evaluate_toric_monomials(P, toric_parameter_values(mp.A, noise_map(mp), n));
                const auto truth = stack_column_values(P, stack);
                REQUIRE(monomials.size() == truth.size());
                for (std::size_t c = 0; c < truth.size(); ++c)
                    CHECK_MESSAGE(std::abs(monomials[c] - truth[c]) <= 1e-10 * std::max(1.0, std::abs(truth[c])),
                                  g.describe() << " " << P.column_labels[c]);
            }
        }
}

TEST_CASE("toric monomials at order four") {
    const DirectedGraph g = fixtures::five_node_tree();
    const ModelPoint mp = sample_model_point(g, 77);
    const CumulantStack stack = mp.forward(true);
    const ToricMatrix P = toric_matrix(g, 4);
    const auto monomials = evaluate_toric_monomials(P, toric_parameter_values(mp.A, noise_map(mp), 4));
    const auto truth = stack_column_values(P, stack);
    for (std::size_t c = 0; c < truth.size(); ++c)
        CHECK(std::abs(monomials[c] - truth[c]) <= 1e-10 * std::max(1.0, std::abs(truth[c])));
}

TEST_CASE("kernel binomials vanish on model points") {
    for (const auto& g : {fixtures::four_vertex_tree(), fixtures::source_loop_edge(), fixtures::two_children()}) {
        const ToricMatrix P = toric_matrix(g, 3);
        const auto basis = kernel_binomials(P);
        CHECK(static_cast<long>(basis.size()) == static_cast<long>(P.num_cols()) - exact_rank(P.entries));
        for (const auto& b : basis) CHECK(binomial_in_lattice(P, b));
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const ModelPoint mp = sample_model_point(g, seed);
            const auto values = stack_column_values(P, mp.forward(false));
            for (const auto& b : basis) CHECK_MESSAGE(b.relative_value(values) <= 1e-9, b.to_string(P));
        }
    }
}

TEST_CASE("two-node generator lies in the lattice") {
    const ToricMatrix P = toric_matrix(fixtures::source_loop_edge(), 3);
    const Binomial gen = binomial_from(P, {{0, 1}, {0, 1}, {0, 1}, {0, 0, 0}, {0, 0, 0}},
                                       {{0, 0}, {0, 0}, {0, 0}, {0, 0, 1}, {0, 1, 1}});
    CHECK(binomial_in_lattice(P, gen));
    const Binomial wrong = binomial_from(P, {{0, 1}}, {{0, 0}});
    CHECK_FALSE(binomial_in_lattice(P, wrong));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const ModelPoint mp = sample_model_point(fixtures::source_loop_edge(), seed);
        const auto values = stack_column_values(P, mp.forward(false));
        CHECK(gen.relative_value(values) <= 1e-9);
        CHECK(wrong.relative_value(values) >= 1e-6);
    }
}

TEST_CASE("level polynomials vanish exactly where the level structure predicts") {
    for (const auto& g : {fixtures::four_vertex_tree(), fixtures::five_node_tree()}) {
        const auto depth = bfs_depths(g, 0);
        const ToricMatrix P = toric_matrix(g, 3);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const CumulantStack stack = sample_model_point(g, seed).forward(false);
            const auto checks = level_polynomial_checks(g, stack);
            REQUIRE_FALSE(checks.empty());
            for (const auto& c : checks) {
                CHECK_MESSAGE(c.consistent, c.id << " rel=" << c.relative_value);
                int i = -1, j = -1;
                const auto open = c.id.find('[');
                REQUIRE(open != std::string::npos);
                REQUIRE(std::sscanf(c.id.c_str() + open, "[%d,%d]", &i, &j) == 2);
                const std::string family = c.id.substr(0, open);
                const int di = depth[static_cast<std::size_t>(i)];
                const int dj = depth[static_cast<std::size_t>(j)];
                if (family == "source") {
                    CHECK(c.expected_zero == (i == 0 || i == j));
                } else if (family == "same-level") {
                    CHECK(c.expected_zero == (di == dj));
                    if (seed == 1) {
                        const Binomial b = binomial_from(P, {{0, i}, {0, 0, j}}, {{0, j}, {0, 0, i}});
                        CHECK(binomial_in_lattice(P, b) == (di == dj));
                    }
                } else if (family == "cross-level") {
                    CHECK(di != dj);
                    CHECK(c.expected_zero == (dj > di));
                    if (seed == 1) {
                        const Binomial b = binomial_from(P, {{i, j}, {0, 0, j}}, {{0, j}, {0, i, j}});
                        CHECK(binomial_in_lattice(P, b) == (dj > di));
                    }
                } else {
                    FAIL("unknown family " << family);
                }
            }
        }
    }
}

TEST_CASE("top polynomial on the five-node tree") {
    const DirectedGraph g = fixtures::five_node_tree();
    const ToricMatrix P = toric_matrix(g, 3);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const CumulantStack stack = sample_model_point(g, seed).forward(false);
        // s02 s34 t224 - s03 s22 t244 vanishes because 2 tops the (3,4) equitrek.
        const PolynomialCheck hit = top_trek_polynomial_check(g, stack, 3, 4, 2);
        CHECK(hit.expected_zero);
        CHECK(hit.consistent);
        CHECK(hit.relative_value <= 1e-9);
        for (int l : {0, 1, 3}) {
            const PolynomialCheck miss = top_trek_polynomial_check(g, stack, 3, 4, l);
            CHECK_FALSE(miss.expected_zero);
            CHECK(miss.consistent);
        }
    }
    for (int l = 0; l < 5; ++l) {
        const Binomial b = binomial_from(P, {{0, l}, {3, 4}, {l, l, 4}}, {{0, 3}, {l, l}, {l, 4, 4}});
        CHECK(binomial_in_lattice(P, b) == (l == 2));
    }
}

TEST_CASE("top polynomial expectation agrees with exact lattice membership on every triple") {
    for (const auto& g : {fixtures::four_vertex_tree(), fixtures::five_node_tree()}) {
        const ToricMatrix P = toric_matrix(g, 3);
        const CumulantStack stack = sample_model_point(g, 3).forward(false);
        for (int i = 0; i < g.p(); ++i)
            for (int j = i; j < g.p(); ++j)
                for (int l = 0; l < g.p(); ++l) {
                    const Binomial b = binomial_from(P, {{0, l}, {i, j}, {l, l, j}}, {{0, i}, {l, l}, {l, j, j}});
                    const PolynomialCheck c = top_trek_polynomial_check(g, stack, i, j, l);
                    CHECK_MESSAGE(c.expected_zero == binomial_in_lattice(P, b), c.id);
                    CHECK(c.consistent);
                }
    }
    // 1 and 2 meet at the source through its loop; the a00 exponents of the two monomials differ.
    const DirectedGraph g = fixtures::four_vertex_tree();
    CHECK(shortest_equitrek_top(g, {1, 2}) == 0);
    const PolynomialCheck c = top_trek_polynomial_check(g, sample_model_point(g, 3).forward(false), 1, 2, 0);
    CHECK_FALSE(c.expected_zero);
    CHECK(c.relative_value >= 1e-6);
}

TEST_CASE("leaf swaps preserve the ideal") {
    const DirectedGraph g = fixtures::five_node_tree();
    CHECK(swap_preserves_ideal(g, 3, 4));
    CHECK(swap_preserves_ideal(g, 1, 1));
    CHECK_FALSE(swap_preserves_ideal(g, 1, 2));
    CHECK_FALSE(swap_preserves_ideal(g, 1, 3));
    const DirectedGraph h = swap_vertices(g, 3, 4);
    CHECK(h == g);
    const DirectedGraph k = swap_vertices(g, 1, 2);
    CHECK(k.has_edge(1, 3));
    CHECK_FALSE(tree_equivalence(g, k).equivalent);
}

TEST_CASE("tree equivalence is an equivalence relation") {
    const DirectedGraph a = fixtures::five_node_tree();
    const DirectedGraph b = swap_vertices(a, 3, 4);
    const DirectedGraph c = DirectedGraph(5, {{0, 0}, {0, 1}, {0, 2}, {2, 4}, {2, 3}});
    for (const auto& g : {a, b, c}) {
        const TreeEquivalence self = tree_equivalence(g, g);
        CHECK(self.equivalent);
        CHECK(self.witness.empty());
        REQUIRE(self.row_equivalent.has_value());
        CHECK(*self.row_equivalent);
    }
    CHECK(tree_equivalence(a, b).equivalent == tree_equivalence(b, a).equivalent);
    CHECK(tree_equivalence(a, b).equivalent);
    CHECK(tree_equivalence(b, c).equivalent);
    CHECK(tree_equivalence(a, c).equivalent);
}

TEST_CASE("star and path are not equivalent") {
    const DirectedGraph star(4, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
    const DirectedGraph path(4, {{0, 0}, {0, 1}, {1, 2}, {2, 3}});
    const TreeEquivalence eq = tree_equivalence(star, path);
    CHECK_FALSE(eq.equivalent);
    CHECK_FALSE(eq.witness.empty());
    CHECK_FALSE(same_row_space(toric_matrix(star, 3).entries, toric_matrix(path, 3).entries));
}

TEST_CASE("graph criterion matches row-space equality on all four-vertex rooted trees") {
    const auto trees = all_rooted_trees(4);
    REQUIRE(trees.size() == 16);
    std::vector<IntMatrix> mats;
    for (const auto& t : trees) mats.push_back(toric_matrix(t, 3).entries);
    int equivalent_pairs = 0;
    for (std::size_t x = 0; x < trees.size(); ++x)
        for (std::size_t y = 0; y < trees.size(); ++y) {
            const TreeEquivalence eq = tree_equivalence(trees[x], trees[y]);
            const bool rows = same_row_space(mats[x], mats[y]);
            CHECK_MESSAGE(eq.equivalent == rows, trees[x].describe() << " vs " << trees[y].describe());
            if (eq.equivalent) ++equivalent_pairs;
        }
    CHECK(equivalent_pairs > 16);
}

TEST_CASE("graph criterion matches row-space equality on random five-vertex trees") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const DirectedGraph g = fixtures::random_rooted_tree(5, seed);
        const DirectedGraph h = fixtures::random_rooted_tree(5, seed + 1000);
        const bool rows = same_row_space(toric_matrix(g, 3).entries, toric_matrix(h, 3).entries);
        CHECK(tree_equivalence(g, h).equivalent == rows);
    }
}

TEST_CASE("observed ranks never exceed their bounds") {
    RankScanOptions opt;
    opt.throw_on_violation = false;
    const std::vector<DirectedGraph> graphs = {fixtures::ci_four_vertex(),       fixtures::diamond(),
                                               fixtures::two_cycle_both_loops(), fixtures::five_node_two_paths(),
                                               fixtures::random_dag_all_loops(4, 3), fixtures::random_dag_all_loops(5, 9),
                                               fixtures::grandchildren_path(),   fixtures::two_children()};
    bool tight = false;
    for (const auto& g : graphs) {
        const CumulantStack stack = sample_model_point(g, 5).forward(false);
        const auto scan = rank_constraints_scan(g, stack, 3, opt);
        REQUIRE_FALSE(scan.empty());
        for (const auto& rc : scan) {
            CHECK_MESSAGE(rc.rank <= rc.bound, g.describe() << " " << to_string(rc.kind));
            CHECK(rc.bound == rank_constraint_bound(g, rc.kind, rc.U));
            if (!rc.vacuous) {
                CHECK(rc.max_violation <= 1e-9);
                if (rc.rank == rc.bound && rc.bound > 0) tight = true;
            }
        }
        CHECK_NOTHROW(rank_constraints_scan(g, stack, 2));
    }
    CHECK(tight);
}

TEST_CASE("stacked second and third order parents constraint on two children") {
    const DirectedGraph g = fixtures::two_children();
    const std::vector<int> U{1, 2};
    CHECK(rank_constraint_bound(g, RankConstraintKind::ParentsStackedQ, U) == 1);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const CumulantStack stack = sample_model_point(g, seed).forward(false);
        std::vector<std::string> rows;
        const Eigen::MatrixXd Q = rank_constraint_matrix(g, stack, RankConstraintKind::ParentsStackedQ, U, &rows);
        CHECK(Q.cols() == 2);
        CHECK(std::find(rows.begin(), rows.end(), "0") != rows.end());
        CHECK(std::find(rows.begin(), rows.end(), "1,2") != rows.end());
        CHECK(std::find(rows.begin(), rows.end(), "1,1") == rows.end());
        CHECK(max_minor(Q, 2) <= 1e-10);
        CHECK(numeric_rank(Q, RankPolicy{1e-9}).rank == 1);
    }
}

TEST_CASE("grandparents constraint on the looped-end path") {
    const DirectedGraph g = fixtures::grandchildren_path();
    const std::vector<int> U{1, 2};
    CHECK(rank_constraint_bound(g, RankConstraintKind::Grandparents, U) == 1);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const CumulantStack stack = sample_model_point(g, seed).forward(false);
        const Eigen::MatrixXd M = rank_constraint_matrix(g, stack, RankConstraintKind::Grandparents, U);
        REQUIRE(M.rows() >= 2);
        CHECK(numeric_rank(M, RankPolicy{1e-9}).rank <= 1);
        CHECK(max_minor(M, 2) <= 1e-10);
    }
}

TEST_CASE("constraints on the full vertex set of an all-loops graph are vacuous") {
    const DirectedGraph g = fixtures::looped_path(3);
    const CumulantStack stack = sample_model_point(g, 2).forward(false);
    const auto scan = rank_constraints_scan(g, stack, 3);
    int full = 0;
    for (const auto& rc : scan)
        if (rc.U.size() == 3) {
            ++full;
            CHECK(rc.vacuous);
            CHECK(rc.minors_checked == 0);
        }
    CHECK(full == 3);
}

TEST_CASE("hypothesis and argument errors") {
    CHECK_THROWS_AS(toric_matrix(fixtures::diamond(), 3), HypothesisViolated);
    CHECK_THROWS_AS(toric_matrix(fixtures::sink_loop_edge(), 2), HypothesisViolated);
    CHECK_THROWS_AS(toric_matrix(fixtures::two_cycle_both_loops(), 2), HypothesisViolated);
    CHECK_THROWS_AS(toric_matrix(fixtures::looped_path(3), 2), HypothesisViolated);
    CHECK_THROWS_AS(toric_matrix(fixtures::four_vertex_tree(), 1), InvalidArgument);
    CHECK_THROWS_AS(level_partition(fixtures::diamond()), HypothesisViolated);
    CHECK_THROWS_AS(RootedTree(DirectedGraph(3, {{0, 0}, {0, 1}})), HypothesisViolated);
    CHECK_THROWS_AS(tree_equivalence(fixtures::four_vertex_tree(), fixtures::five_node_tree()), HypothesisViolated);
    const CumulantStack stack = sample_model_point(fixtures::two_children(), 1).forward(false);
    CHECK_THROWS_AS(rank_constraint_matrix(fixtures::two_children(), stack, RankConstraintKind::ParentsS, {}),
                    InvalidArgument);
    CHECK_THROWS_AS(rank_constraint_matrix(fixtures::four_vertex_tree(), stack, RankConstraintKind::ParentsS, {1}),
                    DimensionMismatch);
    CHECK_THROWS_AS(rank_constraints_scan(fixtures::two_children(), stack, 0), InvalidArgument);
}
