// constraints.cpp - toric tree parametrizations, vanishing polynomials, tree equivalence and rank constraints.
#include "dlyap/constraints.hpp"

#include "dlyap/error.hpp"
#include "dlyap/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dlyap {

std::string cumulant_label(const std::vector<int>& multiset, int p) {
    static const char prefix[] = {'s', 't', 'r'};
    if (multiset.size() < 2) throw InvalidArgument("cumulant labels need order >= 2");
    std::string out;
    if (multiset.size() <= 4) {
        out += prefix[multiset.size() - 2];
    } else {
        out += "k" + std::to_string(multiset.size()) + "_";
    }
    for (std::size_t k = 0; k < multiset.size(); ++k) {
        if (p > 10 && k > 0) out += ',';
        out += std::to_string(multiset[k]);
    }
    return out;
}

namespace {

std::string edge_label(const Edge& e, int p) {
    if (p > 10) return "a" + std::to_string(e.to) + "," + std::to_string(e.from);
    return "a" + std::to_string(e.to) + std::to_string(e.from);
}

std::string set_string(const std::vector<int>& vs) {
    std::string out = "{";
    for (std::size_t k = 0; k < vs.size(); ++k) out += (k ? "," : "") + std::to_string(vs[k]);
    return out + "}";
}

} // namespace

RootedTree::RootedTree(const DirectedGraph& g) {
    const int p = g.p();
    if (p < 1) throw HypothesisViolated("tree needs at least one vertex");
    if (g.sources().size() != 1) throw HypothesisViolated("tree must have exactly one source");
    source = g.sources().front();
    if (!g.has_loop(source)) throw HypothesisViolated("the source must carry a self-loop");
    parent.assign(static_cast<std::size_t>(p), -1);
    for (int v = 0; v < p; ++v) {
        if (v != source && g.has_loop(v)) throw HypothesisViolated("self-loop away from the source");
        if (v == source) continue;
        if (g.parents(v).size() != 1) throw HypothesisViolated("every non-source vertex needs exactly one parent");
        parent[static_cast<std::size_t>(v)] = g.parents(v).front();
    }
    if (!g.is_weakly_connected()) throw HypothesisViolated("tree must be connected");
    depth.assign(static_cast<std::size_t>(p), -1);
    depth[static_cast<std::size_t>(source)] = 0;
    for (int v : topological_order(g))
        if (v != source) depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])] + 1;
}

int RootedTree::lowest_common_ancestor(const std::vector<int>& vertices) const {
    if (vertices.empty()) throw InvalidArgument("LCA of an empty set");
    int a = vertices.front();
    for (std::size_t k = 1; k < vertices.size(); ++k) {
        int b = vertices[k];
        while (depth[static_cast<std::size_t>(a)] > depth[static_cast<std::size_t>(b)]) a = parent[static_cast<std::size_t>(a)];
        while (depth[static_cast<std::size_t>(b)] > depth[static_cast<std::size_t>(a)]) b = parent[static_cast<std::size_t>(b)];
        while (a != b) {
            a = parent[static_cast<std::size_t>(a)];
            b = parent[static_cast<std::size_t>(b)];
        }
    }
    return a;
}

std::vector<std::vector<int>> level_partition(const DirectedGraph& g) {
    const RootedTree tree(g);
    const int max_depth = *std::max_element(tree.depth.begin(), tree.depth.end());
    std::vector<std::vector<int>> levels(static_cast<std::size_t>(max_depth + 1));
    for (int v = 0; v < g.p(); ++v) levels[static_cast<std::size_t>(tree.depth[static_cast<std::size_t>(v)])].push_back(v);
    return levels;
}

namespace {

int top_in(const RootedTree& tree, const std::vector<int>& leaves) {
    const int lca = tree.lowest_common_ancestor(leaves);
    const int d = tree.depth[static_cast<std::size_t>(leaves.front())];
    for (int v : leaves)
        if (tree.depth[static_cast<std::size_t>(v)] != d) return tree.source;
    return lca;
}

int trek_length(const RootedTree& tree, const std::vector<int>& leaves) {
    const int top = top_in(tree, leaves);
    int len = 0;
    for (int v : leaves)
        len = std::max(len, tree.depth[static_cast<std::size_t>(v)] - tree.depth[static_cast<std::size_t>(top)]);
    return len;
}

} // namespace

int shortest_equitrek_top(const DirectedGraph& g, const std::vector<int>& leaves) {
    return top_in(RootedTree(g), leaves);
}

ToricMatrix toric_matrix(const DirectedGraph& g, int order) {
    if (order < 2) throw InvalidArgument("toric matrix order must be >= 2");
    const RootedTree tree(g);
    const int p = g.p();
    ToricMatrix P;
    P.p = p;
    P.order = order;
    for (int m = 2; m <= order; ++m)
        for (int v = 0; v < p; ++v) P.row_labels.push_back("v" + std::to_string(m) + "_" + std::to_string(v));
    for (const Edge& e : g.edges()) P.row_labels.push_back(edge_label(e, p));
    const std::size_t v_rows = static_cast<std::size_t>((order - 1) * p);
    const int loop_row = static_cast<int>(v_rows) + g.edge_index(tree.source, tree.source);

    for (int m = 2; m <= order; ++m)
        for (const auto& ms : MultisetIndex::get(p, m)->multisets()) {
            P.columns.push_back(ms);
            P.column_labels.push_back(cumulant_label(ms, p));
        }
    P.entries.assign(P.row_labels.size(), std::vector<long>(P.columns.size(), 0));
    for (std::size_t c = 0; c < P.columns.size(); ++c) {
        const auto& leaves = P.columns[c];
        const int m = static_cast<int>(leaves.size());
        const int top = top_in(tree, leaves);
        const int len = trek_length(tree, leaves);
        P.entries[static_cast<std::size_t>((m - 2) * p + top)][c] = 1;
        for (int leaf : leaves) {
            const int path = tree.depth[static_cast<std::size_t>(leaf)] - tree.depth[static_cast<std::size_t>(top)];
            P.entries[static_cast<std::size_t>(loop_row)][c] += len - path;
            for (int v = leaf; v != top; v = tree.parent[static_cast<std::size_t>(v)]) {
                const int row = static_cast<int>(v_rows) + g.edge_index(tree.parent[static_cast<std::size_t>(v)], v);
                P.entries[static_cast<std::size_t>(row)][c] += 1;
            }
        }
    }
    return P;
}

std::vector<double> toric_parameter_values(const ParameterMatrix& A, const std::map<int, DiagonalCumulant>& omegas,
                                           int order) {
    const DirectedGraph& g = A.graph();
    const RootedTree tree(g);
    const int p = g.p();
    const double a00 = A.weight(tree.source, tree.source);
    std::vector<double> out;
    for (int m = 2; m <= order; ++m) {
        const auto it = omegas.find(m);
        if (it == omegas.end()) throw InvalidArgument("missing noise cumulant of order " + std::to_string(m));
        const Eigen::VectorXd& w = it->second.w;
        if (w.size() != p) throw DimensionMismatch("noise cumulant has the wrong dimension");
        for (int i = 0; i < p; ++i) {
            double v = 0.0;
            double path = 1.0;
            int k = i;
            while (true) {
                double term = w(k) * std::pow(path, m);
                if (k == tree.source) term /= 1.0 - std::pow(a00, m);
                v += term;
                if (k == tree.source) break;
                const int up = tree.parent[static_cast<std::size_t>(k)];
                path *= A.weight(up, k);
                k = up;
            }
            out.push_back(v);
        }
    }
    for (double a : A.edge_weights()) out.push_back(a);
    return out;
}

std::vector<double> evaluate_toric_monomials(const ToricMatrix& P, const std::vector<double>& params) {
    if (params.size() != P.num_rows()) throw DimensionMismatch("parameter count differs from toric rows");
    std::vector<double> out(P.num_cols(), 1.0);
    for (std::size_t c = 0; c < P.num_cols(); ++c)
        for (std::size_t r = 0; r < P.num_rows(); ++r)
            if (P.entries[r][c] != 0) out[c] *= std::pow(params[r], static_cast<double>(P.entries[r][c]));
    return out;
}

std::string Binomial::to_string(const ToricMatrix& P) const {
    auto side = [&P](const std::vector<std::pair<std::size_t, long>>& terms) {
        std::string s;
        for (const auto& [c, e] : terms) {
            if (!s.empty()) s += '*';
            s += P.column_labels[c];
            if (e != 1) s += "^" + std::to_string(e);
        }
        return s.empty() ? std::string("1") : s;
    };
    return side(plus) + " - " + side(minus);
}

double Binomial::relative_value(const std::vector<double>& column_values) const {
    auto eval = [&column_values](const std::vector<std::pair<std::size_t, long>>& terms) {
        double v = 1.0;
        for (const auto& [c, e] : terms) v *= std::pow(column_values.at(c), static_cast<double>(e));
        return v;
    };
    const double a = eval(plus);
    const double b = eval(minus);
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::vector<Binomial> kernel_binomials(const ToricMatrix& P) {
    std::vector<Binomial> out;
    for (const auto& u : integer_kernel(P.entries)) {
        Binomial b;
        for (std::size_t c = 0; c < u.size(); ++c) {
            if (u[c] > 0) b.plus.emplace_back(c, static_cast<long>(u[c]));
            if (u[c] < 0) b.minus.emplace_back(c, static_cast<long>(-u[c]));
        }
        out.push_back(std::move(b));
    }
    return out;
}

bool binomial_in_lattice(const ToricMatrix& P, const Binomial& b) {
    for (std::size_t r = 0; r < P.num_rows(); ++r) {
        long sum = 0;
        for (const auto& [c, e] : b.plus) sum += P.entries[r].at(c) * e;
        for (const auto& [c, e] : b.minus) sum -= P.entries[r].at(c) * e;
        if (sum != 0) return false;
    }
    return true;
}

std::vector<double> stack_column_values(const ToricMatrix& P, const CumulantStack& stack) {
    stack.validate();
    if (stack.p() != P.p) throw DimensionMismatch("stack dimension differs from the toric matrix");
    std::vector<double> out;
    out.reserve(P.num_cols());
    for (const auto& ms : P.columns) {
        switch (ms.size()) {
        case 2: out.push_back(stack.S.at(ms)); break;
        case 3: out.push_back(stack.T.at(ms)); break;
        case 4:
            if (!stack.R) throw InvalidArgument("fourth-order cumulants are required");
            out.push_back(stack.R->at(ms));
            break;
        default: throw InvalidArgument("stacks hold orders 2 to 4 only");
        }
    }
    return out;
}

namespace {

double s_(const CumulantStack& st, int i, int j) { return st.S.at({i, j}); }
double t_(const CumulantStack& st, int i, int j, int k) { return st.T.at({i, j, k}); }

PolynomialCheck make_check(std::string id, double m1, double m2, bool expected, const PolynomialTolerances& tol) {
    PolynomialCheck c;
    c.id = std::move(id);
    c.value = m1 - m2;
    const double scale = std::max(std::abs(m1), std::abs(m2));
    c.relative_value = scale == 0.0 ? 0.0 : std::abs(c.value) / scale;
    c.expected_zero = expected;
    c.consistent = expected ? c.relative_value <= tol.vanish : c.relative_value >= tol.nonzero;
    return c;
}

std::string pair_id(const char* family, int i, int j) {
    return std::string(family) + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

} // namespace

std::vector<PolynomialCheck> level_polynomial_checks(const DirectedGraph& g, const CumulantStack& stack,
                                                     const PolynomialTolerances& tol) {
    const RootedTree tree(g);
    stack.validate();
    if (stack.p() != g.p()) throw DimensionMismatch("stack dimension differs from the graph");
    const int p = g.p();
    const int o = tree.source;
    const auto& depth = tree.depth;
    std::vector<PolynomialCheck> out;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const double m1 = std::pow(s_(stack, i, j), 3) * std::pow(t_(stack, i, i, i), 2);
            const double m2 = std::pow(s_(stack, i, i), 3) * t_(stack, i, i, j) * t_(stack, i, j, j);
            out.push_back(make_check(pair_id("source", i, j), m1, m2, i == o || i == j, tol));
        }
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const double m1 = s_(stack, o, i) * t_(stack, o, o, j);
            const double m2 = s_(stack, o, j) * t_(stack, o, o, i);
            out.push_back(make_check(pair_id("same-level", i, j), m1, m2,
                                     depth[static_cast<std::size_t>(i)] == depth[static_cast<std::size_t>(j)], tol));
        }
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const int di = depth[static_cast<std::size_t>(i)];
            const int dj = depth[static_cast<std::size_t>(j)];
            if (di == dj) continue;
            const double m1 = s_(stack, i, j) * t_(stack, o, o, j);
            const double m2 = s_(stack, o, j) * t_(stack, o, i, j);
            out.push_back(make_check(pair_id("cross-level", i, j), m1, m2, dj > di, tol));
        }
    return out;
}

PolynomialCheck top_trek_polynomial_check(const DirectedGraph& g, const CumulantStack& stack, int i, int j, int l,
                                          const PolynomialTolerances& tol) {
    const RootedTree tree(g);
    const int p = g.p();
    if (i < 0 || j < 0 || l < 0 || i >= p || j >= p || l >= p) throw InvalidArgument("vertex out of range");
    const int o = tree.source;
    const double m1 = s_(stack, o, l) * s_(stack, i, j) * t_(stack, l, l, j);
    const double m2 = s_(stack, o, i) * s_(stack, l, l) * t_(stack, l, j, j);
    // A source top with legs of unequal depth leaves unmatched source-loop factors.
    const bool expected = top_in(tree, {i, j}) == l &&
                          (l != o || tree.depth[static_cast<std::size_t>(i)] == tree.depth[static_cast<std::size_t>(j)]);
    return make_check("top[l=" + std::to_string(l) + ";" + std::to_string(i) + "," + std::to_string(j) + "]", m1, m2,
                      expected, tol);
}

TreeEquivalence tree_equivalence(const DirectedGraph& g, const DirectedGraph& h) {
    if (g.p() != h.p()) throw HypothesisViolated("trees must have the same number of vertices");
    const RootedTree tg(g);
    const RootedTree th(h);
    TreeEquivalence out;
    const auto lg = level_partition(g);
    const auto lh = level_partition(h);
    for (std::size_t l = 0; l < std::max(lg.size(), lh.size()); ++l) {
        const std::vector<int> a = l < lg.size() ? lg[l] : std::vector<int>{};
        const std::vector<int> b = l < lh.size() ? lh[l] : std::vector<int>{};
        if (a != b) {
            out.witness = "level " + std::to_string(l) + ": " + set_string(a) + " vs " + set_string(b);
            return out;
        }
    }
    for (int i = 0; i < g.p(); ++i)
        for (int j = i + 1; j < g.p(); ++j) {
            const int a = top_in(tg, {i, j});
            const int b = top_in(th, {i, j});
            if (a != b) {
                out.witness = "pair (" + std::to_string(i) + "," + std::to_string(j) + "): top " + std::to_string(a) +
                              " vs " + std::to_string(b);
                return out;
            }
        }
    out.equivalent = true;
    out.row_equivalent = same_row_space(toric_matrix(g, 3).entries, toric_matrix(h, 3).entries);
    if (!*out.row_equivalent)
        throw ModelInconsistency("trees agree on levels and tops but their toric matrices are not row equivalent");
    return out;
}

DirectedGraph swap_vertices(const DirectedGraph& g, int i, int j) {
    std::vector<int> perm(static_cast<std::size_t>(g.p()));
    for (int v = 0; v < g.p(); ++v) perm[static_cast<std::size_t>(v)] = v;
    perm.at(static_cast<std::size_t>(i)) = j;
    perm.at(static_cast<std::size_t>(j)) = i;
    return g.relabeled(perm);
}

bool swap_preserves_ideal(const DirectedGraph& g, int i, int j) {
    const RootedTree tree(g);
    if (i == j) return true;
    if (tree.depth[static_cast<std::size_t>(i)] != tree.depth[static_cast<std::size_t>(j)]) return false;
    if (g.children(i).size() > 1 || g.children(j).size() > 1) return false;
    const int len = trek_length(tree, {i, j});
    for (int k = 0; k < g.p(); ++k) {
        if (k == i || k == j) continue;
        if (trek_length(tree, {i, k}) < len || trek_length(tree, {j, k}) < len) return false;
    }
    return true;
}

std::string to_string(RankConstraintKind kind) {
    switch (kind) {
    case RankConstraintKind::ParentsS: return "parents-S";
    case RankConstraintKind::ParentsStackedQ: return "parents-stacked-Q";
    case RankConstraintKind::Grandparents: return "grandparents";
    }
    return "unknown";
}

namespace {

std::set<int> parents_of(const DirectedGraph& g, const std::vector<int>& U) {
    std::set<int> out;
    for (int v : U)
        for (int w : g.parents_with_loop(v)) out.insert(w);
    return out;
}

bool shares_parent_in(const DirectedGraph& g, const std::set<int>& pa, const std::vector<int>& vs) {
    for (int m : pa) {
        bool all = true;
        for (int v : vs)
            if (!g.has_edge(m, v)) all = false;
        if (all) return true;
    }
    return false;
}

} // namespace

int rank_constraint_bound(const DirectedGraph& g, RankConstraintKind kind, const std::vector<int>& U) {
    const std::set<int> pa = parents_of(g, U);
    if (kind != RankConstraintKind::Grandparents) return static_cast<int>(pa.size());
    return static_cast<int>(parents_of(g, std::vector<int>(pa.begin(), pa.end())).size());
}

Eigen::MatrixXd rank_constraint_matrix(const DirectedGraph& g, const CumulantStack& stack, RankConstraintKind kind,
                                       const std::vector<int>& U, std::vector<std::string>* row_labels) {
    stack.validate();
    const int p = g.p();
    if (stack.p() != p) throw DimensionMismatch("stack dimension differs from the graph");
    if (U.empty()) throw InvalidArgument("U must be nonempty");
    const std::set<int> in_u(U.begin(), U.end());
    const std::set<int> pa = parents_of(g, U);

    std::vector<std::vector<int>> rows;
    for (int r = 0; r < p; ++r) {
        if (in_u.count(r)) continue;
        if (kind == RankConstraintKind::Grandparents && shares_parent_in(g, pa, {r})) continue;
        rows.push_back({r});
    }
    if (kind != RankConstraintKind::ParentsS) {
        for (int i = 0; i < p; ++i)
            for (int r = 0; r < p; ++r) {
                if (i == r && in_u.count(i)) continue;
                if (kind == RankConstraintKind::Grandparents && shares_parent_in(g, pa, {i, r})) continue;
                rows.push_back({i, r});
            }
    }
    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(U.size()));
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < U.size(); ++b) {
            std::vector<int> idx = rows[a];
            idx.push_back(U[b]);
            M(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                idx.size() == 2 ? stack.S.at(idx) : stack.T.at(idx);
        }
    if (row_labels) {
        row_labels->clear();
        for (const auto& r : rows)
            row_labels->push_back(r.size() == 1 ? std::to_string(r[0]) : std::to_string(r[0]) + "," + std::to_string(r[1]));
    }
    return M;
}

namespace {

// Advances a sorted combination of size k drawn from {0..n-1}; false after the last.
bool next_combination(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[static_cast<std::size_t>(i)] < n - k + i) {
            ++c[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

void check_minors(const Eigen::MatrixXd& M, int size, long cap, RankConstraint& rc) {
    const int nr = static_cast<int>(M.rows());
    const int nc = static_cast<int>(M.cols());
    if (size > nr || size > nc || size < 1) return;
    const double scale = M.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    std::vector<int> rs(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) rs[static_cast<std::size_t>(k)] = k;
    do {
        std::vector<int> cs(static_cast<std::size_t>(size));
        for (int k = 0; k < size; ++k) cs[static_cast<std::size_t>(k)] = k;
        do {
            Eigen::MatrixXd sub(size, size);
            for (int a = 0; a < size; ++a)
                for (int b = 0; b < size; ++b) sub(a, b) = M(rs[static_cast<std::size_t>(a)], cs[static_cast<std::size_t>(b)]);
            const double rel = std::abs(sub.fullPivLu().determinant()) / std::pow(scale, size);
            rc.max_violation = std::max(rc.max_violation, rel);
            if (++rc.minors_checked >= cap) return;
        } while (next_combination(cs, nc));
    } while (next_combination(rs, nr));
}

} // namespace

std::vector<RankConstraint> rank_constraints_scan(const DirectedGraph& g, const CumulantStack& stack, int max_subset,
                                                  const RankScanOptions& opt) {
    const int p = g.p();
    if (max_subset < 1) throw InvalidArgument("max_subset must be positive");
    std::vector<RankConstraint> out;
    const RankConstraintKind kinds[] = {RankConstraintKind::ParentsS, RankConstraintKind::ParentsStackedQ,
                                        RankConstraintKind::Grandparents};
    for (int k = 1; k <= std::min(max_subset, p); ++k) {
        std::vector<int> U(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) U[static_cast<std::size_t>(i)] = i;
        do {
            for (RankConstraintKind kind : kinds) {
                RankConstraint rc;
                rc.kind = kind;
                rc.U = U;
                rc.bound = rank_constraint_bound(g, kind, U);
                const Eigen::MatrixXd M = rank_constraint_matrix(g, stack, kind, U, &rc.rows);
                rc.rank = M.size() == 0 ? 0 : numeric_rank(M, opt.rank_policy).rank;
                rc.vacuous = rc.bound >= std::min<int>(static_cast<int>(M.rows()), static_cast<int>(M.cols()));
                if (!rc.vacuous) check_minors(M, rc.bound + 1, opt.max_minors, rc);
                if (opt.throw_on_violation && rc.rank > rc.bound) {
                    std::ostringstream msg;
                    msg << to_string(kind) << " constraint on U=" << set_string(U) << " has rank " << rc.rank
                        << " above its bound " << rc.bound;
                    throw ModelInconsistency(msg.str());
                }
                out.push_back(std::move(rc));
            }
        } while (next_combination(U, p));
    }
    return out;
}

} // namespace dlyap
