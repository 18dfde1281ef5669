// identify.cpp - closed-form and block-wise recovery of edge weights and noise cumulants.
#include "dlyap/identify.hpp"

#include "dlyap/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace dlyap {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Recovered:
        return "recovered";
    case Verdict::Degenerate:
        return "degenerate";
    case Verdict::HypothesisViolated:
        return "hypothesis-violated";
    }
    return "unknown";
}

namespace {

double checked(double denominator, const char* what, const IdentifyOptions& opt) {
    if (!(std::abs(denominator) > opt.degeneracy_tol)) {
        throw DegenerateDenominator(std::string("vanishing denominator ") + what);
    }
    return denominator;
}

std::string label(char prefix, std::vector<int> idx) {
    std::ostringstream os;
    os << prefix << '_';
    std::sort(idx.begin(), idx.end());
    for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? "," : "") << idx[k];
    return os.str();
}

} // namespace

TwoNodeSolution identify_pair(const CumulantStack& stack, int e, int c, TwoNodeVariant variant,
                              const IdentifyOptions& opt) {
    stack.validate();
    if (e < 0 || c < 0 || e >= stack.p() || c >= stack.p() || e == c) throw InvalidArgument("invalid vertex pair");
    const double s00 = stack.S({e, e});
    const double s01 = stack.S({e, c});
    const double t000 = stack.T({e, e, e});
    const double t001 = stack.T({e, e, c});
    TwoNodeSolution out;
    if (variant == TwoNodeVariant::BothLoops) {
        if (!stack.R) throw InvalidArgument("fourth-order cumulants are required when both vertices carry loops");
        const double r0000 = (*stack.R)({e, e, e, e});
        const double r0001 = (*stack.R)({e, e, e, c});
        const double d1 = checked(s00 * t001 - s01 * t000, "s00*t001 - s01*t000", opt);
        const double d2 = checked(r0000 * t001 - r0001 * t000, "r0000*t001 - r0001*t000", opt);
        checked(s01, "s01", opt);
        checked(r0001, "r0001", opt);
        out.a00 = -r0001 * d1 / (s01 * d2);
        out.a10 = -s01 * s01 * t001 * (r0000 * s01 * t001 + r0001 * s00 * t001 - 2.0 * r0001 * s01 * t000) * d2 /
                  (r0001 * r0001 * d1 * d1 * d1);
        out.a11 = d2 * s01 * s01 * (r0000 * s00 * t001 * t001 - r0001 * s01 * t000 * t000) /
                  (d1 * d1 * d1 * r0001 * r0001);
        return out;
    }
    checked(s00, "s00", opt);
    checked(s01, "s01", opt);
    checked(t000, "t000", opt);
    checked(t001, "t001", opt);
    out.a00 = s00 * t001 / (s01 * t000);
    out.a10 = s01 * s01 * t000 / (s00 * s00 * t001);
    if (stack.p() == 2) {
        const double s11 = stack.S({c, c});
        const double t111 = stack.T({c, c, c});
        Eigen::VectorXd w2(2), w3(2);
        w2[e] = (s00 * s01 * s01 * t000 * t000 - s00 * s00 * s00 * t001 * t001) / (s01 * s01 * t000 * t000);
        w2[c] = (std::pow(s00, 3) * s11 * t001 * t001 - std::pow(s01, 4) * t000 * t000) / (std::pow(s00, 3) * t001 * t001);
        w3[e] = (std::pow(s01, 3) * std::pow(t000, 3) - std::pow(s00, 3) * std::pow(t001, 3)) /
                (std::pow(s01, 3) * std::pow(t000, 2));
        w3[c] = (std::pow(t001, 3) * t111 * std::pow(s00, 6) - std::pow(s01, 6) * std::pow(t000, 4)) /
                (std::pow(s00, 6) * std::pow(t001, 3));
        out.omega2 = DiagonalCumulant(2, w2);
        out.omega3 = DiagonalCumulant(3, w3);
    }
    return out;
}

TwoNodeSolution identify_two_node(const CumulantStack& stack, TwoNodeVariant variant, const IdentifyOptions& opt) {
    if (stack.p() != 2) throw DimensionMismatch("two-node identification needs p = 2");
    return identify_pair(stack, 0, 1, variant, opt);
}

std::vector<TwoNodeCandidate> enumerate_two_node_st_solutions(const CumulantStack& stack, const IdentifyOptions& opt) {
    stack.validate();
    if (stack.p() != 2) throw DimensionMismatch("two-node enumeration needs p = 2");
    const double t000 = checked(stack.T({0, 0, 0}), "t000", opt);
    const double s00 = checked(stack.S({0, 0}), "s00", opt);
    const double sigma = stack.S({0, 1}) / s00;
    const double tau = stack.T({0, 0, 1}) / t000;
    const double rho = stack.T({0, 1, 1}) / t000;
    const double D = tau - sigma;
    checked(D, "t001/t000 - s01/s00", opt);
    const double qa = rho * D * D;
    const double qb = rho * tau * tau - 2.0 * rho * sigma * tau + sigma * sigma * tau * tau;
    const double qc = rho * tau * tau + sigma * sigma * tau * tau - 2.0 * sigma * tau * tau * tau;
    std::vector<double> roots;
    if (std::abs(qa) <= opt.degeneracy_tol) {
        if (std::abs(qb) > opt.degeneracy_tol) roots.push_back(-qc / qb);
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
            roots.push_back(q / qa);
            if (q != 0.0) roots.push_back(qc / q);
        }
    }
    std::sort(roots.begin(), roots.end());
    std::vector<TwoNodeCandidate> out;
    for (double x : roots) {
        if (std::abs(x) <= opt.degeneracy_tol) continue;
        TwoNodeCandidate c;
        c.a00 = x;
        c.a11 = (tau - sigma * x) / (x * x * D);
        c.a10 = sigma * tau * (x - 1.0) / (x * x * D);
        Eigen::Matrix2d A;
        A << c.a00, 0.0, c.a10, c.a11;
        c.spectral_radius = spectral_radius(A);
        c.schur_stable = c.spectral_radius < 1.0 - kStabilityMargin;
        out.push_back(c);
    }
    return out;
}

namespace {

std::vector<std::vector<char>> reachability(const DirectedGraph& g) {
    const auto P = static_cast<std::size_t>(g.p());
    std::vector<std::vector<char>> reach(P, std::vector<char>(P, 0));
    for (int s = 0; s < g.p(); ++s) {
        std::vector<int> stack{s};
        reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(s)] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int c : g.children(v)) {
                if (!reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)]) {
                    reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)] = 1;
                    stack.push_back(c);
                }
            }
        }
    }
    return reach;
}

bool is_source(const DirectedGraph& g, int v) { return g.parents(v).empty(); }

// Minimal-index source that reaches v (v itself when v is a source).
int first_source_ancestor(const DirectedGraph& g, const std::vector<std::vector<char>>& reach, int v) {
    for (int s : g.sources())
        if (reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)]) return s;
    throw HypothesisViolated("vertex " + std::to_string(v) + " has no source ancestor");
}

struct Workspace {
    const DirectedGraph& g;
    const CumulantStack& stack;
    const IdentifyOptions& opt;
    std::vector<std::vector<char>> reach;
    std::vector<int> order;
    Eigen::MatrixXd A;
    IdentifiabilityReport report;
};

void identify_source(Workspace& w, int e) {
    const DirectedGraph& g = w.g;
    if (!g.has_loop(e)) throw HypothesisViolated("source " + std::to_string(e) + " has no self-loop");
    std::vector<int> children = g.children(e);
    if (children.empty()) throw HypothesisViolated("source " + std::to_string(e) + " is isolated");
    std::sort(children.begin(), children.end(), [&](int a, int b) {
        return std::find(w.order.begin(), w.order.end(), a) < std::find(w.order.begin(), w.order.end(), b);
    });
    const int first = children.front();
    for (int l : g.parents(first)) {
        if (l != e && w.reach[static_cast<std::size_t>(e)][static_cast<std::size_t>(l)]) {
            throw HypothesisViolated("first child " + std::to_string(first) + " of source " + std::to_string(e) +
                                     " has another parent reachable from the source");
        }
    }
    int partner = first;
    if (g.has_loop(first) && !w.stack.R) {
        partner = -1;
        for (int c : children) {
            if (g.has_loop(c)) continue;
            bool clean = true;
            for (int l : g.parents(c))
                if (l != e && w.reach[static_cast<std::size_t>(e)][static_cast<std::size_t>(l)]) clean = false;
            if (clean) {
                partner = c;
                break;
            }
        }
        if (partner < 0) {
            throw HypothesisViolated("fourth-order cumulants are required for source " + std::to_string(e));
        }
    }
    const TwoNodeVariant variant = g.has_loop(partner) ? TwoNodeVariant::BothLoops : TwoNodeVariant::SourceLoopOnly;
    const TwoNodeSolution sol = identify_pair(w.stack, e, partner, variant, w.opt);
    w.A(e, e) = sol.a00;
    SourceDiagnostic d;
    d.source = e;
    d.partner = partner;
    d.formula = variant == TwoNodeVariant::BothLoops ? "two-node-both-loops" : "two-node-source-loop";
    w.report.sources.push_back(d);
}

// Solves the per-vertex system with rows s_{r,j} for r in anchors, plus t_{e,e,j} when loop_anchor >= 0.
void identify_vertex(Workspace& w, int j, const std::vector<int>& anchors, int loop_anchor) {
    const DirectedGraph& g = w.g;
    const SymmetricTensor& S = w.stack.S;
    const SymmetricTensor& T = w.stack.T;
    const std::vector<int> unknowns = g.parents_with_loop(j);
    const int rows = static_cast<int>(anchors.size()) + (loop_anchor >= 0 ? 1 : 0);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(unknowns.size()));
    Eigen::VectorXd b(rows);
    BlockDiagnostic diag;
    diag.vertex = j;
    diag.unknowns = unknowns;
    for (std::size_t r = 0; r < anchors.size(); ++r) {
        const int a = anchors[r];
        for (std::size_t c = 0; c < unknowns.size(); ++c) {
            double v = 0.0;
            for (int m = 0; m < g.p(); ++m) v += w.A(a, m) * S({m, unknowns[c]});
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
        b[static_cast<Eigen::Index>(r)] = S({a, j});
        diag.rows.push_back(label('s', {a, j}));
    }
    if (loop_anchor >= 0) {
        const int e = loop_anchor;
        const Eigen::Index r = rows - 1;
        for (std::size_t c = 0; c < unknowns.size(); ++c) {
            M(r, static_cast<Eigen::Index>(c)) = w.A(e, e) * w.A(e, e) * T({e, e, unknowns[c]});
        }
        b[r] = T({e, e, j});
        diag.rows.push_back(label('t', {e, e, j}));
    }
    if (M.rows() != M.cols()) {
        throw SingularBlock(j, std::numeric_limits<double>::infinity(), static_cast<int>(std::min(M.rows(), M.cols())),
                            static_cast<int>(M.cols()));
    }
    // Rows and columns are equilibrated so that sources with small loop weights do not
    // read as singular; the solution is mapped back through the column scaling.
    Eigen::VectorXd row_scale = M.rowwise().norm();
    for (Eigen::Index r = 0; r < row_scale.size(); ++r)
        if (row_scale[r] == 0.0) row_scale[r] = 1.0;
    Eigen::MatrixXd scaled = row_scale.cwiseInverse().asDiagonal() * M;
    Eigen::VectorXd col_scale = scaled.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < col_scale.size(); ++c)
        if (col_scale[c] == 0.0) col_scale[c] = 1.0;
    scaled = scaled * col_scale.cwiseInverse().asDiagonal();
    const Eigen::VectorXd rhs = row_scale.cwiseInverse().cwiseProduct(b);
    const BlockSolution sol = rank_revealing_solve(scaled, rhs, j, w.opt.rank_policy);
    diag.condition_number = sol.condition_number;
    diag.rank = sol.rank;
    const Eigen::VectorXd x = col_scale.cwiseInverse().cwiseProduct(sol.x);
    for (std::size_t c = 0; c < unknowns.size(); ++c) w.A(j, unknowns[c]) = x[static_cast<Eigen::Index>(c)];
    w.report.blocks.push_back(diag);
}

void finish(Workspace& w) {
    IdentifiabilityReport& rep = w.report;
    rep.A = w.A;
    std::vector<const SymmetricTensor*> orders{&w.stack.S, &w.stack.T};
    if (w.stack.R) orders.push_back(&*w.stack.R);
    bool ok = true;
    std::optional<ParameterMatrix> pm;
    try {
        pm = ParameterMatrix(w.g, w.A);
    } catch (const Error&) {
        ok = false;
    }
    for (const SymmetricTensor* X : orders) {
        NoiseRecovery nr = recover_noise(*X, w.A);
        rep.noise.push_back(nr.omega);
        rep.noise_offdiag_defects.push_back(nr.offdiag_defect);
        double residual = std::numeric_limits<double>::infinity();
        if (pm && pm->is_stable()) {
            const SymmetricTensor fwd = solve_cumulant(*pm, nr.omega);
            residual = max_abs_difference(fwd, *X) / std::max(X->max_abs(), 1e-300);
        }
        rep.forward_residuals.push_back(residual);
        if (!(residual <= w.opt.residual_tol)) ok = false;
    }
    rep.verdict = ok ? Verdict::Recovered : Verdict::Degenerate;
    if (!ok && rep.message.empty()) rep.message = "forward residual exceeds tolerance or recovered matrix is unstable";
}

void check_stack(const DirectedGraph& g, const CumulantStack& stack) {
    stack.validate();
    if (stack.p() != g.p()) throw DimensionMismatch("stack dimension differs from the graph");
}

} // namespace

IdentifiabilityReport identify_dag_all_loops(const DirectedGraph& g, const CumulantStack& stack,
                                             const IdentifyOptions& opt) {
    check_stack(g, stack);
    if (g.p() < 2) throw HypothesisViolated("at least two vertices are required");
    if (!g.is_dag()) throw HypothesisViolated("graph has a directed cycle");
    if (!g.isolated_vertices().empty()) throw HypothesisViolated("graph has an isolated vertex");
    for (int s : g.sources())
        if (!g.has_loop(s)) throw HypothesisViolated("source " + std::to_string(s) + " has no self-loop");
    Workspace w{g, stack, opt, reachability(g), topological_order(g), Eigen::MatrixXd::Zero(g.p(), g.p()), {}};
    w.report.method = "dag-all-loops";
    if (!g.has_all_self_loops()) w.report.message = "not every vertex carries a self-loop";
    for (int j : w.order) {
        if (is_source(g, j)) {
            identify_source(w, j);
            continue;
        }
        const int loop_anchor = g.has_loop(j) ? first_source_ancestor(g, w.reach, j) : -1;
        identify_vertex(w, j, g.parents(j), loop_anchor);
    }
    finish(w);
    return w.report;
}

IdentifiabilityReport identify_polytree(const DirectedGraph& g, const CumulantStack& stack,
                                        const IdentifyOptions& opt) {
    check_stack(g, stack);
    if (g.p() < 2) throw HypothesisViolated("at least two vertices are required");
    if (!g.is_polytree()) throw HypothesisViolated("graph is not a polytree");
    if (!g.isolated_vertices().empty()) throw HypothesisViolated("graph has an isolated vertex");
    for (int s : g.sources())
        if (!g.has_loop(s)) throw HypothesisViolated("source " + std::to_string(s) + " has no self-loop");
    Workspace w{g, stack, opt, reachability(g), topological_order(g), Eigen::MatrixXd::Zero(g.p(), g.p()), {}};
    w.report.method = "polytree";
    for (int j : w.order) {
        if (is_source(g, j)) {
            identify_source(w, j);
            continue;
        }
        std::vector<int> anchors;
        for (int i : g.parents(j)) {
            const int e = first_source_ancestor(g, w.reach, i);
            if (std::find(anchors.begin(), anchors.end(), e) != anchors.end()) {
                throw HypothesisViolated("parents of " + std::to_string(j) + " share a source ancestor");
            }
            anchors.push_back(e);
        }
        const int loop_anchor = g.has_loop(j) ? anchors.front() : -1;
        identify_vertex(w, j, anchors, loop_anchor);
    }
    finish(w);
    return w.report;
}

IdentifiabilityReport identify_two_node_report(const DirectedGraph& g, const CumulantStack& stack,
                                               const IdentifyOptions& opt) {
    check_stack(g, stack);
    if (g.p() != 2 || !g.has_loop(0) || !g.has_edge(0, 1) || g.has_edge(1, 0)) {
        throw HypothesisViolated("two-node closed forms need 0->0 and 0->1 without 1->0");
    }
    const TwoNodeVariant variant = g.has_loop(1) ? TwoNodeVariant::BothLoops : TwoNodeVariant::SourceLoopOnly;
    if (variant == TwoNodeVariant::BothLoops && !stack.R) {
        throw HypothesisViolated("fourth-order cumulants are required when both vertices carry loops");
    }
    const TwoNodeSolution sol = identify_two_node(stack, variant, opt);
    Workspace w{g, stack, opt, reachability(g), topological_order(g), Eigen::MatrixXd::Zero(2, 2), {}};
    w.report.method = "two-node";
    w.A(0, 0) = sol.a00;
    w.A(1, 0) = sol.a10;
    if (sol.a11) w.A(1, 1) = *sol.a11;
    w.report.sources.push_back({0, 1, variant == TwoNodeVariant::BothLoops ? "two-node-both-loops"
                                                                          : "two-node-source-loop"});
    finish(w);
    if (sol.omega2) w.report.noise[0] = *sol.omega2;
    if (sol.omega3) w.report.noise[1] = *sol.omega3;
    return w.report;
}

EquationCount count_equations_vs_parameters(const DirectedGraph& g, int n_max) {
    if (n_max < 2) throw InvalidArgument("equation count needs n_max >= 2");
    EquationCount out;
    out.order = n_max;
    out.parameters = static_cast<long>(g.num_edges()) + static_cast<long>(g.p()) * (n_max - 1);
    for (int n = 2; n <= n_max; ++n) {
        const auto idx = MultisetIndex::get(g.p(), n);
        for (const auto& ms : idx->multisets()) {
            if (equitrek_exists(g, ms)) {
                ++out.equations;
            } else {
                ++out.zero_entries;
            }
        }
    }
    out.bound_satisfied = out.parameters <= out.equations;
    return out;
}

std::string select_identification_method(const DirectedGraph& g, bool have_fourth_order) {
    if (g.p() < 2 || !g.isolated_vertices().empty()) return "";
    bool sources_looped = true;
    for (int s : g.sources())
        if (!g.has_loop(s)) sources_looped = false;
    if (g.is_dag() && g.has_all_self_loops() && have_fourth_order) return "dag-all-loops";
    if (g.is_polytree() && sources_looped) return "polytree";
    if (g.p() == 2 && g.has_loop(0) && g.has_edge(0, 1) && !g.has_edge(1, 0)) return "two-node";
    return "";
}

} // namespace dlyap
