// trek.cpp - trek rules, restricted coefficients and the higher-order numerator conjecture.
#include "dlyap/trek.hpp"

#include "dlyap/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace dlyap {

double trek_rule_entry(const ParameterMatrix& A, const DiagonalCumulant& omega, const std::vector<int>& indices,
                       int max_len) {
    if (static_cast<int>(indices.size()) != omega.order) throw DimensionMismatch("index count differs from the order");
    if (omega.p() != A.p()) throw DimensionMismatch("noise dimension differs from the parameter matrix");
    for (int i : indices)
        if (i < 0 || i >= A.p()) throw InvalidArgument("index out of range");
    const int p = A.p();
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p, p);
    double total = 0.0;
    for (int L = 0; L <= max_len; ++L) {
        for (int t = 0; t < p; ++t) {
            double prod = omega.w[t];
            for (int i : indices) prod *= power(i, t);
            total += prod;
        }
        power = A.entries() * power;
    }
    return total;
}

std::vector<TrekMonomialTerm> trek_monomials(const ParameterMatrix& A, const DiagonalCumulant& omega,
                                             const std::vector<int>& indices, int max_len) {
    if (static_cast<int>(indices.size()) != omega.order) throw DimensionMismatch("index count differs from the order");
    std::vector<TrekMonomialTerm> out;
    for (Trek& trek : enumerate_equitreks(A.graph(), indices, max_len)) {
        TrekMonomialTerm term;
        term.noise_index = trek.top;
        term.coefficient = omega.w[trek.top];
        for (const auto& leg : trek.legs)
            for (std::size_t k = 1; k < leg.size(); ++k) term.coefficient *= A.weight(leg[k - 1], leg[k]);
        term.trek = std::move(trek);
        out.push_back(std::move(term));
    }
    return out;
}

IntPoly p_polynomial(int x, int y) {
    if (x < 0 || y < 0) throw InvalidArgument("leg distances must be nonnegative");
    const int hi = std::max(x, y);
    const int lo = std::min(x, y);
    std::vector<BigInt> c(static_cast<std::size_t>(lo) + 1);
    for (int l = 0; l <= lo; ++l) c[static_cast<std::size_t>(l)] = binomial(hi, lo - l) * binomial(lo, l);
    return IntPoly(std::move(c));
}

double restricted_coefficient(int x, int y, double t) {
    if (!(std::abs(t) < 1.0)) throw PoleAtUnit("restricted coefficient has a pole at |t| = 1");
    const double u = t * t;
    return std::pow(t, std::abs(x - y)) * p_polynomial(x, y).evaluate(u) / std::pow(1.0 - u, x + y + 1);
}

namespace {

Rational rational_pow(const Rational& base, int e) {
    Rational r = 1;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
}

} // namespace

Rational restricted_coefficient_exact(int x, int y, const Rational& t) {
    if (abs(t) >= 1) throw PoleAtUnit("restricted coefficient has a pole at |t| = 1");
    const Rational u = t * t;
    return rational_pow(t, std::abs(x - y)) * p_polynomial(x, y).evaluate(u) / rational_pow(1 - u, x + y + 1);
}

namespace {

// Self-avoiding directed paths from `from` to `to` over non-loop edges, ascending lexicographically.
std::vector<std::vector<int>> simple_paths(const DirectedGraph& g, int from, int to) {
    std::vector<std::vector<int>> out;
    std::vector<int> path{from};
    std::vector<char> on_path(static_cast<std::size_t>(g.p()), 0);
    on_path[static_cast<std::size_t>(from)] = 1;
    std::function<void(int)> dfs = [&](int v) {
        if (v == to) {
            out.push_back(path);
            return;
        }
        for (int c : g.children(v)) {
            if (on_path[static_cast<std::size_t>(c)]) continue;
            on_path[static_cast<std::size_t>(c)] = 1;
            path.push_back(c);
            dfs(c);
            path.pop_back();
            on_path[static_cast<std::size_t>(c)] = 0;
        }
    };
    dfs(from);
    std::sort(out.begin(), out.end());
    return out;
}

void check_leaves(const DirectedGraph& g, const std::vector<int>& leaves) {
    if (leaves.empty()) throw InvalidArgument("at least one leaf is required");
    for (int v : leaves)
        if (v < 0 || v >= g.p()) throw InvalidArgument("leaf out of range");
}

} // namespace

std::vector<Trek> enumerate_base_treks(const DirectedGraph& g, const std::vector<int>& leaves) {
    check_leaves(g, leaves);
    std::vector<Trek> out;
    for (int top = 0; top < g.p(); ++top) {
        std::vector<std::vector<std::vector<int>>> options;
        bool empty = false;
        for (int leaf : leaves) {
            options.push_back(simple_paths(g, top, leaf));
            if (options.back().empty()) empty = true;
        }
        if (empty) continue;
        std::vector<std::size_t> choice(leaves.size(), 0);
        bool done = false;
        while (!done) {
            Trek trek;
            trek.top = top;
            for (std::size_t k = 0; k < leaves.size(); ++k) trek.legs.push_back(options[k][choice[k]]);
            out.push_back(std::move(trek));
            std::size_t k = leaves.size();
            done = true;
            while (k-- > 0) {
                if (++choice[k] < options[k].size()) {
                    done = false;
                    break;
                }
                choice[k] = 0;
            }
        }
    }
    return out;
}

ParameterMatrix restricted_effective_matrix(const DirectedGraph& g, double t, const std::map<Edge, double>& offdiag) {
    std::vector<Edge> edges = g.edges();
    for (int v = 0; v < g.p(); ++v)
        if (!g.has_loop(v)) edges.push_back({v, v});
    DirectedGraph full(g.p(), edges);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.p(), g.p());
    for (int v = 0; v < g.p(); ++v) A(v, v) = t;
    for (const auto& [e, w] : offdiag) {
        if (e.from == e.to || !g.has_edge(e.from, e.to)) {
            throw InvalidArgument("weight given for a non-edge " + std::to_string(e.from) + "->" + std::to_string(e.to));
        }
        A(e.to, e.from) = w;
    }
    ParameterMatrix M(full, A);
    if (!M.is_stable()) throw UnstableEffective("matrix with constant self-loops is not stable");
    return M;
}

namespace {

double leg_weight(const ParameterMatrix& A, const std::vector<int>& leg) {
    double w = 1.0;
    for (std::size_t k = 1; k < leg.size(); ++k) w *= A.weight(leg[k - 1], leg[k]);
    return w;
}

} // namespace

SymmetricTensor restricted_covariance(const DirectedGraph& g, double t, const std::map<Edge, double>& offdiag,
                                      const DiagonalCumulant& omega2) {
    if (omega2.order != 2) throw InvalidArgument("restricted covariance needs an order-2 noise cumulant");
    if (omega2.p() != g.p()) throw DimensionMismatch("noise dimension differs from the graph");
    topological_order(g);
    if (!(std::abs(t) < 1.0)) throw PoleAtUnit("self-loop weight must satisfy |t| < 1");
    const ParameterMatrix A = restricted_effective_matrix(g, t, offdiag);
    SymmetricTensor S(2, g.p());
    for (int i = 0; i < g.p(); ++i) {
        for (int j = i; j < g.p(); ++j) {
            double s = 0.0;
            for (const Trek& trek : enumerate_base_treks(g, {i, j})) {
                const int x = static_cast<int>(trek.legs[0].size()) - 1;
                const int y = static_cast<int>(trek.legs[1].size()) - 1;
                s += omega2.w[trek.top] * leg_weight(A, trek.legs[0]) * leg_weight(A, trek.legs[1]) *
                     restricted_coefficient(x, y, t);
            }
            S.set({i, j}, s);
        }
    }
    return S;
}

PRecursionReport check_p_recursions(int x_max, int y_max) {
    if (x_max < 1 || y_max < 1) throw InvalidArgument("recursion bounds must be at least 1");
    PRecursionReport report;
    const IntPoly u = IntPoly::monomial(1, 1);
    const IntPoly one = IntPoly::constant(1);
    const std::vector<Rational> samples{Rational(0), Rational(1, 2), Rational(1, 3), Rational(-2, 5), Rational(3, 4)};
    for (int x = 0; x <= x_max; ++x) {
        for (int y = x; y <= y_max; ++y) {
            ++report.cases_checked;
            const IntPoly middle = x == y ? u : one;
            const IntPoly rhs = u * p_polynomial(x, y + 1) + middle * p_polynomial(x + 1, y) + (one - u) * p_polynomial(x, y);
            if (rhs != p_polynomial(x + 1, y + 1)) {
                report.polynomial_identities = false;
                report.failures.push_back("p recursion fails at (" + std::to_string(x) + "," + std::to_string(y) + ")");
            }
            for (const Rational& t : samples) {
                const Rational lhs = restricted_coefficient_exact(x + 1, y + 1, t);
                const Rational c_rhs = (t * (restricted_coefficient_exact(x, y + 1, t) +
                                             restricted_coefficient_exact(x + 1, y, t)) +
                                        restricted_coefficient_exact(x, y, t)) /
                                       (1 - t * t);
                if (lhs != c_rhs) {
                    report.coefficient_identities = false;
                    std::ostringstream os;
                    os << "C recursion fails at (" << x << "," << y << ") t=" << t;
                    report.failures.push_back(os.str());
                }
            }
        }
    }
    return report;
}

IntPoly conjectured_higher_p(const std::vector<int>& xs) {
    if (xs.empty()) throw InvalidArgument("at least one leg is required");
    for (int x : xs)
        if (x < 0) throw InvalidArgument("leg distances must be nonnegative");
    const int sum = std::accumulate(xs.begin(), xs.end(), 0);
    const int hi = *std::max_element(xs.begin(), xs.end());
    const int top_degree = sum - hi;
    std::vector<BigInt> c(static_cast<std::size_t>(top_degree) + 1, 0);
    for (int l = 0; l <= top_degree; ++l) {
        BigInt cl = 0;
        for (int k = 0; k <= l; ++k) {
            BigInt prod = binomial(sum + 1, l - k);
            for (int x : xs) prod *= binomial(x + k, k);
            cl += ((l - k) % 2 == 0) ? prod : BigInt(-prod);
        }
        c[static_cast<std::size_t>(top_degree - l)] = cl;
    }
    return IntPoly(std::move(c));
}

IntPoly restricted_numerator_series(const std::vector<int>& xs) {
    if (xs.empty()) throw InvalidArgument("at least one leg is required");
    const int sum = std::accumulate(xs.begin(), xs.end(), 0);
    const int hi = *std::max_element(xs.begin(), xs.end());
    const int K = 2 * sum + 2;
    std::vector<BigInt> series(static_cast<std::size_t>(K) + 1);
    for (int j = 0; j <= K; ++j) {
        BigInt prod = 1;
        for (int x : xs) prod *= binomial(hi + j, x);
        series[static_cast<std::size_t>(j)] = prod;
    }
    IntPoly factor = IntPoly::constant(1);
    const IntPoly one_minus_u(std::vector<BigInt>{1, -1});
    for (int k = 0; k <= sum; ++k) factor = factor * one_minus_u;
    const IntPoly product = factor * IntPoly(series);
    for (int d = sum + 1; d <= K; ++d) {
        if (product.coefficient(d) != 0) throw Error("loop-insertion series is not rational of the expected form");
    }
    std::vector<BigInt> c(static_cast<std::size_t>(sum) + 1);
    for (int d = 0; d <= sum; ++d) c[static_cast<std::size_t>(d)] = product.coefficient(d);
    return IntPoly(std::move(c));
}

double conjectured_restricted_coefficient(const std::vector<int>& xs, double t) {
    if (!(std::abs(t) < 1.0)) throw PoleAtUnit("restricted coefficient has a pole at |t| = 1");
    const int n = static_cast<int>(xs.size());
    const int sum = std::accumulate(xs.begin(), xs.end(), 0);
    const int hi = *std::max_element(xs.begin(), xs.end());
    const double u = std::pow(t, n);
    return std::pow(t, n * hi - sum) * conjectured_higher_p(xs).evaluate(u) / std::pow(1.0 - u, sum + 1);
}

ConjectureEvidence conjecture_validator(const DirectedGraph& g, double t, const std::map<Edge, double>& offdiag,
                                        const DiagonalCumulant& omega3) {
    if (omega3.order != 3) throw InvalidArgument("the validator compares third-order cumulants");
    if (omega3.p() != g.p()) throw DimensionMismatch("noise dimension differs from the graph");
    topological_order(g);
    const ParameterMatrix A = restricted_effective_matrix(g, t, offdiag);
    const SymmetricTensor exact = solve_cumulant(A, omega3);
    const double scale = std::max(exact.max_abs(), 1e-300);
    ConjectureEvidence ev;
    for (std::size_t c = 0; c < exact.size(); ++c) {
        const std::vector<int>& leaves = exact.index().multiset(c);
        double value = 0.0;
        for (const Trek& trek : enumerate_base_treks(g, leaves)) {
            double w = omega3.w[trek.top];
            std::vector<int> xs;
            for (const auto& leg : trek.legs) {
                w *= leg_weight(A, leg);
                xs.push_back(static_cast<int>(leg.size()) - 1);
            }
            value += w * conjectured_restricted_coefficient(xs, t);
        }
        const double dev = std::abs(value - exact.values()[c]) / scale;
        ++ev.entries_compared;
        if (ev.worst_entry.empty() || dev > ev.max_relative_deviation) {
            ev.max_relative_deviation = dev;
            ev.worst_entry = leaves;
        }
    }
    return ev;
}

std::string p_table_csv(int x_max, int y_max) {
    if (x_max < 0 || y_max < 0) throw InvalidArgument("table bounds must be nonnegative");
    std::ostringstream os;
    os << "x\\y";
    for (int y = 0; y <= y_max; ++y) os << ',' << y;
    os << '\n';
    for (int x = 0; x <= x_max; ++x) {
        os << x;
        for (int y = 0; y <= y_max; ++y) {
            os << ',';
            const IntPoly poly = p_polynomial(x, y);
            const auto& c = poly.coefficients();
            for (std::size_t k = 0; k < c.size(); ++k) os << (k ? ";" : "") << c[k];
        }
        os << '\n';
    }
    return os.str();
}

} // namespace dlyap
