// trek.hpp - trek-rule evaluation, restricted base-trek coefficients and their numerators.
#pragma once

#include "dlyap/graph.hpp"
#include "dlyap/lyapunov.hpp"
#include "dlyap/polynomial.hpp"

#include <map>
#include <string>
#include <vector>

namespace dlyap {

/// One equitrek together with its weight w_top · Π a^{leg}.
struct TrekMonomialTerm {
    Trek trek;
    double coefficient = 0.0;
    int noise_index = 0;
};

/// Σ over equitreks of length <= max_len of w_top · Π a^{leg}, evaluated through
/// matrix powers: Σ_L Σ_t w_t Π_k (Aᴸ)_{i_k t}. Throws DimensionMismatch.
double trek_rule_entry(const ParameterMatrix& A, const DiagonalCumulant& omega, const std::vector<int>& indices,
                       int max_len);

/// Explicit monomials of every equitrek with the given leaves and length <= max_len.
std::vector<TrekMonomialTerm> trek_monomials(const ParameterMatrix& A, const DiagonalCumulant& omega,
                                             const std::vector<int>& indices, int max_len);

/// Numerator p_{x,y} as a polynomial in u = t². Throws InvalidArgument on negative input.
IntPoly p_polynomial(int x, int y);

/// C(x,y;t) = t^{|x-y|} p_{x,y}(t) / (1-t²)^{x+y+1}. Throws PoleAtUnit when |t| >= 1.
double restricted_coefficient(int x, int y, double t);
Rational restricted_coefficient_exact(int x, int y, const Rational& t);

/// Tuples of self-avoiding directed paths (self-loops excluded) from a common top to
/// the given leaves, grouped by top ascending and ordered lexicographically on the legs.
std::vector<Trek> enumerate_base_treks(const DirectedGraph& g, const std::vector<int>& leaves);

/// Effective matrix t·I + offdiag on the graph g with self-loops added at every vertex.
/// offdiag maps non-loop edges of g to weights; missing edges default to zero.
/// Throws InvalidArgument on unknown edges and UnstableEffective when unstable.
ParameterMatrix restricted_effective_matrix(const DirectedGraph& g, double t, const std::map<Edge, double>& offdiag);

/// Covariance of the model with constant self-loop t on every vertex, assembled from
/// base treks weighted by C(d₁,d₂;t). Throws CyclicGraph, PoleAtUnit, UnstableEffective.
SymmetricTensor restricted_covariance(const DirectedGraph& g, double t, const std::map<Edge, double>& offdiag,
                                      const DiagonalCumulant& omega2);

struct PRecursionReport {
    bool polynomial_identities = true;
    bool coefficient_identities = true;
    int cases_checked = 0;
    std::vector<std::string> failures;

    bool passed() const { return polynomial_identities && coefficient_identities; }
};

/// Checks the two-step recursions of p_{x,y} (exact integer polynomials) and of
/// C(x,y;t) (exact rationals at several t) for all 0 <= x <= y <= bounds.
PRecursionReport check_p_recursions(int x_max, int y_max);

/// Conjectured numerator for legs xs as a polynomial in u = tⁿ, n = |xs|:
/// coefficient of u^{Σx - max x - l} is Σ_k (-1)^{l-k} binom(Σx+1, l-k) Π_i binom(x_i+k, k).
IntPoly conjectured_higher_p(const std::vector<int>& xs);

/// Exact numerator obtained by multiplying the loop-insertion series
/// Σ_j Π_i binom(max+j, x_i) u^j by (1-u)^{Σx+1}.
IntPoly restricted_numerator_series(const std::vector<int>& xs);

/// Order-n restricted coefficient t^{n·max-Σx} p(tⁿ)/(1-tⁿ)^{Σx+1} with the conjectured p.
double conjectured_restricted_coefficient(const std::vector<int>& xs, double t);

/// Result of comparing the conjectured order-3 restricted trek rule with the exact solve.
struct ConjectureEvidence {
    std::string label = "CONJECTURE";
    double max_relative_deviation = 0.0;
    std::size_t entries_compared = 0;
    std::vector<int> worst_entry;
};

ConjectureEvidence conjecture_validator(const DirectedGraph& g, double t, const std::map<Edge, double>& offdiag,
                                        const DiagonalCumulant& omega3);

/// CSV table of p_{x,y} coefficient lists: header "x\y,0,1,...", cells "c0;c1;...".
std::string p_table_csv(int x_max, int y_max);

} // namespace dlyap
