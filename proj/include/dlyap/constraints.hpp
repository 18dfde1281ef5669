// constraints.hpp - toric tree parametrizations, vanishing polynomials, tree equivalence and rank constraints.
#pragma once

#include "dlyap/graph.hpp"
#include "dlyap/linalg.hpp"
#include "dlyap/lyapunov.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dlyap {

/// Cumulant variable name such as "s01", "t001" or "r0001"; indices are comma
/// separated when p > 10.
std::string cumulant_label(const std::vector<int>& multiset, int p);

/// Structure of a directed tree whose only self-loop sits at its single source.
/// Throws HypothesisViolated when g is not of that form.
struct RootedTree {
    int source = 0;
    /// Non-self parent of each vertex, -1 at the source.
    std::vector<int> parent;
    /// Distance from the source.
    std::vector<int> depth;

    explicit RootedTree(const DirectedGraph& g);
    int lowest_common_ancestor(const std::vector<int>& vertices) const;
};

/// Vertex sets at each distance from the source.
std::vector<std::vector<int>> level_partition(const DirectedGraph& g);

/// Top of the unique shortest equitrek between the given leaves.
int shortest_equitrek_top(const DirectedGraph& g, const std::vector<int>& leaves);

/// Exponent matrix of the shortest-equitrek monomial parametrization.
struct ToricMatrix {
    int p = 0;
    int order = 2;
    /// "v2_0", ..., "vn_{p-1}" followed by edge labels "a00", "a10" (target first).
    std::vector<std::string> row_labels;
    /// Cumulant multisets of orders 2..n in lexicographic order per order.
    std::vector<std::vector<int>> columns;
    std::vector<std::string> column_labels;
    /// rows x columns exponents.
    IntMatrix entries;

    std::size_t num_rows() const { return entries.size(); }
    std::size_t num_cols() const { return columns.size(); }
};

/// Throws HypothesisViolated (not a tree with a loop at the source only) and InvalidArgument (order < 2).
ToricMatrix toric_matrix(const DirectedGraph& g, int order);

/// Values of the toric row parameters at a model point: for each order m and vertex i,
/// v_i⁽ᵐ⁾ = Σ_k ω_k⁽ᵐ⁾ (a^{k->i})ᵐ over k on the path from the source to i, with the
/// source term divided by 1 - a₀₀ᵐ; then the edge weights.
std::vector<double> toric_parameter_values(const ParameterMatrix& A, const std::map<int, DiagonalCumulant>& omegas,
                                           int order);

/// Monomial value of every column of P at the given row parameter values.
std::vector<double> evaluate_toric_monomials(const ToricMatrix& P, const std::vector<double>& params);

/// Binomial x^{u+} - x^{u-} over cumulant columns.
struct Binomial {
    /// (column, exponent) with positive exponents.
    std::vector<std::pair<std::size_t, long>> plus;
    std::vector<std::pair<std::size_t, long>> minus;

    std::string to_string(const ToricMatrix& P) const;
    /// |m₊ - m₋| / max(|m₊|, |m₋|) at the given column values (0 when both vanish).
    double relative_value(const std::vector<double>& column_values) const;
};

/// Binomials from an exact integer kernel basis of P.
std::vector<Binomial> kernel_binomials(const ToricMatrix& P);

/// True when x^{u+} - x^{u-} has P u = 0.
bool binomial_in_lattice(const ToricMatrix& P, const Binomial& b);

/// Values of all cumulant columns of P on a stack (orders 2 and 3, and 4 when present).
std::vector<double> stack_column_values(const ToricMatrix& P, const CumulantStack& stack);

/// Outcome of evaluating one vanishing-polynomial candidate.
struct PolynomialCheck {
    std::string id;
    double value = 0.0;
    /// |value| / largest monomial magnitude.
    double relative_value = 0.0;
    bool expected_zero = false;
    /// Agreement of the numeric outcome with expected_zero at the given tolerances.
    bool consistent = false;
};

struct PolynomialTolerances {
    double vanish = 1e-9;
    double nonzero = 1e-6;
};

/// Level polynomials of three families on all relevant index pairs:
/// s_ij³t_iii² - s_ii³t_iij t_ijj, s_0i t_00j - s_0j t_00i, and s_ij t_00j - s_0j t_0ij (cross-level).
std::vector<PolynomialCheck> level_polynomial_checks(const DirectedGraph& g, const CumulantStack& stack,
                                                     const PolynomialTolerances& tol = {});

/// s_0l s_ij t_llj - s_0i s_ll t_ljj, expected zero iff l tops the shortest (i,j)-equitrek
/// and, when l is the source, i and j lie on the same level.
PolynomialCheck top_trek_polynomial_check(const DirectedGraph& g, const CumulantStack& stack, int i, int j, int l,
                                          const PolynomialTolerances& tol = {});

struct TreeEquivalence {
    bool equivalent = false;
    /// Violating level or pair, empty when equivalent.
    std::string witness;
    /// Exact row equivalence of the order-3 toric matrices, computed when equivalent.
    std::optional<bool> row_equivalent;
};

/// Decides whether two source-looped directed trees share their vanishing ideal by
/// comparing level partitions and shortest-equitrek tops. Throws HypothesisViolated and
/// ModelInconsistency (graph criterion and row equivalence disagree).
TreeEquivalence tree_equivalence(const DirectedGraph& g, const DirectedGraph& h);

/// g with the labels i and j exchanged.
DirectedGraph swap_vertices(const DirectedGraph& g, int i, int j);

/// Whether i and j are on one level, have at most one child each, and no third vertex
/// reaches either of them by a shorter shortest equitrek than they reach each other.
bool swap_preserves_ideal(const DirectedGraph& g, int i, int j);

enum class RankConstraintKind { ParentsS, ParentsStackedQ, Grandparents };
std::string to_string(RankConstraintKind kind);

struct RankConstraint {
    RankConstraintKind kind = RankConstraintKind::ParentsS;
    std::vector<int> U;
    int bound = 0;
    /// Row labels of the submatrix: "r" for S rows, "i,r" for slice rows of T.
    std::vector<std::string> rows;
    int rank = 0;
    /// True when bound >= min(rows, |U|), so the constraint carries no information.
    bool vacuous = false;
    long minors_checked = 0;
    /// Largest |det| / max|entry|^{bound+1} over the checked (bound+1)-minors.
    double max_violation = 0.0;
};

/// Submatrix with columns U for the given kind; rows as documented on RankConstraint.
Eigen::MatrixXd rank_constraint_matrix(const DirectedGraph& g, const CumulantStack& stack, RankConstraintKind kind,
                                       const std::vector<int>& U, std::vector<std::string>* row_labels = nullptr);

/// Upper bound on the rank of rank_constraint_matrix: |pa(U)| or |an₂(U)|, loops counted as parents.
int rank_constraint_bound(const DirectedGraph& g, RankConstraintKind kind, const std::vector<int>& U);

struct RankScanOptions {
    RankPolicy rank_policy{};
    /// Cap on the number of minors evaluated per constraint.
    long max_minors = 2000;
    bool throw_on_violation = true;
};

/// All three constraint kinds for every nonempty U with |U| <= max_subset.
/// Throws ModelInconsistency when an observed rank exceeds its bound (unless disabled).
std::vector<RankConstraint> rank_constraints_scan(const DirectedGraph& g, const CumulantStack& stack, int max_subset,
                                                  const RankScanOptions& opt = {});

} // namespace dlyap
