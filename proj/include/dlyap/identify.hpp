// identify.hpp - recovery of edge weights and noise cumulants from cumulant stacks.
#pragma once

#include "dlyap/graph.hpp"
#include "dlyap/linalg.hpp"
#include "dlyap/lyapunov.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace dlyap {

struct IdentifyOptions {
    /// Closed-form denominators with magnitude at or below this value are degenerate.
    double degeneracy_tol = 1e-12;
    /// Relative forward residual required for the recovered verdict.
    double residual_tol = 1e-8;
    RankPolicy rank_policy{};
};

enum class Verdict { Recovered, Degenerate, HypothesisViolated };
std::string to_string(Verdict v);

/// Diagnostics for one per-vertex linear solve.
struct BlockDiagnostic {
    int vertex = 0;
    /// Human readable row labels such as "s_0,3" or "t_0,0,3".
    std::vector<std::string> rows;
    /// Vertices l of the unknowns a_{j,l}.
    std::vector<int> unknowns;
    double condition_number = 0.0;
    int rank = 0;
};

/// Diagnostics for the closed-form step at a source.
struct SourceDiagnostic {
    int source = 0;
    int partner = 0;
    std::string formula;
};

struct EquationCount {
    int order = 2;
    long parameters = 0;
    long equations = 0;
    long zero_entries = 0;
    bool bound_satisfied = true;
};

struct IdentifiabilityReport {
    std::string method;
    Verdict verdict = Verdict::Degenerate;
    std::optional<Eigen::MatrixXd> A;
    /// Recovered noise cumulants in increasing order.
    std::vector<DiagonalCumulant> noise;
    /// Off-diagonal defect of each noise recovery.
    std::vector<double> noise_offdiag_defects;
    /// Relative forward residual per order, in the same order as noise.
    std::vector<double> forward_residuals;
    std::vector<SourceDiagnostic> sources;
    std::vector<BlockDiagnostic> blocks;
    std::optional<EquationCount> equation_count;
    std::string message;
};

enum class TwoNodeVariant { BothLoops, SourceLoopOnly };

struct TwoNodeSolution {
    double a00 = 0.0;
    double a10 = 0.0;
    std::optional<double> a11;
    /// Closed-form noise entries (source-loop-only variant): w⁽²⁾ then w⁽³⁾.
    std::optional<DiagonalCumulant> omega2;
    std::optional<DiagonalCumulant> omega3;
};

/// Closed forms on the pair (0,1). Throws DegenerateDenominator, DimensionMismatch and
/// InvalidArgument (both-loops variant without fourth-order cumulants).
TwoNodeSolution identify_two_node(const CumulantStack& stack, TwoNodeVariant variant, const IdentifyOptions& opt = {});

/// Same closed forms applied to the pair (source, partner) of a larger stack.
TwoNodeSolution identify_pair(const CumulantStack& stack, int source, int partner, TwoNodeVariant variant,
                              const IdentifyOptions& opt = {});

/// One root of the (S,T)-only relation of the both-loops two-node model.
struct TwoNodeCandidate {
    double a00 = 0.0;
    double a10 = 0.0;
    double a11 = 0.0;
    double spectral_radius = 0.0;
    bool schur_stable = false;
};

/// Real solutions (a00,a10,a11) of the second and third order equations alone.
/// Experimental: reports stability of each root without choosing between them.
std::vector<TwoNodeCandidate> enumerate_two_node_st_solutions(const CumulantStack& stack,
                                                              const IdentifyOptions& opt = {});

/// Vertex-by-vertex recovery for acyclic graphs with self-loops at every vertex.
/// Throws HypothesisViolated, SingularBlock, DegenerateDenominator.
IdentifiabilityReport identify_dag_all_loops(const DirectedGraph& g, const CumulantStack& stack,
                                             const IdentifyOptions& opt = {});

/// Vertex-by-vertex recovery for polytrees with self-loops at every source.
/// Throws HypothesisViolated, SingularBlock, DegenerateDenominator.
IdentifiabilityReport identify_polytree(const DirectedGraph& g, const CumulantStack& stack,
                                        const IdentifyOptions& opt = {});

/// Recovery through the two-node closed forms for graphs 0->1 with a loop at 0.
IdentifiabilityReport identify_two_node_report(const DirectedGraph& g, const CumulantStack& stack,
                                               const IdentifyOptions& opt = {});

/// Parameters |E| + p(n_max-1) against the number of cumulant entries of orders
/// 2..n_max that are not forced to zero by a missing equitrek.
EquationCount count_equations_vs_parameters(const DirectedGraph& g, int n_max);

/// Which closed-form method applies to g, or an empty string.
std::string select_identification_method(const DirectedGraph& g, bool have_fourth_order);

} // namespace dlyap
