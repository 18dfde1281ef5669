// graph.hpp - directed graphs with self-loops, equitreks and independence statements.
#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace dlyap {

/// Directed edge from -> to. A self-loop has from == to.
struct Edge {
    int from = 0;
    int to = 0;
    auto operator<=>(const Edge&) const = default;
};

/// Immutable directed graph on vertices {0, ..., p-1}.
///
/// Edges are kept sorted by (from, to). All structural predicates are computed
/// once at construction.
class DirectedGraph {
public:
    DirectedGraph() = default;
    /// Throws InvalidArgument on out-of-range vertices or duplicate edges.
    DirectedGraph(int p, std::vector<Edge> edges);

    int p() const noexcept { return p_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    bool has_edge(int from, int to) const;
    bool has_loop(int v) const { return has_edge(v, v); }
    /// Position of the edge in edges(), or -1.
    int edge_index(int from, int to) const;

    /// Parents excluding v itself, ascending.
    const std::vector<int>& parents(int v) const { return parents_.at(static_cast<std::size_t>(v)); }
    /// Children excluding v itself, ascending.
    const std::vector<int>& children(int v) const { return children_.at(static_cast<std::size_t>(v)); }
    /// Parents including v when v carries a self-loop, ascending.
    std::vector<int> parents_with_loop(int v) const;
    /// In-neighbours including a self-loop, ascending.
    std::vector<int> in_neighbours(int v) const { return parents_with_loop(v); }
    /// Out-neighbours including a self-loop, ascending.
    std::vector<int> out_neighbours(int v) const;

    bool is_dag() const noexcept { return is_dag_; }
    bool is_polytree() const noexcept { return is_polytree_; }
    bool has_all_self_loops() const noexcept { return all_loops_; }
    bool is_weakly_connected() const noexcept { return components_.size() <= 1; }
    /// Vertices without non-self parents.
    const std::vector<int>& sources() const noexcept { return sources_; }
    /// Vertices without any non-loop incident edge.
    const std::vector<int>& isolated_vertices() const noexcept { return isolated_; }
    /// Connected components of the skeleton (self-loops ignored), each ascending.
    const std::vector<std::vector<int>>& weak_components() const noexcept { return components_; }
    /// Skeleton adjacency (undirected, self-loops ignored).
    bool skeleton_adjacent(int u, int v) const;

    /// Graph with vertex v renamed to perm[v].
    DirectedGraph relabeled(const std::vector<int>& perm) const;
    /// Human readable edge list such as "0->0,0->1".
    std::string describe() const;

    bool operator==(const DirectedGraph& other) const { return p_ == other.p_ && edges_ == other.edges_; }

private:
    int p_ = 0;
    std::vector<Edge> edges_;
    std::vector<unsigned char> adjacency_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<int> sources_;
    std::vector<int> isolated_;
    std::vector<std::vector<int>> components_;
    bool is_dag_ = true;
    bool is_polytree_ = false;
    bool all_loops_ = false;
};

/// Linear order in which every non-loop edge points forward; smallest index first
/// among ready vertices. Throws CyclicGraph on a directed cycle of length >= 2.
std::vector<int> topological_order(const DirectedGraph& g);

/// Tuple of walks that all start at a common top vertex.
struct Trek {
    int top = 0;
    std::vector<std::vector<int>> legs;

    /// Edge length of the first leg (all legs agree for an equitrek).
    int length() const { return legs.empty() ? 0 : static_cast<int>(legs.front().size()) - 1; }
    bool is_equitrek() const;
    /// True when no leg repeats a vertex.
    bool is_base_trek() const;
    bool operator==(const Trek&) const = default;
};

/// All equitreks with the given leaves and leg length at most max_len, ordered by
/// length and then lexicographically on the legs.
std::vector<Trek> enumerate_equitreks(const DirectedGraph& g, const std::vector<int>& leaves, int max_len);

/// True iff an equitrek between i and j exists, decided by a search on vertex pairs.
bool equitrek_exists(const DirectedGraph& g, int i, int j);
/// True iff an equitrek with the given leaves exists (search on vertex tuples).
bool equitrek_exists(const DirectedGraph& g, const std::vector<int>& leaves);

/// Bidirected graph with an edge {i,j} whenever an equitrek joins i and j.
class EquitrekGraph {
public:
    EquitrekGraph() = default;
    EquitrekGraph(int p, std::vector<unsigned char> adjacency);

    int p() const noexcept { return p_; }
    bool adjacent(int i, int j) const;
    /// Unordered pairs {i,j} with i <= j, lexicographic.
    std::vector<std::pair<int, int>> biedges() const;

private:
    int p_ = 0;
    std::vector<unsigned char> adj_;
};

EquitrekGraph equitrek_graph(const DirectedGraph& g);

/// True iff no biedge of the equitrek graph joins I and J.
bool implied_marginal_independence(const DirectedGraph& g, const std::vector<int>& I, const std::vector<int>& J);
/// True iff I and J are disconnected in the equitrek graph restricted to I, J and K.
bool implied_conditional_independence(const DirectedGraph& g, const std::vector<int>& I, const std::vector<int>& J,
                                      const std::vector<int>& K);

enum class StarKind { Star, GeneralizedTwoStar, Neither };

struct StarClassification {
    StarKind kind = StarKind::Neither;
    int center = -1;
};

/// Classifies the undirected skeleton. Throws DisconnectedGraph.
StarClassification classify_star(const DirectedGraph& g);

std::string to_string(StarKind kind);

} // namespace dlyap
