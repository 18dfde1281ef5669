// graph.cpp - directed graph structure, equitrek search and independence statements.
#include "dlyap/graph.hpp"

#include "dlyap/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

namespace dlyap {

namespace {

std::vector<std::vector<int>> skeleton_components(int p, const std::vector<Edge>& edges) {
    std::vector<int> parent(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) parent[static_cast<std::size_t>(v)] = v;
    std::function<int(int)> find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    for (const Edge& e : edges) {
        if (e.from == e.to) continue;
        const int a = find(e.from);
        const int b = find(e.to);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
    std::vector<std::vector<int>> comps;
    std::vector<int> slot(static_cast<std::size_t>(p), -1);
    for (int v = 0; v < p; ++v) {
        const int r = find(v);
        if (slot[static_cast<std::size_t>(r)] < 0) {
            slot[static_cast<std::size_t>(r)] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(v);
    }
    return comps;
}

} // namespace

DirectedGraph::DirectedGraph(int p, std::vector<Edge> edges) : p_(p), edges_(std::move(edges)) {
    if (p_ <= 0) throw InvalidArgument("graph must have at least one vertex");
    for (const Edge& e : edges_) {
        if (e.from < 0 || e.from >= p_ || e.to < 0 || e.to >= p_) {
            throw InvalidArgument("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                  " has a vertex outside [0, " + std::to_string(p_ - 1) + "]");
        }
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw InvalidArgument("duplicate edge in graph");
    }
    const auto P = static_cast<std::size_t>(p_);
    adjacency_.assign(P * P, 0);
    parents_.assign(P, {});
    children_.assign(P, {});
    for (const Edge& e : edges_) {
        adjacency_[static_cast<std::size_t>(e.from) * P + static_cast<std::size_t>(e.to)] = 1;
        if (e.from != e.to) {
            parents_[static_cast<std::size_t>(e.to)].push_back(e.from);
            children_[static_cast<std::size_t>(e.from)].push_back(e.to);
        }
    }
    for (auto& v : parents_) std::sort(v.begin(), v.end());
    for (auto& v : children_) std::sort(v.begin(), v.end());

    all_loops_ = true;
    for (int v = 0; v < p_; ++v) {
        if (!has_loop(v)) all_loops_ = false;
        if (parents_[static_cast<std::size_t>(v)].empty()) sources_.push_back(v);
        if (parents_[static_cast<std::size_t>(v)].empty() && children_[static_cast<std::size_t>(v)].empty()) {
            isolated_.push_back(v);
        }
    }
    components_ = skeleton_components(p_, edges_);

    // Kahn's algorithm decides acyclicity.
    std::vector<int> indeg(P, 0);
    for (int v = 0; v < p_; ++v) indeg[static_cast<std::size_t>(v)] = static_cast<int>(parents_[static_cast<std::size_t>(v)].size());
    std::deque<int> ready;
    for (int v = 0; v < p_; ++v)
        if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    int seen = 0;
    while (!ready.empty()) {
        const int v = ready.front();
        ready.pop_front();
        ++seen;
        for (int c : children_[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    is_dag_ = (seen == p_);

    std::size_t skeleton_edges = 0;
    for (int u = 0; u < p_; ++u)
        for (int v = u + 1; v < p_; ++v)
            if (skeleton_adjacent(u, v)) ++skeleton_edges;
    is_polytree_ = is_dag_ && components_.size() == 1 && skeleton_edges + 1 == P;
}

bool DirectedGraph::has_edge(int from, int to) const {
    if (from < 0 || from >= p_ || to < 0 || to >= p_) return false;
    return adjacency_[static_cast<std::size_t>(from) * static_cast<std::size_t>(p_) + static_cast<std::size_t>(to)] != 0;
}

int DirectedGraph::edge_index(int from, int to) const {
    const Edge key{from, to};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key) return -1;
    return static_cast<int>(it - edges_.begin());
}

std::vector<int> DirectedGraph::parents_with_loop(int v) const {
    std::vector<int> out = parents(v);
    if (has_loop(v)) out.insert(std::lower_bound(out.begin(), out.end(), v), v);
    return out;
}

std::vector<int> DirectedGraph::out_neighbours(int v) const {
    std::vector<int> out = children(v);
    if (has_loop(v)) out.insert(std::lower_bound(out.begin(), out.end(), v), v);
    return out;
}

bool DirectedGraph::skeleton_adjacent(int u, int v) const {
    return u != v && (has_edge(u, v) || has_edge(v, u));
}

DirectedGraph DirectedGraph::relabeled(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != p_) throw DimensionMismatch("permutation length differs from vertex count");
    std::vector<int> check = perm;
    std::sort(check.begin(), check.end());
    for (int v = 0; v < p_; ++v)
        if (check[static_cast<std::size_t>(v)] != v) throw InvalidArgument("relabeling is not a permutation");
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const Edge& e : edges_) out.push_back({perm[static_cast<std::size_t>(e.from)], perm[static_cast<std::size_t>(e.to)]});
    return DirectedGraph(p_, std::move(out));
}

std::string DirectedGraph::describe() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        if (k) os << ',';
        os << edges_[k].from << "->" << edges_[k].to;
    }
    return os.str();
}

std::vector<int> topological_order(const DirectedGraph& g) {
    const int p = g.p();
    std::vector<int> indeg(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) indeg[static_cast<std::size_t>(v)] = static_cast<int>(g.parents(v).size());
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < p; ++v)
        if (indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(p));
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : g.children(v))
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
    if (static_cast<int>(order.size()) != p) throw CyclicGraph("graph has a directed cycle of length at least two");
    return order;
}

bool Trek::is_equitrek() const {
    if (legs.empty()) return false;
    const std::size_t n = legs.front().size();
    for (const auto& leg : legs)
        if (leg.size() != n || leg.empty() || leg.front() != top) return false;
    return true;
}

bool Trek::is_base_trek() const {
    for (const auto& leg : legs) {
        std::vector<int> sorted = leg;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    }
    return true;
}

namespace {

// reach[k][u] is true when target can be reached from u by a walk of exactly k edges.
std::vector<std::vector<unsigned char>> exact_reach(const DirectedGraph& g, int target, int max_len) {
    const auto P = static_cast<std::size_t>(g.p());
    std::vector<std::vector<unsigned char>> reach(static_cast<std::size_t>(max_len) + 1, std::vector<unsigned char>(P, 0));
    reach[0][static_cast<std::size_t>(target)] = 1;
    for (int k = 1; k <= max_len; ++k) {
        for (const Edge& e : g.edges()) {
            if (reach[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(e.to)]) {
                reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(e.from)] = 1;
            }
        }
    }
    return reach;
}

void collect_walks(const DirectedGraph& g, const std::vector<std::vector<unsigned char>>& reach, int remaining,
                   std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    const int u = current.back();
    for (int v : g.out_neighbours(u)) {
        if (!reach[static_cast<std::size_t>(remaining - 1)][static_cast<std::size_t>(v)]) continue;
        current.push_back(v);
        collect_walks(g, reach, remaining - 1, current, out);
        current.pop_back();
    }
}

} // namespace

std::vector<Trek> enumerate_equitreks(const DirectedGraph& g, const std::vector<int>& leaves, int max_len) {
    if (leaves.empty()) throw InvalidArgument("leaf tuple must be nonempty");
    if (max_len < 0) throw InvalidArgument("max_len must be nonnegative");
    for (int v : leaves)
        if (v < 0 || v >= g.p()) throw InvalidArgument("leaf outside vertex range");
    std::vector<std::vector<std::vector<unsigned char>>> reach;
    reach.reserve(leaves.size());
    for (int v : leaves) reach.push_back(exact_reach(g, v, max_len));

    std::vector<Trek> result;
    for (int L = 0; L <= max_len; ++L) {
        std::vector<Trek> level;
        for (int top = 0; top < g.p(); ++top) {
            std::vector<std::vector<std::vector<int>>> per_leg(leaves.size());
            bool empty = false;
            for (std::size_t k = 0; k < leaves.size(); ++k) {
                if (!reach[k][static_cast<std::size_t>(L)][static_cast<std::size_t>(top)]) {
                    empty = true;
                    break;
                }
                std::vector<int> current{top};
                collect_walks(g, reach[k], L, current, per_leg[k]);
            }
            if (empty) continue;
            std::vector<std::size_t> idx(leaves.size(), 0);
            bool done = false;
            while (!done) {
                Trek t;
                t.top = top;
                for (std::size_t k = 0; k < leaves.size(); ++k) t.legs.push_back(per_leg[k][idx[k]]);
                level.push_back(std::move(t));
                done = true;
                for (std::size_t k = leaves.size(); k-- > 0;) {
                    if (++idx[k] < per_leg[k].size()) {
                        done = false;
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        std::sort(level.begin(), level.end(), [](const Trek& a, const Trek& b) { return a.legs < b.legs; });
        for (auto& t : level) result.push_back(std::move(t));
    }
    return result;
}

bool equitrek_exists(const DirectedGraph& g, const std::vector<int>& leaves) {
    if (leaves.empty()) throw InvalidArgument("leaf tuple must be nonempty");
    const int p = g.p();
    const std::size_t n = leaves.size();
    for (int v : leaves)
        if (v < 0 || v >= p) throw InvalidArgument("leaf outside vertex range");
    std::size_t states = 1;
    for (std::size_t k = 0; k < n; ++k) {
        states *= static_cast<std::size_t>(p);
        if (states > (std::size_t{1} << 26)) throw InvalidArgument("leaf tuple too long for exhaustive search");
    }
    std::vector<std::vector<int>> in(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) in[static_cast<std::size_t>(v)] = g.in_neighbours(v);

    auto encode = [&](const std::vector<int>& s) {
        std::size_t code = 0;
        for (int v : s) code = code * static_cast<std::size_t>(p) + static_cast<std::size_t>(v);
        return code;
    };
    auto diagonal = [](const std::vector<int>& s) {
        return std::all_of(s.begin(), s.end(), [&](int v) { return v == s.front(); });
    };
    std::vector<unsigned char> visited(states, 0);
    std::deque<std::vector<int>> queue;
    visited[encode(leaves)] = 1;
    queue.push_back(leaves);
    while (!queue.empty()) {
        std::vector<int> s = std::move(queue.front());
        queue.pop_front();
        if (diagonal(s)) return true;
        // Every predecessor tuple: one in-neighbour per coordinate.
        std::vector<std::size_t> idx(n, 0);
        bool any_empty = false;
        for (std::size_t k = 0; k < n; ++k)
            if (in[static_cast<std::size_t>(s[k])].empty()) any_empty = true;
        if (any_empty) continue;
        while (true) {
            std::vector<int> t(n);
            for (std::size_t k = 0; k < n; ++k) t[k] = in[static_cast<std::size_t>(s[k])][idx[k]];
            const std::size_t code = encode(t);
            if (!visited[code]) {
                visited[code] = 1;
                queue.push_back(std::move(t));
            }
            std::size_t k = 0;
            while (k < n) {
                if (++idx[k] < in[static_cast<std::size_t>(s[k])].size()) break;
                idx[k] = 0;
                ++k;
            }
            if (k == n) break;
        }
    }
    return false;
}

bool equitrek_exists(const DirectedGraph& g, int i, int j) { return equitrek_exists(g, std::vector<int>{i, j}); }

EquitrekGraph::EquitrekGraph(int p, std::vector<unsigned char> adjacency) : p_(p), adj_(std::move(adjacency)) {
    if (adj_.size() != static_cast<std::size_t>(p) * static_cast<std::size_t>(p)) {
        throw DimensionMismatch("equitrek graph adjacency has wrong size");
    }
}

bool EquitrekGraph::adjacent(int i, int j) const {
    return adj_.at(static_cast<std::size_t>(i) * static_cast<std::size_t>(p_) + static_cast<std::size_t>(j)) != 0;
}

std::vector<std::pair<int, int>> EquitrekGraph::biedges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < p_; ++i)
        for (int j = i; j < p_; ++j)
            if (adjacent(i, j)) out.emplace_back(i, j);
    return out;
}

EquitrekGraph equitrek_graph(const DirectedGraph& g) {
    const int p = g.p();
    const auto P = static_cast<std::size_t>(p);
    std::vector<unsigned char> adj(P * P, 0);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            const bool e = equitrek_exists(g, i, j);
            adj[static_cast<std::size_t>(i) * P + static_cast<std::size_t>(j)] = e;
            adj[static_cast<std::size_t>(j) * P + static_cast<std::size_t>(i)] = e;
        }
    }
    return EquitrekGraph(p, std::move(adj));
}

namespace {

void check_vertex_sets(const DirectedGraph& g, std::initializer_list<const std::vector<int>*> sets) {
    std::set<int> seen;
    for (const auto* s : sets) {
        for (int v : *s) {
            if (v < 0 || v >= g.p()) throw InvalidArgument("vertex outside range in independence query");
            if (!seen.insert(v).second) throw InvalidArgument("vertex sets in independence query are not disjoint");
        }
    }
}

} // namespace

bool implied_marginal_independence(const DirectedGraph& g, const std::vector<int>& I, const std::vector<int>& J) {
    if (I.empty() || J.empty()) throw InvalidArgument("independence query needs nonempty I and J");
    check_vertex_sets(g, {&I, &J});
    for (int i : I)
        for (int j : J)
            if (equitrek_exists(g, i, j)) return false;
    return true;
}

bool implied_conditional_independence(const DirectedGraph& g, const std::vector<int>& I, const std::vector<int>& J,
                                      const std::vector<int>& K) {
    if (I.empty() || J.empty()) throw InvalidArgument("independence query needs nonempty I and J");
    check_vertex_sets(g, {&I, &J, &K});
    const EquitrekGraph eg = equitrek_graph(g);
    std::vector<unsigned char> allowed(static_cast<std::size_t>(g.p()), 0);
    std::vector<unsigned char> target(static_cast<std::size_t>(g.p()), 0);
    for (int v : I) allowed[static_cast<std::size_t>(v)] = 1;
    for (int v : K) allowed[static_cast<std::size_t>(v)] = 1;
    for (int v : J) {
        allowed[static_cast<std::size_t>(v)] = 1;
        target[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<unsigned char> seen(static_cast<std::size_t>(g.p()), 0);
    std::deque<int> queue(I.begin(), I.end());
    for (int v : I) seen[static_cast<std::size_t>(v)] = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int w = 0; w < g.p(); ++w) {
            if (w == u || !allowed[static_cast<std::size_t>(w)] || !eg.adjacent(u, w)) continue;
            if (target[static_cast<std::size_t>(w)]) return false;
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                queue.push_back(w);
            }
        }
    }
    return true;
}

StarClassification classify_star(const DirectedGraph& g) {
    if (!g.is_weakly_connected()) throw DisconnectedGraph("skeleton is not connected");
    const int p = g.p();
    std::vector<std::vector<int>> nbr(static_cast<std::size_t>(p));
    std::size_t edge_count = 0;
    for (int u = 0; u < p; ++u)
        for (int v = 0; v < p; ++v)
            if (g.skeleton_adjacent(u, v)) {
                nbr[static_cast<std::size_t>(u)].push_back(v);
                if (u < v) ++edge_count;
            }

    StarClassification out;
    if (p >= 2 && edge_count + 1 == static_cast<std::size_t>(p)) {
        for (int c = 0; c < p; ++c) {
            if (static_cast<int>(nbr[static_cast<std::size_t>(c)].size()) == p - 1) {
                out.kind = StarKind::Star;
                out.center = c;
                return out;
            }
        }
    }
    if (p < 6) return out;

    // Vertices lying on every path with three vertices.
    std::vector<unsigned char> candidate(static_cast<std::size_t>(p), 1);
    bool any_path = false;
    for (int v = 0; v < p; ++v) {
        const auto& nv = nbr[static_cast<std::size_t>(v)];
        for (std::size_t a = 0; a < nv.size(); ++a) {
            for (std::size_t b = a + 1; b < nv.size(); ++b) {
                any_path = true;
                for (int c = 0; c < p; ++c)
                    if (c != v && c != nv[a] && c != nv[b]) candidate[static_cast<std::size_t>(c)] = 0;
            }
        }
    }
    if (!any_path) return out;
    for (int c = 0; c < p; ++c) {
        if (candidate[static_cast<std::size_t>(c)]) {
            out.kind = StarKind::GeneralizedTwoStar;
            out.center = c;
            return out;
        }
    }
    return out;
}

std::string to_string(StarKind kind) {
    switch (kind) {
    case StarKind::Star: return "star";
    case StarKind::GeneralizedTwoStar: return "generalized-two-star";
    case StarKind::Neither: return "neither";
    }
    return "neither";
}

} // namespace dlyap
