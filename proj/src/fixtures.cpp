// fixtures.cpp - named example graphs and random graph families.
#include "dlyap/fixtures.hpp"

#include "dlyap/error.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <random>

namespace dlyap::fixtures {

namespace {

std::vector<Edge> with_loops(std::vector<Edge> edges, const std::vector<int>& loops) {
    for (int v : loops) edges.push_back({v, v});
    return edges;
}

} // namespace

DirectedGraph source_loop_edge() { return DirectedGraph(2, {{0, 0}, {0, 1}}); }
DirectedGraph sink_loop_edge() { return DirectedGraph(2, {{0, 1}, {1, 1}}); }
DirectedGraph bare_two_cycle() { return DirectedGraph(2, {{0, 1}, {1, 0}}); }
DirectedGraph two_node_both_loops() { return DirectedGraph(2, {{0, 0}, {0, 1}, {1, 1}}); }
DirectedGraph two_cycle_source_loop() { return DirectedGraph(2, {{0, 0}, {0, 1}, {1, 0}}); }
DirectedGraph two_cycle_both_loops() { return DirectedGraph(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}); }

DirectedGraph ci_four_vertex() {
    return DirectedGraph(4, with_loops({{0, 1}, {0, 3}, {2, 3}}, {0, 1, 2, 3}));
}

DirectedGraph four_vertex_tree() { return DirectedGraph(4, {{0, 0}, {0, 1}, {1, 2}, {1, 3}}); }
DirectedGraph five_node_tree() { return DirectedGraph(5, {{0, 0}, {0, 1}, {0, 2}, {2, 3}, {2, 4}}); }
DirectedGraph diamond() { return DirectedGraph(4, {{0, 0}, {0, 1}, {0, 2}, {1, 3}, {2, 3}}); }

DirectedGraph five_node_two_paths() {
    return DirectedGraph(5, {{0, 0}, {0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 3}, {3, 4}});
}

DirectedGraph two_children() { return DirectedGraph(3, {{0, 0}, {0, 1}, {0, 2}}); }
DirectedGraph grandchildren_path() { return DirectedGraph(4, {{0, 0}, {0, 1}, {1, 2}, {2, 3}, {3, 3}}); }

DirectedGraph looped_path(int p) {
    std::vector<Edge> edges;
    for (int v = 0; v < p; ++v) {
        edges.push_back({v, v});
        if (v + 1 < p) edges.push_back({v, v + 1});
    }
    return DirectedGraph(p, edges);
}

DirectedGraph star(int leaves) {
    std::vector<Edge> edges;
    for (int v = 1; v <= leaves; ++v) edges.push_back({0, v});
    return DirectedGraph(leaves + 1, edges);
}

DirectedGraph generalized_two_star() {
    return DirectedGraph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {4, 5}});
}

DirectedGraph loops_only(int p) {
    std::vector<Edge> edges;
    for (int v = 0; v < p; ++v) edges.push_back({v, v});
    return DirectedGraph(p, edges);
}

namespace {

const std::map<std::string, std::function<DirectedGraph()>>& registry() {
    static const std::map<std::string, std::function<DirectedGraph()>> table = {
        {"source_loop_edge", source_loop_edge},
        {"sink_loop_edge", sink_loop_edge},
        {"bare_two_cycle", bare_two_cycle},
        {"two_node_both_loops", two_node_both_loops},
        {"two_cycle_source_loop", two_cycle_source_loop},
        {"two_cycle_both_loops", two_cycle_both_loops},
        {"ci_four_vertex", ci_four_vertex},
        {"four_vertex_tree", four_vertex_tree},
        {"five_node_tree", five_node_tree},
        {"diamond", diamond},
        {"five_node_two_paths", five_node_two_paths},
        {"two_children", two_children},
        {"grandchildren_path", grandchildren_path},
        {"looped_path_3", [] { return looped_path(3); }},
        {"looped_path_4", [] { return looped_path(4); }},
        {"star_5", [] { return star(5); }},
        {"generalized_two_star", generalized_two_star},
        {"loops_only_3", [] { return loops_only(3); }},
    };
    return table;
}

std::vector<int> shuffled_labels(int p, std::mt19937_64& rng) {
    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

} // namespace

std::vector<std::string> names() {
    std::vector<std::string> out;
    for (const auto& [name, make] : registry()) out.push_back(name);
    return out;
}

DirectedGraph by_name(const std::string& name) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw InvalidArgument("unknown fixture '" + name + "'");
    return it->second();
}

DirectedGraph random_dag_all_loops(int p, std::uint64_t seed, double edge_probability) {
    if (p < 2) throw InvalidArgument("random DAG needs p >= 2");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(edge_probability);
    std::vector<std::vector<char>> adj(static_cast<std::size_t>(p), std::vector<char>(static_cast<std::size_t>(p), 0));
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = coin(rng);
    for (int v = 0; v < p; ++v) {
        bool touched = false;
        for (int u = 0; u < p; ++u)
            if (adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] || adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)]) touched = true;
        if (touched) continue;
        int u = std::uniform_int_distribution<int>(0, p - 2)(rng);
        if (u >= v) ++u;
        adj[static_cast<std::size_t>(std::min(u, v))][static_cast<std::size_t>(std::max(u, v))] = 1;
    }
    std::vector<Edge> edges;
    for (int i = 0; i < p; ++i) {
        edges.push_back({i, i});
        for (int j = i + 1; j < p; ++j)
            if (adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) edges.push_back({i, j});
    }
    return DirectedGraph(p, edges).relabeled(shuffled_labels(p, rng));
}

DirectedGraph random_polytree(int p, std::uint64_t seed) {
    if (p < 2) throw InvalidArgument("random polytree needs p >= 2");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<Edge> edges;
    for (int v = 1; v < p; ++v) {
        const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
        if (coin(rng)) {
            edges.push_back({u, v});
        } else {
            edges.push_back({v, u});
        }
    }
    const DirectedGraph skeleton(p, edges);
    for (int v = 0; v < p; ++v)
        if (skeleton.parents(v).empty() || coin(rng)) edges.push_back({v, v});
    return DirectedGraph(p, edges).relabeled(shuffled_labels(p, rng));
}

DirectedGraph random_rooted_tree(int p, std::uint64_t seed) {
    if (p < 1) throw InvalidArgument("random tree needs p >= 1");
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges{{0, 0}};
    for (int v = 1; v < p; ++v) edges.push_back({std::uniform_int_distribution<int>(0, v - 1)(rng), v});
    return DirectedGraph(p, edges);
}

std::vector<DirectedGraph> connected_all_loop_classes(int p) {
    if (p < 1 || p > 5) throw InvalidArgument("isomorphism classes are enumerated for 1 <= p <= 5");
    std::vector<std::pair<int, int>> arcs;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j) arcs.emplace_back(i, j);
    const int m = static_cast<int>(arcs.size());
    std::vector<int> arc_of(static_cast<std::size_t>(p * p), -1);
    for (int k = 0; k < m; ++k) arc_of[static_cast<std::size_t>(arcs[static_cast<std::size_t>(k)].first * p + arcs[static_cast<std::size_t>(k)].second)] = k;

    // Per permutation, lookup tables mapping each byte of the arc mask to permuted bits.
    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    const int nbytes = (m + 7) / 8;
    std::vector<std::vector<std::array<std::uint32_t, 256>>> tables;
    do {
        std::vector<std::array<std::uint32_t, 256>> t(static_cast<std::size_t>(nbytes));
        for (int b = 0; b < nbytes; ++b)
            for (int byte = 0; byte < 256; ++byte) {
                std::uint32_t out = 0;
                for (int bit = 0; bit < 8; ++bit) {
                    const int k = b * 8 + bit;
                    if (k >= m || !((byte >> bit) & 1)) continue;
                    const auto [i, j] = arcs[static_cast<std::size_t>(k)];
                    out |= 1u << arc_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)] * p + perm[static_cast<std::size_t>(j)])];
                }
                t[static_cast<std::size_t>(b)][static_cast<std::size_t>(byte)] = out;
            }
        tables.push_back(std::move(t));
    } while (std::next_permutation(perm.begin(), perm.end()));

    auto connected = [&](std::uint32_t mask) {
        std::vector<int> root(static_cast<std::size_t>(p));
        std::iota(root.begin(), root.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (root[static_cast<std::size_t>(x)] != x) x = root[static_cast<std::size_t>(x)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
            return x;
        };
        int parts = p;
        for (int k = 0; k < m; ++k) {
            if (!((mask >> k) & 1u)) continue;
            const int a = find(arcs[static_cast<std::size_t>(k)].first);
            const int b = find(arcs[static_cast<std::size_t>(k)].second);
            if (a != b) {
                root[static_cast<std::size_t>(a)] = b;
                --parts;
            }
        }
        return parts == 1;
    };

    std::vector<DirectedGraph> out;
    const std::uint32_t total = m == 0 ? 1u : (1u << m);
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        if (!connected(mask)) continue;
        bool minimal = true;
        for (const auto& t : tables) {
            std::uint32_t image = 0;
            for (int b = 0; b < nbytes; ++b) image |= t[static_cast<std::size_t>(b)][(mask >> (8 * b)) & 0xffu];
            if (image < mask) {
                minimal = false;
                break;
            }
        }
        if (!minimal) continue;
        std::vector<Edge> edges;
        for (int v = 0; v < p; ++v) edges.push_back({v, v});
        for (int k = 0; k < m; ++k)
            if ((mask >> k) & 1u) edges.push_back({arcs[static_cast<std::size_t>(k)].first, arcs[static_cast<std::size_t>(k)].second});
        out.emplace_back(p, edges);
    }
    return out;
}

} // namespace dlyap::fixtures
