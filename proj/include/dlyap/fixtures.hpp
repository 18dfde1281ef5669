// fixtures.hpp - named example graphs and random graph families.
#pragma once

#include "dlyap/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dlyap::fixtures {

/// 0->1 with a loop at 0.
DirectedGraph source_loop_edge();
/// 0->1 with a loop at 1.
DirectedGraph sink_loop_edge();
/// 0->1, 1->0 without loops.
DirectedGraph bare_two_cycle();
/// 0->1 with loops at both vertices (the complete two-node graph minus 1->0).
DirectedGraph two_node_both_loops();
/// 0->1, 1->0 with a loop at 0.
DirectedGraph two_cycle_source_loop();
/// 0->1, 1->0 with loops at both vertices.
DirectedGraph two_cycle_both_loops();
/// 0->1, 0->3, 2->3 with all loops.
DirectedGraph ci_four_vertex();
/// 0->1, 1->2, 1->3 with a loop at 0.
DirectedGraph four_vertex_tree();
/// 0->1, 0->2, 2->3, 2->4 with a loop at 0.
DirectedGraph five_node_tree();
/// 0->1, 0->2, 1->3, 2->3 with a loop at 0.
DirectedGraph diamond();
/// 0->1, 0->2, 1->3, 1->4, 2->3, 3->4 with a loop at 0.
DirectedGraph five_node_two_paths();
/// 0->1, 0->2 with a loop at 0.
DirectedGraph two_children();
/// 0->1->2->3 with loops at 0 and 3.
DirectedGraph grandchildren_path();
/// Directed path 0->1->..->p-1 with loops at every vertex.
DirectedGraph looped_path(int p);
/// Hub 0 pointing at leaves 1..leaves.
DirectedGraph star(int leaves);
/// Skeleton 0-1, 0-2, 0-3, 0-4, 1-2, 4-5 oriented from low to high index.
DirectedGraph generalized_two_star();
/// p vertices carrying only self-loops.
DirectedGraph loops_only(int p);

/// Names accepted by by_name.
std::vector<std::string> names();
/// Throws InvalidArgument for unknown names.
DirectedGraph by_name(const std::string& name);

/// Random DAG with all self-loops and no isolated vertex; labels are shuffled.
DirectedGraph random_dag_all_loops(int p, std::uint64_t seed, double edge_probability = 0.5);

/// Random polytree with loops at every source and random loops elsewhere; labels are shuffled.
DirectedGraph random_polytree(int p, std::uint64_t seed);

/// Random directed tree rooted at 0 whose only self-loop sits at the root.
DirectedGraph random_rooted_tree(int p, std::uint64_t seed);

/// One representative per isomorphism class of weakly connected digraphs on p <= 5
/// vertices with a self-loop at every vertex.
std::vector<DirectedGraph> connected_all_loop_classes(int p);

} // namespace dlyap::fixtures
