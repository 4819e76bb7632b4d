#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <vector>

#include "gridblocks/net_model.hpp"

namespace gridblocks {

using BigInt = boost::multiprecision::cpp_int;

struct Partition {
    std::vector<std::vector<int>> clusters;  // disjoint, nonempty, sorted vertex lists
    std::vector<int> cluster_of;             // vertex -> cluster index

    int cluster_count() const { return static_cast<int>(clusters.size()); }
    static Partition from_labels(const std::vector<int>& labels);
    static Partition from_clusters(std::vector<std::vector<int>> clusters, int vertex_count);
    static Partition singletons(int vertex_count);
};

// True when every cluster of p induces a connected subgraph of net.
bool satisfies_a1(const PowerNetwork& net, const Partition& p);

// Splits disconnected clusters into their connected components (paper's
// fallback to the finer partition P').
Partition refine_to_connected(const PowerNetwork& net, const Partition& p);

struct ReducedEdge {
    int a = 0, b = 0;   // cluster indices
    int line_id = 0;    // originating line
};

struct ReducedMultigraph {
    int node_count = 0;
    std::vector<ReducedEdge> edges;  // parallel edges kept, no self-loops
};

struct BridgeBlockDecomposition {
    Partition blocks;                // bridge-blocks as a vertex partition
    std::vector<int> bridges;        // sorted line ids
    std::vector<char> is_bridge;     // per line
    ReducedMultigraph bb_tree;       // one node per bridge-block, one edge per bridge
};

struct BlockDecomposition {
    std::vector<std::vector<int>> block_lines;     // edge sets of the biconnected components
    std::vector<int> block_of_line;                // line -> block index
    std::vector<int> cut_vertices;                 // sorted
    std::vector<char> is_cut_vertex;               // per vertex
    std::vector<std::vector<int>> blocks_of_vertex;  // vertex -> blocks containing it

    bool nontrivial(int block) const { return block_lines[block].size() > 1; }
    int nontrivial_count() const;
};

// Bridges and bridge-blocks with multigraph semantics: a line carrying merged
// parallel branches is never a bridge (the parallel pair forms a cycle).
BridgeBlockDecomposition bridges_and_bridge_blocks(const PowerNetwork& net);

BlockDecomposition block_decomposition(const PowerNetwork& net);

bool is_finer(const Partition& p1, const Partition& p2);

ReducedMultigraph reduced_graph(const PowerNetwork& net, const Partition& p);

bool is_tree(const ReducedMultigraph& rg);

// Kirchhoff matrix-tree count with edge multiplicities as weights; 0 when
// disconnected, exact integer arithmetic.
BigInt spanning_tree_count(const ReducedMultigraph& rg);

// Contraction/deletion enumeration; yields sorted line-id sets in
// lexicographic order. Throws EnumerationCapError when the matrix-tree count
// exceeds cap.
void enumerate_spanning_trees(const ReducedMultigraph& rg, const BigInt& cap,
                              const std::function<void(const std::vector<int>&)>& yield);
std::vector<std::vector<int>> enumerate_spanning_trees(const ReducedMultigraph& rg,
                                                       const BigInt& cap);

// Exhaustive two-tree spanning forest oracle (exponential; test use only).
std::vector<std::vector<int>> enumerate_two_tree_forests(const PowerNetwork& net,
                                                         const std::vector<int>& v1,
                                                         const std::vector<int>& v2);

double beta_weight(const PowerNetwork& net, const std::vector<int>& edge_set);

// True iff both lines lie in the same (necessarily nontrivial) block.
bool share_simple_cycle(const BlockDecomposition& bd, int l, int lhat);

// True iff line l can appear on some simple j-k path: its block lies on the
// block-cut-tree path between j and k.
bool on_simple_path(const BlockDecomposition& bd, const PowerNetwork& net, int l, int j, int k);

}  // namespace gridblocks
