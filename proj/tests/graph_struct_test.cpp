#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "gridblocks/errors.hpp"
#include "gridblocks/graph_struct.hpp"
#include "test_helpers.hpp"

using namespace gridblocks;

TEST_CASE("Partition constructors and validation") {
    Partition p = Partition::from_labels({0, 0, 1, 0, 2});
    CHECK(p.cluster_count() == 3);
    CHECK(p.clusters[0] == std::vector<int>{0, 1, 3});
    CHECK(p.cluster_of[2] == 1);
    CHECK(p.cluster_of[4] == 2);

    // labels are renumbered by first appearance
    Partition q = Partition::from_labels({7, 3, 7});
    CHECK(q.cluster_of == std::vector<int>{0, 1, 0});

    Partition s = Partition::singletons(4);
    CHECK(s.cluster_count() == 4);

    CHECK_THROWS_AS(Partition::from_clusters({{0, 1}, {1, 2}}, 3), DataError);  // overlap
    CHECK_THROWS_AS(Partition::from_clusters({{0, 1}}, 3), DataError);          // misses 2
    CHECK_THROWS_AS(Partition::from_clusters({{0, 5}}, 3), DataError);          // out of range
    CHECK_THROWS_AS(Partition::from_clusters({{}}, 0), DataError);              // empty cluster
    Partition ok = Partition::from_clusters({{2, 0}, {1}}, 3);
    CHECK(ok.clusters[0] == std::vector<int>{0, 2});  // sorted
}

TEST_CASE("satisfies_a1 and refine_to_connected") {
    // path 0-1-2-3
    PowerNetwork net = testutil::make_net(4, {{0, 1}, {1, 2}, {2, 3}});
    Partition good = Partition::from_clusters({{0, 1}, {2, 3}}, 4);
    Partition bad = Partition::from_clusters({{0, 3}, {1, 2}}, 4);  // {0,3} not connected
    CHECK(satisfies_a1(net, good));
    CHECK(!satisfies_a1(net, bad));

    Partition fixed = refine_to_connected(net, bad);
    CHECK(satisfies_a1(net, fixed));
    CHECK(fixed.cluster_count() == 3);  // {0}, {3}, {1,2}
    CHECK(is_finer(fixed, bad));
}

TEST_CASE("bridges match the brute-force oracle on random multigraphs") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
        std::uniform_int_distribution<int> n_dist(2, 9), e_dist(0, 7);
        PowerNetwork net = testutil::random_connected(rng, n_dist(rng), e_dist(rng));
        CAPTURE(trial);
        BridgeBlockDecomposition bb = bridges_and_bridge_blocks(net);
        std::vector<char> oracle = testutil::brute_bridges(net);
        for (int l = 0; l < net.line_count(); ++l) {
            CAPTURE(l);
            CHECK(static_cast<bool>(bb.is_bridge[l]) == static_cast<bool>(oracle[l]));
        }
        // bridge-blocks: endpoints of a bridge are in different blocks,
        // endpoints of a non-bridge in the same one
        for (const Line& l : net.lines()) {
            bool same = bb.blocks.cluster_of[l.from] == bb.blocks.cluster_of[l.to];
            CHECK(same == !bb.is_bridge[l.id]);
        }
        CHECK(is_tree(bb.bb_tree) == (testutil::count_islands(net, {}) == 1));
    }
}

TEST_CASE("merged parallel branches are never bridges") {
    // path 0-1-2 where 0-1 carries two merged branches
    std::vector<Bus> buses(3);
    for (int i = 0; i < 3; ++i) buses[i].id = i;
    Line a;
    a.id = 0;
    a.from = 0;
    a.to = 1;
    a.susceptance = 2.0;
    a.merged_from = {1, 2};
    Line b;
    b.id = 1;
    b.from = 1;
    b.to = 2;
    b.susceptance = 1.0;
    b.merged_from = {3};
    PowerNetwork net(buses, {a, b});
    BridgeBlockDecomposition bb = bridges_and_bridge_blocks(net);
    CHECK(!bb.is_bridge[0]);
    CHECK(bb.is_bridge[1]);
    CHECK(bb.blocks.cluster_count() == 2);  // {0,1} and {2}
}

TEST_CASE("bridge-block decomposition of case30") {
    ParseResult r = testutil::load_case("case30_ieee");
    BridgeBlockDecomposition bb = bridges_and_bridge_blocks(r.network);
    std::set<std::pair<int, int>> bridge_pairs;
    for (int lid : bb.bridges) {
        const Line& l = r.network.line(lid);
        int f = r.network.bus(l.from).original_id, t = r.network.bus(l.to).original_id;
        bridge_pairs.insert({std::min(f, t), std::max(f, t)});
    }
    CHECK(bridge_pairs == std::set<std::pair<int, int>>{{9, 11}, {12, 13}, {25, 26}});
    CHECK(bb.blocks.cluster_count() == 4);
    CHECK(bb.bb_tree.node_count == 4);
    CHECK(bb.bb_tree.edges.size() == 3);
    CHECK(is_tree(bb.bb_tree));
}

TEST_CASE("block decomposition against the articulation oracle") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> n_dist(2, 9), e_dist(0, 7);
        PowerNetwork net = testutil::random_connected(rng, n_dist(rng), e_dist(rng));
        CAPTURE(trial);
        BlockDecomposition bd = block_decomposition(net);

        // every line in exactly one block
        std::vector<int> line_seen(net.line_count(), 0);
        for (const auto& blk : bd.block_lines)
            for (int lid : blk) ++line_seen[lid];
        for (int l = 0; l < net.line_count(); ++l) CHECK(line_seen[l] == 1);
        for (int l = 0; l < net.line_count(); ++l)
            CHECK(bd.block_of_line[l] >= 0);

        // cut vertices equal the brute-force articulation points
        std::vector<char> oracle = testutil::brute_cut_vertices(net);
        for (int v = 0; v < net.bus_count(); ++v) {
            CAPTURE(v);
            CHECK(static_cast<bool>(bd.is_cut_vertex[v]) == static_cast<bool>(oracle[v]));
        }

        // two distinct blocks share at most one vertex
        std::vector<std::set<int>> verts(bd.block_lines.size());
        for (size_t b = 0; b < bd.block_lines.size(); ++b)
            for (int lid : bd.block_lines[b]) {
                verts[b].insert(net.line(lid).from);
                verts[b].insert(net.line(lid).to);
            }
        for (size_t a = 0; a < verts.size(); ++a)
            for (size_t b = a + 1; b < verts.size(); ++b) {
                std::vector<int> inter;
                std::set_intersection(verts[a].begin(), verts[a].end(), verts[b].begin(),
                                      verts[b].end(), std::back_inserter(inter));
                CHECK(inter.size() <= 1);
            }
    }
}

TEST_CASE("two triangles sharing a vertex: two blocks, one cut vertex") {
    PowerNetwork net =
        testutil::make_net(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}});
    BlockDecomposition bd = block_decomposition(net);
    CHECK(bd.block_lines.size() == 2);
    CHECK(bd.nontrivial_count() == 2);
    CHECK(bd.cut_vertices == std::vector<int>{2});
    CHECK(bd.blocks_of_vertex[2].size() == 2);
}

TEST_CASE("is_finer") {
    Partition fine = Partition::from_labels({0, 1, 2, 3});
    Partition mid = Partition::from_labels({0, 0, 1, 1});
    Partition coarse = Partition::from_labels({0, 0, 0, 0});
    CHECK(is_finer(fine, mid));
    CHECK(is_finer(mid, coarse));
    CHECK(is_finer(mid, mid));
    CHECK(!is_finer(coarse, mid));
    Partition cross = Partition::from_labels({0, 1, 0, 1});
    CHECK(!is_finer(mid, cross));
    CHECK_THROWS_AS(is_finer(fine, Partition::from_labels({0, 1})), DataError);
}

TEST_CASE("reduced_graph and is_tree") {
    PowerNetwork net = testutil::two_triangles();
    Partition by_triangle = Partition::from_clusters({{0, 1, 2}, {3, 4, 5}}, 6);
    ReducedMultigraph rg = reduced_graph(net, by_triangle);
    CHECK(rg.node_count == 2);
    REQUIRE(rg.edges.size() == 1);
    CHECK(rg.edges[0].line_id == 3);  // the bridge 2-3
    CHECK(is_tree(rg));

    ReducedMultigraph singles = reduced_graph(net, Partition::singletons(6));
    CHECK(singles.edges.size() == 7);
    CHECK(!is_tree(singles));
}

TEST_CASE("spanning tree counts on known graphs") {
    // complete graph K4: Cayley, 4^2 = 16
    PowerNetwork k4 = testutil::make_net(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(spanning_tree_count(reduced_graph(k4, Partition::singletons(4))) == 16);

    // cycle C5: 5
    PowerNetwork c5 = testutil::make_net(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
    CHECK(spanning_tree_count(reduced_graph(c5, Partition::singletons(5))) == 5);

    // a tree: exactly 1; disconnected: 0
    PowerNetwork path = testutil::make_net(3, {{0, 1}, {1, 2}});
    CHECK(spanning_tree_count(reduced_graph(path, Partition::singletons(3))) == 1);
    PowerNetwork split = testutil::make_net(4, {{0, 1}, {2, 3}});
    CHECK(spanning_tree_count(reduced_graph(split, Partition::singletons(4))) == 0);

    // theta multigraph: two nodes, three parallel edges -> 3 trees
    ReducedMultigraph theta;
    theta.node_count = 2;
    theta.edges = {{0, 1, 0}, {0, 1, 1}, {0, 1, 2}};
    CHECK(spanning_tree_count(theta) == 3);

    ReducedMultigraph empty;
    CHECK(spanning_tree_count(empty) == 0);
    ReducedMultigraph lone;
    lone.node_count = 1;
    CHECK(spanning_tree_count(lone) == 1);
}

TEST_CASE("matrix-tree count equals full enumeration on random multigraphs") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> n_dist(2, 6), e_dist(0, 6);
        PowerNetwork net = testutil::random_connected(rng, n_dist(rng), e_dist(rng));
        ReducedMultigraph rg = reduced_graph(net, Partition::singletons(net.bus_count()));
        CAPTURE(trial);
        BigInt count = spanning_tree_count(rg);
        auto trees = enumerate_spanning_trees(rg, BigInt(1000000));
        CHECK(BigInt(trees.size()) == count);

        // each tree really is a spanning tree; output is sorted and duplicate-free
        for (const auto& t : trees) {
            CHECK(static_cast<int>(t.size()) == net.bus_count() - 1);
            CHECK(std::is_sorted(t.begin(), t.end()));
            std::vector<int> others;
            for (int l = 0; l < net.line_count(); ++l)
                if (!std::binary_search(t.begin(), t.end(), l)) others.push_back(l);
            CHECK(testutil::count_islands(net, others) == 1);
        }
        CHECK(std::is_sorted(trees.begin(), trees.end()));
        CHECK(std::adjacent_find(trees.begin(), trees.end()) == trees.end());
    }
}

TEST_CASE("matrix-tree count on fixture bb-trees is one") {
    for (const std::string& name : testutil::fixture_names()) {
        ParseResult r = testutil::load_case(name);
        BridgeBlockDecomposition bb = bridges_and_bridge_blocks(r.network);
        CHECK(spanning_tree_count(bb.bb_tree) == 1);
    }
}

TEST_CASE("enumeration respects the cap") {
    PowerNetwork k4 = testutil::make_net(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    ReducedMultigraph rg = reduced_graph(k4, Partition::singletons(4));
    try {
        enumerate_spanning_trees(rg, BigInt(10));
        FAIL("expected EnumerationCapError");
    } catch (const EnumerationCapError& e) {
        CHECK(e.count() == doctest::Approx(16.0));
        CHECK(e.exit_code() == 4);
    }
    CHECK_NOTHROW(enumerate_spanning_trees(rg, BigInt(16)));
}

TEST_CASE("two-tree forest oracle") {
    PowerNetwork tri = testutil::make_net(3, {{0, 1}, {1, 2}, {0, 2}});
    // forests with 0 on one side and 2 on the other: single edges keeping them apart
    auto forests = enumerate_two_tree_forests(tri, {0}, {2});
    CHECK(forests == std::vector<std::vector<int>>{{0}, {1}});

    CHECK(enumerate_two_tree_forests(tri, {0, 1}, {1, 2}).empty());  // not disjoint

    std::mt19937 rng(5);
    PowerNetwork big = testutil::random_connected(rng, 10, 16);
    CHECK_THROWS_AS(enumerate_two_tree_forests(big, {0}, {1}), DataError);  // m > 24 gate
}

TEST_CASE("beta_weight") {
    PowerNetwork net = testutil::make_net(3, {{0, 1, 2.0}, {1, 2, 3.0}});
    CHECK(beta_weight(net, {0, 1}) == doctest::Approx(6.0));
    CHECK(beta_weight(net, {1}) == doctest::Approx(3.0));
    CHECK(beta_weight(net, {}) == 0.0);  // nonempty network
    PowerNetwork bare = testutil::make_net(2, {});
    CHECK(beta_weight(bare, {}) == 1.0);
}

TEST_CASE("share_simple_cycle and on_simple_path") {
    // two triangles {0,1,2}, {3,4,5} with bridge 2-3 (line 3)
    PowerNetwork net = testutil::two_triangles();
    BlockDecomposition bd = block_decomposition(net);

    CHECK(share_simple_cycle(bd, 0, 1));    // both in triangle A
    CHECK(share_simple_cycle(bd, 4, 6));    // both in triangle B
    CHECK(!share_simple_cycle(bd, 0, 4));   // across the bridge
    CHECK(!share_simple_cycle(bd, 0, 3));   // bridge vs triangle edge
    CHECK_THROWS_AS(share_simple_cycle(bd, 2, 2), DataError);

    // line 0 (edge 0-1) is on a simple 0..5 path, but no 3..5 path uses it
    CHECK(on_simple_path(bd, net, 0, 0, 5));
    CHECK(!on_simple_path(bd, net, 0, 3, 5));
    CHECK(on_simple_path(bd, net, 3, 0, 5));   // the bridge is on every crossing path
    CHECK(!on_simple_path(bd, net, 3, 0, 2));  // not needed within triangle A
    CHECK(!on_simple_path(bd, net, 0, 2, 2));  // j == k

    // different islands: never on a path
    PowerNetwork split = testutil::make_net(4, {{0, 1}, {2, 3}});
    BlockDecomposition bd2 = block_decomposition(split);
    CHECK(!on_simple_path(bd2, split, 0, 0, 3));
}
