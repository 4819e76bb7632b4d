#include "doctest.h"

#include <sstream>

#include "gridblocks/reports.hpp"
#include "json.hpp"
#include "test_helpers.hpp"

using namespace gridblocks;

TEST_CASE("compute_stats and stats_csv golden rows") {
    ParseResult r14 = testutil::load_case("case14_ieee");
    StatsRow row = compute_stats("case14_ieee", r14.network);
    CHECK(row.edges == 20);
    CHECK(row.bridges == 1);
    CHECK(row.pct_bridges == doctest::Approx(5.00).epsilon(0.0001));
    CHECK(row.bb_count == 2);
    CHECK(row.nontrivial_sizes == std::vector<int>{13});

    ParseResult r39 = testutil::load_case("case39_epri");
    StatsRow row39 = compute_stats("case39_epri", r39.network);

    std::string csv = stats_csv({row, row39});
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "network,edges,bridges,pct_bridges,bridge_blocks,nontrivial_sizes");
    std::getline(is, line);
    CHECK(line == "case14_ieee,20,1,5.00,2,13");
    std::getline(is, line);
    CHECK(line == "case39_epri,46,11,23.91,12,28");

    auto j = nlohmann::json::parse(stats_json({row}));
    REQUIRE(j.is_array());
    CHECK(j[0]["network"] == "case14_ieee");
    CHECK(j[0]["bridges"] == 1);
    CHECK(j[0]["nontrivial_sizes"] == std::vector<int>{13});
}

TEST_CASE("flows_csv lists per-line loadings") {
    PowerNetwork net = testutil::make_net(3, {{0, 1, 1.0, 10.0}, {1, 2, 1.0}});
    FlowVector f(2);
    f << -4.0, 4.0;
    std::string csv = flows_csv(net, f);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "line,from_bus,to_bus,flow_mw,capacity_mw,loading");
    std::getline(is, line);
    CHECK(line == "0,1,2,-4,10,0.4");
    std::getline(is, line);
    CHECK(line == "1,2,3,4,inf,0");  // uncapped lines report zero loading
}

TEST_CASE("matrix_csv layout") {
    Eigen::MatrixXd m(2, 3);
    m << 1.0, 0.5, 0.0, -1.0, 0.25, 2.0;
    std::string csv = matrix_csv("lodf", {7, 9}, {1, 2, 3}, m);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "lodf,1,2,3");
    std::getline(is, line);
    CHECK(line == "7,1,0.5,0");
    std::getline(is, line);
    CHECK(line == "9,-1,0.25,2");
}

TEST_CASE("influence graph exports") {
    InfluenceGraph g;
    g.k_min = 0.05;
    g.node_count = 3;
    g.edges = {{0, 2}};
    std::string dot = influence_dot(g);
    CHECK(dot.find("graph influence {") == 0);
    CHECK(dot.find("l0 -- l2;") != std::string::npos);
    CHECK(dot.find("l1;") != std::string::npos);

    auto j = nlohmann::json::parse(influence_json(g));
    CHECK(j["k_min"] == 0.05);
    CHECK(j["lines"] == 3);
    REQUIRE(j["edges"].size() == 1);
    CHECK(j["edges"][0][0] == 0);
    CHECK(j["edges"][0][1] == 2);
}

TEST_CASE("bb_tree_dot labels blocks and bridges") {
    PowerNetwork net = testutil::two_triangles();
    BridgeBlockDecomposition bb = bridges_and_bridge_blocks(net);
    std::string dot = bb_tree_dot(bb);
    CHECK(dot.find("graph bb_tree {") == 0);
    CHECK(dot.find("3 buses") != std::string::npos);
    CHECK(dot.find("line 3") != std::string::npos);  // the bridge
}

TEST_CASE("evaluate_method fields are internally consistent") {
    PowerNetwork net = testutil::two_triangles();
    FlowVector f = Eigen::VectorXd::Ones(net.line_count());
    FlowWeights w = flow_weights(net, f);
    MethodReport rep = evaluate_method(w, net, 2, ClusterMethod::fastgreedy);
    CHECK(rep.result.partition.cluster_count() == 2);
    ReducedMultigraph rg = reduced_graph(net, rep.result.partition);
    CHECK(rep.cross_edges == static_cast<int>(rg.edges.size()));
    CHECK(rep.fraction == doctest::Approx(static_cast<double>(rep.cross_edges) / 7.0));
    CHECK(rep.lines_to_switch == rep.cross_edges - 1);
    CHECK(rep.seconds >= 0.0);
}

TEST_CASE("partition_json and comparison_csv") {
    PowerNetwork net = testutil::two_triangles();
    FlowVector f = Eigen::VectorXd::Ones(net.line_count());
    FlowWeights w = flow_weights(net, f);
    std::vector<MethodReport> reps = {
        evaluate_method(w, net, 2, ClusterMethod::fastgreedy),
        evaluate_method(w, net, 2, ClusterMethod::spectral_Ln),
    };
    std::vector<int> names;
    for (const Bus& b : net.buses()) names.push_back(b.original_id);

    auto j = nlohmann::json::parse(partition_json(reps, names));
    REQUIRE(j.size() == 2);
    CHECK(j[0]["method"] == "fastgreedy");
    CHECK(j[1]["method"] == "spectral_Ln");
    CHECK(j[0]["clusters"] == 2);
    REQUIRE(j[0]["assignment"].size() == 6);
    CHECK(j[0]["assignment"][0]["bus"] == 1);

    std::string csv = comparison_csv(reps, 2);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line ==
          "method,b,runtime_sec,q,q_n,clusters,cross_edges,cross_edge_fraction,lines_to_switch,"
          "cluster_sizes");
    std::getline(is, line);
    CHECK(line.rfind("fastgreedy,2,", 0) == 0);
    CHECK(line.find(",3 3") != std::string::npos);  // two clusters of three buses
    std::getline(is, line);
    CHECK(line.rfind("spectral_Ln,2,", 0) == 0);
}

TEST_CASE("plan_json and trace_json round-trip through a JSON parser") {
    PowerNetwork net = testutil::make_net(
        6, {{0, 1, 1.0, 50.0}, {1, 2, 1.0, 50.0}, {0, 2, 1.0, 50.0}, {2, 3, 1.0, 50.0},
            {3, 4, 1.0, 50.0}, {4, 5, 1.0, 50.0}, {3, 5, 1.0, 50.0}});
    InjectionVector p(6);
    p << 5.0, 3.0, 0.0, 0.0, -3.0, -5.0;

    SwitchingPlan plan = one_shot(net, p, 2, ClusterMethod::fastgreedy);
    auto j = nlohmann::json::parse(plan_json(plan));
    CHECK(j["switched_lines"].get<std::vector<int>>() == plan.switched_lines);
    CHECK(j["gamma"].get<double>() == doctest::Approx(plan.gamma));
    CHECK(j["congestion_flagged"].is_boolean());
    CHECK(j["bridge_block_sizes"].is_array());

    RefinementTrace trace = recursive_refine(net, p, 2, 1e9, ClusterMethod::fastgreedy);
    auto t = nlohmann::json::parse(trace_json(trace));
    CHECK(t["iterations"].size() == trace.iterations.size());
    std::string reason = t["stop_reason"].get<std::string>();
    CHECK((reason == "max_iters" || reason == "congestion_threshold" || reason == "exhausted"));
    CHECK(t["all_switched_lines"].get<std::vector<int>>() == trace.all_switched_lines);
    if (!trace.iterations.empty()) {
        CHECK(t["iterations"][0]["switched_lines"].get<std::vector<int>>() ==
              trace.iterations[0].switched_lines);
    }
}
