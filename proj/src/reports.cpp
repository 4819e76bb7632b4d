#include "gridblocks/reports.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace gridblocks {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string fmt2(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

}  // namespace

StatsRow compute_stats(const std::string& name, const PowerNetwork& net) {
    StatsRow row;
    row.name = name;
    row.edges = net.branch_count();
    BridgeBlockDecomposition bb = bridges_and_bridge_blocks(net);
    row.bridges = static_cast<int>(bb.bridges.size());
    row.pct_bridges = row.edges > 0 ? 100.0 * row.bridges / row.edges : 0.0;
    row.bb_count = bb.blocks.cluster_count();
    for (const auto& block : bb.blocks.clusters)
        if (block.size() > 2) row.nontrivial_sizes.push_back(static_cast<int>(block.size()));
    std::sort(row.nontrivial_sizes.rbegin(), row.nontrivial_sizes.rend());
    return row;
}

std::string stats_csv(const std::vector<StatsRow>& rows) {
    std::ostringstream os;
    os << "network,edges,bridges,pct_bridges,bridge_blocks,nontrivial_sizes\n";
    for (const StatsRow& r : rows) {
        os << r.name << ',' << r.edges << ',' << r.bridges << ',' << fmt2(r.pct_bridges) << ','
           << r.bb_count << ',';
        for (size_t i = 0; i < r.nontrivial_sizes.size(); ++i)
            os << (i ? " " : "") << r.nontrivial_sizes[i];
        os << '\n';
    }
    return os.str();
}

std::string stats_json(const std::vector<StatsRow>& rows) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const StatsRow& r : rows) {
        j.push_back({{"network", r.name},
                     {"edges", r.edges},
                     {"bridges", r.bridges},
                     {"pct_bridges", r.pct_bridges},
                     {"bridge_blocks", r.bb_count},
                     {"nontrivial_sizes", r.nontrivial_sizes}});
    }
    return j.dump(2) + "\n";
}

std::string flows_csv(const PowerNetwork& net, const FlowVector& f) {
    std::ostringstream os;
    os << "line,from_bus,to_bus,flow_mw,capacity_mw,loading\n";
    for (const Line& l : net.lines()) {
        os << l.id << ',' << net.bus(l.from).original_id << ',' << net.bus(l.to).original_id << ','
           << fmt(f[l.id]) << ',';
        if (l.has_capacity())
            os << fmt(l.capacity_mw) << ',' << fmt(std::abs(f[l.id]) / l.capacity_mw);
        else
            os << "inf,0";
        os << '\n';
    }
    return os.str();
}

std::string matrix_csv(const std::string& corner, const std::vector<int>& row_ids,
                       const std::vector<int>& col_ids, const Eigen::MatrixXd& values) {
    std::ostringstream os;
    os << corner;
    for (int c : col_ids) os << ',' << c;
    os << '\n';
    for (size_t r = 0; r < row_ids.size(); ++r) {
        os << row_ids[r];
        for (size_t c = 0; c < col_ids.size(); ++c)
            os << ',' << fmt(values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        os << '\n';
    }
    return os.str();
}

std::string influence_dot(const InfluenceGraph& g) {
    std::ostringstream os;
    os << "graph influence {\n";
    os << "  // threshold K_min = " << fmt(g.k_min) << "\n";
    for (int l = 0; l < g.node_count; ++l) os << "  l" << l << ";\n";
    for (const auto& [a, b] : g.edges) os << "  l" << a << " -- l" << b << ";\n";
    os << "}\n";
    return os.str();
}

std::string influence_json(const InfluenceGraph& g) {
    nlohmann::ordered_json j;
    j["k_min"] = g.k_min;
    j["lines"] = g.node_count;
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [a, b] : g.edges) j["edges"].push_back({a, b});
    return j.dump(2) + "\n";
}

std::string bb_tree_dot(const BridgeBlockDecomposition& bb) {
    std::ostringstream os;
    os << "graph bb_tree {\n";
    for (int b = 0; b < bb.bb_tree.node_count; ++b)
        os << "  b" << b << " [label=\"" << bb.blocks.clusters[b].size() << " buses\"];\n";
    for (const ReducedEdge& e : bb.bb_tree.edges)
        os << "  b" << e.a << " -- b" << e.b << " [label=\"line " << e.line_id << "\"];\n";
    os << "}\n";
    return os.str();
}

MethodReport evaluate_method(const FlowWeights& w, const PowerNetwork& net, int b,
                             ClusterMethod method) {
    MethodReport rep;
    auto started = std::chrono::steady_clock::now();
    rep.result = obi_solve(w, net, b, method);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    ReducedMultigraph rg = reduced_graph(net, rep.result.partition);
    rep.cross_edges = static_cast<int>(rg.edges.size());
    rep.fraction = net.line_count() > 0 ? static_cast<double>(rep.cross_edges) / net.line_count() : 0.0;
    rep.lines_to_switch = rep.cross_edges - (rep.result.partition.cluster_count() - 1);
    return rep;
}

std::string partition_json(const std::vector<MethodReport>& reports,
                           const std::vector<int>& vertex_names) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const MethodReport& rep : reports) {
        nlohmann::ordered_json jm;
        jm["method"] = method_name(rep.result.method);
        jm["clusters"] = rep.result.partition.cluster_count();
        jm["q"] = rep.result.q;
        jm["q_n"] = rep.result.q_n;
        nlohmann::ordered_json assign = nlohmann::ordered_json::array();
        for (size_t v = 0; v < rep.result.partition.cluster_of.size(); ++v)
            assign.push_back({{"bus", vertex_names[v]}, {"cluster", rep.result.partition.cluster_of[v]}});
        jm["assignment"] = assign;
        j.push_back(jm);
    }
    return j.dump(2) + "\n";
}

std::string comparison_csv(const std::vector<MethodReport>& reports, int b) {
    std::ostringstream os;
    os << "method,b,runtime_sec,q,q_n,clusters,cross_edges,cross_edge_fraction,lines_to_switch,"
          "cluster_sizes\n";
    for (const MethodReport& rep : reports) {
        os << method_name(rep.result.method) << ',' << b << ',' << fmt(rep.seconds) << ','
           << fmt(rep.result.q) << ',' << fmt(rep.result.q_n) << ','
           << rep.result.partition.cluster_count() << ',' << rep.cross_edges << ','
           << fmt(rep.fraction) << ',' << rep.lines_to_switch << ',';
        std::vector<size_t> sizes;
        for (const auto& c : rep.result.partition.clusters) sizes.push_back(c.size());
        std::sort(sizes.rbegin(), sizes.rend());
        for (size_t i = 0; i < sizes.size(); ++i) os << (i ? " " : "") << sizes[i];
        os << '\n';
    }
    return os.str();
}

std::string plan_json(const SwitchingPlan& plan) {
    nlohmann::ordered_json j;
    j["switched_lines"] = plan.switched_lines;
    j["gamma"] = plan.gamma;
    j["congested_count"] = plan.congested_count;
    j["congestion_flagged"] = plan.congestion_flagged;
    std::vector<int> sizes;
    for (const auto& c : plan.resulting_bb.blocks.clusters) sizes.push_back(static_cast<int>(c.size()));
    std::sort(sizes.rbegin(), sizes.rend());
    j["bridge_block_sizes"] = sizes;
    j["bridges"] = plan.resulting_bb.bridges;
    return j.dump(2) + "\n";
}

std::string trace_json(const RefinementTrace& trace) {
    nlohmann::ordered_json j;
    j["iterations"] = nlohmann::ordered_json::array();
    for (const RefinementIteration& it : trace.iterations) {
        j["iterations"].push_back({{"switched_lines", it.switched_lines},
                                   {"gamma", it.gamma},
                                   {"block_sizes", it.block_sizes},
                                   {"seconds", it.seconds}});
    }
    switch (trace.stop_reason) {
        case StopReason::max_iters: j["stop_reason"] = "max_iters"; break;
        case StopReason::congestion_threshold: j["stop_reason"] = "congestion_threshold"; break;
        case StopReason::exhausted: j["stop_reason"] = "exhausted"; break;
    }
    j["all_switched_lines"] = trace.all_switched_lines;
    return j.dump(2) + "\n";
}

}  // namespace gridblocks
