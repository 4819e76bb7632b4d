#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <Eigen/Core>

#include "CLI11.hpp"

#include "gridblocks/errors.hpp"
#include "gridblocks/reports.hpp"

namespace fs = std::filesystem;
using namespace gridblocks;

namespace {

struct Options {
    std::string input;
    std::string output_dir = ".";
    std::vector<std::string> formats = {"json", "csv", "dot"};
    std::string rebalance_mode = "uniform-generators";
    int b = 2;
    int i_max = 3;
    double delta = 1.0;
    double k_min = 0.005;
    double tree_cap = static_cast<double>(kDefaultTreeCap);
    double balance_tol = 1e-6;
    std::string method = "fastgreedy";
    std::string mode = "recursive";
    std::vector<int> outage;
};

bool wants(const Options& opt, const std::string& format) {
    return std::find(opt.formats.begin(), opt.formats.end(), format) != opt.formats.end();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const Options& opt, const std::string& name, const std::string& content) {
    fs::create_directories(opt.output_dir);
    fs::path p = fs::path(opt.output_dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + p.string());
    out << content;
}

RebalanceMode parse_mode(const std::string& s) {
    if (s == "reject") return RebalanceMode::reject;
    if (s == "uniform-generators") return RebalanceMode::uniform_generators;
    if (s == "proportional-generators") return RebalanceMode::proportional_generators;
    throw UsageError("unknown rebalance mode: " + s);
}

ClusterMethod parse_method(const std::string& s) {
    if (s == "fastgreedy") return ClusterMethod::fastgreedy;
    if (s == "spectral-ln") return ClusterMethod::spectral_Ln;
    if (s == "spectral-bn") return ClusterMethod::spectral_Bn;
    throw UsageError("unknown clustering method: " + s);
}

std::string input_stem(const Options& opt) { return fs::path(opt.input).stem().string(); }

ParseResult load(const Options& opt) { return parse_auto(read_file(opt.input)); }

InjectionVector balanced_injections(const Options& opt, const ParseResult& parsed) {
    return rebalance(parsed.injections, parsed.network, parse_mode(opt.rebalance_mode));
}

int cmd_stats(const Options& opt) {
    ParseResult parsed = load(opt);
    StatsRow row = compute_stats(input_stem(opt), parsed.network);
    std::string csv = stats_csv({row});
    std::cout << csv;
    if (wants(opt, "csv")) write_file(opt, "stats.csv", csv);
    if (wants(opt, "json")) write_file(opt, "stats.json", stats_json({row}));
    if (wants(opt, "dot"))
        write_file(opt, "bb_tree.dot", bb_tree_dot(bridges_and_bridge_blocks(parsed.network)));
    return 0;
}

int cmd_flow(const Options& opt) {
    ParseResult parsed = load(opt);
    InjectionVector p = balanced_injections(opt, parsed);
    LaplacianSystem sys = LaplacianSystem::build(parsed.network);
    FlowVector f = dc_flow(sys, parsed.network, p, opt.balance_tol);
    std::string csv = flows_csv(parsed.network, f);
    std::cout << csv;
    if (wants(opt, "csv")) write_file(opt, "flows.csv", csv);
    return 0;
}

int cmd_factors(const Options& opt) {
    ParseResult parsed = load(opt);
    LaplacianSystem sys = LaplacianSystem::build(parsed.network);
    std::vector<int> all_lines(parsed.network.line_count());
    for (int l = 0; l < parsed.network.line_count(); ++l) all_lines[l] = l;
    if (opt.outage.empty()) {
        PTDFMatrix d = ptdf_matrix(sys, parsed.network);
        if (wants(opt, "csv")) write_file(opt, "ptdf.csv", matrix_csv("line", all_lines, all_lines, d.values));
        std::cout << "wrote PTDF matrix (" << parsed.network.line_count() << " lines)\n";
    } else {
        GLODFMatrix k = glodf(sys, parsed.network, opt.outage);
        if (wants(opt, "csv"))
            write_file(opt, "glodf.csv", matrix_csv("line", k.survivors, k.outage, k.values));
        GLODFMatrix cols = lodf_submatrix(sys, parsed.network, opt.outage);
        if (wants(opt, "csv"))
            write_file(opt, "lodf_columns.csv", matrix_csv("line", cols.survivors, cols.outage, cols.values));
        std::cout << "wrote GLODF for outage of " << k.outage.size() << " line(s)\n";
    }
    return 0;
}

int cmd_influence(const Options& opt) {
    ParseResult parsed = load(opt);
    LaplacianSystem sys = LaplacianSystem::build(parsed.network);
    BridgeBlockDecomposition bb = bridges_and_bridge_blocks(parsed.network);
    InfluenceGraph g = influence_graph(sys, parsed.network, bb, opt.k_min);
    if (wants(opt, "dot")) write_file(opt, "influence.dot", influence_dot(g));
    if (wants(opt, "json")) write_file(opt, "influence.json", influence_json(g));
    std::cout << "influence graph: " << g.node_count << " lines, " << g.edges.size()
              << " pairs above K_min=" << opt.k_min << "\n";
    return 0;
}

int cmd_partition(const Options& opt) {
    ParseResult parsed = load(opt);
    InjectionVector p = balanced_injections(opt, parsed);
    LaplacianSystem sys = LaplacianSystem::build(parsed.network);
    FlowVector f = dc_flow(sys, parsed.network, p, opt.balance_tol);
    BridgeBlockDecomposition bb = bridges_and_bridge_blocks(parsed.network);

    // cluster the largest bridge-block in isolation, as the refinement does
    int largest = 0;
    for (int c = 0; c < bb.blocks.cluster_count(); ++c)
        if (bb.blocks.clusters[c].size() > bb.blocks.clusters[largest].size()) largest = c;
    Subnetwork sub = extract_subnetwork(parsed.network, bb.blocks.clusters[largest]);
    FlowVector f_sub(sub.network.line_count());
    for (int i = 0; i < sub.network.line_count(); ++i) f_sub[i] = f[sub.line_map[i]];
    FlowWeights w = flow_weights(sub.network, f_sub);

    std::vector<ClusterMethod> methods;
    if (opt.method == "all")
        methods = {ClusterMethod::fastgreedy, ClusterMethod::spectral_Ln, ClusterMethod::spectral_Bn};
    else
        methods = {parse_method(opt.method)};

    std::vector<MethodReport> reports;
    for (ClusterMethod m : methods) reports.push_back(evaluate_method(w, sub.network, opt.b, m));

    std::vector<int> names;
    for (int v = 0; v < sub.network.bus_count(); ++v)
        names.push_back(parsed.network.bus(sub.from_sub[v]).original_id);
    if (wants(opt, "json")) write_file(opt, "partition.json", partition_json(reports, names));
    std::string csv = comparison_csv(reports, opt.b);
    std::cout << csv;
    if (wants(opt, "csv")) write_file(opt, "partition_comparison.csv", csv);
    return 0;
}

int cmd_refine(const Options& opt) {
    ParseResult parsed = load(opt);
    InjectionVector p = balanced_injections(opt, parsed);
    ClusterMethod method = parse_method(opt.method);

    std::vector<int> switched;
    if (opt.mode == "one-shot") {
        SwitchingPlan plan =
            one_shot(parsed.network, p, opt.b, method, BigInt(static_cast<long long>(opt.tree_cap)));
        if (wants(opt, "json")) write_file(opt, "refine.json", plan_json(plan));
        switched = plan.switched_lines;
        std::cout << "one-shot: switched " << switched.size() << " line(s), gamma=" << plan.gamma
                  << "\n";
    } else if (opt.mode == "recursive") {
        RefinementTrace trace = recursive_refine(parsed.network, p, opt.i_max, opt.delta, method);
        if (wants(opt, "json")) write_file(opt, "refine.json", trace_json(trace));
        switched = trace.all_switched_lines;
        std::cout << "recursive: " << trace.iterations.size() << " iteration(s), switched "
                  << switched.size() << " line(s)\n";
    } else {
        throw UsageError("unknown refine mode: " + opt.mode);
    }

    ReducedNetwork after = remove_lines(parsed.network, switched);
    if (wants(opt, "json")) write_file(opt, "network_after.json", serialize_network(after.network));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("GRIDBLOCKS_THREADS")) {
        int t = std::atoi(threads);
        if (t > 0) Eigen::setNbThreads(t);
    }

    CLI::App app{"Power-grid topology, distribution factors, and bridge-block refinement"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("input", opt.input, "Case file (.m MATPOWER subset or network JSON)")
            ->required();
        cmd->add_option("--output-dir", opt.output_dir, "Directory for output files");
        cmd->add_option("--formats", opt.formats, "Output formats (json, csv, dot)")->delimiter(',');
        cmd->add_option("--rebalance", opt.rebalance_mode,
                        "reject | uniform-generators | proportional-generators");
        cmd->add_option("--balance-tol", opt.balance_tol, "Per-island balance tolerance (MW)");
    };

    CLI::App* stats = app.add_subcommand("stats", "Bridge and bridge-block statistics");
    add_common(stats);
    CLI::App* flow = app.add_subcommand("flow", "DC power flows");
    add_common(flow);
    CLI::App* factors = app.add_subcommand("factors", "PTDF / LODF / GLODF matrices");
    add_common(factors);
    factors->add_option("--outage", opt.outage, "Outaged line ids (GLODF when present)")
        ->delimiter(',');
    CLI::App* influence = app.add_subcommand("influence", "LODF influence graph");
    add_common(influence);
    influence->add_option("--k-min", opt.k_min, "Influence threshold (> 0)");
    CLI::App* partition = app.add_subcommand("partition", "OBI clustering comparison");
    add_common(partition);
    partition->add_option("--b", opt.b, "Number of clusters");
    partition->add_option("--method", opt.method, "fastgreedy | spectral-ln | spectral-bn | all");
    CLI::App* refine = app.add_subcommand("refine", "Bridge-block refinement by line switching");
    add_common(refine);
    refine->add_option("--mode", opt.mode, "one-shot | recursive");
    refine->add_option("--b", opt.b, "Clusters for one-shot OBI");
    refine->add_option("--i-max", opt.i_max, "Max recursive iterations");
    refine->add_option("--delta", opt.delta, "Congestion stopping threshold");
    refine->add_option("--method", opt.method, "fastgreedy | spectral-ln | spectral-bn");
    refine->add_option("--tree-cap", opt.tree_cap, "Spanning-tree enumeration cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 5;
    }

    try {
        if (stats->parsed()) return cmd_stats(opt);
        if (flow->parsed()) return cmd_flow(opt);
        if (factors->parsed()) return cmd_factors(opt);
        if (influence->parsed()) return cmd_influence(opt);
        if (partition->parsed()) return cmd_partition(opt);
        if (refine->parsed()) return cmd_refine(opt);
    } catch (const Error& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 3;
    }
    return 5;
}
