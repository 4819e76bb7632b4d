#pragma once

#include <string>
#include <vector>

#include "gridblocks/dist_factors.hpp"
#include "gridblocks/graph_struct.hpp"
#include "gridblocks/net_model.hpp"
#include "gridblocks/partition.hpp"
#include "gridblocks/spectral.hpp"
#include "gridblocks/switch_opt.hpp"

namespace gridblocks {

// One row of the bridge-statistics table. Edge counts are at branch
// granularity (merged parallel circuits contribute their multiplicity), which
// is what published network summaries report.
struct StatsRow {
    std::string name;
    int edges = 0;
    int bridges = 0;
    double pct_bridges = 0.0;
    int bb_count = 0;
    std::vector<int> nontrivial_sizes;  // blocks with more than two vertices, descending
};

StatsRow compute_stats(const std::string& name, const PowerNetwork& net);

std::string stats_csv(const std::vector<StatsRow>& rows);
std::string stats_json(const std::vector<StatsRow>& rows);

std::string flows_csv(const PowerNetwork& net, const FlowVector& f);

// Generic matrix CSV with line-id headers.
std::string matrix_csv(const std::string& corner, const std::vector<int>& row_ids,
                       const std::vector<int>& col_ids, const Eigen::MatrixXd& values);

std::string influence_dot(const InfluenceGraph& g);
std::string influence_json(const InfluenceGraph& g);

std::string bb_tree_dot(const BridgeBlockDecomposition& bb);

struct MethodReport {
    ClusteringResult result;
    double seconds = 0.0;
    int cross_edges = 0;
    double fraction = 0.0;    // cross edges over all lines of the clustered graph
    int lines_to_switch = 0;  // cross edges minus the spanning-tree edges kept
};

MethodReport evaluate_method(const FlowWeights& w, const PowerNetwork& net, int b,
                             ClusterMethod method);

std::string partition_json(const std::vector<MethodReport>& reports,
                           const std::vector<int>& vertex_names);
std::string comparison_csv(const std::vector<MethodReport>& reports, int b);

std::string plan_json(const SwitchingPlan& plan);
std::string trace_json(const RefinementTrace& trace);

}  // namespace gridblocks
