#pragma once

#include <Eigen/Dense>
#include <string>

#include "gridblocks/graph_struct.hpp"
#include "gridblocks/net_model.hpp"
#include "gridblocks/spectral.hpp"

namespace gridblocks {

struct FlowWeights {
    Eigen::VectorXd edge_weight;    // |f_l| per line, MW
    Eigen::VectorXd node_strength;  // F_i = sum of |f| over incident lines
    double total = 0.0;             // M = sum_l |f_l| = half the strength sum
};

enum class ClusterMethod { fastgreedy, spectral_Ln, spectral_Bn };

std::string method_name(ClusterMethod m);

struct ClusteringResult {
    Partition partition;
    ClusterMethod method = ClusterMethod::fastgreedy;
    double q = 0.0;    // flow-weighted modularity
    double q_n = 0.0;  // normalized modularity
};

FlowWeights flow_weights(const PowerNetwork& net, const FlowVector& f);

double modularity(const FlowWeights& w, const PowerNetwork& net, const Partition& p);
double normalized_modularity(const FlowWeights& w, const PowerNetwork& net, const Partition& p);

double volume(const FlowWeights& w, const std::vector<int>& cluster);
double cut_value(const FlowWeights& w, const PowerNetwork& net, const std::vector<int>& cluster);
// NCut for a bipartition: Cut/Vol(V) + Cut/Vol(V^c).
double ncut(const FlowWeights& w, const PowerNetwork& net, const Partition& p);

ClusteringResult fastgreedy(const FlowWeights& w, const PowerNetwork& net, int b);
ClusteringResult spectral_cluster(const FlowWeights& w, const PowerNetwork& net, int b,
                                  ClusterMethod kind);

// Dispatches to the chosen method and enforces (A1) by splitting disconnected
// clusters afterwards.
ClusteringResult obi_solve(const FlowWeights& w, const PowerNetwork& net, int b,
                           ClusterMethod method);

}  // namespace gridblocks
