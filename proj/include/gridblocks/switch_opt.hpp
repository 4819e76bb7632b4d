#pragma once

#include <vector>

#include "gridblocks/graph_struct.hpp"
#include "gridblocks/net_model.hpp"
#include "gridblocks/partition.hpp"
#include "gridblocks/spectral.hpp"

namespace gridblocks {

inline constexpr long long kDefaultTreeCap = 1000000;

struct CongestionReport {
    double gamma = 0.0;
    int congested_count = 0;   // lines with |f|/C > 1
    FlowVector flows;          // full-length; removed lines carry 0
};

// Flows and congestion of G minus E; E must not disconnect any island.
CongestionReport congestion_level(const PowerNetwork& net, const std::vector<int>& outage,
                                  const InjectionVector& p);

struct SwitchingPlan {
    std::vector<int> switched_lines;  // E*, sorted line ids
    double gamma = 0.0;
    int congested_count = 0;
    bool congestion_flagged = false;  // gamma >= 1 on the selected plan
    FlowVector flows_after;           // full-length; switched lines carry 0
    BridgeBlockDecomposition resulting_bb;
};

// Bridge-block decomposition of G minus E expressed in the original line ids.
BridgeBlockDecomposition bb_after_removal(const PowerNetwork& net, const std::vector<int>& outage);

// Enumerates the spanning trees of G_P and keeps, per tree T, the switch set
// E = E_c(P) minus T with the lowest congestion level; ties broken by fewer
// congested lines, then lexicographically smallest E.
SwitchingPlan obs_solve(const PowerNetwork& net, const InjectionVector& p, const Partition& p_clusters,
                        const BigInt& cap = BigInt(kDefaultTreeCap));

// Bipartition special case: one kept cross-edge, all candidates scanned.
SwitchingPlan obs_bipartition(const PowerNetwork& net, const InjectionVector& p,
                              const Partition& p_clusters);

// Algorithm 1: flows -> BB -> largest block -> OBI-b -> OBS -> new BB.
SwitchingPlan one_shot(const PowerNetwork& net, const InjectionVector& p, int b,
                       ClusterMethod method, const BigInt& cap = BigInt(kDefaultTreeCap));

enum class StopReason { max_iters, congestion_threshold, exhausted };

struct RefinementIteration {
    std::vector<int> switched_lines;  // original line ids
    double gamma = 0.0;
    std::vector<int> block_sizes;  // descending
    double seconds = 0.0;
};

struct RefinementTrace {
    std::vector<RefinementIteration> iterations;
    StopReason stop_reason = StopReason::max_iters;
    std::vector<int> all_switched_lines;  // union over iterations, sorted
    FlowVector final_flows;               // full-length, original line ids
};

// Algorithm 2: recursively bipartition the largest bridge-block, switching the
// optimal cross-edge subset and recomputing flows only inside the split block.
RefinementTrace recursive_refine(const PowerNetwork& net, const InjectionVector& p, int i_max,
                                 double delta, ClusterMethod method);

// Flows after removing E_removed inside bridge-block V: outside flows are the
// prior values bitwise, inside flows come from a local DC solve with
// bridge-endpoint injection adjustment.
FlowVector local_flow_update(const PowerNetwork& net, const InjectionVector& p,
                             const std::vector<int>& block_vertices,
                             const std::vector<int>& removed, const FlowVector& prior_flows);

}  // namespace gridblocks
