#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gridblocks/graph_struct.hpp"
#include "gridblocks/net_model.hpp"
#include "gridblocks/spectral.hpp"

namespace gridblocks {

struct PTDFMatrix {
    Eigen::MatrixXd values;  // m x m, (monitored line, perturbed line)
};

struct GLODFMatrix {
    std::vector<int> outage;     // line ids E, sorted
    std::vector<int> survivors;  // line ids not in E, sorted
    Eigen::MatrixXd values;      // (m - |E|) x |E|
};

struct ProportionalControl {
    Eigen::VectorXd alpha;  // per-bus, nonnegative, sums to 1 on the island applied
};

struct InfluenceGraph {
    std::vector<std::pair<int, int>> edges;  // unordered line pairs, a < b
    double k_min = 0.0;
    int node_count = 0;  // one node per line
};

// D_{l,st} = b_l (Ld_is + Ld_jt - Ld_it - Ld_js)
double ptdf_pair(const LaplacianSystem& sys, const PowerNetwork& net, int l, int s, int t);

// D = B C^T Ld C
PTDFMatrix ptdf_matrix(const LaplacianSystem& sys, const PowerNetwork& net);

// Certificate that D_{l,lhat} = 0 for every choice of susceptances.
bool zero_ptdf_by_cycle(const BlockDecomposition& bd, int l, int lhat);

// K_{l,lhat} = D_{l,lhat} / (1 - D_{lhat,lhat}); throws BridgeOutageError.
double lodf(const LaplacianSystem& sys, const PowerNetwork& net,
            const BridgeBlockDecomposition& bb, int l, int lhat);

// K^E = D_{-E,E} (I - D_{EE})^{-1}; E must not disconnect the network.
GLODFMatrix glodf(const LaplacianSystem& sys, const PowerNetwork& net, std::vector<int> outage);

// K_{-EE} = D_{-EE} (I - diag(D_{EE}))^{-1}, columns are single-outage LODFs.
GLODFMatrix lodf_submatrix(const LaplacianSystem& sys, const PowerNetwork& net,
                           std::vector<int> outage);

// b_I = sum of p over I = - sum of pre-outage tie flows into I.
double island_imbalance(const PowerNetwork& net, const InjectionVector& p,
                        const std::vector<int>& outage, const std::vector<int>& island,
                        const FlowVector& f_pre, double tol = 1e-8);

// One removed tie line as seen from inside the island.
struct TieOutage {
    double pre_flow_into_island;  // f oriented into the island (MW)
    int island_endpoint;          // bus index within the island network
};

struct CutsetFlowChange {
    std::vector<int> surviving_lines;  // island-local line ids, sorted
    Eigen::VectorXd delta;             // flow changes on those lines
};

// Flow changes on island I when the internal lines E_int and the tie lines of
// a cut set are removed and the imbalance is absorbed under proportional
// control alpha (island-local quantities throughout).
CutsetFlowChange cutset_flow_change(const LaplacianSystem& sys_island,
                                    const PowerNetwork& net_island,
                                    const std::vector<int>& internal_outage,
                                    const std::vector<TieOutage>& ties,
                                    const ProportionalControl& alpha,
                                    const FlowVector& f_pre_island);

// Extended LODF for a bridge outage: K_{l,lhat} = sum_k alpha_k D_{l,k jhat}.
// pre_flow is the pre-outage bridge flow; zero flow leaves the ratio undefined.
double bridge_outage_lodf(const LaplacianSystem& sys_island, const PowerNetwork& net_island,
                          int l, int island_endpoint, const ProportionalControl& alpha,
                          double pre_flow);

InfluenceGraph influence_graph(const LaplacianSystem& sys, const PowerNetwork& net,
                               const BridgeBlockDecomposition& bb, double k_min);

enum class ZeroGlodfCertificate { certified_zero, cycle_blocked, unknown };

// certified_zero: l and lhat share no simple cycle (topological zero).
// cycle_blocked: every simple cycle through l and lhat uses another outaged
// line, so K^E_{l,lhat} = 0 even though D_{l,lhat} may be nonzero.
ZeroGlodfCertificate zero_glodf_conditions(const BlockDecomposition& bd, const PowerNetwork& net,
                                           const std::vector<int>& outage, int l, int lhat);

}  // namespace gridblocks
