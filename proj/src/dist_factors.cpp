#include "gridblocks/dist_factors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridblocks/errors.hpp"

namespace gridblocks {

namespace {

void validate_line(const PowerNetwork& net, int l, const char* what) {
    if (l < 0 || l >= net.line_count())
        throw DataError(std::string(what) + " line id " + std::to_string(l) + " out of range");
}

std::vector<std::vector<int>> components_without(const PowerNetwork& net,
                                                 const std::vector<char>& dropped_line) {
    int n = net.bus_count();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        int c = static_cast<int>(comps.size());
        comps.push_back({});
        std::vector<int> stack{s};
        comp[s] = c;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comps[c].push_back(v);
            for (int lid : net.incident(v)) {
                if (dropped_line[lid]) continue;
                int u = net.other_end(lid, v);
                if (comp[u] < 0) {
                    comp[u] = c;
                    stack.push_back(u);
                }
            }
        }
        std::sort(comps[c].begin(), comps[c].end());
    }
    return comps;
}

std::vector<int> normalize_outage(const PowerNetwork& net, std::vector<int> outage) {
    std::sort(outage.begin(), outage.end());
    outage.erase(std::unique(outage.begin(), outage.end()), outage.end());
    for (int l : outage) validate_line(net, l, "outage");
    return outage;
}

void validate_alpha(const ProportionalControl& alpha, const PowerNetwork& net) {
    if (alpha.alpha.size() != net.bus_count())
        throw NumericError("control", "alpha length does not match the island bus count");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < alpha.alpha.size(); ++i) {
        if (alpha.alpha[i] < 0.0)
            throw NumericError("control", "alpha must be nonnegative");
        sum += alpha.alpha[i];
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw NumericError("control", "alpha must sum to 1 on the island");
}

}  // namespace

double ptdf_pair(const LaplacianSystem& sys, const PowerNetwork& net, int l, int s, int t) {
    validate_line(net, l, "monitored");
    if (s == t) return 0.0;
    const Line& ln = net.line(l);
    const Eigen::MatrixXd& m = sys.pseudo_inverse();
    return ln.susceptance * (m(ln.from, s) + m(ln.to, t) - m(ln.from, t) - m(ln.to, s));
}

PTDFMatrix ptdf_matrix(const LaplacianSystem& sys, const PowerNetwork& net) {
    int m = net.line_count();
    int n = net.bus_count();
    Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(n, m);
    for (const Line& l : net.lines()) {
        incidence(l.from, l.id) = 1.0;
        incidence(l.to, l.id) = -1.0;
    }
    Eigen::MatrixXd d = incidence.transpose() * sys.pseudo_inverse() * incidence;
    for (const Line& l : net.lines()) d.row(l.id) *= l.susceptance;
    return {d};
}

bool zero_ptdf_by_cycle(const BlockDecomposition& bd, int l, int lhat) {
    return !share_simple_cycle(bd, l, lhat);
}

double lodf(const LaplacianSystem& sys, const PowerNetwork& net,
            const BridgeBlockDecomposition& bb, int l, int lhat) {
    validate_line(net, l, "monitored");
    validate_line(net, lhat, "outaged");
    if (l == lhat) throw DataError("LODF requires a surviving line distinct from the outage");
    if (bb.is_bridge[lhat])
        throw BridgeOutageError("line " + std::to_string(lhat) +
                                " is a bridge; its outage is a cut set, use bridge_outage_lodf");
    const Line& out = net.line(lhat);
    double d_self = ptdf_pair(sys, net, lhat, out.from, out.to);
    double d_cross = ptdf_pair(sys, net, l, out.from, out.to);
    return d_cross / (1.0 - d_self);
}

namespace {

GLODFMatrix factor_submatrix(const LaplacianSystem& sys, const PowerNetwork& net,
                             std::vector<int> outage, bool joint) {
    outage = normalize_outage(net, outage);
    if (outage.empty()) throw DataError("outage set must be nonempty");

    std::vector<char> dropped(net.line_count(), 0);
    for (int l : outage) dropped[l] = 1;

    GLODFMatrix res;
    res.outage = outage;
    for (int l = 0; l < net.line_count(); ++l)
        if (!dropped[l]) res.survivors.push_back(l);

    int k = static_cast<int>(outage.size());
    int s = static_cast<int>(res.survivors.size());
    Eigen::MatrixXd d_ee(k, k), d_se(s, k);
    for (int c = 0; c < k; ++c) {
        const Line& out = net.line(outage[c]);
        for (int r = 0; r < k; ++r)
            d_ee(r, c) = ptdf_pair(sys, net, outage[r], out.from, out.to);
        for (int r = 0; r < s; ++r)
            d_se(r, c) = ptdf_pair(sys, net, res.survivors[r], out.from, out.to);
    }

    if (joint) {
        auto before = sys.islands().size();
        auto after = components_without(net, dropped).size();
        if (after != before) {
            std::ostringstream os;
            os << "outage set is a cut set (" << before << " island(s) become " << after
               << "); use cutset_flow_change. Islands:";
            for (const auto& comp : components_without(net, dropped)) {
                os << " {" << comp.front();
                if (comp.size() > 1) os << "..." << comp.back();
                os << "|" << comp.size() << "}";
            }
            throw CutSetError(os.str());
        }
        Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(k, k) - d_ee;
        // K^E = D_{-E,E} (I - D_EE)^{-1}: right-multiplication, so factor the
        // transpose and solve K^T = (I - D_EE)^{-T} D_{-E,E}^T
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs.transpose());
        if (lu.rcond() < 1e-12)
            throw ConditioningError(
                "I - D_EE is numerically singular despite the non-cut precondition (rcond " +
                std::to_string(lu.rcond()) + ")");
        res.values = lu.solve(d_se.transpose()).transpose();
    } else {
        auto bb = bridges_and_bridge_blocks(net);
        for (int l : outage)
            if (bb.is_bridge[l])
                throw BridgeOutageError("line " + std::to_string(l) +
                                        " is a bridge; LODF columns need non-bridge outages");
        res.values = d_se;
        for (int c = 0; c < k; ++c) res.values.col(c) /= 1.0 - d_ee(c, c);
    }
    return res;
}

}  // namespace

GLODFMatrix glodf(const LaplacianSystem& sys, const PowerNetwork& net, std::vector<int> outage) {
    return factor_submatrix(sys, net, std::move(outage), true);
}

GLODFMatrix lodf_submatrix(const LaplacianSystem& sys, const PowerNetwork& net,
                           std::vector<int> outage) {
    return factor_submatrix(sys, net, std::move(outage), false);
}

double island_imbalance(const PowerNetwork& net, const InjectionVector& p,
                        const std::vector<int>& outage, const std::vector<int>& island,
                        const FlowVector& f_pre, double tol) {
    auto sorted_outage = normalize_outage(net, outage);
    std::vector<char> dropped(net.line_count(), 0);
    for (int l : sorted_outage) dropped[l] = 1;

    std::vector<int> sorted_island = island;
    std::sort(sorted_island.begin(), sorted_island.end());
    auto comps = components_without(net, dropped);
    if (std::find(comps.begin(), comps.end(), sorted_island) == comps.end())
        throw DataError("the given vertex set is not an island of the post-outage network");

    std::vector<char> inside(net.bus_count(), 0);
    for (int v : sorted_island) inside[v] = 1;

    double b_island = 0.0;
    for (int v : sorted_island) b_island += p[v];

    double tie_sum = 0.0;  // flow into the island over removed tie lines
    for (int l : sorted_outage) {
        const Line& ln = net.line(l);
        if (inside[ln.from] == inside[ln.to]) continue;
        tie_sum += inside[ln.to] ? f_pre[l] : -f_pre[l];
    }
    double from_flows = -tie_sum;
    if (std::abs(b_island - from_flows) > tol * std::max(1.0, std::abs(b_island))) {
        std::ostringstream os;
        os << "island imbalance mismatch: sum(p) = " << b_island
           << " but -sum(tie flows) = " << from_flows;
        throw NumericError("imbalance", os.str());
    }
    return b_island;
}

CutsetFlowChange cutset_flow_change(const LaplacianSystem& sys_island,
                                    const PowerNetwork& net_island,
                                    const std::vector<int>& internal_outage,
                                    const std::vector<TieOutage>& ties,
                                    const ProportionalControl& alpha,
                                    const FlowVector& f_pre_island) {
    validate_alpha(alpha, net_island);
    auto e_int = normalize_outage(net_island, internal_outage);
    if (f_pre_island.size() != net_island.line_count())
        throw DataError("pre-outage flow vector length does not match the island line count");

    CutsetFlowChange out;
    std::vector<char> dropped(net_island.line_count(), 0);
    for (int l : e_int) dropped[l] = 1;
    for (int l = 0; l < net_island.line_count(); ++l)
        if (!dropped[l]) out.surviving_lines.push_back(l);
    int s = static_cast<int>(out.surviving_lines.size());
    out.delta = Eigen::VectorXd::Zero(s);

    GLODFMatrix k_int;
    if (!e_int.empty()) {
        k_int = glodf(sys_island, net_island, e_int);  // throws CutSetError if E_int cuts I
        Eigen::VectorXd f_int(e_int.size());
        for (size_t c = 0; c < e_int.size(); ++c) f_int[static_cast<Eigen::Index>(c)] = f_pre_island[e_int[c]];
        out.delta += k_int.values * f_int;
    }

    for (const TieOutage& tie : ties) {
        if (tie.island_endpoint < 0 || tie.island_endpoint >= net_island.bus_count())
            throw DataError("tie endpoint outside the island network");
        // d_l = sum_k alpha_k D_{l, k j(tie)} for every island line l
        Eigen::VectorXd d(net_island.line_count());
        for (int l = 0; l < net_island.line_count(); ++l) {
            double acc = 0.0;
            for (int k = 0; k < net_island.bus_count(); ++k) {
                if (alpha.alpha[k] == 0.0) continue;
                acc += alpha.alpha[k] * ptdf_pair(sys_island, net_island, l, k, tie.island_endpoint);
            }
            d[l] = acc;
        }
        Eigen::VectorXd term(s);
        for (int r = 0; r < s; ++r) term[r] = d[out.surviving_lines[r]];
        if (!e_int.empty()) {
            Eigen::VectorXd d_int(e_int.size());
            for (size_t c = 0; c < e_int.size(); ++c) d_int[static_cast<Eigen::Index>(c)] = d[e_int[c]];
            term += k_int.values * d_int;
        }
        out.delta += tie.pre_flow_into_island * term;
    }
    return out;
}

double bridge_outage_lodf(const LaplacianSystem& sys_island, const PowerNetwork& net_island,
                          int l, int island_endpoint, const ProportionalControl& alpha,
                          double pre_flow) {
    validate_alpha(alpha, net_island);
    validate_line(net_island, l, "monitored");
    if (island_endpoint < 0 || island_endpoint >= net_island.bus_count())
        throw DataError("bridge endpoint outside the island network");
    if (pre_flow == 0.0)
        throw NumericError("undefined-ratio",
                           "bridge carried no flow; the LODF ratio is undefined and the island "
                           "flows remain unchanged");
    double acc = 0.0;
    for (int k = 0; k < net_island.bus_count(); ++k) {
        if (alpha.alpha[k] == 0.0) continue;
        acc += alpha.alpha[k] * ptdf_pair(sys_island, net_island, l, k, island_endpoint);
    }
    return acc;
}

InfluenceGraph influence_graph(const LaplacianSystem& sys, const PowerNetwork& net,
                               const BridgeBlockDecomposition& bb, double k_min) {
    if (!(k_min > 0.0)) throw DataError("K_min must be positive");
    InfluenceGraph g;
    g.k_min = k_min;
    g.node_count = net.line_count();
    PTDFMatrix d = ptdf_matrix(sys, net);
    int m = net.line_count();
    std::vector<double> denom(m, 0.0);
    for (int l = 0; l < m; ++l)
        if (!bb.is_bridge[l]) denom[l] = 1.0 - d.values(l, l);
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            double strongest = 0.0;
            if (!bb.is_bridge[b]) strongest = std::abs(d.values(a, b) / denom[b]);
            if (!bb.is_bridge[a]) strongest = std::max(strongest, std::abs(d.values(b, a) / denom[a]));
            if (strongest > k_min) g.edges.emplace_back(a, b);
        }
    }
    return g;
}

ZeroGlodfCertificate zero_glodf_conditions(const BlockDecomposition& bd, const PowerNetwork& net,
                                           const std::vector<int>& outage, int l, int lhat) {
    auto e = normalize_outage(net, outage);
    if (std::find(e.begin(), e.end(), lhat) == e.end())
        throw DataError("lhat must belong to the outage set");
    if (std::find(e.begin(), e.end(), l) != e.end())
        throw DataError("l must be a surviving line");
    if (!share_simple_cycle(bd, l, lhat)) return ZeroGlodfCertificate::certified_zero;

    // Any simple cycle through both l and lhat that avoids the other outaged
    // lines survives in G minus (E \ {lhat}); if none survives there, the
    // rerouting path is blocked by the rest of the outage.
    std::vector<int> others;
    for (int x : e)
        if (x != lhat) others.push_back(x);
    if (!others.empty()) {
        ReducedNetwork reduced = remove_lines(net, others);
        std::vector<int> new_id(net.line_count(), -1);
        for (size_t i = 0; i < reduced.line_map.size(); ++i)
            new_id[reduced.line_map[i]] = static_cast<int>(i);
        auto bd2 = block_decomposition(reduced.network);
        if (!share_simple_cycle(bd2, new_id[l], new_id[lhat]))
            return ZeroGlodfCertificate::cycle_blocked;
    }
    return ZeroGlodfCertificate::unknown;
}

}  // namespace gridblocks
