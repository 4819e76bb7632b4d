#include "gridblocks/switch_opt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gridblocks/errors.hpp"

namespace gridblocks {

namespace {

int island_count(const PowerNetwork& net) {
    int n = net.bus_count();
    std::vector<char> seen(n, 0);
    int comps = 0;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++comps;
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int lid : net.incident(v)) {
                int u = net.other_end(lid, v);
                if (!seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
            }
        }
    }
    return comps;
}

// Injections of the induced subnetwork with every crossing line's flow netted
// at its inside endpoint, so that the island balances on its own.
InjectionVector boundary_adjusted_injections(const PowerNetwork& net, const InjectionVector& p,
                                             const Subnetwork& sub, const FlowVector& f) {
    InjectionVector ps(sub.network.bus_count());
    for (int v = 0; v < sub.network.bus_count(); ++v) ps[v] = p[sub.from_sub[v]];
    for (const Line& l : net.lines()) {
        bool from_in = sub.to_sub[l.from] >= 0, to_in = sub.to_sub[l.to] >= 0;
        if (from_in == to_in) continue;
        if (from_in)
            ps[sub.to_sub[l.from]] -= f[l.id];  // power leaving the block
        else
            ps[sub.to_sub[l.to]] += f[l.id];
    }
    return ps;
}

}  // namespace

CongestionReport congestion_level(const PowerNetwork& net, const std::vector<int>& outage,
                                  const InjectionVector& p) {
    ReducedNetwork cut = remove_lines(net, outage);
    if (island_count(cut.network) != island_count(net))
        throw DataError("the switch set disconnects the network");
    LaplacianSystem sys = LaplacianSystem::build(cut.network);
    FlowVector f_cut = dc_flow(sys, cut.network, p);

    CongestionReport rep;
    rep.flows = FlowVector::Zero(net.line_count());
    for (size_t i = 0; i < cut.line_map.size(); ++i)
        rep.flows[cut.line_map[i]] = f_cut[static_cast<Eigen::Index>(i)];
    for (size_t i = 0; i < cut.line_map.size(); ++i) {
        const Line& l = net.line(cut.line_map[i]);
        if (!l.has_capacity()) continue;
        double load = std::abs(f_cut[static_cast<Eigen::Index>(i)]) / l.capacity_mw;
        rep.gamma = std::max(rep.gamma, load);
        if (load > 1.0) ++rep.congested_count;
    }
    return rep;
}

BridgeBlockDecomposition bb_after_removal(const PowerNetwork& net, const std::vector<int>& outage) {
    ReducedNetwork cut = remove_lines(net, outage);
    BridgeBlockDecomposition bb = bridges_and_bridge_blocks(cut.network);
    BridgeBlockDecomposition out;
    out.blocks = bb.blocks;
    out.is_bridge.assign(net.line_count(), 0);
    for (int lid : bb.bridges) {
        out.bridges.push_back(cut.line_map[lid]);
        out.is_bridge[cut.line_map[lid]] = 1;
    }
    std::sort(out.bridges.begin(), out.bridges.end());
    out.bb_tree.node_count = bb.bb_tree.node_count;
    for (const ReducedEdge& e : bb.bb_tree.edges)
        out.bb_tree.edges.push_back({e.a, e.b, cut.line_map[e.line_id]});
    return out;
}

namespace {

struct Candidate {
    double gamma;
    int congested;
    std::vector<int> removed;  // sorted
    CongestionReport report;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.gamma != b.gamma) return a.gamma < b.gamma;
    if (a.congested != b.congested) return a.congested < b.congested;
    return a.removed < b.removed;
}

SwitchingPlan finalize_plan(const PowerNetwork& net, Candidate best) {
    SwitchingPlan plan;
    plan.switched_lines = best.removed;
    plan.gamma = best.gamma;
    plan.congested_count = best.congested;
    plan.congestion_flagged = best.gamma >= 1.0;
    plan.flows_after = best.report.flows;
    plan.resulting_bb = bb_after_removal(net, best.removed);
    return plan;
}

}  // namespace

SwitchingPlan obs_solve(const PowerNetwork& net, const InjectionVector& p,
                        const Partition& p_clusters, const BigInt& cap) {
    if (!satisfies_a1(net, p_clusters))
        throw DataError("OBS requires clusters that induce connected subgraphs (A1)");
    ReducedMultigraph rg = reduced_graph(net, p_clusters);

    std::vector<int> cross;
    for (const ReducedEdge& e : rg.edges) cross.push_back(e.line_id);
    std::sort(cross.begin(), cross.end());

    bool found = false;
    Candidate best;
    enumerate_spanning_trees(rg, cap, [&](const std::vector<int>& tree) {
        std::vector<int> keep = tree;
        std::sort(keep.begin(), keep.end());
        Candidate cand;
        std::set_difference(cross.begin(), cross.end(), keep.begin(), keep.end(),
                            std::back_inserter(cand.removed));
        cand.report = congestion_level(net, cand.removed, p);
        cand.gamma = cand.report.gamma;
        cand.congested = cand.report.congested_count;
        if (!found || better(cand, best)) {
            best = std::move(cand);
            found = true;
        }
    });
    if (!found)
        throw DataError("reduced graph is disconnected; no spanning tree exists");
    return finalize_plan(net, best);
}

SwitchingPlan obs_bipartition(const PowerNetwork& net, const InjectionVector& p,
                              const Partition& p_clusters) {
    if (p_clusters.cluster_count() != 2)
        throw DataError("obs_bipartition requires exactly two clusters");
    if (!satisfies_a1(net, p_clusters))
        throw DataError("OBS requires clusters that induce connected subgraphs (A1)");
    ReducedMultigraph rg = reduced_graph(net, p_clusters);
    std::vector<int> cross;
    for (const ReducedEdge& e : rg.edges) cross.push_back(e.line_id);
    std::sort(cross.begin(), cross.end());
    if (cross.empty())
        throw DataError("the two clusters share no cross-edge; they are already disconnected");

    bool found = false;
    Candidate best;
    for (int kept : cross) {
        Candidate cand;
        for (int e : cross)
            if (e != kept) cand.removed.push_back(e);
        cand.report = congestion_level(net, cand.removed, p);
        cand.gamma = cand.report.gamma;
        cand.congested = cand.report.congested_count;
        if (!found || better(cand, best)) {
            best = std::move(cand);
            found = true;
        }
    }
    return finalize_plan(net, best);
}

FlowVector local_flow_update(const PowerNetwork& net, const InjectionVector& p,
                             const std::vector<int>& block_vertices,
                             const std::vector<int>& removed, const FlowVector& prior_flows) {
    if (prior_flows.size() != net.line_count())
        throw DataError("prior flow vector length does not match line count");
    if (removed.empty()) return prior_flows;

    Subnetwork sub = extract_subnetwork(net, block_vertices);
    std::vector<int> removed_sub;
    for (int lid : removed) {
        const Line& l = net.line(lid);
        if (sub.to_sub[l.from] < 0 || sub.to_sub[l.to] < 0)
            throw DataError("removed line " + std::to_string(lid) + " is not inside the block");
        for (size_t i = 0; i < sub.line_map.size(); ++i)
            if (sub.line_map[i] == lid) removed_sub.push_back(static_cast<int>(i));
    }
    ReducedNetwork cut = remove_lines(sub.network, removed_sub);
    if (island_count(cut.network) != island_count(sub.network))
        throw DataError("removing these lines disconnects the block");

    InjectionVector ps = boundary_adjusted_injections(net, p, sub, prior_flows);
    LaplacianSystem sys = LaplacianSystem::build(cut.network);
    FlowVector f_local = dc_flow(sys, cut.network, ps);

    FlowVector out = prior_flows;
    for (int lid : removed) out[lid] = 0.0;
    for (size_t i = 0; i < cut.line_map.size(); ++i)
        out[sub.line_map[cut.line_map[i]]] = f_local[static_cast<Eigen::Index>(i)];
    return out;
}

namespace {

// Largest bridge-block first, ties toward the lower block index.
std::vector<int> blocks_by_size(const BridgeBlockDecomposition& bb) {
    std::vector<int> order(bb.blocks.cluster_count());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return bb.blocks.clusters[a].size() > bb.blocks.clusters[b].size();
    });
    return order;
}

}  // namespace

SwitchingPlan one_shot(const PowerNetwork& net, const InjectionVector& p, int b,
                       ClusterMethod method, const BigInt& cap) {
    if (b < 2) throw DataError("one_shot needs b >= 2");
    LaplacianSystem sys = LaplacianSystem::build(net);
    FlowVector f = dc_flow(sys, net, p);
    BridgeBlockDecomposition bb = bridges_and_bridge_blocks(net);

    int largest = blocks_by_size(bb).front();
    const std::vector<int>& block = bb.blocks.clusters[largest];
    if (static_cast<int>(block.size()) < 2) {
        // every block is a singleton: the network is already a tree
        Candidate trivial;
        trivial.report = congestion_level(net, {}, p);
        trivial.gamma = trivial.report.gamma;
        trivial.congested = trivial.report.congested_count;
        return finalize_plan(net, std::move(trivial));
    }

    Subnetwork sub = extract_subnetwork(net, block);
    InjectionVector ps = boundary_adjusted_injections(net, p, sub, f);
    FlowVector f_sub(sub.network.line_count());
    for (int i = 0; i < sub.network.line_count(); ++i) f_sub[i] = f[sub.line_map[i]];

    FlowWeights w = flow_weights(sub.network, f_sub);
    ClusteringResult obi = obi_solve(w, sub.network, std::min<int>(b, sub.network.bus_count()), method);

    SwitchingPlan sub_plan = obs_solve(sub.network, ps, obi.partition, cap);

    Candidate chosen;
    for (int lid : sub_plan.switched_lines) chosen.removed.push_back(sub.line_map[lid]);
    std::sort(chosen.removed.begin(), chosen.removed.end());
    chosen.report.flows = local_flow_update(net, p, block, chosen.removed, f);
    chosen.gamma = 0.0;
    chosen.congested = 0;
    for (const Line& l : net.lines()) {
        bool switched = std::binary_search(chosen.removed.begin(), chosen.removed.end(), l.id);
        if (switched || !l.has_capacity()) continue;
        double load = std::abs(chosen.report.flows[l.id]) / l.capacity_mw;
        chosen.gamma = std::max(chosen.gamma, load);
        if (load > 1.0) ++chosen.congested;
    }
    return finalize_plan(net, std::move(chosen));
}

RefinementTrace recursive_refine(const PowerNetwork& net, const InjectionVector& p, int i_max,
                                 double delta, ClusterMethod method) {
    if (i_max < 0) throw DataError("i_max must be nonnegative");
    RefinementTrace trace;

    LaplacianSystem sys = LaplacianSystem::build(net);
    FlowVector f = dc_flow(sys, net, p);  // original line-id space
    std::vector<int> removed_all;

    for (int iter = 0; iter < i_max; ++iter) {
        ReducedNetwork cur = remove_lines(net, removed_all);
        FlowVector f_cur(cur.network.line_count());
        for (size_t i = 0; i < cur.line_map.size(); ++i)
            f_cur[static_cast<Eigen::Index>(i)] = f[cur.line_map[i]];

        BridgeBlockDecomposition bb = bridges_and_bridge_blocks(cur.network);
        auto order = blocks_by_size(bb);

        bool applied = false;
        for (int blk : order) {
            const std::vector<int>& block = bb.blocks.clusters[blk];
            if (block.size() < 2) break;  // remaining blocks are singletons too

            auto started = std::chrono::steady_clock::now();
            Subnetwork sub = extract_subnetwork(cur.network, block);
            InjectionVector ps = boundary_adjusted_injections(cur.network, p, sub, f_cur);
            FlowVector f_sub(sub.network.line_count());
            for (int i = 0; i < sub.network.line_count(); ++i) f_sub[i] = f_cur[sub.line_map[i]];

            ClusteringResult obi;
            try {
                obi = obi_solve(flow_weights(sub.network, f_sub), sub.network, 2, method);
            } catch (const NumericError&) {
                continue;  // e.g. a zero-flow block: try the next largest
            }
            if (obi.partition.cluster_count() < 2) continue;  // trivial split

            SwitchingPlan sub_plan = obi.partition.cluster_count() == 2
                                         ? obs_bipartition(sub.network, ps, obi.partition)
                                         : obs_solve(sub.network, ps, obi.partition);
            if (sub_plan.switched_lines.empty()) continue;  // nothing to switch

            std::vector<int> removed_orig;
            for (int lid : sub_plan.switched_lines)
                removed_orig.push_back(cur.line_map[sub.line_map[lid]]);
            std::sort(removed_orig.begin(), removed_orig.end());

            std::vector<int> block_orig;  // block vertices are shared across spaces
            block_orig = block;

            // local recomputation inside the split block, original-id space
            FlowVector f_next = f;
            {
                // express the update on the current network, then map back
                std::vector<int> removed_cur;
                for (int lid : sub_plan.switched_lines) removed_cur.push_back(sub.line_map[lid]);
                std::sort(removed_cur.begin(), removed_cur.end());
                FlowVector f_cur_next = local_flow_update(cur.network, p, block, removed_cur, f_cur);
                for (size_t i = 0; i < cur.line_map.size(); ++i)
                    f_next[cur.line_map[i]] = f_cur_next[static_cast<Eigen::Index>(i)];
                for (int lid : removed_orig) f_next[lid] = 0.0;
            }
            f = f_next;
            removed_all.insert(removed_all.end(), removed_orig.begin(), removed_orig.end());
            std::sort(removed_all.begin(), removed_all.end());

            RefinementIteration it;
            it.switched_lines = removed_orig;
            for (const Line& l : net.lines()) {
                if (std::binary_search(removed_all.begin(), removed_all.end(), l.id)) continue;
                if (!l.has_capacity()) continue;
                it.gamma = std::max(it.gamma, std::abs(f[l.id]) / l.capacity_mw);
            }
            BridgeBlockDecomposition bb_after = bb_after_removal(net, removed_all);
            for (const auto& c : bb_after.blocks.clusters)
                it.block_sizes.push_back(static_cast<int>(c.size()));
            std::sort(it.block_sizes.rbegin(), it.block_sizes.rend());
            it.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            trace.iterations.push_back(std::move(it));
            applied = true;
            break;
        }

        if (!applied) {
            trace.stop_reason = StopReason::exhausted;
            break;
        }
        if (trace.iterations.back().gamma >= delta) {
            trace.stop_reason = StopReason::congestion_threshold;
            break;
        }
        if (iter == i_max - 1) trace.stop_reason = StopReason::max_iters;
    }
    if (i_max == 0) trace.stop_reason = StopReason::max_iters;

    trace.all_switched_lines = removed_all;
    trace.final_flows = f;
    return trace;
}

}  // namespace gridblocks
