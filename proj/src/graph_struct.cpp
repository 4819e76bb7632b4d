#include "gridblocks/graph_struct.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

#include "gridblocks/errors.hpp"

namespace gridblocks {

Partition Partition::from_labels(const std::vector<int>& labels) {
    Partition p;
    p.cluster_of.assign(labels.size(), -1);
    std::map<int, int> remap;
    for (size_t v = 0; v < labels.size(); ++v) {
        auto [it, inserted] = remap.try_emplace(labels[v], static_cast<int>(p.clusters.size()));
        if (inserted) p.clusters.push_back({});
        p.cluster_of[v] = it->second;
        p.clusters[it->second].push_back(static_cast<int>(v));
    }
    return p;
}

Partition Partition::from_clusters(std::vector<std::vector<int>> clusters, int vertex_count) {
    Partition p;
    p.cluster_of.assign(vertex_count, -1);
    for (auto& c : clusters) {
        if (c.empty()) throw DataError("partition cluster must be nonempty");
        std::sort(c.begin(), c.end());
    }
    p.clusters = std::move(clusters);
    for (size_t i = 0; i < p.clusters.size(); ++i) {
        for (int v : p.clusters[i]) {
            if (v < 0 || v >= vertex_count) throw DataError("partition vertex out of range");
            if (p.cluster_of[v] >= 0) throw DataError("partition clusters are not disjoint");
            p.cluster_of[v] = static_cast<int>(i);
        }
    }
    for (int v = 0; v < vertex_count; ++v)
        if (p.cluster_of[v] < 0) throw DataError("partition does not cover vertex " + std::to_string(v));
    return p;
}

Partition Partition::singletons(int vertex_count) {
    std::vector<int> labels(vertex_count);
    std::iota(labels.begin(), labels.end(), 0);
    return from_labels(labels);
}

bool satisfies_a1(const PowerNetwork& net, const Partition& p) {
    for (const auto& cluster : p.clusters) {
        if (cluster.size() <= 1) continue;
        std::vector<char> inside(net.bus_count(), 0), seen(net.bus_count(), 0);
        for (int v : cluster) inside[v] = 1;
        std::vector<int> stack{cluster[0]};
        seen[cluster[0]] = 1;
        size_t reached = 0;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            ++reached;
            for (int lid : net.incident(v)) {
                int u = net.other_end(lid, v);
                if (inside[u] && !seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
            }
        }
        if (reached != cluster.size()) return false;
    }
    return true;
}

Partition refine_to_connected(const PowerNetwork& net, const Partition& p) {
    std::vector<std::vector<int>> out;
    for (const auto& cluster : p.clusters) {
        std::vector<char> inside(net.bus_count(), 0), seen(net.bus_count(), 0);
        for (int v : cluster) inside[v] = 1;
        for (int s : cluster) {
            if (seen[s]) continue;
            std::vector<int> comp, stack{s};
            seen[s] = 1;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                comp.push_back(v);
                for (int lid : net.incident(v)) {
                    int u = net.other_end(lid, v);
                    if (inside[u] && !seen[u]) {
                        seen[u] = 1;
                        stack.push_back(u);
                    }
                }
            }
            out.push_back(std::move(comp));
        }
    }
    return Partition::from_clusters(std::move(out), net.bus_count());
}

namespace {

// Iterative DFS low-link bridge finding; parallel lines between the same bus
// pair are distinct edges and therefore never bridges of the multigraph, and a
// single merged line carrying several branches is likewise not a bridge.
std::vector<char> tarjan_bridges(const PowerNetwork& net) {
    int n = net.bus_count();
    std::vector<char> is_bridge(net.line_count(), 0);
    std::vector<int> disc(n, -1), low(n, 0);
    int timer = 0;
    for (int root = 0; root < n; ++root) {
        if (disc[root] >= 0) continue;
        struct Frame {
            int v;
            int parent_line;
            size_t edge_idx;
        };
        std::vector<Frame> stack{{root, -1, 0}};
        disc[root] = low[root] = timer++;
        while (!stack.empty()) {
            Frame& fr = stack.back();
            const auto& inc = net.incident(fr.v);
            if (fr.edge_idx < inc.size()) {
                int lid = inc[fr.edge_idx++];
                if (lid == fr.parent_line) continue;
                int u = net.other_end(lid, fr.v);
                if (disc[u] < 0) {
                    disc[u] = low[u] = timer++;
                    stack.push_back({u, lid, 0});
                } else {
                    low[fr.v] = std::min(low[fr.v], disc[u]);
                }
            } else {
                int v = fr.v;
                int plid = fr.parent_line;
                stack.pop_back();
                if (!stack.empty()) {
                    int parent = stack.back().v;
                    low[parent] = std::min(low[parent], low[v]);
                    if (low[v] > disc[parent] && net.line(plid).multiplicity() <= 1)
                        is_bridge[plid] = 1;
                }
            }
        }
    }
    return is_bridge;
}

}  // namespace

BridgeBlockDecomposition bridges_and_bridge_blocks(const PowerNetwork& net) {
    BridgeBlockDecomposition bb;
    bb.is_bridge = tarjan_bridges(net);
    for (int l = 0; l < net.line_count(); ++l)
        if (bb.is_bridge[l]) bb.bridges.push_back(l);

    int n = net.bus_count();
    std::vector<int> label(n, -1);
    int next = 0;
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        label[s] = next;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int lid : net.incident(v)) {
                if (bb.is_bridge[lid]) continue;
                int u = net.other_end(lid, v);
                if (label[u] < 0) {
                    label[u] = next;
                    stack.push_back(u);
                }
            }
        }
        ++next;
    }
    bb.blocks = Partition::from_labels(label);
    bb.bb_tree.node_count = bb.blocks.cluster_count();
    for (int lid : bb.bridges) {
        const Line& l = net.line(lid);
        bb.bb_tree.edges.push_back({label[l.from], label[l.to], lid});
    }
    return bb;
}

int BlockDecomposition::nontrivial_count() const {
    int c = 0;
    for (size_t b = 0; b < block_lines.size(); ++b)
        if (nontrivial(static_cast<int>(b))) ++c;
    return c;
}

BlockDecomposition block_decomposition(const PowerNetwork& net) {
    int n = net.bus_count();
    BlockDecomposition bd;
    bd.block_of_line.assign(net.line_count(), -1);
    bd.is_cut_vertex.assign(n, 0);
    bd.blocks_of_vertex.assign(n, {});

    std::vector<int> disc(n, -1), low(n, 0);
    std::vector<int> edge_stack;
    int timer = 0;

    struct Frame {
        int v;
        int parent_line;
        size_t edge_idx;
        int children = 0;
    };

    auto pop_block = [&](int until_line) {
        std::vector<int> lines;
        while (!edge_stack.empty()) {
            int lid = edge_stack.back();
            edge_stack.pop_back();
            lines.push_back(lid);
            if (lid == until_line) break;
        }
        std::sort(lines.begin(), lines.end());
        int b = static_cast<int>(bd.block_lines.size());
        for (int lid : lines) bd.block_of_line[lid] = b;
        bd.block_lines.push_back(std::move(lines));
    };

    for (int root = 0; root < n; ++root) {
        if (disc[root] >= 0) continue;
        std::vector<Frame> stack{{root, -1, 0}};
        disc[root] = low[root] = timer++;
        while (!stack.empty()) {
            Frame& fr = stack.back();
            const auto& inc = net.incident(fr.v);
            if (fr.edge_idx < inc.size()) {
                int lid = inc[fr.edge_idx++];
                if (lid == fr.parent_line) continue;
                int u = net.other_end(lid, fr.v);
                if (disc[u] < 0) {
                    edge_stack.push_back(lid);
                    disc[u] = low[u] = timer++;
                    ++fr.children;
                    stack.push_back({u, lid, 0});
                } else if (disc[u] < disc[fr.v]) {
                    edge_stack.push_back(lid);
                    low[fr.v] = std::min(low[fr.v], disc[u]);
                }
            } else {
                Frame done = stack.back();
                stack.pop_back();
                if (!stack.empty()) {
                    Frame& parent = stack.back();
                    low[parent.v] = std::min(low[parent.v], low[done.v]);
                    if (low[done.v] >= disc[parent.v]) {
                        // parent.v separates done.v's subtree: close a block
                        bool is_root = parent.parent_line < 0;
                        if (!is_root || parent.children > 1 ||
                            (is_root && parent.edge_idx < net.incident(parent.v).size()))
                            bd.is_cut_vertex[parent.v] = 1;
                        pop_block(done.parent_line);
                    }
                }
            }
        }
    }

    // Root cut-vertex flag above over-approximates (it may mark the root while
    // later children end up in the same block); recompute exactly from block
    // membership instead.
    std::fill(bd.is_cut_vertex.begin(), bd.is_cut_vertex.end(), 0);
    for (size_t b = 0; b < bd.block_lines.size(); ++b) {
        std::vector<int> verts;
        for (int lid : bd.block_lines[b]) {
            verts.push_back(net.line(lid).from);
            verts.push_back(net.line(lid).to);
        }
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        for (int v : verts) bd.blocks_of_vertex[v].push_back(static_cast<int>(b));
    }
    for (int v = 0; v < n; ++v)
        if (bd.blocks_of_vertex[v].size() > 1) {
            bd.is_cut_vertex[v] = 1;
            bd.cut_vertices.push_back(v);
        }
    return bd;
}

bool is_finer(const Partition& p1, const Partition& p2) {
    if (p1.cluster_of.size() != p2.cluster_of.size())
        throw DataError("partitions are over different vertex sets");
    for (const auto& cluster : p1.clusters) {
        int target = p2.cluster_of[cluster[0]];
        for (int v : cluster)
            if (p2.cluster_of[v] != target) return false;
    }
    return true;
}

ReducedMultigraph reduced_graph(const PowerNetwork& net, const Partition& p) {
    if (static_cast<int>(p.cluster_of.size()) != net.bus_count())
        throw DataError("partition does not match the network");
    ReducedMultigraph rg;
    rg.node_count = p.cluster_count();
    for (const Line& l : net.lines()) {
        int a = p.cluster_of[l.from], b = p.cluster_of[l.to];
        if (a != b) rg.edges.push_back({a, b, l.id});
    }
    return rg;
}

namespace {

struct Dsu {
    std::vector<int> parent;
    int comps;
    explicit Dsu(int n) : parent(n), comps(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        --comps;
        return true;
    }
};

}  // namespace

bool is_tree(const ReducedMultigraph& rg) {
    if (rg.node_count == 0) return false;
    if (static_cast<int>(rg.edges.size()) != rg.node_count - 1) return false;
    Dsu dsu(rg.node_count);
    for (const auto& e : rg.edges)
        if (!dsu.unite(e.a, e.b)) return false;
    return dsu.comps == 1;
}

BigInt spanning_tree_count(const ReducedMultigraph& rg) {
    int n = rg.node_count;
    if (n == 0) return 0;
    if (n == 1) return 1;
    Dsu dsu(n);
    for (const auto& e : rg.edges) dsu.unite(e.a, e.b);
    if (dsu.comps != 1) return 0;

    // Integer Laplacian minor with multiplicities, fraction-free Bareiss.
    int m = n - 1;
    std::vector<std::vector<BigInt>> a(m, std::vector<BigInt>(m, 0));
    for (const auto& e : rg.edges) {
        int i = e.a - 1, j = e.b - 1;  // drop vertex 0
        if (i >= 0) a[i][i] += 1;
        if (j >= 0) a[j][j] += 1;
        if (i >= 0 && j >= 0) {
            a[i][j] -= 1;
            a[j][i] -= 1;
        }
    }
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k < m; ++k) {
        if (a[k][k] == 0) {
            int swap_row = -1;
            for (int r = k + 1; r < m; ++r)
                if (a[r][k] != 0) {
                    swap_row = r;
                    break;
                }
            if (swap_row < 0) return 0;
            std::swap(a[k], a[swap_row]);
            sign = -sign;
        }
        for (int i = k + 1; i < m; ++i)
            for (int j = k + 1; j < m; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign > 0 ? a[m - 1][m - 1] : -a[m - 1][m - 1];
}

namespace {

void enumerate_trees_rec(const std::vector<ReducedEdge>& edges, size_t idx, Dsu dsu,
                         std::vector<int>& chosen,
                         const std::function<void(const std::vector<int>&)>& yield) {
    if (dsu.comps == 1) {
        yield(chosen);
        return;
    }
    if (idx >= edges.size()) return;
    const ReducedEdge& e = edges[idx];
    if (dsu.find(e.a) != dsu.find(e.b)) {
        Dsu with = dsu;
        with.unite(e.a, e.b);
        chosen.push_back(e.line_id);
        enumerate_trees_rec(edges, idx + 1, std::move(with), chosen, yield);
        chosen.pop_back();
    }
    // exclude e only if the remaining edges can still connect everything
    Dsu probe = dsu;
    for (size_t r = idx + 1; r < edges.size() && probe.comps > 1; ++r)
        probe.unite(edges[r].a, edges[r].b);
    if (probe.comps == 1) enumerate_trees_rec(edges, idx + 1, std::move(dsu), chosen, yield);
}

}  // namespace

void enumerate_spanning_trees(const ReducedMultigraph& rg, const BigInt& cap,
                              const std::function<void(const std::vector<int>&)>& yield) {
    BigInt count = spanning_tree_count(rg);
    if (count > cap) {
        throw EnumerationCapError(
            "spanning tree count " + count.str() + " exceeds cap " + cap.str() +
                " (consider the recursive bipartition algorithm)",
            count.convert_to<double>());
    }
    if (count == 0) return;
    std::vector<ReducedEdge> edges = rg.edges;
    std::sort(edges.begin(), edges.end(),
              [](const ReducedEdge& a, const ReducedEdge& b) { return a.line_id < b.line_id; });
    std::vector<int> chosen;
    enumerate_trees_rec(edges, 0, Dsu(rg.node_count), chosen, yield);
}

std::vector<std::vector<int>> enumerate_spanning_trees(const ReducedMultigraph& rg,
                                                       const BigInt& cap) {
    std::vector<std::vector<int>> out;
    enumerate_spanning_trees(rg, cap, [&](const std::vector<int>& t) { out.push_back(t); });
    return out;
}

std::vector<std::vector<int>> enumerate_two_tree_forests(const PowerNetwork& net,
                                                         const std::vector<int>& v1,
                                                         const std::vector<int>& v2) {
    int m = net.line_count();
    int n = net.bus_count();
    if (m > 24) throw DataError("two-tree forest oracle is gated to small graphs (m <= 24)");
    for (int a : v1)
        for (int b : v2)
            if (a == b) return {};  // empty by definition when not disjoint
    if (n < 2) return {};

    std::vector<std::vector<int>> out;
    int want = n - 2;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (__builtin_popcount(mask) != want) continue;
        Dsu dsu(n);
        bool acyclic = true;
        for (int l = 0; l < m && acyclic; ++l)
            if (mask & (1u << l))
                if (!dsu.unite(net.line(l).from, net.line(l).to)) acyclic = false;
        if (!acyclic || dsu.comps != 2) continue;
        int root1 = v1.empty() ? -1 : dsu.find(v1[0]);
        int root2 = v2.empty() ? -1 : dsu.find(v2[0]);
        bool ok = true;
        for (int a : v1) ok = ok && dsu.find(a) == root1;
        for (int b : v2) ok = ok && dsu.find(b) == root2;
        if (root1 >= 0 && root2 >= 0) ok = ok && root1 != root2;
        if (!ok) continue;
        std::vector<int> forest;
        for (int l = 0; l < m; ++l)
            if (mask & (1u << l)) forest.push_back(l);
        out.push_back(std::move(forest));
    }
    std::sort(out.begin(), out.end());
    return out;
}

double beta_weight(const PowerNetwork& net, const std::vector<int>& edge_set) {
    if (edge_set.empty()) return net.line_count() == 0 ? 1.0 : 0.0;
    double prod = 1.0;
    for (int l : edge_set) prod *= net.line(l).susceptance;
    return prod;
}

bool share_simple_cycle(const BlockDecomposition& bd, int l, int lhat) {
    if (l == lhat) throw DataError("share_simple_cycle requires two distinct lines");
    return bd.block_of_line[l] == bd.block_of_line[lhat];
}

bool on_simple_path(const BlockDecomposition& bd, const PowerNetwork& net, int l, int j, int k) {
    if (j == k) return false;

    // same-island check by traversal
    {
        std::vector<char> seen(net.bus_count(), 0);
        std::vector<int> stack{j};
        seen[j] = 1;
        bool reached = false;
        while (!stack.empty() && !reached) {
            int v = stack.back();
            stack.pop_back();
            if (v == k) reached = true;
            for (int lid : net.incident(v)) {
                int u = net.other_end(lid, v);
                if (!seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
            }
        }
        if (!reached) return false;
    }

    // Block-cut tree: block nodes [0, B), cut-vertex nodes [B, B + C).
    int bcount = static_cast<int>(bd.block_lines.size());
    std::vector<int> cut_node(net.bus_count(), -1);
    int node_total = bcount;
    for (int v : bd.cut_vertices) cut_node[v] = node_total++;
    std::vector<std::vector<int>> adj(node_total);
    for (int v : bd.cut_vertices)
        for (int b : bd.blocks_of_vertex[v]) {
            adj[cut_node[v]].push_back(b);
            adj[b].push_back(cut_node[v]);
        }

    auto tree_node = [&](int v) {
        if (cut_node[v] >= 0) return cut_node[v];
        if (bd.blocks_of_vertex[v].empty()) return -1;  // isolated vertex
        return bd.blocks_of_vertex[v][0];
    };
    int nj = tree_node(j), nk = tree_node(k);
    if (nj < 0 || nk < 0) return false;

    std::vector<int> prev(node_total, -2);
    std::queue<int> q;
    q.push(nj);
    prev[nj] = -1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        if (x == nk) break;
        for (int y : adj[x])
            if (prev[y] == -2) {
                prev[y] = x;
                q.push(y);
            }
    }
    int target = bd.block_of_line[l];
    for (int x = nk; x != -1; x = prev[x])
        if (x == target) return true;
    return false;
}

}  // namespace gridblocks
