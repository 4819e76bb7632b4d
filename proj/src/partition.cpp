#include "gridblocks/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gridblocks/errors.hpp"

namespace gridblocks {

std::string method_name(ClusterMethod m) {
    switch (m) {
        case ClusterMethod::fastgreedy: return "fastgreedy";
        case ClusterMethod::spectral_Ln: return "spectral_Ln";
        case ClusterMethod::spectral_Bn: return "spectral_Bn";
    }
    return "?";
}

FlowWeights flow_weights(const PowerNetwork& net, const FlowVector& f) {
    if (f.size() != net.line_count())
        throw DataError("flow vector length does not match line count");
    FlowWeights w;
    w.edge_weight = f.cwiseAbs();
    w.node_strength = Eigen::VectorXd::Zero(net.bus_count());
    for (const Line& l : net.lines()) {
        w.node_strength[l.from] += w.edge_weight[l.id];
        w.node_strength[l.to] += w.edge_weight[l.id];
    }
    w.total = w.edge_weight.sum();
    return w;
}

namespace {

// Per-cluster volume and cut; Vol_r - Cut_r equals the ordered-pair internal
// weight sum of the modularity objective.
struct ClusterStats {
    std::vector<double> vol, cut;
};

ClusterStats cluster_stats(const FlowWeights& w, const PowerNetwork& net, const Partition& p) {
    ClusterStats s;
    s.vol.assign(p.clusters.size(), 0.0);
    s.cut.assign(p.clusters.size(), 0.0);
    for (int v = 0; v < net.bus_count(); ++v) s.vol[p.cluster_of[v]] += w.node_strength[v];
    for (const Line& l : net.lines()) {
        int a = p.cluster_of[l.from], b = p.cluster_of[l.to];
        if (a != b) {
            s.cut[a] += w.edge_weight[l.id];
            s.cut[b] += w.edge_weight[l.id];
        }
    }
    return s;
}

void require_positive_total(const FlowWeights& w) {
    if (!(w.total > 0.0))
        throw NumericError("undefined-objective",
                           "modularity is undefined for an all-zero flow weighting (M = 0)");
}

}  // namespace

double modularity(const FlowWeights& w, const PowerNetwork& net, const Partition& p) {
    require_positive_total(w);
    double two_m = 2.0 * w.total;
    auto s = cluster_stats(w, net, p);
    double q = 0.0;
    for (size_t r = 0; r < p.clusters.size(); ++r)
        q += (s.vol[r] - s.cut[r]) / two_m - (s.vol[r] / two_m) * (s.vol[r] / two_m);
    return q;
}

double normalized_modularity(const FlowWeights& w, const PowerNetwork& net, const Partition& p) {
    require_positive_total(w);
    double two_m = 2.0 * w.total;
    auto s = cluster_stats(w, net, p);
    double qn = 0.0;
    for (size_t r = 0; r < p.clusters.size(); ++r) {
        if (!(s.vol[r] > 0.0))
            throw NumericError("zero-strength-cluster",
                               "cluster " + std::to_string(r) + " has zero total strength");
        qn += ((s.vol[r] - s.cut[r]) - s.vol[r] * s.vol[r] / two_m) / (s.vol[r] * two_m);
    }
    return qn;
}

double volume(const FlowWeights& w, const std::vector<int>& cluster) {
    double v = 0.0;
    for (int i : cluster) v += w.node_strength[i];
    return v;
}

double cut_value(const FlowWeights& w, const PowerNetwork& net, const std::vector<int>& cluster) {
    std::vector<char> inside(net.bus_count(), 0);
    for (int v : cluster) inside[v] = 1;
    double c = 0.0;
    for (const Line& l : net.lines())
        if (inside[l.from] != inside[l.to]) c += w.edge_weight[l.id];
    return c;
}

double ncut(const FlowWeights& w, const PowerNetwork& net, const Partition& p) {
    if (p.cluster_count() != 2)
        throw DataError("NCut is defined for a bipartition {V, V^c}");
    double c = cut_value(w, net, p.clusters[0]);
    double v0 = volume(w, p.clusters[0]);
    double v1 = volume(w, p.clusters[1]);
    if (!(v0 > 0.0) || !(v1 > 0.0))
        throw NumericError("zero-strength-cluster", "NCut needs positive cluster volumes");
    return c / v0 + c / v1;
}

ClusteringResult fastgreedy(const FlowWeights& w, const PowerNetwork& net, int b) {
    int n = net.bus_count();
    if (b < 1) throw DataError("b must be at least 1");
    if (b > n) throw DataError("cannot form more clusters than vertices");
    require_positive_total(w);
    double two_m = 2.0 * w.total;

    std::vector<char> active(n, 1);
    std::vector<std::vector<int>> members(n);
    std::vector<double> vol(n, 0.0);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);  // inter-community weight
    Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);
    for (int v = 0; v < n; ++v) {
        members[v] = {v};
        vol[v] = w.node_strength[v];
    }
    for (const Line& l : net.lines()) {
        if (l.from == l.to) continue;
        e(l.from, l.to) += w.edge_weight[l.id];
        e(l.to, l.from) += w.edge_weight[l.id];
        adj(l.from, l.to) = adj(l.to, l.from) = 1;
    }

    int count = n;
    while (count > b) {
        // exhaustive max over adjacent pairs; ties by lowest (r, s)
        double best = -std::numeric_limits<double>::infinity();
        int br = -1, bs = -1;
        for (int r = 0; r < n; ++r) {
            if (!active[r]) continue;
            for (int s = r + 1; s < n; ++s) {
                if (!active[s] || !adj(r, s)) continue;
                double dq = 2.0 * (e(r, s) / two_m - (vol[r] / two_m) * (vol[s] / two_m));
                if (dq > best) {
                    best = dq;
                    br = r;
                    bs = s;
                }
            }
        }
        if (br < 0)
            throw DataError("fastgreedy requires a connected input subgraph");
        // merge bs into br
        members[br].insert(members[br].end(), members[bs].begin(), members[bs].end());
        vol[br] += vol[bs];
        active[bs] = 0;
        for (int t = 0; t < n; ++t) {
            if (!active[t] || t == br) continue;
            e(br, t) += e(bs, t);
            e(t, br) = e(br, t);
            if (adj(bs, t)) adj(br, t) = adj(t, br) = 1;
        }
        --count;
    }

    std::vector<std::vector<int>> clusters;
    for (int r = 0; r < n; ++r)
        if (active[r]) clusters.push_back(members[r]);
    ClusteringResult res;
    res.method = ClusterMethod::fastgreedy;
    res.partition = Partition::from_clusters(std::move(clusters), n);
    res.q = modularity(w, net, res.partition);
    res.q_n = normalized_modularity(w, net, res.partition);
    return res;
}

namespace {

// k-means with deterministic farthest-point seeding on embedded rows.
std::vector<int> kmeans(const Eigen::MatrixXd& rows, int k) {
    int q = static_cast<int>(rows.rows());
    std::vector<int> seeds;
    {
        int first = 0;
        double best = -1.0;
        for (int i = 0; i < q; ++i) {
            double norm = rows.row(i).norm();
            if (norm > best) {
                best = norm;
                first = i;
            }
        }
        seeds.push_back(first);
        while (static_cast<int>(seeds.size()) < k) {
            int far = -1;
            double far_d = -1.0;
            for (int i = 0; i < q; ++i) {
                double d = std::numeric_limits<double>::infinity();
                for (int s : seeds) d = std::min(d, (rows.row(i) - rows.row(s)).squaredNorm());
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            seeds.push_back(far);
        }
    }
    Eigen::MatrixXd centers(k, rows.cols());
    for (int c = 0; c < k; ++c) centers.row(c) = rows.row(seeds[c]);

    std::vector<int> assign(q, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < q; ++i) {
            int best_c = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = (rows.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d - 1e-15) {
                    best_d = d;
                    best_c = c;
                }
            }
            if (assign[i] != best_c) {
                assign[i] = best_c;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        for (int c = 0; c < k; ++c) {
            Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(rows.cols());
            int cnt = 0;
            for (int i = 0; i < q; ++i)
                if (assign[i] == c) {
                    mean += rows.row(i);
                    ++cnt;
                }
            if (cnt > 0) centers.row(c) = mean / cnt;
        }
    }
    return assign;
}

}  // namespace

ClusteringResult spectral_cluster(const FlowWeights& w, const PowerNetwork& net, int b,
                                  ClusterMethod kind) {
    if (kind != ClusterMethod::spectral_Ln && kind != ClusterMethod::spectral_Bn)
        throw DataError("spectral_cluster expects a spectral method kind");
    int n = net.bus_count();
    if (b < 1) throw DataError("b must be at least 1");
    if (b > n) throw DataError("cannot form more clusters than vertices");
    require_positive_total(w);

    std::vector<int> labels(n, -1);
    if (b == 1) {
        std::fill(labels.begin(), labels.end(), 0);
    } else {
        // cluster the positive-strength vertices, pre-assigning the rest later
        std::vector<int> pos;
        std::vector<int> to_pos(n, -1);
        for (int v = 0; v < n; ++v)
            if (w.node_strength[v] > 0.0) {
                to_pos[v] = static_cast<int>(pos.size());
                pos.push_back(v);
            }
        int q = static_cast<int>(pos.size());
        if (q < b) throw DataError("fewer positive-strength vertices than clusters");

        Eigen::VectorXd inv_sqrt(q);
        for (int i = 0; i < q; ++i) inv_sqrt[i] = 1.0 / std::sqrt(w.node_strength[pos[i]]);

        Eigen::MatrixXd embed;
        if (kind == ClusterMethod::spectral_Ln) {
            Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(q, q);
            for (const Line& l : net.lines()) {
                int i = to_pos[l.from], j = to_pos[l.to];
                if (i < 0 || j < 0) continue;
                double wt = w.edge_weight[l.id];
                lap(i, i) += wt;
                lap(j, j) += wt;
                lap(i, j) -= wt;
                lap(j, i) -= wt;
            }
            Eigen::MatrixXd ln = inv_sqrt.asDiagonal() * lap * inv_sqrt.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ln);
            if (es.info() != Eigen::Success)
                throw NumericError("eigensolver", "normalized Laplacian eigensolver failed");
            embed = es.eigenvectors().middleCols(1, b - 1);  // skip the trivial eigenvector
        } else {
            double two_m = 2.0 * w.total;
            Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(q, q);
            for (const Line& l : net.lines()) {
                int i = to_pos[l.from], j = to_pos[l.to];
                if (i < 0 || j < 0) continue;
                bmat(i, j) += w.edge_weight[l.id];
                bmat(j, i) += w.edge_weight[l.id];
            }
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j)
                    bmat(i, j) -= w.node_strength[pos[i]] * w.node_strength[pos[j]] / two_m;
            Eigen::MatrixXd bn = inv_sqrt.asDiagonal() * bmat * inv_sqrt.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bn);
            if (es.info() != Eigen::Success)
                throw NumericError("eigensolver", "normalized modularity eigensolver failed");
            embed = es.eigenvectors().rightCols(b - 1);  // largest eigenvalues
        }

        std::vector<int> assign(q, 0);
        if (b == 2) {
            Eigen::VectorXd v = embed.col(0);
            for (int i = 0; i < q; ++i)
                if (std::abs(v[i]) > 1e-14) {
                    if (v[i] < 0.0) v = -v;  // fix the sign by the first nonzero entry
                    break;
                }
            bool has_pos = false, has_neg = false;
            for (int i = 0; i < q; ++i) {
                assign[i] = v[i] < 0.0 ? 1 : 0;  // zero entries join the positive side
                (assign[i] ? has_neg : has_pos) = true;
            }
            if (!has_pos || !has_neg) assign = kmeans(embed, 2);
        } else {
            assign = kmeans(embed, b);
        }
        for (int i = 0; i < q; ++i) labels[pos[i]] = assign[i];

        // zero-strength vertices go to the nearest assigned vertex by hops,
        // ties resolved toward the lowest cluster index
        std::vector<int> dist(n, -1);
        std::queue<int> bfs;
        for (int v = 0; v < n; ++v)
            if (labels[v] >= 0) {
                dist[v] = 0;
                bfs.push(v);
            }
        std::vector<int> order;
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop();
            order.push_back(v);
            for (int lid : net.incident(v)) {
                int u = net.other_end(lid, v);
                if (dist[u] < 0) {
                    dist[u] = dist[v] + 1;
                    bfs.push(u);
                }
            }
        }
        for (int v : order) {
            if (labels[v] >= 0) continue;
            int best = -1;
            for (int lid : net.incident(v)) {
                int u = net.other_end(lid, v);
                if (dist[u] == dist[v] - 1 && labels[u] >= 0)
                    if (best < 0 || labels[u] < best) best = labels[u];
            }
            labels[v] = best < 0 ? 0 : best;
        }
        for (int v = 0; v < n; ++v)
            if (labels[v] < 0) labels[v] = 0;  // isolated vertices
    }

    ClusteringResult res;
    res.method = kind;
    res.partition = Partition::from_labels(labels);
    res.q = modularity(w, net, res.partition);
    res.q_n = normalized_modularity(w, net, res.partition);
    return res;
}

ClusteringResult obi_solve(const FlowWeights& w, const PowerNetwork& net, int b,
                           ClusterMethod method) {
    ClusteringResult res = method == ClusterMethod::fastgreedy
                               ? fastgreedy(w, net, b)
                               : spectral_cluster(w, net, b, method);
    if (!satisfies_a1(net, res.partition)) {
        res.partition = refine_to_connected(net, res.partition);
        res.q = modularity(w, net, res.partition);
        res.q_n = normalized_modularity(w, net, res.partition);
    }
    return res;
}

}  // namespace gridblocks
