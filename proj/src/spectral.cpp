#include "gridblocks/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gridblocks/errors.hpp"

namespace gridblocks {

LaplacianSystem LaplacianSystem::build(const PowerNetwork& net) {
    if (net.bus_count() == 0) throw DataError("cannot build a Laplacian for an empty network");
    const int n = net.bus_count();
    LaplacianSystem sys;
    sys.laplacian_ = Eigen::MatrixXd::Zero(n, n);
    for (const Line& l : net.lines()) {
        sys.laplacian_(l.from, l.from) += l.susceptance;
        sys.laplacian_(l.to, l.to) += l.susceptance;
        sys.laplacian_(l.from, l.to) -= l.susceptance;
        sys.laplacian_(l.to, l.from) -= l.susceptance;
    }

    sys.island_of_.assign(n, -1);
    for (int s = 0; s < n; ++s) {
        if (sys.island_of_[s] >= 0) continue;
        int c = static_cast<int>(sys.islands_.size());
        sys.islands_.push_back({});
        std::vector<int> stack{s};
        sys.island_of_[s] = c;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            sys.islands_[c].push_back(v);
            for (int lid : net.incident(v)) {
                int u = net.other_end(lid, v);
                if (sys.island_of_[u] < 0) {
                    sys.island_of_[u] = c;
                    stack.push_back(u);
                }
            }
        }
        std::sort(sys.islands_[c].begin(), sys.islands_[c].end());
    }

    Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(n, n);
    for (const auto& island : sys.islands_) {
        double w = 1.0 / static_cast<double>(island.size());
        for (int i : island)
            for (int j : island) correction(i, j) += w;
    }

    Eigen::MatrixXd shifted = sys.laplacian_ + correction;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw ConditioningError("LDLT factorization of the shifted Laplacian failed");
    sys.pinv_ = ldlt.solve(Eigen::MatrixXd::Identity(n, n)) - correction;
    sys.pinv_ = 0.5 * (sys.pinv_ + sys.pinv_.transpose()).eval();

    // Residual check per island; a clean factorization of a PD matrix should
    // reproduce L L-dagger L = L to near machine precision.
    Eigen::MatrixXd residual = sys.laplacian_ * sys.pinv_ * sys.laplacian_ - sys.laplacian_;
    double scale = std::max(1.0, sys.laplacian_.cwiseAbs().maxCoeff());
    if (!(residual.cwiseAbs().maxCoeff() <= 1e-6 * scale)) {
        double worst = 0.0;
        size_t worst_island = 0;
        for (size_t c = 0; c < sys.islands_.size(); ++c) {
            for (int i : sys.islands_[c])
                for (int j : sys.islands_[c])
                    if (std::abs(residual(i, j)) > worst) {
                        worst = std::abs(residual(i, j));
                        worst_island = c;
                    }
        }
        std::ostringstream os;
        os << "pseudo-inverse residual " << worst << " on island " << worst_island
           << " (numerically singular despite rank correction)";
        throw ConditioningError(os.str());
    }
    return sys;
}

bool is_balanced(const InjectionVector& p, const std::vector<std::vector<int>>& islands,
                 double tol) {
    for (const auto& island : islands) {
        double s = 0.0;
        for (int v : island) s += p[v];
        if (std::abs(s) > tol) return false;
    }
    return true;
}

FlowVector dc_flow(const LaplacianSystem& sys, const PowerNetwork& net,
                   const InjectionVector& p, double balance_tol) {
    if (p.size() != net.bus_count())
        throw DataError("injection vector length does not match bus count");
    if (!is_balanced(p, sys.islands(), balance_tol)) {
        std::ostringstream os;
        os << "injections are not balanced per island; residuals:";
        for (size_t c = 0; c < sys.islands().size(); ++c) {
            double s = 0.0;
            for (int v : sys.islands()[c]) s += p[v];
            os << " island " << c << ": " << s << " MW;";
        }
        throw BalanceError(os.str());
    }
    Eigen::VectorXd theta = sys.pseudo_inverse() * p;
    FlowVector f(net.line_count());
    for (const Line& l : net.lines()) f[l.id] = l.susceptance * (theta[l.from] - theta[l.to]);
    return f;
}

double effective_resistance(const LaplacianSystem& sys, int i, int j) {
    if (i == j) return 0.0;
    if (sys.island_of(i) != sys.island_of(j)) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd& m = sys.pseudo_inverse();
    return m(i, i) + m(j, j) - 2.0 * m(i, j);
}

double total_effective_resistance(const LaplacianSystem& sys) {
    if (sys.islands().size() != 1)
        throw DataError("total effective resistance requires a connected network");
    return static_cast<double>(sys.size()) * sys.pseudo_inverse().trace();
}

}  // namespace gridblocks
