#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gridblocks/net_model.hpp"

namespace gridblocks {

using FlowVector = Eigen::VectorXd;

// Weighted Laplacian L = C B C^T, its pseudo-inverse and island structure.
// The pseudo-inverse is computed by inverting L plus a rank-k correction
// (one rank-1 term per island) and subtracting the same correction.
class LaplacianSystem {
public:
    static LaplacianSystem build(const PowerNetwork& net);

    const Eigen::MatrixXd& laplacian() const { return laplacian_; }
    const Eigen::MatrixXd& pseudo_inverse() const { return pinv_; }
    const std::vector<std::vector<int>>& islands() const { return islands_; }
    int island_of(int bus) const { return island_of_[bus]; }
    int size() const { return static_cast<int>(laplacian_.rows()); }

private:
    Eigen::MatrixXd laplacian_;
    Eigen::MatrixXd pinv_;
    std::vector<std::vector<int>> islands_;
    std::vector<int> island_of_;
};

// f = B C^T L-dagger p; throws BalanceError when p is unbalanced on an island.
FlowVector dc_flow(const LaplacianSystem& sys, const PowerNetwork& net,
                   const InjectionVector& p, double balance_tol = 1e-6);

// R_ij; +infinity when i and j lie in different islands.
double effective_resistance(const LaplacianSystem& sys, int i, int j);

// n * trace(L-dagger); requires a connected network.
double total_effective_resistance(const LaplacianSystem& sys);

bool is_balanced(const InjectionVector& p, const std::vector<std::vector<int>>& islands,
                 double tol);

}  // namespace gridblocks
