#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "treeminer/potential.hpp"
#include "treeminer/tree.hpp"

namespace treeminer {

struct KktCertificate {
    double lambda = 0.0;
    std::map<NodeId, double> path_gradient;
    double residual = 0.0;
};

struct FractionalSolution {
    FractionalConfig y;
    KktCertificate kkt;
    double objective = 0.0;
    int iterations = 0;
    bool used_fallback = false;
};

inline constexpr double kKktTolerance = 1e-8;

// Sum of d_u phi'(y_u) over the path from each leaf up to the root.
std::map<NodeId, double> path_gradients(const RootedTree& tree, const FractionalConfig& y,
                                        const PotentialParams& p);
KktCertificate kkt_certificate(const RootedTree& tree, const FractionalConfig& y, const PotentialParams& p);

// Minimizes the potential over nonnegative leaf weights summing to k.
// Exact water-filling over the tree; active-set Newton and then projected
// gradient as fallbacks.
FractionalSolution solve_fractional(const RootedTree& tree, double k, const PotentialParams& p);
// Same, starting from a caller-provided feasible point.
FractionalSolution solve_fractional_from(const RootedTree& tree, double k, const PotentialParams& p,
                                         const FractionalConfig& start);
// Projected gradient only. Kept separate so tests can compare both paths.
FractionalSolution solve_fractional_gradient(const RootedTree& tree, double k, const PotentialParams& p,
                                             int max_iterations = 200000);

// Exhaustive simplex grid followed by shrinking-box refinement; at most 4 leaves.
FractionalSolution grid_oracle(const RootedTree& tree, double k, const PotentialParams& p);

struct UltrametricHessian {
    std::vector<NodeId> leaves;
    Eigen::MatrixXd matrix;
};

UltrametricHessian hessian(const RootedTree& tree, const FractionalConfig& y, const PotentialParams& p);
bool is_ultrametric(const Eigen::MatrixXd& h, double tol = 1e-9);

struct InverseReport {
    bool holds = true;
    double min_diagonal = 0.0;
    double max_off_diagonal = 0.0;
    double min_row_sum = 0.0;
};

InverseReport ultrametric_inverse_probe(const Eigen::MatrixXd& h);

struct MasterReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

inline constexpr double kMasterTolerance = 1e-6;

MasterReport check_master_inequality(const RootedTree& tree, const DiscreteConfig& x, double cost,
                                     const PotentialParams& p);
MasterReport check_master_inequality(const RootedTree& tree, const DiscreteConfig& x, double cost,
                                     const PotentialParams& p, const FractionalSolution& y);

struct XyBoundsReport {
    bool holds = true;
    bool x_at_least_one = true;
    // Largest x - y - (2 - eps) and smallest y - eps over leaves.
    double worst_upper = 0.0;
    double worst_lower = 0.0;
    NodeId worst_leaf = kNoNode;
    std::string failure;
};

inline constexpr double kBoundsTolerance = 1e-6;

XyBoundsReport check_xy_bounds(const RootedTree& tree, const DiscreteConfig& x, const PotentialParams& p);
XyBoundsReport check_xy_bounds(const RootedTree& tree, const DiscreteConfig& x, const PotentialParams& p,
                               const FractionalSolution& y);

struct ProbeReport {
    bool applicable = true;
    bool holds = true;
    double slope = 0.0;
    double slope_bound = 0.0;
    std::string failure;
};

ProbeReport elongation_monotonicity_probe(const RootedTree& tree, NodeId leaf, double step, double k,
                                          const PotentialParams& p);
// Removing a leaf (and re-simplifying) must not lower any surviving weight.
ProbeReport deletion_monotonicity_probe(const RootedTree& tree, NodeId leaf, double k, const PotentialParams& p);

// Largest disagreement between the two branch sums of d_u phi'(y_u)
// below the common ancestor, over pairs of leaves with positive weight.
double equilibrium_gap(const RootedTree& tree, const FractionalConfig& y, const PotentialParams& p);

} // namespace treeminer
