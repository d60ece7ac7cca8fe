#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "bootlasso/dataset.hpp"

namespace bootlasso {

// Solves  min_beta  sum_i w_i (y_i - x_i . beta)^2 + lambda * ||beta||_1
// by cyclic coordinate descent with exact soft-threshold updates. There is
// deliberately no 1/n factor in the loss; callers that want a per-observation
// penalty scale rescale the weights instead.

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

struct FitOptions {
    double coord_tol = 1e-8;   // max coordinate change per sweep
    double kkt_tol = 1e-6;     // stationarity certificate tolerance
    int max_sweeps = 10000;
    bool intercept = false;    // unpenalized intercept, off for standardized data
    std::vector<double>* objective_trace = nullptr;  // per-sweep objective, if set
};

struct LassoPath {
    Eigen::VectorXd lambdas;     // strictly decreasing
    Eigen::MatrixXd betas;       // K x p, exact zeros for inactive coefficients
    Eigen::VectorXd intercepts;  // zeros when fit without intercept
    Eigen::VectorXd weights_used;
};

struct ActiveSet {
    std::vector<int> indices;  // sorted column indices with nonzero coefficient
    double lambda = 0.0;
};

struct FitResult {
    Eigen::VectorXd beta;
    double intercept = 0.0;
    int sweeps = 0;
};

Eigen::VectorXd weighted_lasso_fit(const Dataset& data, const Eigen::VectorXd& w, double lambda,
                                   const Eigen::VectorXd* init = nullptr,
                                   const FitOptions& opts = FitOptions{});

// Log-spaced descending grid from lambda_max = 2 max_j |x_j^T y| (unit
// weights) down to ratio * lambda_max. The first grid point yields the
// all-zero coefficient vector on a unit-weight fit.
Eigen::VectorXd compute_lambda_grid(const Dataset& data, int K, double ratio);

LassoPath fit_path(const Dataset& data, const Eigen::VectorXd& w, const Eigen::VectorXd& grid,
                   const FitOptions& opts = FitOptions{});

// Same as fit_path but also returns the residual vector y - X beta(lambda)
// per grid point (rows follow the grid), used for prediction scoring.
struct PathWithResiduals {
    LassoPath path;
    Eigen::MatrixXd residuals;  // K x n
};
PathWithResiduals fit_path_with_residuals(const Dataset& data, const Eigen::VectorXd& w,
                                          const Eigen::VectorXd& grid,
                                          const FitOptions& opts = FitOptions{});

ActiveSet active_set(const LassoPath& path, int lambda_index);

double weighted_lasso_objective(const Dataset& data, const Eigen::VectorXd& w, double lambda,
                                const Eigen::VectorXd& beta, double intercept = 0.0);

// Max violation of the subgradient stationarity conditions: for active j,
// |2 x_j^T W r - lambda sign(beta_j)|; for inactive j, |2 x_j^T W r| - lambda
// clipped at zero. r is the residual y - X beta - intercept.
double kkt_violation(const Dataset& data, const Eigen::VectorXd& w, double lambda,
                     const Eigen::VectorXd& beta, double intercept = 0.0,
                     bool check_intercept = false);

}  // namespace bootlasso
