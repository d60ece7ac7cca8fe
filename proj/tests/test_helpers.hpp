#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "bootlasso/dataset.hpp"

namespace testutil {

// Independent stationarity check, written directly from the subgradient of
// sum_i w_i (y_i - x_i.beta)^2 + lambda |beta|_1 and kept separate from the
// solver's internal certificate.
inline double kkt_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& w, double lambda,
                           const Eigen::VectorXd& beta) {
    Eigen::VectorXd r = y - X * beta;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double g = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) g += X(i, j) * w(i) * r(i);
        g *= 2.0;
        double v;
        if (beta(j) > 0.0)
            v = std::abs(g - lambda);
        else if (beta(j) < 0.0)
            v = std::abs(g + lambda);
        else
            v = std::max(0.0, std::abs(g) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

inline double objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, double lambda, const Eigen::VectorXd& beta) {
    Eigen::VectorXd r = y - X * beta;
    return (r.array().square() * w.array()).sum() + lambda * beta.cwiseAbs().sum();
}

// Brute-force box oracle over [-3,3]^p. Starts from a uniform grid and
// refines around the incumbent; every evaluated point is feasible, so the
// returned value upper-bounds the true minimum and approaches it to within
// the final step size squared times the curvature.
inline double grid_search_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& w, double lambda) {
    const int p = static_cast<int>(X.cols());
    Eigen::VectorXd center = Eigen::VectorXd::Zero(p);
    double half_width = 3.0;
    const int points = 25;  // per dimension, per refinement stage
    double best = objective(X, y, w, lambda, center);
    Eigen::VectorXd best_beta = center;

    for (int stage = 0; stage < 6; ++stage) {
        const double step = 2.0 * half_width / (points - 1);
        std::vector<int> ix(static_cast<size_t>(p), 0);
        Eigen::VectorXd beta(p);
        bool carry = false;
        while (!carry) {
            for (int j = 0; j < p; ++j)
                beta(j) = center(j) - half_width + step * ix[static_cast<size_t>(j)];
            const double obj = objective(X, y, w, lambda, beta);
            if (obj < best) {
                best = obj;
                best_beta = beta;
            }
            int j = 0;
            for (;; ++j) {
                if (j == p) {
                    carry = true;
                    break;
                }
                if (++ix[static_cast<size_t>(j)] < points) break;
                ix[static_cast<size_t>(j)] = 0;
            }
        }
        center = best_beta;
        half_width = 1.5 * step;  // overlap neighbouring cells
    }
    return best;
}

inline bootlasso::Dataset raw_dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    bootlasso::Dataset d;
    d.X = X;
    d.y = y;
    d.column_means = Eigen::VectorXd::Zero(X.cols());
    d.column_scales = Eigen::VectorXd::Ones(X.cols());
    d.y_mean = 0.0;
    d.standardized = false;
    return d;
}

// Random regression instance with standardized columns and a sparse signal.
struct RandomInstance {
    bootlasso::Dataset data;
    Eigen::VectorXd weights;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int n, int p,
                                      bool allow_zero_weights = true) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = gauss(rng);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < p; ++j)
        if (unif(rng) < 0.5) beta(j) = 2.0 * unif(rng) - 1.0;
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = X.row(i).dot(beta) + 0.5 * gauss(rng);

    RandomInstance inst;
    inst.data = bootlasso::standardize(X, y);
    inst.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double wi = unif(rng);
        if (allow_zero_weights && unif(rng) < 0.15) wi = 0.0;
        inst.weights(i) = wi;
    }
    if (inst.weights.maxCoeff() <= 0.0) inst.weights(0) = 1.0;
    return inst;
}

}  // namespace testutil
