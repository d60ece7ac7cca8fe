#pragma once

#include <Eigen/Dense>
#include <utility>

namespace bootlasso {

// Design matrix and response together with the standardization metadata
// needed to map fitted coefficients back to the raw scale.
//
// When `standardized` is true every column of X and the response have sample
// mean 0 and sample variance 1 (n-1 denominator). Working on the unit scale
// keeps the solver's absolute tolerances meaningful for any input units.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd column_means;
    Eigen::VectorXd column_scales;
    double y_mean = 0.0;
    double y_scale = 1.0;
    bool standardized = false;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
};

// Centers and scales each column to sample variance one and centers the
// response. Rejects constant columns and non-finite entries.
Dataset standardize(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& raw_y);

// Replaces the response of a standardized dataset with a freshly centered
// copy of `new_y`; the design matrix is reused as-is and `new_y` is assumed
// to already live on the standardized response scale (no re-scaling), as is
// the case for responses simulated from a standardized fit.
Dataset with_response(const Dataset& data, const Eigen::VectorXd& new_y);

// Maps coefficients fitted on the standardized scale back to the raw scale.
// Returns (beta_raw, intercept_raw) such that
//   X_raw * beta_raw + intercept_raw
//     == y_scale * (X_std * beta_std + intercept_std) + y_mean.
std::pair<Eigen::VectorXd, double> to_raw_scale(const Dataset& data,
                                                const Eigen::VectorXd& beta_std,
                                                double intercept_std = 0.0);

}  // namespace bootlasso
