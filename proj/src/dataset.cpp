#include "bootlasso/dataset.hpp"

#include <cmath>

#include "bootlasso/errors.hpp"

namespace bootlasso {

namespace {

void check_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            if (!std::isfinite(X(i, j)))
                throw NonFiniteInputError(static_cast<long>(i), static_cast<int>(j), "X");
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!std::isfinite(y(i)))
            throw NonFiniteInputError(static_cast<long>(i), -1, "y");
}

}  // namespace

Dataset standardize(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& raw_y) {
    const Eigen::Index n = raw_X.rows();
    const Eigen::Index p = raw_X.cols();
    if (n < 2) throw EmptyInputError("need at least 2 observations");
    if (p < 1) throw EmptyInputError("need at least 1 covariate");
    if (raw_y.size() != n) throw EmptyInputError("X and y row counts differ");
    check_finite(raw_X, raw_y);

    Dataset out;
    out.X.resize(n, p);
    out.column_means.resize(p);
    out.column_scales.resize(p);
    const double dn = static_cast<double>(n);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = raw_X.col(j).sum() / dn;
        Eigen::VectorXd centered = raw_X.col(j).array() - mean;
        const double var = centered.squaredNorm() / (dn - 1.0);
        const double scale = std::sqrt(var);
        if (!(scale > 0.0)) throw ConstantColumnError(static_cast<int>(j));
        out.X.col(j) = centered / scale;
        out.column_means(j) = mean;
        out.column_scales(j) = scale;
    }
    out.y_mean = raw_y.sum() / dn;
    Eigen::VectorXd centered_y = raw_y.array() - out.y_mean;
    out.y_scale = std::sqrt(centered_y.squaredNorm() / (dn - 1.0));
    if (!(out.y_scale > 0.0)) throw ConstantColumnError(-1, "response");
    out.y = centered_y / out.y_scale;
    out.standardized = true;
    return out;
}

Dataset with_response(const Dataset& data, const Eigen::VectorXd& new_y) {
    if (new_y.size() != data.n()) throw EmptyInputError("response length mismatch");
    for (Eigen::Index i = 0; i < new_y.size(); ++i)
        if (!std::isfinite(new_y(i)))
            throw NonFiniteInputError(static_cast<long>(i), -1, "y");
    Dataset out = data;
    out.y_mean = new_y.sum() / static_cast<double>(new_y.size());
    out.y_scale = 1.0;
    out.y = new_y.array() - out.y_mean;
    return out;
}

std::pair<Eigen::VectorXd, double> to_raw_scale(const Dataset& data,
                                                const Eigen::VectorXd& beta_std,
                                                double intercept_std) {
    Eigen::VectorXd beta_raw =
        data.y_scale * (beta_std.array() / data.column_scales.array());
    double intercept =
        data.y_mean + data.y_scale * intercept_std - beta_raw.dot(data.column_means);
    return {std::move(beta_raw), intercept};
}

}  // namespace bootlasso
