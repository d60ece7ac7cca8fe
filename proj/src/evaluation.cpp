#include "bootlasso/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "bootlasso/errors.hpp"

namespace bootlasso {

SelectionConfusion confusion_counts(const std::vector<int>& selected,
                                    const std::vector<int>& truth, int p) {
    SelectionConfusion c;
    std::vector<bool> in_sel(static_cast<size_t>(p), false),
        in_truth(static_cast<size_t>(p), false);
    for (int j : selected) in_sel[static_cast<size_t>(j)] = true;
    for (int j : truth) in_truth[static_cast<size_t>(j)] = true;
    for (int j = 0; j < p; ++j) {
        const bool s = in_sel[static_cast<size_t>(j)], t = in_truth[static_cast<size_t>(j)];
        if (s && t)
            ++c.tp;
        else if (s && !t)
            ++c.fp;
        else if (!s && t)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

double mcc(const SelectionConfusion& c) {
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    const double d1 = tp + fp, d2 = tp + fn, d3 = tn + fp, d4 = tn + fn;
    if (d1 == 0.0 || d2 == 0.0 || d3 == 0.0 || d4 == 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(d1 * d2 * d3 * d4);
}

MccCurve mcc_curve(const LassoPath& path, const std::vector<int>& true_support) {
    const int K = static_cast<int>(path.lambdas.size());
    const int p = static_cast<int>(path.betas.cols());
    MccCurve out;
    out.values.resize(K);
    for (int k = 0; k < K; ++k) {
        std::vector<int> sel;
        for (int j = 0; j < p; ++j)
            if (path.betas(k, j) != 0.0) sel.push_back(j);
        out.values(k) = mcc(confusion_counts(sel, true_support, p));
    }
    out.max_value = out.values.maxCoeff();
    const double tol = 1e-12 * std::max(1.0, std::abs(out.max_value));
    out.max_first = -1;
    out.max_last = -1;
    bool in_run = false, seen_gap_after_run = false;
    out.max_contiguous = true;
    for (int k = 0; k < K; ++k) {
        if (out.values(k) >= out.max_value - tol) {
            if (out.max_first < 0) out.max_first = k;
            out.max_last = k;
            if (seen_gap_after_run) out.max_contiguous = false;
            in_run = true;
        } else if (in_run) {
            seen_gap_after_run = true;
        }
    }
    out.lambda_lo = path.lambdas(out.max_last);   // grid is descending
    out.lambda_hi = path.lambdas(out.max_first);
    return out;
}

Eigen::VectorXi model_size_curve(const LassoPath& path) {
    const int K = static_cast<int>(path.lambdas.size());
    Eigen::VectorXi sizes(K);
    for (int k = 0; k < K; ++k) {
        int size = 0;
        for (Eigen::Index j = 0; j < path.betas.cols(); ++j)
            if (path.betas(k, j) != 0.0) ++size;
        sizes(k) = size;
    }
    return sizes;
}

}  // namespace bootlasso
