#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bootlasso/solver.hpp"

namespace bootlasso {

// Support-recovery scoring of selected models against a known truth.

struct SelectionConfusion {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;
};

// Counts over the p coefficient positions; `selected` and `truth` are sorted
// index sets.
SelectionConfusion confusion_counts(const std::vector<int>& selected,
                                    const std::vector<int>& truth, int p);

// Matthews correlation coefficient in [-1, 1]; any zero factor in the
// denominator returns 0.
double mcc(const SelectionConfusion& c);

struct MccCurve {
    Eigen::VectorXd values;       // one MCC per grid point
    double max_value = 0.0;
    int max_first = 0;            // first and last grid index attaining the max
    int max_last = 0;
    bool max_contiguous = true;   // whether the attaining set is one interval
    double lambda_lo = 0.0;       // lambda interval of the maximum (descending grid)
    double lambda_hi = 0.0;
};

MccCurve mcc_curve(const LassoPath& path, const std::vector<int>& true_support);

Eigen::VectorXi model_size_curve(const LassoPath& path);

}  // namespace bootlasso
