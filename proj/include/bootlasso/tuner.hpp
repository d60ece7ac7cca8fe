#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "bootlasso/dataset.hpp"
#include "bootlasso/solver.hpp"
#include "bootlasso/weights.hpp"

namespace bootlasso {

// Weighted-bootstrap tuning: per replicate k, draw training weights w_k and
// test weights u_k, fit the path under w_k, and score held-out error
//   sum_i u_ik (y_i - x_i . beta*_k(lambda))^2.
// The curve aggregated over replicates drives the lambda selection rules.

// How the drawn training weights enter the fitting loss. MeanOne rescales
// each draw to total mass n, putting every scheme's lambda on the scale of a
// unit-weight full-data fit, so selected penalties are comparable across
// schemes and to the final full-data refit. Verbatim uses raw draws, whose
// loss mass varies by scheme (n for paired, m for m-of-n, ~rho*n for Beta)
// and shifts the selected lambda the opposite way. The paired bootstrap is
// identical under both since its draws already sum to n.
enum class WeightNormalization { MeanOne, Verbatim };

struct GridSpec {
    int size = 100;
    double ratio = 0.001;
};

struct TuningConfig {
    WeightSchemeSpec scheme;
    int b = 200;  // replicate draws
    GridSpec grid;
    Eigen::VectorXd fixed_grid;  // overrides `grid` when non-empty
    std::uint64_t seed = 0;
    bool rule_min = true;
    bool rule_one_se = true;
    WeightNormalization normalization = WeightNormalization::MeanOne;
    int threads = 1;  // <= 0 means all hardware threads
    FitOptions fit;
};

struct MspeCurve {
    Eigen::VectorXd lambdas;
    Eigen::VectorXd total_mspe;          // sum over replicates of u-weighted SSE
    Eigen::VectorXd mean_mspe;           // mean over replicates of u-normalized error
    Eigen::VectorXd se;                  // sd across replicates / sqrt(b_eff)
    Eigen::MatrixXd per_replicate_mspe;  // b_eff x K, u-normalized
    Eigen::MatrixXd per_replicate_sse;   // b_eff x K, raw u-weighted SSE
    Eigen::VectorXd test_mass;           // b_eff, sum of u per replicate
};

struct CvRepeatSelection {
    double lambda_min = 0.0;
    double lambda_one_se = 0.0;
    int size_min = 0;
    int size_one_se = 0;
};

struct TuningResult {
    double lambda_min = 0.0;
    std::optional<double> lambda_one_se;
    ActiveSet active_set_min;
    ActiveSet active_set_one_se;
    double rho = 0.0;  // grand mean of the raw training weights actually used
    int b_effective = 0;
    int discarded_replicates = 0;
    MspeCurve curve;
    LassoPath full_path;  // unit-weight full-data path; selections index into it
    std::vector<CvRepeatSelection> cv_repeats;  // filled by run_exact_kfold_cv
};

TuningResult run_weighted_bootstrap(const Dataset& data, const TuningConfig& config);

// Largest lambda attaining the minimum total MSPE within relative tolerance.
double select_lambda_min(const MspeCurve& curve);

// Largest lambda whose mean curve lies within one standard error of the
// minimum of the mean curve.
double select_lambda_one_se(const MspeCurve& curve);

// Rule core shared with the tests: lambdas descending, mu/se aligned.
int one_se_index(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& mu,
                 const Eigen::VectorXd& se);
int min_index(const Eigen::VectorXd& values);

// Exact partitioned k-fold cross-validation (k = n gives LOOCV): folds are
// disjoint random partitions re-randomized per repeat. The aggregate curve
// spans all (repeat, fold) replicates; per-repeat selections are recorded in
// cv_repeats for median-across-repeats use.
TuningResult run_exact_kfold_cv(const Dataset& data, int k, int repeats, std::uint64_t seed,
                                const GridSpec& grid = GridSpec{},
                                WeightNormalization normalization = WeightNormalization::MeanOne,
                                int threads = 1, const FitOptions& fit = FitOptions{},
                                const Eigen::VectorXd* fixed_grid = nullptr);

// EBIC(lambda) = n log(RSS/n) + |a| log n + 2 gamma |a| log p, scored with
// the lasso coefficients of a unit-weight path.
Eigen::VectorXd compute_ebic(const Dataset& data, const LassoPath& path, double gamma);

// Largest lambda minimizing the EBIC score.
double select_lambda_ebic(const LassoPath& path, const Eigen::VectorXd& scores);

}  // namespace bootlasso
