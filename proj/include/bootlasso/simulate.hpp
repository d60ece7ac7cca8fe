#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bootlasso/dataset.hpp"
#include "bootlasso/tuner.hpp"

namespace bootlasso {

// Simulation design: fit a truth model on a seed dataset, regenerate Gaussian
// responses around its predictions, and sweep the tuning schemes against the
// known support.

struct TruthRule {
    int cv_k = 10;
    int cv_repeats = 10;
    bool use_one_se = false;              // min rule by default
    std::optional<double> fixed_lambda;   // overrides CV when set
};

struct TruthModel {
    Eigen::VectorXd beta;
    std::vector<int> support;
    double sigma = 0.0;   // residual scale sqrt(RSS / (n - |support|))
    double lambda = 0.0;  // penalty the truth was read at
};

// Upper median (the larger middle value for even counts), so the result
// stays on the lambda grid.
double median_on_grid(std::vector<double> values);

TruthModel build_truth(const Dataset& data, const TruthRule& rule, std::uint64_t seed,
                       const GridSpec& grid = GridSpec{}, int threads = 1);

Eigen::VectorXd simulate_response(const Dataset& data, const Eigen::VectorXd& beta_true,
                                  double sigma, std::mt19937_64& rng);

struct SimulationConfig {
    TruthRule truth_rule;
    int n_replications = 50;
    std::vector<WeightSchemeSpec> scheme_sweep;  // empty: Beta rho 0.1..0.9, a+b = 4
    std::vector<int> cv_ks;                      // empty: {3, 5, 10, n}
    std::vector<double> mofn_fractions;          // empty: {0.25, 0.5, 0.75, 1}
    int cv_repeats = 1;                          // CV repeats inside each replication
    int b = 200;
    GridSpec grid;
    std::uint64_t seed = 0;
    bool with_ebic = true;
    double ebic_gamma = 1.0;
    WeightNormalization normalization = WeightNormalization::MeanOne;
    int threads = 1;
};

struct SimulationCell {
    std::string scheme;
    int replication = 0;
    std::string rule;  // "min", "one_se", or "ebic"
    double lambda = 0.0;
    int n_nonzero = 0;
    double mcc_value = 0.0;
    double rho = 0.0;
    std::string error;  // non-empty when this cell failed
};

struct SimulationResult {
    TruthModel truth;
    std::vector<SimulationCell> cells;
};

// Per replication: regenerate the response, re-standardize, and run every
// scheme plus the exact k-fold and m-of-n baselines. Failed cells carry
// their error message and the study continues.
SimulationResult run_simulation_study(const Dataset& data, const SimulationConfig& config);

}  // namespace bootlasso
