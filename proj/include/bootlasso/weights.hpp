#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace bootlasso {

// Resampling schemes expressed as per-observation training weights w and
// matching test weights u. Continuous and 0/1 schemes use u = 1 - w; the
// count-valued bootstrap schemes use the indicator u_i = 1 - 1(w_i > 0),
// since 1 - w would go negative for repeated draws.

struct BetaWeights {
    double a = 1.0;
    double b = 1.0;
};

struct KFoldWeights {
    int k = 10;
};

struct PairedWeights {};

struct MOutOfNWeights {
    int m = 1;
};

using SchemeKind = std::variant<BetaWeights, KFoldWeights, PairedWeights, MOutOfNWeights>;

struct WeightSchemeSpec {
    SchemeKind kind;
    std::uint64_t seed = 0;

    std::string label() const;
    // Analytic mean training weight: a/(a+b), h/n, 1, or m/n.
    double expected_rho(int n) const;
};

struct WeightDraw {
    Eigen::VectorXd w;
    Eigen::VectorXd u;
    int replicate_id = 0;
};

WeightDraw draw_beta_weights(int n, double a, double b, std::mt19937_64& rng);
WeightDraw draw_kfold_weights(int n, int k, std::mt19937_64& rng);
WeightDraw draw_multinomial_weights(int n, int m, std::mt19937_64& rng);

// Dispatches on the scheme kind with an rng derived from (spec.seed,
// replicate_id); identical triples give bit-identical draws in any order.
WeightDraw draw_weights(const WeightSchemeSpec& spec, int n, int replicate_id);

// Number of training samples in one fold draw: round(n (k-1)/k).
int kfold_train_count(int n, int k);

// Grand mean of all weight entries across the draws.
double compute_rho(const std::vector<Eigen::VectorXd>& w_samples);

struct WeightProfiles {
    Eigen::VectorXd train;  // mean order statistics of w, ascending
    Eigen::VectorXd test;   // mean order statistics of u, ascending
    double rho = 0.0;       // grand mean of the raw training weights
};

WeightProfiles weight_profiles(const WeightSchemeSpec& spec, int n, int replicates);

// Mean of sorted training-weight vectors across replicates; its mean equals
// compute_rho over the same draws.
Eigen::VectorXd sorted_weight_profile(const WeightSchemeSpec& spec, int n, int replicates);

// Parses the scheme grammar "beta:a,b | kfold:k | paired | mofn:f" where f is
// either an m/n fraction in (0,1] or an integer m. Fractions are resolved
// against n when the data size is known (n > 0).
WeightSchemeSpec parse_scheme(const std::string& text, int n = 0, std::uint64_t seed = 0);

}  // namespace bootlasso
