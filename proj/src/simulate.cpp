#include "bootlasso/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "bootlasso/errors.hpp"
#include "bootlasso/evaluation.hpp"
#include "bootlasso/rng.hpp"

namespace bootlasso {

namespace {

int grid_index_of(const Eigen::VectorXd& lambdas, double lambda) {
    for (int k = 0; k < lambdas.size(); ++k)
        if (lambdas(k) == lambda) return k;
    throw IndexOutOfRangeError("lambda not on grid");
}

std::vector<int> support_of(const Eigen::VectorXd& beta) {
    std::vector<int> s;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) s.push_back(static_cast<int>(j));
    return s;
}

}  // namespace

double median_on_grid(std::vector<double> values) {
    if (values.empty()) throw EmptyInputError("median of empty collection");
    std::sort(values.begin(), values.end());
    return values[values.size() / 2];
}

TruthModel build_truth(const Dataset& data, const TruthRule& rule, std::uint64_t seed,
                       const GridSpec& grid_spec, int threads) {
    if (!data.standardized) throw EmptyInputError("truth fit requires standardized data");
    Eigen::VectorXd grid = compute_lambda_grid(data, grid_spec.size, grid_spec.ratio);
    LassoPath path = fit_path(data, Eigen::VectorXd::Ones(data.n()), grid);

    double lambda;
    if (rule.fixed_lambda) {
        lambda = *rule.fixed_lambda;
    } else {
        TuningResult cv = run_exact_kfold_cv(data, rule.cv_k, rule.cv_repeats, seed, grid_spec,
                                             WeightNormalization::MeanOne, threads);
        std::vector<double> selected;
        for (const auto& rep : cv.cv_repeats)
            selected.push_back(rule.use_one_se ? rep.lambda_one_se : rep.lambda_min);
        lambda = median_on_grid(std::move(selected));
    }

    // snap to the nearest grid point (fixed lambdas may be off-grid)
    int idx = 0;
    double best = std::abs(grid(0) - lambda);
    for (int k = 1; k < grid.size(); ++k) {
        const double d = std::abs(grid(k) - lambda);
        if (d < best) {
            best = d;
            idx = k;
        }
    }

    TruthModel truth;
    truth.lambda = grid(idx);
    truth.beta = path.betas.row(idx).transpose();
    truth.support = support_of(truth.beta);
    if (truth.support.empty())
        throw DegenerateTruthError("truth fit at lambda = " + std::to_string(truth.lambda) +
                                   " has an empty support");
    Eigen::VectorXd r = data.y - data.X * truth.beta;
    const double dof = static_cast<double>(data.n()) - static_cast<double>(truth.support.size());
    truth.sigma = std::sqrt(r.squaredNorm() / std::max(1.0, dof));
    return truth;
}

Eigen::VectorXd simulate_response(const Dataset& data, const Eigen::VectorXd& beta_true,
                                  double sigma, std::mt19937_64& rng) {
    if (!(sigma > 0.0)) throw EmptyInputError("sigma must be positive");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd y = data.X * beta_true;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sigma * gauss(rng);
    return y;
}

SimulationResult run_simulation_study(const Dataset& data, const SimulationConfig& config) {
    const int n = static_cast<int>(data.n());
    SimulationConfig cfg = config;
    if (cfg.scheme_sweep.empty()) {
        for (int i = 1; i <= 9; ++i) {
            const double rho = 0.1 * i;
            cfg.scheme_sweep.push_back({BetaWeights{4.0 * rho, 4.0 * (1.0 - rho)}, 0});
        }
    }
    if (cfg.cv_ks.empty()) cfg.cv_ks = {3, 5, 10, n};
    if (cfg.mofn_fractions.empty()) cfg.mofn_fractions = {0.25, 0.5, 0.75, 1.0};

    SimulationResult out;
    out.truth = build_truth(data, cfg.truth_rule, derive_seed(cfg.seed, 1), cfg.grid,
                            cfg.threads);

    // one grid, frozen on the seed dataset, shared by every cell so selected
    // penalties are comparable across schemes and replications
    const Eigen::VectorXd grid = compute_lambda_grid(data, cfg.grid.size, cfg.grid.ratio);

    for (int rep = 0; rep < cfg.n_replications; ++rep) {
        auto rng = make_rng(derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(rep)));
        Dataset sim = with_response(data, simulate_response(data, out.truth.beta,
                                                            out.truth.sigma, rng));

        LassoPath full_path = fit_path(sim, Eigen::VectorXd::Ones(n), grid);
        MccCurve curve = mcc_curve(full_path, out.truth.support);

        auto record = [&](const std::string& scheme, const std::string& rule, double lambda,
                          double rho) {
            SimulationCell cell;
            cell.scheme = scheme;
            cell.replication = rep;
            cell.rule = rule;
            cell.lambda = lambda;
            const int idx = grid_index_of(grid, lambda);
            cell.n_nonzero = static_cast<int>(active_set(full_path, idx).indices.size());
            cell.mcc_value = curve.values(idx);
            cell.rho = rho;
            out.cells.push_back(cell);
        };
        auto record_error = [&](const std::string& scheme, const std::string& what) {
            SimulationCell cell;
            cell.scheme = scheme;
            cell.replication = rep;
            cell.error = what;
            out.cells.push_back(cell);
        };

        std::uint64_t stream = 17;
        for (const auto& scheme : cfg.scheme_sweep) {
            TuningConfig tc;
            tc.scheme = scheme;
            tc.b = cfg.b;
            tc.grid = cfg.grid;
            tc.seed = derive_seed(cfg.seed, (static_cast<std::uint64_t>(rep) << 20) + stream);
            tc.fixed_grid = grid;
            tc.normalization = cfg.normalization;
            tc.threads = cfg.threads;
            ++stream;
            try {
                TuningResult res = run_weighted_bootstrap(sim, tc);
                record(scheme.label(), "min", res.lambda_min, res.rho);
                if (res.lambda_one_se)
                    record(scheme.label(), "one_se", *res.lambda_one_se, res.rho);
            } catch (const Error& e) {
                record_error(scheme.label(), e.what());
            }
        }
        for (double f : cfg.mofn_fractions) {
            const int m = std::max(1, static_cast<int>(std::llround(f * n)));
            WeightSchemeSpec spec{MOutOfNWeights{m}, 0};
            TuningConfig tc;
            tc.scheme = spec;
            tc.b = cfg.b;
            tc.grid = cfg.grid;
            tc.seed = derive_seed(cfg.seed, (static_cast<std::uint64_t>(rep) << 20) + stream);
            tc.fixed_grid = grid;
            tc.normalization = cfg.normalization;
            tc.threads = cfg.threads;
            ++stream;
            try {
                TuningResult res = run_weighted_bootstrap(sim, tc);
                record(spec.label(), "min", res.lambda_min, res.rho);
                if (res.lambda_one_se)
                    record(spec.label(), "one_se", *res.lambda_one_se, res.rho);
            } catch (const Error& e) {
                record_error(spec.label(), e.what());
            }
        }
        for (int k : cfg.cv_ks) {
            const std::string label = "kfold:" + std::to_string(k);
            try {
                TuningResult res = run_exact_kfold_cv(
                    sim, k, cfg.cv_repeats,
                    derive_seed(cfg.seed, (static_cast<std::uint64_t>(rep) << 20) + stream),
                    cfg.grid, cfg.normalization, cfg.threads, FitOptions{}, &grid);
                record(label, "min", res.lambda_min, res.rho);
                record(label, "one_se", *res.lambda_one_se, res.rho);
            } catch (const Error& e) {
                record_error(label, e.what());
            }
            ++stream;
        }
        if (cfg.with_ebic) {
            try {
                Eigen::VectorXd scores = compute_ebic(sim, full_path, cfg.ebic_gamma);
                record("ebic", "ebic", select_lambda_ebic(full_path, scores), 1.0);
            } catch (const Error& e) {
                record_error("ebic", e.what());
            }
        }
    }
    return out;
}

}  // namespace bootlasso
