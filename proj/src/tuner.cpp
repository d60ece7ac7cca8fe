#include "bootlasso/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bootlasso/errors.hpp"
#include "bootlasso/rng.hpp"
#include "bootlasso/threading.hpp"

namespace bootlasso {

namespace {

struct Replicate {
    Eigen::VectorXd w_raw;  // as drawn, drives rho
    Eigen::VectorXd w_fit;  // weights passed to the solver
    Eigen::VectorXd u;
};

bool usable_draw(const WeightDraw& d) {
    int positive = 0;
    for (Eigen::Index i = 0; i < d.w.size(); ++i)
        if (d.w(i) > 0.0) ++positive;
    return positive >= 2 && d.u.sum() > 0.0;
}

Eigen::VectorXd apply_normalization(const Eigen::VectorXd& w, WeightNormalization mode) {
    if (mode == WeightNormalization::Verbatim) return w;
    const double mass = w.sum();
    return w * (static_cast<double>(w.size()) / mass);
}

// Fits every replicate (order-independent, slot per index) and assembles the
// curve with a fixed-order reduction so results do not depend on the thread
// count or execution order.
MspeCurve score_replicates(const Dataset& data, const Eigen::VectorXd& grid,
                           const std::vector<Replicate>& reps, int threads,
                           const FitOptions& fit) {
    const int B = static_cast<int>(reps.size());
    const int K = static_cast<int>(grid.size());

    MspeCurve curve;
    curve.lambdas = grid;
    curve.per_replicate_sse.resize(B, K);
    curve.test_mass.resize(B);

    std::vector<std::string> failures(static_cast<size_t>(B));
    parallel_for(B, threads, [&](int r) {
        try {
            PathWithResiduals fitres =
                fit_path_with_residuals(data, reps[static_cast<size_t>(r)].w_fit, grid, fit);
            const Eigen::VectorXd& u = reps[static_cast<size_t>(r)].u;
            for (int k = 0; k < K; ++k) {
                const auto res = fitres.residuals.row(k);
                curve.per_replicate_sse(r, k) = res.cwiseProduct(res).dot(u.transpose());
            }
            curve.test_mass(r) = u.sum();
        } catch (const Error& e) {
            failures[static_cast<size_t>(r)] = e.what();
        }
    });
    for (int r = 0; r < B; ++r)
        if (!failures[static_cast<size_t>(r)].empty())
            throw Error("replicate " + std::to_string(r) + ": " + failures[static_cast<size_t>(r)]);

    curve.per_replicate_mspe =
        curve.per_replicate_sse.array().colwise() / curve.test_mass.array();
    curve.total_mspe = Eigen::VectorXd::Zero(K);
    for (int r = 0; r < B; ++r) curve.total_mspe += curve.per_replicate_sse.row(r).transpose();
    curve.mean_mspe = curve.per_replicate_mspe.colwise().mean().transpose();
    curve.se.resize(K);
    if (B >= 2) {
        for (int k = 0; k < K; ++k) {
            const double mu = curve.mean_mspe(k);
            double ss = 0.0;
            for (int r = 0; r < B; ++r) {
                const double d = curve.per_replicate_mspe(r, k) - mu;
                ss += d * d;
            }
            curve.se(k) = std::sqrt(ss / (B - 1)) / std::sqrt(static_cast<double>(B));
        }
    } else {
        curve.se.setZero();
    }
    return curve;
}

int grid_index_of(const Eigen::VectorXd& lambdas, double lambda) {
    for (int k = 0; k < lambdas.size(); ++k)
        if (lambdas(k) == lambda) return k;
    throw IndexOutOfRangeError("lambda not on grid");
}

}  // namespace

int min_index(const Eigen::VectorXd& values) {
    const double lo = values.minCoeff();
    const double thr = lo + 1e-12 * std::abs(lo);
    for (int k = 0; k < values.size(); ++k)
        if (values(k) <= thr) return k;
    return 0;
}

int one_se_index(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& mu,
                 const Eigen::VectorXd& se) {
    (void)lambdas;  // descending by contract; the scan from 0 picks the largest
    const int c = min_index(mu);
    const double thr = mu(c) + se(c);
    for (int k = 0; k < mu.size(); ++k)
        if (mu(k) <= thr) return k;
    return c;
}

double select_lambda_min(const MspeCurve& curve) {
    if (curve.lambdas.size() == 0) throw EmptyInputError("empty MSPE curve");
    return curve.lambdas(min_index(curve.total_mspe));
}

double select_lambda_one_se(const MspeCurve& curve) {
    if (curve.per_replicate_mspe.rows() < 2)
        throw EmptyInputError("one-SE rule needs at least 2 replicates");
    return curve.lambdas(one_se_index(curve.lambdas, curve.mean_mspe, curve.se));
}

TuningResult run_weighted_bootstrap(const Dataset& data, const TuningConfig& config) {
    if (!data.standardized) throw EmptyInputError("tuner requires a standardized dataset");
    if (config.b < 1) throw EmptyInputError("replicate count b must be >= 1");
    const int n = static_cast<int>(data.n());

    WeightSchemeSpec spec = config.scheme;
    spec.seed = config.seed;

    TuningResult out;
    Eigen::VectorXd grid =
        config.fixed_grid.size() > 0
            ? config.fixed_grid
            : compute_lambda_grid(data, config.grid.size, config.grid.ratio);
    out.full_path = fit_path(data, Eigen::VectorXd::Ones(n), grid, config.fit);

    // b attempted draws; degenerate ones (fewer than two positive training
    // weights, or no test mass) are discarded and counted
    std::vector<Replicate> reps;
    reps.reserve(static_cast<size_t>(config.b));
    double weight_sum = 0.0;
    for (int id = 0; id < config.b; ++id) {
        WeightDraw d = draw_weights(spec, n, id);
        if (!usable_draw(d)) {
            ++out.discarded_replicates;
            continue;
        }
        Replicate rep;
        rep.w_raw = std::move(d.w);
        rep.u = std::move(d.u);
        rep.w_fit = apply_normalization(rep.w_raw, config.normalization);
        weight_sum += rep.w_raw.sum();
        reps.push_back(std::move(rep));
    }
    out.b_effective = static_cast<int>(reps.size());
    if (out.b_effective == 0)
        throw AllReplicatesDegenerateError("all " + std::to_string(config.b) +
                                           " replicates were degenerate for scheme " +
                                           spec.label());
    out.rho = weight_sum / (static_cast<double>(n) * out.b_effective);

    out.curve = score_replicates(data, grid, reps, config.threads, config.fit);

    out.lambda_min = select_lambda_min(out.curve);
    out.active_set_min = active_set(out.full_path, grid_index_of(grid, out.lambda_min));
    if (config.rule_one_se && out.b_effective >= 2) {
        out.lambda_one_se = select_lambda_one_se(out.curve);
        out.active_set_one_se =
            active_set(out.full_path, grid_index_of(grid, *out.lambda_one_se));
    }
    return out;
}

TuningResult run_exact_kfold_cv(const Dataset& data, int k, int repeats, std::uint64_t seed,
                                const GridSpec& grid_spec, WeightNormalization normalization,
                                int threads, const FitOptions& fit,
                                const Eigen::VectorXd* fixed_grid) {
    if (!data.standardized) throw EmptyInputError("tuner requires a standardized dataset");
    const int n = static_cast<int>(data.n());
    if (k < 2) throw FoldTooSmallError("fold count k must be >= 2");
    if (k > n)
        throw FoldTooSmallError("k = " + std::to_string(k) + " exceeds n = " +
                                std::to_string(n) + "; a fold would be empty");
    if (repeats < 1) throw EmptyInputError("repeats must be >= 1");

    TuningResult out;
    Eigen::VectorXd grid = fixed_grid && fixed_grid->size() > 0
                               ? *fixed_grid
                               : compute_lambda_grid(data, grid_spec.size, grid_spec.ratio);
    out.full_path = fit_path(data, Eigen::VectorXd::Ones(n), grid, fit);

    // LOOCV partitions are the same set of singleton folds every repeat;
    // compute one repeat in canonical observation order and reuse it
    const bool loocv = (k == n);
    const int computed_repeats = loocv ? 1 : repeats;

    std::vector<Replicate> reps;
    reps.reserve(static_cast<size_t>(computed_repeats) * static_cast<size_t>(k));
    double train_mass = 0.0;
    for (int t = 0; t < computed_repeats; ++t) {
        std::vector<int> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        if (!loocv) {
            auto rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
            for (int i = n - 1; i > 0; --i) {
                std::uniform_int_distribution<int> pick(0, i);
                std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(pick(rng))]);
            }
        }
        for (int f = 0; f < k; ++f) {
            // fold f takes positions [f*n/k, (f+1)*n/k)
            const int lo = static_cast<int>(static_cast<long long>(f) * n / k);
            const int hi = static_cast<int>(static_cast<long long>(f + 1) * n / k);
            Replicate rep;
            rep.w_raw = Eigen::VectorXd::Ones(n);
            rep.u = Eigen::VectorXd::Zero(n);
            for (int i = lo; i < hi; ++i) {
                rep.w_raw(order[static_cast<size_t>(i)]) = 0.0;
                rep.u(order[static_cast<size_t>(i)]) = 1.0;
            }
            rep.w_fit = apply_normalization(rep.w_raw, normalization);
            train_mass += rep.w_raw.sum();
            reps.push_back(std::move(rep));
        }
    }

    MspeCurve computed = score_replicates(data, grid, reps, threads, fit);

    // expand the LOOCV single repeat back to the requested repeat count
    if (loocv && repeats > 1) {
        const int rows = n;
        MspeCurve expanded;
        expanded.lambdas = computed.lambdas;
        expanded.per_replicate_sse.resize(rows * repeats, grid.size());
        expanded.per_replicate_mspe.resize(rows * repeats, grid.size());
        expanded.test_mass.resize(rows * repeats);
        for (int t = 0; t < repeats; ++t) {
            expanded.per_replicate_sse.middleRows(t * rows, rows) = computed.per_replicate_sse;
            expanded.per_replicate_mspe.middleRows(t * rows, rows) = computed.per_replicate_mspe;
            expanded.test_mass.segment(t * rows, rows) = computed.test_mass;
        }
        expanded.total_mspe = computed.total_mspe * static_cast<double>(repeats);
        expanded.mean_mspe = computed.mean_mspe;
        const int B = rows * repeats;
        expanded.se.resize(grid.size());
        for (int kk = 0; kk < grid.size(); ++kk) {
            const double mu = expanded.mean_mspe(kk);
            double ss = 0.0;
            for (int r = 0; r < B; ++r) {
                const double d = expanded.per_replicate_mspe(r, kk) - mu;
                ss += d * d;
            }
            expanded.se(kk) = std::sqrt(ss / (B - 1)) / std::sqrt(static_cast<double>(B));
        }
        computed = std::move(expanded);
        train_mass *= repeats;
    }

    out.curve = std::move(computed);
    out.b_effective = static_cast<int>(out.curve.per_replicate_sse.rows());
    out.rho = train_mass / (static_cast<double>(n) * out.b_effective);

    // per-repeat curves drive the median-across-repeats selections
    const int rows_per_repeat = k;
    for (int t = 0; t < repeats; ++t) {
        MspeCurve sub;
        sub.lambdas = grid;
        sub.per_replicate_sse =
            out.curve.per_replicate_sse.middleRows(t * rows_per_repeat, rows_per_repeat);
        sub.per_replicate_mspe =
            out.curve.per_replicate_mspe.middleRows(t * rows_per_repeat, rows_per_repeat);
        sub.test_mass = out.curve.test_mass.segment(t * rows_per_repeat, rows_per_repeat);
        sub.total_mspe = Eigen::VectorXd::Zero(grid.size());
        for (int r = 0; r < rows_per_repeat; ++r)
            sub.total_mspe += sub.per_replicate_sse.row(r).transpose();
        sub.mean_mspe = sub.per_replicate_mspe.colwise().mean().transpose();
        sub.se.resize(grid.size());
        for (int kk = 0; kk < grid.size(); ++kk) {
            const double mu = sub.mean_mspe(kk);
            double ss = 0.0;
            for (int r = 0; r < rows_per_repeat; ++r) {
                const double d = sub.per_replicate_mspe(r, kk) - mu;
                ss += d * d;
            }
            sub.se(kk) = std::sqrt(ss / (rows_per_repeat - 1)) /
                         std::sqrt(static_cast<double>(rows_per_repeat));
        }
        CvRepeatSelection sel;
        sel.lambda_min = select_lambda_min(sub);
        sel.lambda_one_se = select_lambda_one_se(sub);
        sel.size_min = static_cast<int>(
            active_set(out.full_path, grid_index_of(grid, sel.lambda_min)).indices.size());
        sel.size_one_se = static_cast<int>(
            active_set(out.full_path, grid_index_of(grid, sel.lambda_one_se)).indices.size());
        out.cv_repeats.push_back(sel);
    }

    out.lambda_min = select_lambda_min(out.curve);
    out.active_set_min = active_set(out.full_path, grid_index_of(grid, out.lambda_min));
    out.lambda_one_se = select_lambda_one_se(out.curve);
    out.active_set_one_se = active_set(out.full_path, grid_index_of(grid, *out.lambda_one_se));
    return out;
}

Eigen::VectorXd compute_ebic(const Dataset& data, const LassoPath& path, double gamma) {
    const double n = static_cast<double>(data.n());
    const double logp = std::log(static_cast<double>(data.p()));
    const int K = static_cast<int>(path.lambdas.size());
    Eigen::VectorXd scores(K);
    for (int k = 0; k < K; ++k) {
        Eigen::VectorXd r = data.y - data.X * path.betas.row(k).transpose();
        r.array() -= path.intercepts(k);
        const double rss = r.squaredNorm();
        int size = 0;
        for (Eigen::Index j = 0; j < path.betas.cols(); ++j)
            if (path.betas(k, j) != 0.0) ++size;
        scores(k) = n * std::log(rss / n) + size * std::log(n) + 2.0 * gamma * size * logp;
    }
    return scores;
}

double select_lambda_ebic(const LassoPath& path, const Eigen::VectorXd& scores) {
    if (scores.size() != path.lambdas.size())
        throw EmptyInputError("EBIC score length does not match the path");
    // same largest-on-ties scan as the MSPE rule, but EBIC can be negative,
    // so the tolerance is anchored at the score spread
    const double lo = scores.minCoeff();
    const double span = std::max(1.0, scores.maxCoeff() - lo);
    const double thr = lo + 1e-12 * span;
    for (int k = 0; k < scores.size(); ++k)
        if (scores(k) <= thr) return path.lambdas(k);
    return path.lambdas(scores.size() - 1);
}

}  // namespace bootlasso
