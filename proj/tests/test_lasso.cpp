#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bootlasso/csv.hpp"
#include "bootlasso/dataset.hpp"
#include "bootlasso/errors.hpp"
#include "bootlasso/solver.hpp"
#include "test_helpers.hpp"

using namespace bootlasso;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
const char* fixture_path() { return BOOTLASSO_DATA_DIR "/diabetes_quadratic.csv"; }
}  // namespace

TEST_CASE("standardize centers and scales to sample variance one") {
    MatrixXd X(3, 1);
    X << 1, 2, 3;
    VectorXd y(3);
    y << 4, 5, 9;
    Dataset d = standardize(X, y);
    CHECK(d.standardized);
    // deviations (-1,0,1) already have sample variance 1
    CHECK(d.X(0, 0) == doctest::Approx(-1.0));
    CHECK(d.X(1, 0) == doctest::Approx(0.0));
    CHECK(d.X(2, 0) == doctest::Approx(1.0));
    CHECK(d.column_means(0) == doctest::Approx(2.0));
    CHECK(d.y.sum() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.y.squaredNorm() / 2.0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.y_mean == doctest::Approx(6.0));
}

TEST_CASE("standardize is idempotent") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    MatrixXd X(20, 3);
    VectorXd y(20);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 3; ++j) X(i, j) = 3.0 * g(rng) + j;
        y(i) = g(rng);
    }
    Dataset once = standardize(X, y);
    Dataset twice = standardize(once.X, once.y);
    CHECK((twice.X - once.X).cwiseAbs().maxCoeff() < 1e-10);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(once.X.col(j).mean()) < 1e-10);
        double var = once.X.col(j).squaredNorm() / 19.0;
        CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("standardize rejects constant columns and non-finite input") {
    MatrixXd X(3, 2);
    X << 1, 5, 2, 5, 3, 5;
    VectorXd y(3);
    y << 1, 2, 3;
    CHECK_THROWS_AS(standardize(X, y), ConstantColumnError);

    MatrixXd X2(3, 1);
    X2 << 1, std::numeric_limits<double>::quiet_NaN(), 3;
    CHECK_THROWS_AS(standardize(X2, y), NonFiniteInputError);
}

TEST_CASE("raw-scale back-transformation reproduces predictions") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    MatrixXd X(30, 4);
    VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
        for (int j = 0; j < 4; ++j) X(i, j) = 5.0 * g(rng) + 2 * j;
        y(i) = g(rng) + 10.0;
    }
    Dataset d = standardize(X, y);
    VectorXd beta(4);
    beta << 0.5, 0.0, -1.25, 2.0;
    auto [beta_raw, b0] = to_raw_scale(d, beta);
    VectorXd pred_std = d.y_scale * (d.X * beta);
    VectorXd pred_raw = X * beta_raw;
    pred_raw.array() += b0;
    pred_std.array() += d.y_mean;
    CHECK((pred_raw - pred_std).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("soft_threshold basics") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(0.0, 5.0) == 0.0);
    CHECK(soft_threshold(-4.0, 1.5) == -2.5);
    CHECK(soft_threshold(2.0, 0.0) == 2.0);
}

TEST_CASE("univariate fit matches the closed form and a 1-D scan") {
    // x^T y = 10, x^T x = 4, unit weights, lambda = 4 -> beta = 2
    MatrixXd X(2, 1);
    X << 2, 0;
    VectorXd y(2);
    y << 5, 7;
    Dataset d = testutil::raw_dataset(X, y);
    VectorXd w = VectorXd::Ones(2);
    VectorXd beta = weighted_lasso_fit(d, w, 4.0);
    CHECK(beta(0) == doctest::Approx(2.0).epsilon(1e-10));

    // independent oracle: scan beta over [-3,3] at step 1e-4
    double best = std::numeric_limits<double>::infinity();
    double best_b = 0.0;
    for (long s = -30000; s <= 30000; ++s) {
        double b = static_cast<double>(s) * 1e-4;
        VectorXd bv(1);
        bv << b;
        double obj = testutil::objective(X, y, w, 4.0, bv);
        if (obj < best) {
            best = obj;
            best_b = b;
        }
    }
    CHECK(best_b == doctest::Approx(2.0).epsilon(1e-8));
    VectorXd bv(1);
    bv << beta(0);
    CHECK(testutil::objective(X, y, w, 4.0, bv) <= best + 1e-6);
}

TEST_CASE("lambda at or above 2 max |x^T W y| gives the zero vector") {
    std::mt19937_64 rng(3);
    auto inst = testutil::random_instance(rng, 8, 3);
    double lam = 0.0;
    for (int j = 0; j < 3; ++j) {
        VectorXd xw = inst.data.X.col(j).cwiseProduct(inst.weights);
        lam = std::max(lam, 2.0 * std::abs(xw.dot(inst.data.y)));
    }
    VectorXd beta = weighted_lasso_fit(inst.data, inst.weights, lam);
    for (int j = 0; j < 3; ++j) CHECK(beta(j) == 0.0);
    beta = weighted_lasso_fit(inst.data, inst.weights, 1.5 * lam);
    for (int j = 0; j < 3; ++j) CHECK(beta(j) == 0.0);
}

TEST_CASE("solver matches the brute-force box oracle on random instances") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> np(2, 10), pp(1, 3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        int n = np(rng), p = pp(rng);
        if (n < p + 1) n = p + 1;
        auto inst = testutil::random_instance(rng, n, p);
        VectorXd grid = compute_lambda_grid(inst.data, 4, 0.05);
        double lambda = grid(static_cast<int>(unif(rng) * 3) + 1);
        VectorXd beta = weighted_lasso_fit(inst.data, inst.weights, lambda);
        double solver_obj =
            weighted_lasso_objective(inst.data, inst.weights, lambda, beta);
        double oracle_obj = testutil::grid_search_objective(inst.data.X, inst.data.y,
                                                            inst.weights, lambda);
        CHECK(solver_obj <= oracle_obj + 1e-6);
        CHECK(testutil::kkt_residual(inst.data.X, inst.data.y, inst.weights, lambda, beta) <
              1e-6);
    }
}

TEST_CASE("unit-weight fit equals the unweighted oracle") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = testutil::random_instance(rng, 10, 3, false);
        VectorXd w = VectorXd::Ones(10);
        VectorXd grid = compute_lambda_grid(inst.data, 3, 0.1);
        double lambda = grid(1);
        VectorXd beta = weighted_lasso_fit(inst.data, w, lambda);
        double solver_obj = weighted_lasso_objective(inst.data, w, lambda, beta);
        double oracle = testutil::grid_search_objective(inst.data.X, inst.data.y, w, lambda);
        CHECK(solver_obj <= oracle + 1e-6);
    }
}

TEST_CASE("zero-weight observations have no influence") {
    std::mt19937_64 rng(17);
    auto inst = testutil::random_instance(rng, 12, 4, false);
    VectorXd w = inst.weights;
    w(2) = 0.0;
    w(7) = 0.0;
    VectorXd grid = compute_lambda_grid(inst.data, 5, 0.01);
    VectorXd beta_full = weighted_lasso_fit(inst.data, w, grid(2));

    // delete the zero-weight rows
    MatrixXd Xs(10, 4);
    VectorXd ys(10), ws(10);
    int r = 0;
    for (int i = 0; i < 12; ++i) {
        if (i == 2 || i == 7) continue;
        Xs.row(r) = inst.data.X.row(i);
        ys(r) = inst.data.y(i);
        ws(r) = w(i);
        ++r;
    }
    Dataset sub = testutil::raw_dataset(Xs, ys);
    VectorXd beta_sub = weighted_lasso_fit(sub, ws, grid(2));
    CHECK((beta_full - beta_sub).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("objective is non-increasing across sweeps") {
    std::mt19937_64 rng(23);
    auto inst = testutil::random_instance(rng, 40, 8, false);
    VectorXd grid = compute_lambda_grid(inst.data, 8, 0.01);
    for (int k : {1, 4, 7}) {
        std::vector<double> trace;
        FitOptions opts;
        opts.objective_trace = &trace;
        weighted_lasso_fit(inst.data, inst.weights, grid(k), nullptr, opts);
        REQUIRE(trace.size() >= 1);
        for (size_t s = 1; s < trace.size(); ++s)
            CHECK(trace[s] <= trace[s - 1] + 1e-9 * (1.0 + std::abs(trace[s - 1])));
    }
}

TEST_CASE("solver rejects all-zero weights and negative lambda") {
    std::mt19937_64 rng(5);
    auto inst = testutil::random_instance(rng, 6, 2);
    VectorXd w = VectorXd::Zero(6);
    CHECK_THROWS_AS(weighted_lasso_fit(inst.data, w, 1.0), NoPositiveWeightError);
    CHECK_THROWS_AS(weighted_lasso_fit(inst.data, VectorXd::Ones(6), -1.0), Error);
}

TEST_CASE("lambda grid spacing") {
    MatrixXd X(2, 1);
    X << 2, 0;
    VectorXd y(2);
    y << 2, 0;  // x^T y = 4 -> lambda_max = 8
    Dataset d = testutil::raw_dataset(X, y);

    VectorXd g2 = compute_lambda_grid(d, 2, 0.5);
    CHECK(g2(0) == doctest::Approx(8.0));
    CHECK(g2(1) == doctest::Approx(4.0));

    VectorXd g100 = compute_lambda_grid(d, 100, 0.001);
    CHECK(g100.size() == 100);
    double expected_ratio = std::pow(0.001, 1.0 / 99.0);
    for (int k = 1; k < 100; ++k)
        CHECK(g100(k) / g100(k - 1) == doctest::Approx(expected_ratio).epsilon(1e-12));

    // first grid point shrinks everything to zero under unit weights
    std::mt19937_64 rng(31);
    auto inst = testutil::random_instance(rng, 15, 4, false);
    VectorXd grid = compute_lambda_grid(inst.data, 10, 0.01);
    VectorXd beta = weighted_lasso_fit(inst.data, VectorXd::Ones(15), grid(0));
    CHECK(beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("path satisfies KKT at every grid point and supports warm starts") {
    std::mt19937_64 rng(57);
    auto inst = testutil::random_instance(rng, 30, 6);
    VectorXd grid = compute_lambda_grid(inst.data, 25, 0.005);
    LassoPath path = fit_path(inst.data, inst.weights, grid);
    REQUIRE(path.betas.rows() == 25);
    for (int k = 0; k < 25; ++k) {
        CHECK(testutil::kkt_residual(inst.data.X, inst.data.y, inst.weights, grid(k),
                                     path.betas.row(k).transpose()) < 1e-6);
    }
}

TEST_CASE("path of length one at lambda_max is a single zero row") {
    std::mt19937_64 rng(8);
    auto inst = testutil::random_instance(rng, 10, 3, false);
    Eigen::VectorXd grid(1);
    grid << compute_lambda_grid(inst.data, 2, 0.5)(0);
    LassoPath path = fit_path(inst.data, VectorXd::Ones(10), grid);
    CHECK(path.betas.row(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scaling weights and lambda by the same constant leaves the fit unchanged") {
    std::mt19937_64 rng(77);
    auto inst = testutil::random_instance(rng, 20, 5, false);
    VectorXd grid = compute_lambda_grid(inst.data, 10, 0.01);
    LassoPath base = fit_path(inst.data, inst.weights, grid);
    const double c = 3.7;
    LassoPath scaled = fit_path(inst.data, c * inst.weights, c * grid);
    CHECK((base.betas - scaled.betas).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("active_set reads exact nonzeros") {
    LassoPath path;
    path.lambdas.resize(2);
    path.lambdas << 2.0, 1.0;
    path.betas.resize(2, 4);
    path.betas << 0, 0, 0, 0, 0, 1.2, 0, -0.3;
    path.intercepts = VectorXd::Zero(2);

    ActiveSet empty = active_set(path, 0);
    CHECK(empty.indices.empty());
    ActiveSet s = active_set(path, 1);
    CHECK(s.indices == std::vector<int>{1, 3});
    CHECK(s.lambda == 1.0);
    CHECK_THROWS_AS(active_set(path, 2), IndexOutOfRangeError);
    CHECK_THROWS_AS(active_set(path, -1), IndexOutOfRangeError);
}

TEST_CASE("intercept fit matches centered fit after back-transformation") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    MatrixXd X(25, 3);
    VectorXd y(25);
    for (int i = 0; i < 25; ++i) {
        for (int j = 0; j < 3; ++j) X(i, j) = g(rng);
        y(i) = 4.0 + X(i, 0) - 2.0 * X(i, 2) + 0.3 * g(rng);
    }
    Dataset centered = standardize(X, y);
    VectorXd w = VectorXd::Ones(25);
    double lambda = 2.0;

    VectorXd beta_centered = weighted_lasso_fit(centered, w, lambda);

    // same data, response not centered, unpenalized intercept absorbs the mean
    Dataset shifted = centered;
    shifted.y = centered.y.array() + centered.y_mean;
    FitOptions opts;
    opts.intercept = true;
    SUBCASE("fit with intercept") {
        // solve via the path API to obtain the intercept estimate
        Eigen::VectorXd grid(2);
        grid << 2.0 * (shifted.X.transpose() * shifted.y).cwiseAbs().maxCoeff() + 1.0, lambda;
        LassoPath path = fit_path(shifted, w, grid, opts);
        CHECK((path.betas.row(1).transpose() - beta_centered).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(path.intercepts(1) == doctest::Approx(centered.y_mean).epsilon(1e-6));
    }
}

TEST_CASE("diabetes fixture: early path sizes are non-decreasing, KKT holds") {
    LoadedDataset loaded = load_dataset_csv(fixture_path(), "y");
    const Dataset& d = loaded.data;
    REQUIRE(d.n() == 442);
    REQUIRE(d.p() == 64);

    VectorXd grid = compute_lambda_grid(d, 40, 0.01);
    LassoPath path = fit_path(d, VectorXd::Ones(442), grid);
    CHECK(path.betas.row(0).cwiseAbs().maxCoeff() == 0.0);

    int prev = 0;
    for (int k = 0; k < 10; ++k) {
        int size = static_cast<int>(active_set(path, k).indices.size());
        CHECK(size >= prev);
        prev = size;
    }
    VectorXd w = VectorXd::Ones(442);
    for (int k = 0; k < 40; ++k)
        CHECK(testutil::kkt_residual(d.X, d.y, w, grid(k), path.betas.row(k).transpose()) <
              1e-6);
}
