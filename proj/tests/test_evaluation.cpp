#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bootlasso/evaluation.hpp"

using namespace bootlasso;
using Eigen::VectorXd;

TEST_CASE("mcc exact recovery and conventions") {
    CHECK(mcc({5, 0, 10, 0}) == doctest::Approx(1.0));
    CHECK(mcc({0, 0, 10, 5}) == 0.0);  // empty selection, tp + fp = 0
    CHECK(mcc({0, 5, 10, 0}) == doctest::Approx(-0.0).epsilon(1e-12));

    // direct evaluation of the closed form
    SelectionConfusion c{10, 5, 40, 3};
    const double expected =
        (10.0 * 40 - 5.0 * 3) / std::sqrt((10.0 + 5) * (10.0 + 3) * (40.0 + 5) * (40.0 + 3));
    CHECK(mcc(c) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(0.627).epsilon(0.001));
}

TEST_CASE("mcc symmetry under class swap") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<long long> count(0, 30);
    for (int t = 0; t < 200; ++t) {
        SelectionConfusion c{count(rng), count(rng), count(rng), count(rng)};
        SelectionConfusion swapped{c.tn, c.fn, c.tp, c.fp};
        CHECK(mcc(c) == doctest::Approx(mcc(swapped)).epsilon(1e-12));
    }
}

TEST_CASE("mcc of random same-size selections has mean near zero") {
    const int p = 64, s = 15;
    std::vector<int> truth;
    for (int j = 0; j < s; ++j) truth.push_back(j);
    std::mt19937_64 rng(99);
    double total = 0.0;
    std::vector<int> pool(p);
    for (int j = 0; j < p; ++j) pool[j] = j;
    for (int t = 0; t < 1000; ++t) {
        for (int i = 0; i < s; ++i) {
            std::uniform_int_distribution<int> pick(i, p - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        std::vector<int> sel(pool.begin(), pool.begin() + s);
        std::sort(sel.begin(), sel.end());
        total += mcc(confusion_counts(sel, truth, p));
    }
    CHECK(std::abs(total / 1000.0) < 0.05);
}

TEST_CASE("confusion counts partition the positions") {
    SelectionConfusion c = confusion_counts({1, 3, 5}, {0, 1, 2}, 8);
    CHECK(c.tp == 1);
    CHECK(c.fp == 2);
    CHECK(c.fn == 2);
    CHECK(c.tn == 3);
    CHECK(c.tp + c.fp + c.tn + c.fn == 8);
}

namespace {
LassoPath toy_path() {
    LassoPath path;
    path.lambdas.resize(4);
    path.lambdas << 8.0, 4.0, 2.0, 1.0;
    path.betas.resize(4, 5);
    path.betas << 0, 0, 0, 0, 0,  //
        1, 0, 0, 0, 0,            //
        1, -2, 0, 0, 0,           //
        1, -2, 0.5, 0, 0;
    path.intercepts = VectorXd::Zero(4);
    return path;
}
}  // namespace

TEST_CASE("mcc curve finds the exact-recovery plateau") {
    LassoPath path = toy_path();
    MccCurve curve = mcc_curve(path, {0, 1});
    CHECK(curve.values.size() == 4);
    CHECK(curve.values(0) == 0.0);  // all-zero row vs non-empty truth
    CHECK(curve.values(2) == doctest::Approx(1.0));
    CHECK(curve.max_value == doctest::Approx(1.0));
    CHECK(curve.max_first == 2);
    CHECK(curve.max_last == 2);
    CHECK(curve.max_contiguous);
    CHECK(curve.lambda_hi == 2.0);
    CHECK(curve.lambda_lo == 2.0);
}

TEST_CASE("mcc curve flags non-contiguous maxima") {
    // the path drops variable 0 and recovers it, so the exact-recovery MCC
    // is attained twice with a dip between
    LassoPath path;
    path.lambdas.resize(3);
    path.lambdas << 8.0, 4.0, 2.0;
    path.betas.resize(3, 3);
    path.betas << 1, 0, 0,  //
        1, 2, 0,            //
        1, 0, 0;
    path.intercepts = VectorXd::Zero(3);
    MccCurve curve = mcc_curve(path, {0});
    CHECK(curve.max_value == doctest::Approx(1.0));
    CHECK(curve.max_first == 0);
    CHECK(curve.max_last == 2);
    CHECK_FALSE(curve.max_contiguous);
}

TEST_CASE("model size curve matches exact nonzero counts") {
    LassoPath path = toy_path();
    Eigen::VectorXi sizes = model_size_curve(path);
    CHECK(sizes(0) == 0);
    CHECK(sizes(1) == 1);
    CHECK(sizes(2) == 2);
    CHECK(sizes(3) == 3);
    for (int k = 0; k < 4; ++k) CHECK(sizes(k) <= 5);
}
