#include "bootlasso/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "bootlasso/errors.hpp"
#include "bootlasso/rng.hpp"

namespace bootlasso {

namespace {

std::string format_number(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string WeightSchemeSpec::label() const {
    if (const auto* bw = std::get_if<BetaWeights>(&kind))
        return "beta:" + format_number(bw->a) + "," + format_number(bw->b);
    if (const auto* kf = std::get_if<KFoldWeights>(&kind))
        return "kfold:" + std::to_string(kf->k);
    if (std::holds_alternative<PairedWeights>(kind)) return "paired";
    return "mofn:" + std::to_string(std::get<MOutOfNWeights>(kind).m);
}

double WeightSchemeSpec::expected_rho(int n) const {
    if (const auto* bw = std::get_if<BetaWeights>(&kind)) return bw->a / (bw->a + bw->b);
    if (const auto* kf = std::get_if<KFoldWeights>(&kind))
        return static_cast<double>(kfold_train_count(n, kf->k)) / n;
    if (std::holds_alternative<PairedWeights>(kind)) return 1.0;
    return static_cast<double>(std::get<MOutOfNWeights>(kind).m) / n;
}

int kfold_train_count(int n, int k) {
    return static_cast<int>(std::llround(static_cast<double>(n) * (k - 1.0) / k));
}

WeightDraw draw_beta_weights(int n, double a, double b, std::mt19937_64& rng) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw InvalidShapeError("Beta shape parameters must be strictly positive");
    WeightDraw d;
    d.w.resize(n);
    d.u.resize(n);
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    for (int i = 0; i < n; ++i) {
        double wi;
        // gamma-ratio construction; redraw the rare rounding to 0 or 1 so
        // every weight stays strictly inside (0,1)
        do {
            const double x = ga(rng);
            const double y = gb(rng);
            wi = x / (x + y);
        } while (!(wi > 0.0 && wi < 1.0));
        d.w(i) = wi;
        d.u(i) = 1.0 - wi;
    }
    return d;
}

WeightDraw draw_kfold_weights(int n, int k, std::mt19937_64& rng) {
    if (k < 2 || k > n)
        throw InvalidFoldCountError("fold count k must satisfy 2 <= k <= n, got k=" +
                                    std::to_string(k) + " with n=" + std::to_string(n));
    const int h = kfold_train_count(n, k);
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates: the first h entries become the training set
    for (int i = 0; i < h; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(pick(rng))]);
    }
    WeightDraw d;
    d.w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < h; ++i) d.w(idx[static_cast<size_t>(i)]) = 1.0;
    d.u = Eigen::VectorXd::Ones(n) - d.w;
    return d;
}

WeightDraw draw_multinomial_weights(int n, int m, std::mt19937_64& rng) {
    if (m < 1 || m > n)
        throw InvalidMError("resample count m must satisfy 1 <= m <= n, got m=" +
                            std::to_string(m) + " with n=" + std::to_string(n));
    WeightDraw d;
    d.w = Eigen::VectorXd::Zero(n);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int t = 0; t < m; ++t) d.w(pick(rng)) += 1.0;
    d.u.resize(n);
    for (int i = 0; i < n; ++i) d.u(i) = d.w(i) > 0.0 ? 0.0 : 1.0;
    return d;
}

WeightDraw draw_weights(const WeightSchemeSpec& spec, int n, int replicate_id) {
    auto rng = make_rng(derive_seed(spec.seed, static_cast<std::uint64_t>(replicate_id)));
    WeightDraw d;
    if (const auto* bw = std::get_if<BetaWeights>(&spec.kind))
        d = draw_beta_weights(n, bw->a, bw->b, rng);
    else if (const auto* kf = std::get_if<KFoldWeights>(&spec.kind))
        d = draw_kfold_weights(n, kf->k, rng);
    else if (std::holds_alternative<PairedWeights>(spec.kind))
        d = draw_multinomial_weights(n, n, rng);
    else
        d = draw_multinomial_weights(n, std::get<MOutOfNWeights>(spec.kind).m, rng);
    d.replicate_id = replicate_id;
    return d;
}

double compute_rho(const std::vector<Eigen::VectorXd>& w_samples) {
    if (w_samples.empty()) throw EmptyInputError("compute_rho needs at least one draw");
    double total = 0.0;
    long count = 0;
    for (const auto& w : w_samples) {
        if (w.size() == 0) throw EmptyInputError("compute_rho got an empty weight vector");
        total += w.sum();
        count += static_cast<long>(w.size());
    }
    return total / static_cast<double>(count);
}

WeightProfiles weight_profiles(const WeightSchemeSpec& spec, int n, int replicates) {
    if (replicates < 1) throw EmptyInputError("weight profile needs replicates >= 1");
    WeightProfiles out;
    out.train = Eigen::VectorXd::Zero(n);
    out.test = Eigen::VectorXd::Zero(n);
    double mass = 0.0;
    std::vector<double> buf(static_cast<size_t>(n));
    for (int r = 0; r < replicates; ++r) {
        WeightDraw d = draw_weights(spec, n, r);
        mass += d.w.sum();
        for (int i = 0; i < n; ++i) buf[static_cast<size_t>(i)] = d.w(i);
        std::sort(buf.begin(), buf.end());
        for (int i = 0; i < n; ++i) out.train(i) += buf[static_cast<size_t>(i)];
        for (int i = 0; i < n; ++i) buf[static_cast<size_t>(i)] = d.u(i);
        std::sort(buf.begin(), buf.end());
        for (int i = 0; i < n; ++i) out.test(i) += buf[static_cast<size_t>(i)];
    }
    out.train /= static_cast<double>(replicates);
    out.test /= static_cast<double>(replicates);
    out.rho = mass / (static_cast<double>(n) * replicates);
    return out;
}

Eigen::VectorXd sorted_weight_profile(const WeightSchemeSpec& spec, int n, int replicates) {
    return weight_profiles(spec, n, replicates).train;
}

WeightSchemeSpec parse_scheme(const std::string& text, int n, std::uint64_t seed) {
    WeightSchemeSpec spec;
    spec.seed = seed;
    auto fail = [&](const std::string& why) -> WeightSchemeSpec {
        throw InvalidShapeError("invalid scheme '" + text + "': " + why);
    };
    auto parse_num = [&](const std::string& s, double& out) {
        auto res = std::from_chars(s.data(), s.data() + s.size(), out);
        return res.ec == std::errc() && res.ptr == s.data() + s.size();
    };

    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (head == "paired") {
        if (!args.empty()) return fail("paired takes no parameters");
        spec.kind = PairedWeights{};
        return spec;
    }
    if (head == "beta") {
        const auto comma = args.find(',');
        double a = 0.0, b = 0.0;
        if (comma == std::string::npos || !parse_num(args.substr(0, comma), a) ||
            !parse_num(args.substr(comma + 1), b))
            return fail("expected beta:a,b");
        if (!(a > 0.0) || !(b > 0.0)) return fail("shape parameters must be positive");
        spec.kind = BetaWeights{a, b};
        return spec;
    }
    if (head == "kfold") {
        double kd = 0.0;
        if (!parse_num(args, kd) || kd != std::floor(kd) || kd < 2)
            return fail("expected kfold:k with integer k >= 2");
        spec.kind = KFoldWeights{static_cast<int>(kd)};
        return spec;
    }
    if (head == "mofn") {
        double f = 0.0;
        if (!parse_num(args, f) || !(f > 0.0)) return fail("expected mofn:f with f > 0");
        int m;
        if (f <= 1.0) {
            if (n <= 0) return fail("fractional mofn needs a known sample size");
            m = static_cast<int>(std::llround(f * n));
            m = std::max(1, m);
        } else {
            if (f != std::floor(f)) return fail("m larger than 1 must be an integer");
            m = static_cast<int>(f);
        }
        spec.kind = MOutOfNWeights{m};
        return spec;
    }
    return fail("unknown scheme kind '" + head + "'");
}

}  // namespace bootlasso
