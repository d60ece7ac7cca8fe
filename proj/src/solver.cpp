#include "bootlasso/solver.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "bootlasso/errors.hpp"

namespace bootlasso {

namespace {

// Shared state for one (data, weights) pair, reused across a whole path.
// Everything the sweeps need lives in p-space: with n >> p the Gram form
// makes a coordinate update O(p) instead of O(n).
struct SolveContext {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    const Eigen::VectorXd& w;
    Eigen::MatrixXd G;     // X^T W X
    Eigen::VectorXd c;     // X^T W y
    Eigen::VectorXd curv;  // 2 G_jj
    Eigen::VectorXd t;     // X^T W 1, intercept coupling
    double w_sum = 0.0;
    double yw = 0.0;   // 1^T W y
    double yWy = 0.0;  // y^T W y

    SolveContext(const Dataset& data, const Eigen::VectorXd& wts)
        : X(data.X), y(data.y), w(wts) {
        const Eigen::Index n = X.rows(), p = X.cols();
        if (w.size() != n) throw EmptyInputError("weight vector length mismatch");
        bool any_positive = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w(i) < 0.0 || !std::isfinite(w(i)))
                throw EmptyInputError("weights must be finite and non-negative");
            if (w(i) > 0.0) any_positive = true;
        }
        if (!any_positive) throw NoPositiveWeightError();

        Eigen::MatrixXd Xw = X.array().colwise() * w.array();
        G.noalias() = X.transpose() * Xw;
        Eigen::VectorXd wy = w.cwiseProduct(y);
        // per-column dots so the gradient at beta = 0 matches
        // compute_lambda_grid bit for bit under unit weights
        c.resize(p);
        for (Eigen::Index j = 0; j < p; ++j) c(j) = X.col(j).dot(wy);
        curv = 2.0 * G.diagonal();
        t = Xw.colwise().sum().transpose();
        w_sum = w.sum();
        yw = wy.sum();
        yWy = y.dot(wy);
    }
};

// Mutable solver state: coefficients, intercept, and q = G beta kept
// incrementally in sync.
struct SolveState {
    Eigen::VectorXd beta;
    Eigen::VectorXd q;
    double intercept = 0.0;

    void resync(const SolveContext& ctx) { q.noalias() = ctx.G * beta; }
};

double objective_of(const SolveContext& ctx, const SolveState& st, double lambda) {
    const double mu = st.intercept;
    return ctx.yWy - 2.0 * st.beta.dot(ctx.c) + st.beta.dot(st.q) +
           mu * mu * ctx.w_sum - 2.0 * mu * (ctx.yw - st.beta.dot(ctx.t)) +
           lambda * st.beta.cwiseAbs().sum();
}

struct KktReport {
    double violation = 0.0;
    Eigen::Index worst = -1;
    double worst_grad = 0.0;
    bool worst_active = false;
};

// grad_j = -2 x_j^T W r; stationarity demands 2 x_j^T W r = lambda sign(beta_j)
// on the active set and |2 x_j^T W r| <= lambda elsewhere.
KktReport max_kkt_violation(const SolveContext& ctx, double lambda, const SolveState& st) {
    KktReport rep;
    for (Eigen::Index j = 0; j < st.beta.size(); ++j) {
        const double g = 2.0 * (ctx.c(j) - st.intercept * ctx.t(j) - st.q(j));
        double v;
        if (st.beta(j) != 0.0)
            v = std::abs(g - lambda * (st.beta(j) > 0.0 ? 1.0 : -1.0));
        else
            v = std::max(0.0, std::abs(g) - lambda);
        if (v > rep.violation) {
            rep.violation = v;
            rep.worst = j;
            rep.worst_grad = g;
            rep.worst_active = st.beta(j) != 0.0;
        }
    }
    return rep;
}

// Finishes the active set with exact least-squares solves of the orthant
// stationarity equations  X_A^T W X_A b = X_A^T W (y - mu) - (lambda/2) s.
// If the solution would flip a sign, beta moves along the segment toward it
// only up to the first zero crossing, that coordinate leaves the active set
// exactly at zero, and the system is re-solved. On the fixed-sign orthant
// the penalized objective is a convex quadratic minimized by the solve, so
// every partial step descends and the loop ends in at most |A| drops. On
// correlated designs coordinate steps shrink below tolerance long before the
// gradient residual does, and this closes that gap.
bool polish_active_set(const SolveContext& ctx, double lambda, SolveState& st) {
    std::vector<Eigen::Index> active;
    std::vector<double> sign;
    for (Eigen::Index j = 0; j < st.beta.size(); ++j)
        if (st.beta(j) != 0.0) {
            active.push_back(j);
            sign.push_back(st.beta(j) > 0.0 ? 1.0 : -1.0);
        }
    if (active.empty()) return false;

    const Eigen::VectorXd entry_beta = st.beta;
    const double entry_obj = objective_of(ctx, st, lambda);

    const size_t max_rounds = active.size() + 1;
    for (size_t round = 0; round < max_rounds && !active.empty(); ++round) {
        const Eigen::Index a = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd Gs(a, a);
        Eigen::VectorXd rhs(a);
        for (Eigen::Index cc = 0; cc < a; ++cc) {
            const Eigen::Index j = active[static_cast<size_t>(cc)];
            for (Eigen::Index dd = 0; dd < a; ++dd)
                Gs(cc, dd) = ctx.G(j, active[static_cast<size_t>(dd)]);
            rhs(cc) =
                ctx.c(j) - st.intercept * ctx.t(j) - 0.5 * lambda * sign[static_cast<size_t>(cc)];
        }
        auto ldlt = Gs.ldlt();
        Eigen::VectorXd sol = ldlt.solve(rhs);
        sol += ldlt.solve(rhs - Gs * sol);  // one refinement step
        for (Eigen::Index cc = 0; cc < a; ++cc)
            if (!std::isfinite(sol(cc))) {
                st.beta = entry_beta;
                st.resync(ctx);
                return false;
            }

        // largest step toward the solve that keeps every sign
        double alpha = 1.0;
        for (Eigen::Index cc = 0; cc < a; ++cc) {
            if (sol(cc) * sign[static_cast<size_t>(cc)] > 0.0) continue;
            const double bc = st.beta(active[static_cast<size_t>(cc)]);
            alpha = std::min(alpha, bc / (bc - sol(cc)));
        }
        if (alpha >= 1.0) {
            for (Eigen::Index cc = 0; cc < a; ++cc)
                st.beta(active[static_cast<size_t>(cc)]) = sol(cc);
            break;
        }
        std::vector<Eigen::Index> kept;
        std::vector<double> kept_sign;
        for (Eigen::Index cc = 0; cc < a; ++cc) {
            const Eigen::Index j = active[static_cast<size_t>(cc)];
            double moved = st.beta(j) + alpha * (sol(cc) - st.beta(j));
            // coordinates at or past their crossing land exactly at zero
            if (moved * sign[static_cast<size_t>(cc)] <= 0.0) moved = 0.0;
            st.beta(j) = moved;
            if (moved != 0.0) {
                kept.push_back(j);
                kept_sign.push_back(sign[static_cast<size_t>(cc)]);
            }
        }
        active = std::move(kept);
        sign = std::move(kept_sign);
    }

    st.resync(ctx);
    const double obj_new = objective_of(ctx, st, lambda);
    if (!(obj_new <= entry_obj + 1e-12 * (1.0 + std::abs(entry_obj)))) {
        st.beta = entry_beta;
        st.resync(ctx);
        return false;
    }
    return true;
}

// Core cyclic coordinate descent over the Gram system. Converges on the
// stationarity certificate: sweeps run until steps fall below coord_tol or a
// bounded number of refinements pass, then the active set is finished with
// exact least-squares solves and the worst remaining violator is admitted
// with its gradient sign before re-solving. Only unstable cases fall back to
// further sweeping.
int solve_inplace(const SolveContext& ctx, double lambda, SolveState& st,
                  const FitOptions& opts) {
    const Eigen::Index p = ctx.X.cols();
    st.resync(ctx);
    if (!opts.intercept) st.intercept = 0.0;

    auto sweep = [&](bool active_only) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double bj = st.beta(j);
            if (active_only && bj == 0.0) continue;
            if (ctx.curv(j) <= 0.0) {
                // weights wiped this column out; the objective no longer
                // depends on beta_j, so the penalty pins it at zero
                if (bj != 0.0) {
                    st.q -= bj * ctx.G.col(j);
                    st.beta(j) = 0.0;
                    max_delta = std::max(max_delta, std::abs(bj));
                }
                continue;
            }
            const double z = 2.0 * (ctx.c(j) - st.intercept * ctx.t(j) - st.q(j)) +
                             ctx.curv(j) * bj;
            const double bnew = soft_threshold(z, lambda) / ctx.curv(j);
            if (bnew != bj) {
                st.q += (bnew - bj) * ctx.G.col(j);
                st.beta(j) = bnew;
                max_delta = std::max(max_delta, std::abs(bnew - bj));
            }
        }
        if (opts.intercept && ctx.w_sum > 0.0) {
            const double mu = (ctx.yw - ctx.t.dot(st.beta)) / ctx.w_sum;
            max_delta = std::max(max_delta, std::abs(mu - st.intercept));
            st.intercept = mu;
        }
        if (opts.objective_trace)
            opts.objective_trace->push_back(objective_of(ctx, st, lambda));
        return max_delta;
    };

    const double kkt_target = 0.5 * opts.kkt_tol;
    const int inner_budget = 50;
    int sweeps = 0;
    while (true) {
        double delta = sweep(false);
        if (++sweeps > opts.max_sweeps) throw DidNotConvergeError(opts.max_sweeps);
        int inner = 0;
        while (delta >= opts.coord_tol && inner < inner_budget) {
            delta = sweep(true);
            ++inner;
            if (++sweeps > opts.max_sweeps) throw DidNotConvergeError(opts.max_sweeps);
        }
        bool done = false;
        const int add_budget = 2 * static_cast<int>(p) + 4;
        for (int adds = 0; adds <= add_budget; ++adds) {
            const bool polished = polish_active_set(ctx, lambda, st);
            if (opts.intercept && ctx.w_sum > 0.0)
                st.intercept = (ctx.yw - ctx.t.dot(st.beta)) / ctx.w_sum;
            st.resync(ctx);
            KktReport rep = max_kkt_violation(ctx, lambda, st);
            double viol = rep.violation;
            if (opts.intercept && ctx.w_sum > 0.0)
                viol = std::max(viol, std::abs(2.0 * (ctx.yw - ctx.t.dot(st.beta) -
                                                      st.intercept * ctx.w_sum)));
            if (viol <= kkt_target) {
                done = true;
                break;
            }
            if (std::getenv("BOOTLASSO_SOLVER_DEBUG"))
                std::fprintf(stderr,
                             "[solver] sweeps=%d adds=%d polished=%d viol=%.3e worst=%ld "
                             "active=%d lambda=%.6e\n",
                             sweeps, adds, polished ? 1 : 0, viol,
                             static_cast<long>(rep.worst), rep.worst_active ? 1 : 0, lambda);
            if (!polished || rep.worst_active) break;
            // admit the worst violator with the sign its gradient demands;
            // the sentinel magnitude only marks membership for the solve
            st.beta(rep.worst) = rep.worst_grad > 0.0 ? std::numeric_limits<double>::min()
                                                      : -std::numeric_limits<double>::min();
        }
        if (done) break;
    }
    return sweeps;
}

}  // namespace

Eigen::VectorXd weighted_lasso_fit(const Dataset& data, const Eigen::VectorXd& w, double lambda,
                                   const Eigen::VectorXd* init, const FitOptions& opts) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw EmptyInputError("lambda must be finite and non-negative");
    SolveContext ctx(data, w);
    SolveState st;
    st.beta = (init && init->size() == data.p()) ? *init : Eigen::VectorXd::Zero(data.p());
    solve_inplace(ctx, lambda, st, opts);
    return st.beta;
}

Eigen::VectorXd compute_lambda_grid(const Dataset& data, int K, double ratio) {
    if (K < 2) throw EmptyInputError("lambda grid needs K >= 2");
    if (!(ratio > 0.0 && ratio < 1.0)) throw EmptyInputError("grid ratio must lie in (0,1)");
    // per-column dots so lambda_max matches the solver's gradient evaluation
    // bit for bit; the first grid point then soft-thresholds exactly to zero
    double lambda_max = 0.0;
    for (Eigen::Index j = 0; j < data.p(); ++j)
        lambda_max = std::max(lambda_max, 2.0 * std::abs(data.X.col(j).dot(data.y)));
    Eigen::VectorXd grid(K);
    const double log_ratio = std::log(ratio);
    for (int k = 0; k < K; ++k)
        grid(k) = lambda_max * std::exp(log_ratio * static_cast<double>(k) /
                                        static_cast<double>(K - 1));
    return grid;
}

PathWithResiduals fit_path_with_residuals(const Dataset& data, const Eigen::VectorXd& w,
                                          const Eigen::VectorXd& grid, const FitOptions& opts) {
    const int K = static_cast<int>(grid.size());
    if (K < 1) throw EmptyInputError("empty lambda grid");
    for (int k = 1; k < K; ++k)
        if (!(grid(k) < grid(k - 1))) throw EmptyInputError("lambda grid must be decreasing");

    SolveContext ctx(data, w);
    PathWithResiduals out;
    out.path.lambdas = grid;
    out.path.betas.setZero(K, data.p());
    out.path.intercepts.setZero(K);
    out.path.weights_used = w;
    out.residuals.resize(K, data.n());

    SolveState st;
    st.beta = Eigen::VectorXd::Zero(data.p());
    for (int k = 0; k < K; ++k) {
        try {
            solve_inplace(ctx, grid(k), st, opts);
        } catch (const DidNotConvergeError& e) {
            throw DidNotConvergeError(e.max_sweeps, "lambda index " + std::to_string(k));
        }
        out.path.betas.row(k) = st.beta.transpose();
        out.path.intercepts(k) = st.intercept;
        Eigen::VectorXd r = data.y - data.X * st.beta;
        if (opts.intercept) r.array() -= st.intercept;
        out.residuals.row(k) = r.transpose();
    }
    return out;
}

LassoPath fit_path(const Dataset& data, const Eigen::VectorXd& w, const Eigen::VectorXd& grid,
                   const FitOptions& opts) {
    return fit_path_with_residuals(data, w, grid, opts).path;
}

ActiveSet active_set(const LassoPath& path, int lambda_index) {
    if (lambda_index < 0 || lambda_index >= path.lambdas.size())
        throw IndexOutOfRangeError("lambda index " + std::to_string(lambda_index) +
                                   " outside path of length " +
                                   std::to_string(path.lambdas.size()));
    ActiveSet s;
    s.lambda = path.lambdas(lambda_index);
    for (Eigen::Index j = 0; j < path.betas.cols(); ++j)
        if (path.betas(lambda_index, j) != 0.0) s.indices.push_back(static_cast<int>(j));
    return s;
}

double weighted_lasso_objective(const Dataset& data, const Eigen::VectorXd& w, double lambda,
                                const Eigen::VectorXd& beta, double intercept) {
    Eigen::VectorXd r = data.y - data.X * beta;
    r.array() -= intercept;
    return r.cwiseProduct(r).dot(w) + lambda * beta.cwiseAbs().sum();
}

double kkt_violation(const Dataset& data, const Eigen::VectorXd& w, double lambda,
                     const Eigen::VectorXd& beta, double intercept, bool check_intercept) {
    Eigen::VectorXd r = data.y - data.X * beta;
    r.array() -= intercept;
    Eigen::VectorXd wr = w.cwiseProduct(r);
    Eigen::VectorXd g = 2.0 * (data.X.transpose() * wr);
    double viol = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        double v;
        if (beta(j) != 0.0)
            v = std::abs(g(j) - lambda * (beta(j) > 0.0 ? 1.0 : -1.0));
        else
            v = std::max(0.0, std::abs(g(j)) - lambda);
        viol = std::max(viol, v);
    }
    if (check_intercept) viol = std::max(viol, std::abs(2.0 * wr.sum()));
    return viol;
}

}  // namespace bootlasso
