#include "hdm/margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hdm/boosting.hpp"
#include "hdm/fixedpoint.hpp"
#include "hdm/gauss.hpp"
#include "hdm/kernels.hpp"
#include "hdm/rng.hpp"
#include "hdm/simplex.hpp"

namespace hdm {

namespace {

double norm_inf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double lq_norm(const Vec& v, double q) {
    if (std::isinf(q)) return norm_inf(v);
    const double mx = norm_inf(v);
    if (mx == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x) / mx, q);
    return mx * std::pow(s, 1.0 / q);
}

void require_shape(const Matrix& Z) {
    if (Z.rows < 1 || Z.cols < 1) throw ConfigError("margin solvers need n >= 1 and p >= 1");
}

}  // namespace

MarginResult max_margin_l1(const Matrix& Z) {
    require_shape(Z);
    const std::size_t n = Z.rows, p = Z.cols;
    // The margin variable is shifted by K >= |kappa| so every variable is
    // nonnegative and the slack basis is feasible.
    const double K = max_abs(Z) + 1.0;
    Matrix A(n + 1, 2 * p + 1);
    Vec b(n + 1, K), c(2 * p + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* z = Z.row(i);
        double* a = A.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            a[j] = -z[j];
            a[p + j] = z[j];
        }
        a[2 * p] = 1.0;
    }
    for (std::size_t j = 0; j < 2 * p; ++j) A(n, j) = 1.0;
    b[n] = 1.0;
    c[2 * p] = 1.0;

    // A'v from w = Z'v over the first n rows: columns u_j, v_j, then the margin column.
    SimplexOptions so;
    Vec vr(n), w;
    so.transpose_times = [&](const Vec& v, Vec& out) {
        std::copy(v.begin(), v.begin() + static_cast<long>(n), vr.begin());
        zt_times(Z, vr, w);
        double vs = 0.0;
        for (std::size_t i = 0; i < n; ++i) vs += v[i];
        out.resize(2 * p + 1);
        for (std::size_t j = 0; j < p; ++j) {
            out[j] = -w[j] + v[n];
            out[p + j] = w[j] + v[n];
        }
        out[2 * p] = vs;
    };
    LPResult lp = simplex_max(A, b, c, so);
    if (lp.status != LPStatus::optimal) throw NumericalError("max-margin LP did not reach optimality");

    MarginResult r;
    r.q = 1.0;
    r.iterations = lp.iterations;
    const double value = lp.x[2 * p] - K;
    r.theta.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) r.theta[j] = lp.x[j] - lp.x[p + j];
    r.eta.assign(lp.y.begin(), lp.y.begin() + static_cast<long>(n));
    double es = 0.0;
    for (double& e : r.eta) {
        e = std::max(e, 0.0);
        es += e;
    }
    for (double& e : r.eta) e /= es;
    Vec g;
    zt_times(Z, r.eta, g);
    r.dual_value = norm_inf(g);
    const bool sep = value > 1e-12 * K;
    r.status = sep ? Separability::separable : Separability::non_separable;
    r.kappa = sep ? value : 0.0;
    return r;
}

MarginResult max_margin_l1(const Dataset& d) { return max_margin_l1(signed_design(d)); }

Interpolant min_norm_interpolant_l1(const Matrix& Z) {
    require_shape(Z);
    const std::size_t n = Z.rows, p = Z.cols;
    Matrix A(2 * p, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* z = Z.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            A(j, i) = z[j];
            A(p + j, i) = -z[j];
        }
    }
    LPResult lp = simplex_max(A, Vec(2 * p, 1.0), Vec(n, 1.0));
    Interpolant out;
    if (lp.status == LPStatus::unbounded) return out;
    if (lp.status != LPStatus::optimal) throw NumericalError("interpolation LP did not reach optimality");
    out.feasible = true;
    out.theta.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) out.theta[j] = lp.y[j] - lp.y[p + j];
    out.norm = lp.value;
    return out;
}

Interpolant min_norm_interpolant_l1(const Dataset& d) { return min_norm_interpolant_l1(signed_design(d)); }

double dual_margin(const Matrix& Z) {
    require_shape(Z);
    const std::size_t n = Z.rows, p = Z.cols;
    // eta_n = 1 - sum of the others, t = K - t'.
    const double K = max_abs(Z);
    const std::size_t k = n - 1;
    const double* zl = Z.row(k);
    Matrix A(2 * p + 1, k + 1);
    Vec b(2 * p + 1), c(k + 1, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            const double dz = Z(i, j) - zl[j];
            A(j, i) = dz;
            A(p + j, i) = -dz;
        }
        A(j, k) = 1.0;
        A(p + j, k) = 1.0;
        b[j] = K - zl[j];
        b[p + j] = K + zl[j];
    }
    for (std::size_t i = 0; i < k; ++i) A(2 * p, i) = 1.0;
    b[2 * p] = 1.0;
    c[k] = 1.0;
    for (double& v : b) v = std::max(v, 0.0);
    LPResult lp = simplex_max(A, b, c);
    if (lp.status != LPStatus::optimal) throw NumericalError("dual-margin LP did not reach optimality");
    return K - lp.value;
}

double dual_margin(const Dataset& d) { return dual_margin(signed_design(d)); }

void project_simplex(Vec& v) {
    Vec u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cum += u[k];
        const double t = (cum - 1.0) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) tau = t;
    }
    for (double& x : v) x = std::max(x - tau, 0.0);
}

void project_l1_ball(Vec& v, double radius) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    if (s <= radius) return;
    Vec u(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) u[i] = std::abs(v[i]);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cum += u[k];
        const double t = (cum - radius) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) tau = t;
    }
    for (double& x : v) x = std::copysign(std::max(std::abs(x) - tau, 0.0), x);
}

namespace {

struct DualPoint {
    double upper, lower;
    Vec theta;
};

// Value |Z'eta|_{q*}, gradient of 0.5 |Z'eta|_{q*}^2, and the primal point
// theta = d|g|_{q*}/dg with |theta|_q = 1.
DualPoint dual_eval(const Matrix& Z, const Vec& eta, double qs, Vec* grad) {
    Vec g;
    zt_times(Z, eta, g);
    DualPoint dp;
    dp.upper = lq_norm(g, qs);
    dp.theta.assign(g.size(), 0.0);
    if (dp.upper == 0.0) {
        dp.lower = 0.0;
        if (grad) grad->assign(Z.rows, 0.0);
        return dp;
    }
    for (std::size_t j = 0; j < g.size(); ++j)
        dp.theta[j] = std::copysign(std::pow(std::abs(g[j]) / dp.upper, qs - 1.0), g[j]);
    Vec zt;
    z_times(Z, dp.theta, zt);
    dp.lower = *std::min_element(zt.begin(), zt.end());
    // grad of 0.5 |g|^2 w.r.t. eta is Z (|g| theta).
    if (grad) {
        grad->resize(Z.rows);
        for (std::size_t i = 0; i < Z.rows; ++i) (*grad)[i] = dp.upper * zt[i];
    }
    return dp;
}

}  // namespace

MarginResult max_margin_lq(const Matrix& Z, double q, const LqOptions& opt) {
    require_shape(Z);
    if (!(q >= 1.0 && q <= 2.0)) throw ConfigError("max_margin_lq supports q in [1, 2]");
    const std::size_t n = Z.rows, p = Z.cols;
    MarginResult r;
    r.q = q;
    const MarginResult l1 = max_margin_l1(Z);
    if (!l1.separable()) {
        r.theta.assign(p, 0.0);
        r.eta = l1.eta;
        return r;
    }
    const double M = max_abs(Z);
    const Certificate cert = certified_T(n, M, l1.kappa, opt.eps, p, q, BoundKind::shrinkage);
    BoostOptions bo;
    bo.q = q;
    bo.rule = StepRule::shrinkage;
    bo.beta = cert.beta;
    bo.T = std::min(cert.T, opt.max_T);
    bo.trace_every = std::max(1L, bo.T);
    const BoostState st = boost_run(Z, bo);
    r.boost_steps = st.t;
    r.certified = cert.T <= opt.max_T;
    r.status = Separability::separable;

    const double nrm = lq_norm(st.theta, q);
    r.theta = st.theta;
    for (double& x : r.theta) x /= nrm;
    r.kappa = st.normalized_margin();
    r.eta = st.eta;
    r.dual_value = st.min_gamma;

    if (opt.polish && q > 1.0) {
        const double qs = q / (q - 1.0);
        Vec x = st.eta, yv = x, xprev = x, grad;
        double L = 1.0, tk = 1.0;
        auto fval = [&](const Vec& e) {
            Vec g;
            zt_times(Z, e, g);
            const double v = lq_norm(g, qs);
            return 0.5 * v * v;
        };
        double fx = fval(x);
        for (int it = 0; it < opt.polish_iter; ++it) {
            DualPoint dp = dual_eval(Z, yv, qs, &grad);
            if (dp.lower > r.kappa) {
                r.kappa = dp.lower;
                r.theta = dp.theta;
            }
            if (dp.upper < r.dual_value) {
                r.dual_value = dp.upper;
                r.eta = yv;
            }
            r.iterations = it + 1;
            if (r.dual_value - r.kappa <= 1e-10 * r.dual_value) break;
            const double fy = 0.5 * dp.upper * dp.upper;
            Vec xn(n);
            for (int bt = 0; bt < 60; ++bt) {
                for (std::size_t i = 0; i < n; ++i) xn[i] = yv[i] - grad[i] / L;
                project_simplex(xn);
                double lin = 0.0, sq = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double dlt = xn[i] - yv[i];
                    lin += grad[i] * dlt;
                    sq += dlt * dlt;
                }
                if (fval(xn) <= fy + lin + 0.5 * L * sq + 1e-15 * std::abs(fy)) break;
                L *= 2.0;
            }
            const double fn = fval(xn);
            double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            if (fn > fx) {  // adaptive restart
                tn = 1.0;
                tk = 1.0;
                yv = x;
                continue;
            }
            xprev = x;
            x = xn;
            fx = fn;
            for (std::size_t i = 0; i < n; ++i) yv[i] = x[i] + (tk - 1.0) / tn * (x[i] - xprev[i]);
            project_simplex(yv);
            tk = tn;
            L *= 0.9;
        }
    }
    return r;
}

MarginResult max_margin_lq(const Dataset& d, double q, const LqOptions& opt) {
    return max_margin_lq(signed_design(d), q, opt);
}

double xi_value(const Matrix& Z, double kappa, int max_iter, double tol) {
    require_shape(Z);
    if (kappa < 0.0) throw ConfigError("xi_value needs kappa >= 0");
    if (kappa == 0.0) return 0.0;
    const std::size_t n = Z.rows, p = Z.cols;
    const double rp = std::sqrt(static_cast<double>(p));
    // Accelerated projected gradient on g = |(kappa - Z theta)_+|^2 / 2 over the
    // l1 ball, with backtracking on L and function-value restarts. xi = sqrt(2 g / p).
    auto objective = [&](const Vec& th, Vec& r) {
        Vec zt;
        z_times(Z, th, zt);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = std::max(kappa - zt[i], 0.0);
            ss += r[i] * r[i];
        }
        return 0.5 * ss;
    };
    Vec x(p, 0.0), y = x, xold, rx(n), ry(n), gy, gx;
    double gxv = objective(x, rx);
    double best = std::sqrt(2.0 * gxv / static_cast<double>(p));
    double L = 1.0, t = 1.0;
    for (int it = 0; it < max_iter && best > tol; ++it) {
        const double gprev = gxv;
        const double gyv = objective(y, ry);
        zt_times(Z, ry, gy);  // -grad g(y)
        xold = x;
        for (;;) {
            for (std::size_t j = 0; j < p; ++j) x[j] = y[j] + gy[j] / L;
            project_l1_ball(x, rp);
            gxv = objective(x, rx);
            double lin = 0.0, dist = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double d = x[j] - y[j];
                lin -= gy[j] * d;
                dist += d * d;
            }
            if (gxv <= gyv + lin + 0.5 * L * dist + 1e-15 * gyv) break;
            L *= 2.0;
        }
        best = std::min(best, std::sqrt(2.0 * gxv / static_cast<double>(p)));
        if (it % 10 == 9) {
            // Frank-Wolfe gap <grad, x> + R |grad|_inf bounds g(x) - min g.
            zt_times(Z, rx, gx);
            double ip = 0.0, gi = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                ip -= gx[j] * x[j];
                gi = std::max(gi, std::abs(gx[j]));
            }
            if (ip + rp * gi <= 1e-3 * gxv) break;
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (gxv > gprev) {
            t = 1.0;
            y = x;
        } else {
            for (std::size_t j = 0; j < p; ++j) y[j] = x[j] + (t - 1.0) / tn * (x[j] - xold[j]);
            t = tn;
        }
        L *= 0.9;
    }
    return best;
}

double xi_value(const Dataset& d, double kappa, int max_iter, double tol) {
    return xi_value(signed_design(d), kappa, max_iter, tol);
}

double generalization_error(const Vec& theta, const ModelConfig& cfg, std::size_t m_test, std::uint64_t seed) {
    if (m_test == 0) throw ConfigError("m_test must be positive");
    constexpr std::size_t kChunk = 2000;
    double errors = 0.0;
    std::size_t done = 0;
    for (std::uint64_t chunk = 0; done < m_test; ++chunk) {
        const Dataset d = sample_test(cfg, std::min(kChunk, m_test - done), substream(seed, chunk));
        if (theta.size() != d.p()) throw ConfigError("theta length does not match p");
        Vec s;
        z_times(d.X, theta, s);
        for (std::size_t i = 0; i < d.n(); ++i) {
            const double v = d.y[i] * s[i];
            errors += v < 0.0 ? 1.0 : (v == 0.0 ? 0.5 : 0.0);
        }
        done += d.n();
    }
    return errors / static_cast<double>(m_test);
}

double generalization_error_exact(const Vec& theta, const ModelConfig& cfg) {
    if (cfg.rademacher_design) throw ConfigError("exact error needs a Gaussian design");
    const SpectralMeasure mu = cfg.resolved_measure();
    if (theta.size() != mu.size()) throw ConfigError("theta length does not match p");
    const Vec ts = theta_star_of(mu, cfg.rho);
    double ip = 0.0, tt = 0.0, uth = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        const double l = mu.atoms()[j].lambda;
        ip += l * theta[j] * ts[j];
        tt += l * theta[j] * theta[j];
        uth += theta[j] * ts[j];
    }
    if (tt == 0.0) return 0.5;
    switch (cfg.variant) {
        case Variant::gmm:
            if (mu.spike_count() > 0) throw ConfigError("exact error for latent mixtures is not available");
            return ncdf(-uth / std::sqrt(tt));
        case Variant::diagonal:
        case Variant::misspecified: {
            const double c1 = ip / cfg.rho;
            const double c2 = std::sqrt(std::max(tt - c1 * c1, 0.0));
            const LinkFunction link = cfg.variant == Variant::misspecified && cfg.gamma > 0.0
                                          ? cfg.link.smoothed(cfg.gamma)
                                          : cfg.link;
            // theta parallel to theta*: the Bayes rule or its mirror image.
            if (c2 <= 1e-12 * std::abs(c1)) {
                const double b = bayes_error(cfg.rho, link);
                return c1 > 0.0 ? b : 1.0 - b;
            }
            return err_star(c1, c2, cfg.rho, link);
        }
    }
    return 0.5;
}

double empirical_angle(const Vec& theta, const Vec& theta_star, const Vec& lambda) {
    double ip = 0.0, a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        ip += lambda[j] * theta[j] * theta_star[j];
        a += lambda[j] * theta[j] * theta[j];
        b += lambda[j] * theta_star[j] * theta_star[j];
    }
    return ip / std::sqrt(a * b);
}

double empirical_angle(const Vec& theta, const Vec& theta_star, const SpectralMeasure& mu) {
    Vec l(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) l[i] = mu.atoms()[i].lambda;
    return empirical_angle(theta, theta_star, l);
}

}  // namespace hdm
