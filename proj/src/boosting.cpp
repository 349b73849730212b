#include "hdm/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "hdm/kernels.hpp"

namespace hdm {

namespace {

double dual_exponent(double q) { return q == 1.0 ? std::numeric_limits<double>::infinity() : q / (q - 1.0); }

double lq_norm(const Vec& v, double q) {
    if (q == 1.0) {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    if (mx == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x) / mx, q);
    return mx * std::pow(s, 1.0 / q);
}

// log sum exp(-m_i)
double potential(const Vec& m) {
    double lo = *std::min_element(m.begin(), m.end());
    double s = 0.0;
    for (double v : m) s += std::exp(lo - v);
    return -lo + std::log(s);
}

void weights_from(const Vec& m, Vec& eta) {
    double lo = *std::min_element(m.begin(), m.end());
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        eta[i] = std::exp(lo - m[i]);
        s += eta[i];
    }
    for (double& e : eta) e /= s;
}

}  // namespace

double max_abs(const Matrix& Z) {
    double m = 0.0;
    for (double v : Z.data) m = std::max(m, std::abs(v));
    return m;
}

double BoostState::normalized_margin() const {
    double nrm = lq_norm(theta, q);
    if (nrm == 0.0 || margins.empty()) return 0.0;
    return *std::min_element(margins.begin(), margins.end()) / nrm;
}

BoostState boost_run(const Matrix& Z, const BoostOptions& opt) {
    const std::size_t n = Z.rows, p = Z.cols;
    if (n == 0 || p == 0) throw ConfigError("boosting needs n >= 1 and p >= 1");
    if (opt.T < 1) throw ConfigError("boosting needs T >= 1");
    if (!(opt.q >= 1.0 && opt.q <= 2.0)) throw ConfigError("boosting supports q in [1, 2]");
    if (!(opt.beta > 0.0)) throw ConfigError("boosting step factor beta must be positive");
    if (opt.rule == StepRule::discrete) {
        if (opt.q != 1.0) throw ConfigError("discrete step rule requires q = 1");
        for (double v : Z.data)
            if (v != 1.0 && v != -1.0) throw ConfigError("discrete step rule requires a +-1 design");
    }

    BoostState s;
    s.q = opt.q;
    s.beta = opt.rule == StepRule::discrete ? 0.0 : opt.beta;
    s.M = opt.M > 0.0 ? opt.M : max_abs(Z);
    s.theta.assign(p, 0.0);
    s.margins.assign(n, 0.0);
    s.eta.assign(n, 1.0 / static_cast<double>(n));
    s.min_gamma = std::numeric_limits<double>::infinity();
    s.potential_slack = -std::numeric_limits<double>::infinity();

    const double qs = dual_exponent(opt.q);
    const double spread = opt.q == 1.0 ? 1.0 : std::pow(static_cast<double>(p), 2.0 / qs);
    Vec g, v(p, 0.0), zv;
    double l1 = 0.0;
    std::size_t active = 0;
    double R = potential(s.margins);

    for (long t = 0; t < opt.T; ++t) {
        zt_times(Z, s.eta, g);
        double gamma;
        std::size_t jsel = 0;
        double sgn = 1.0;
        if (opt.q == 1.0) {
            double best = -1.0;
            for (std::size_t j = 0; j < p; ++j)
                if (std::abs(g[j]) > best) {
                    best = std::abs(g[j]);
                    jsel = j;
                }
            gamma = best;
            sgn = g[jsel] < 0.0 ? -1.0 : 1.0;
        } else {
            gamma = lq_norm(g, qs);
            for (std::size_t j = 0; j < p; ++j)
                v[j] = gamma > 0.0 ? std::copysign(std::pow(std::abs(g[j]) / gamma, qs - 1.0), g[j]) : 0.0;
        }
        s.min_gamma = std::min(s.min_gamma, gamma);

        double alpha;
        if (opt.rule == StepRule::discrete) {
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (sgn * Z(i, jsel) < 0.0) err += s.eta[i];
            err = std::clamp(err, 1e-16, 1.0 - 1e-16);
            alpha = 0.5 * std::log((1.0 - err) / err);
        } else {
            alpha = opt.beta * gamma;
        }

        if (opt.q == 1.0) {
            const double before = s.theta[jsel];
            s.theta[jsel] += alpha * sgn;
            l1 += std::abs(s.theta[jsel]) - std::abs(before);
            if (before == 0.0 && s.theta[jsel] != 0.0) ++active;
            if (before != 0.0 && s.theta[jsel] == 0.0) --active;
            for (std::size_t i = 0; i < n; ++i) s.margins[i] += alpha * sgn * Z(i, jsel);
        } else {
            for (std::size_t j = 0; j < p; ++j) s.theta[j] += alpha * v[j];
            z_times(Z, v, zv);
            for (std::size_t i = 0; i < n; ++i) s.margins[i] += alpha * zv[i];
            l1 = 0.0;
            active = 0;
            for (double x : s.theta) {
                l1 += std::abs(x);
                active += x != 0.0;
            }
        }
        s.step_sum += alpha;
        weights_from(s.margins, s.eta);

        const double Rn = potential(s.margins);
        if (opt.rule != StepRule::discrete) {
            const double bound = -opt.beta * gamma * gamma + 0.5 * opt.beta * opt.beta * gamma * gamma * s.M * s.M * spread;
            s.potential_slack = std::max(s.potential_slack, (Rn - R) - bound - 1e-12 * (1.0 + std::abs(R)));
        }
        R = Rn;

        long err = 0;
        for (double m : s.margins) err += m <= 0.0;
        s.t = t + 1;
        if (err == 0 && !s.interp_time) {
            s.interp_time = s.t;
            s.active_at_interp = active;
        }
        const bool last = s.t == opt.T || (opt.stop_at_interp && err == 0);
        if (last || s.t % std::max(1L, opt.trace_every) == 0) {
            s.trace_t.push_back(s.t);
            s.gamma_trace.push_back(gamma);
            s.train_err_trace.push_back(err);
            s.l1_trace.push_back(l1);
            s.active_trace.push_back(static_cast<long>(active));
        }
        if (last) break;
    }
    return s;
}

BoostState boost_run(const Dataset& d, const BoostOptions& opt) { return boost_run(signed_design(d), opt); }

Certificate certified_T(std::size_t n, double M, double kappa, double eps, std::size_t p, double q, BoundKind kind) {
    if (!(kappa > 0.0)) throw NumericalError("certified_T: non-separable instance (kappa <= 0)");
    // eps = 1 is meaningful for zero_error: it bounds the time to the first interpolating iterate.
    const double eps_max = kind == BoundKind::zero_error ? 1.0 : std::nextafter(1.0, 0.0);
    if (!(eps > 0.0 && eps <= eps_max)) throw ConfigError("certified_T: eps out of range");
    if (!(M > 0.0)) throw ConfigError("certified_T: M must be positive");
    if (!(q >= 1.0)) throw ConfigError("certified_T: q must be >= 1");
    const double e = std::exp(1.0), nn = static_cast<double>(n);
    if (kind == BoundKind::zero_error) {
        double T = 2.0 * M * M / (kappa * kappa) * std::log(nn * e / eps);
        return {static_cast<long>(std::ceil(T)), 1.0 / (M * M)};
    }
    const double spread = q == 1.0 ? 1.0 : std::pow(static_cast<double>(p), 2.0 / dual_exponent(q));
    double T = std::log(1.01 * nn * e) * 2.0 * spread * M * M / (eps * eps * kappa * kappa);
    return {static_cast<long>(std::ceil(T)), eps / (spread * M * M)};
}

double asymptotic_T(double n, double psi, double kappa_star, double eps) {
    if (!(kappa_star > 0.0)) throw NumericalError("asymptotic_T: kappa* must be positive");
    const double l = std::log(n);
    return n * l * l * 12.0 * psi / (eps * eps * kappa_star * kappa_star);
}

std::size_t active_features(const Vec& theta) {
    return static_cast<std::size_t>(std::count_if(theta.begin(), theta.end(), [](double x) { return x != 0.0; }));
}

std::optional<std::size_t> active_features(const BoostState& s) { return s.active_at_interp; }

void write_trace_csv(const BoostState& s, std::ostream& os) {
    os << "t,gamma,train_err,l1_norm,active_count\n";
    os.precision(12);
    for (std::size_t k = 0; k < s.trace_t.size(); ++k)
        os << s.trace_t[k] << ',' << s.gamma_trace[k] << ',' << s.train_err_trace[k] << ',' << s.l1_trace[k] << ','
           << s.active_trace[k] << '\n';
}

}  // namespace hdm
