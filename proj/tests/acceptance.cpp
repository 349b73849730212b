// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hdm/boosting.hpp"
#include "hdm/config.hpp"
#include "hdm/datagen.hpp"
#include "hdm/experiments.hpp"
#include "hdm/fixedpoint.hpp"
#include "hdm/fkappa.hpp"
#include "hdm/margin.hpp"
#include "hdm/prox.hpp"
#include "hdm/rng.hpp"

using namespace hdm;

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

// The logistic, rho = 1, identity-covariance setting at n = 400.
ExperimentConfig fig1_config() {
    ExperimentConfig c = default_config("sweep-psi");
    c.model.n = 400;
    c.psi_list = {0.3, 0.5, 1, 2, 3, 4, 5, 6};
    c.rho_list = {1.0};
    c.replicates = 10;
    c.seed = 1;
    c.plots = false;
    return c;
}

struct Fig1Sweep {
    std::vector<SweepRow> rows;
    double seconds = 0.0;
};
const Fig1Sweep& fig1_sweep() {
    static const Fig1Sweep s = [] {
        Fig1Sweep out;
        const auto t0 = Clock::now();
        out.rows = sweep_psi(fig1_config());
        out.seconds = since(t0);
        return out;
    }();
    return s;
}

const SpectralMeasure& fig1_measure() {
    static const SpectralMeasure mu = standard_gaussian_measure(4000, substream(1, 'W'));
    return mu;
}
const MCCloud& fig1_cloud() {
    static const MCCloud c = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), substream(1, 'C'));
    return c;
}

Matrix random_instance(std::size_t n, std::size_t p, double rho, std::uint64_t seed) {
    ModelConfig m;
    m.n = n;
    m.psi = static_cast<double>(p) / static_cast<double>(n);
    m.rho = rho;
    m.seed = seed;
    return signed_design(sample(m));
}

double min_margin(const Matrix& Z, const Vec& th) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < Z.rows; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < Z.cols; ++j) s += Z(i, j) * th[j];
        m = std::min(m, s);
    }
    return m;
}

// ---------------------------------------------------------------------------

Outcome c1_threshold() {
    Outcome o;
    const auto t0 = Clock::now();
    const MCCloud cloud = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), substream(1, 'C'));
    const double psi = separability_threshold(cloud).psi_star;
    const double secs = since(t0);
    o.detail << "psi* = " << fmt(psi) << " (target 0.43 +- 0.03), " << fmt(secs, 2) << " s";
    o.require(std::abs(psi - 0.43) <= 0.03, "|psi* - 0.43| <= 0.03");
    o.require(secs < 10.0, "runtime < 10 s");
    return o;
}

Outcome c2_margin_sweep() {
    Outcome o;
    const Fig1Sweep& s = fig1_sweep();
    double worst = 0.0;
    for (const SweepRow& r : s.rows) {
        if (r.psi == 0.3) {
            int zeros = 0;
            for (double k : r.kappa_lp) zeros += k == 0.0;
            o.detail << "psi=0.3: " << zeros << "/10 zero margins; ";
            o.require(zeros >= 9, "kappa_LP = 0 in >= 9/10 replicates at psi = 0.3");
        }
        if (r.psi < 1.0) continue;
        const double gap = std::abs(r.kappa_lp_mean - r.kappa_star) / r.kappa_star;
        worst = std::max(worst, gap);
        o.detail << "psi=" << r.psi << " LP " << fmt(r.kappa_lp_mean) << " vs " << fmt(r.kappa_star) << "; ";
        o.require(gap <= 0.10, "relative gap <= 10% at psi = " + fmt(r.psi));
    }
    o.detail << "worst gap " << fmt(100 * worst, 3) << "%, sweep " << fmt(s.seconds / 60, 3) << " min";
    o.require(s.seconds < 15 * 60, "runtime < 15 min");
    return o;
}

Outcome c3_error_sweep() {
    Outcome o;
    double worst = 0.0;
    for (const SweepRow& r : fig1_sweep().rows) {
        // Err* is defined only where an interpolant exists (kappa* > 0).
        if (r.kappa_star > 0.0)
            o.require(r.err_star >= r.bayes, "Err* >= Bayes at psi = " + fmt(r.psi));
        else
            o.detail << "psi=" << r.psi << " not separable; ";
        if (r.psi < 1.0) continue;
        const double d = std::abs(r.err_emp_mean - r.err_star);
        worst = std::max(worst, d);
        o.detail << "psi=" << r.psi << " " << fmt(r.err_emp_mean) << " vs " << fmt(r.err_star) << "; ";
        o.require(d <= 0.03, "|err - Err*| <= 0.03 at psi = " + fmt(r.psi));
    }
    o.detail << "worst " << fmt(worst, 3) << ", Bayes " << fmt(fig1_sweep().rows.front().bayes);
    return o;
}

Outcome c4_normalized_margin() {
    Outcome o;
    // Every separable grid point of the sweep (kappa* > 0); 0.3 sits below the threshold.
    double prev = 0.0;
    int points = 0;
    for (const SweepRow& r : fig1_sweep().rows) {
        if (r.kappa_star <= 0.0) continue;
        ++points;
        const double k = r.kappa_star / std::sqrt(r.psi);
        o.detail << fmt(r.psi, 2) << ":" << fmt(k) << " ";
        o.require(k > prev, "kappa*/sqrt(psi) increasing at psi = " + fmt(r.psi));
        o.require(1.0 / k > 0.5, "classical bound > 0.5 at psi = " + fmt(r.psi));
        prev = k;
    }
    o.detail << "(" << points << " separable points; largest inverse-bound point " << fmt(1.0 / prev) << ")";
    o.require(points >= 7, "all grid points from 0.5 up are separable");
    return o;
}

Outcome c5_duality() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 g(55);
    int found = 0, tried = 0;
    double dgap = 0, recip = 0, xi_lo = 0, xi_hi = std::numeric_limits<double>::infinity();
    while (found < 100 && tried < 1000) {
        ++tried;
        const std::size_t n = 5 + g() % 46, p = 10 + g() % 91;
        const Matrix Z = random_instance(n, p, 2.0, g());
        const MarginResult r = max_margin_l1(Z);
        if (!r.separable()) continue;
        ++found;
        dgap = std::max({dgap, std::abs(r.kappa - dual_margin(Z)), std::abs(min_margin(Z, r.theta) - r.kappa)});
        const Interpolant it = min_norm_interpolant_l1(Z);
        recip = std::max(recip, it.feasible ? std::abs(r.kappa * it.norm - 1.0) : 1.0);
        const double thr = std::sqrt(static_cast<double>(p)) * r.kappa;
        xi_lo = std::max(xi_lo, xi_value(Z, 0.99 * thr));
        xi_hi = std::min(xi_hi, xi_value(Z, 1.01 * thr));
    }
    const double secs = since(t0);
    o.detail << found << " instances: max |primal - dual| " << fmt(dgap, 3) << ", max |kappa |theta|_1 - 1| "
             << fmt(recip, 3) << ", max xi(0.99) " << fmt(xi_lo, 3) << ", min xi(1.01) " << fmt(xi_hi, 3) << ", "
             << fmt(secs, 3) << " s";
    o.require(found == 100, "100 separable instances");
    o.require(dgap <= 1e-8, "primal = dual within 1e-8");
    o.require(recip <= 1e-8, "reciprocity within 1e-8");
    o.require(xi_lo <= 1e-6, "xi = 0 below the threshold");
    o.require(xi_hi > 1e-6, "xi > 0 above the threshold");
    o.require(secs < 60, "runtime < 1 min");
    return o;
}

// Minimizer of lam |s|^q + (s - t)^2 / 2 over [-3, 3] by nested grid search.
double grid_prox(double t, double lam, double q) {
    auto obj = [&](double s) { return lam * std::pow(std::abs(s), q) + 0.5 * (s - t) * (s - t); };
    double lo = -3.0, hi = 3.0, best = 0.0;
    for (int level = 0; level < 4; ++level) {
        const int N = 4000;
        double bv = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= N; ++k) {
            const double s = lo + (hi - lo) * k / N;
            if (const double v = obj(s); v < bv) {
                bv = v;
                best = s;
            }
        }
        const double w = (hi - lo) / N;
        lo = best - 2 * w;
        hi = best + 2 * w;
    }
    return best;
}

Outcome c6_prox_derivative() {
    Outcome o;
    std::mt19937_64 g(66);
    std::uniform_real_distribution<double> U(0, 1);
    double prox_err = 0;
    for (int k = 0; k < 1000; ++k) {
        const double t = 6 * U(g) - 3, lam = 2 * U(g), q = 1 + U(g);
        prox_err = std::max(prox_err, std::abs(prox_lq(t, lam, q) - grid_prox(t, lam, q)));
    }
    // Central differences of F on one frozen cloud, relative to the largest partial.
    const MCCloud& cloud = fig1_cloud();
    double grad_err = 0;
    const double h = 1e-4;
    for (int k = 0; k < 200; ++k) {
        const double kappa = 3 * U(g);
        const Vec c{3 * U(g) - 1, 0.05 + 2 * U(g)};
        const FEval e = f_kappa(cloud, kappa, c);
        double scale = 1e-12, err = 0;
        Vec fd(2);
        for (int j = 0; j < 2; ++j) {
            Vec a = c, b = c;
            a[j] += h;
            b[j] -= h;
            fd[j] = (f_kappa(cloud, kappa, a).value - f_kappa(cloud, kappa, b).value) / (2 * h);
            scale = std::max(scale, std::abs(fd[j]));
        }
        for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(e.grad[j] - fd[j]));
        grad_err = std::max(grad_err, err / scale);
    }
    // Mixture closed form against plain Monte Carlo with its own standard error.
    CloudOptions raw;
    raw.mode = FMode::raw;
    const MCCloud mc = make_cloud(CloudKind::gmm, 100000, 1.0, LinkFunction::logistic(), 67, raw);
    double worst_z = 0;
    for (int k = 0; k < 20; ++k) {
        const double kappa = 2 * U(g), c1 = 2 * U(g) - 1, c2 = 0.1 + 1.5 * U(g);
        double s = 0, ss = 0;
        for (std::size_t i = 0; i < mc.m; ++i) {
            const double r = std::max(0.0, kappa - c1 - c2 * mc.z2[i]);
            s += r * r;
            ss += r * r * r * r;
        }
        s /= mc.m;
        const double se2 = std::sqrt((ss / mc.m - s * s) / mc.m);
        const double closed = f_kappa_gmm_closed(kappa, c1, c2).value;
        if (se2 > 0) worst_z = std::max(worst_z, std::abs(closed * closed - s) / se2);
    }
    o.detail << "prox max error " << fmt(prox_err, 3) << "; F gradient max rel. error " << fmt(grad_err, 3)
             << "; mixture closed form max |z| " << fmt(worst_z, 3);
    o.require(prox_err <= 1e-6, "prox_lq within 1e-6 of grid search");
    o.require(grad_err <= 1e-3, "gradient relative error <= 1e-3");
    o.require(worst_z <= 3, "closed form within 3 MC standard errors");
    return o;
}

Outcome c7_fixed_point() {
    Outcome o;
    const AsymptoticPrediction pr = kappa_star(fig1_measure(), 3.0, fig1_cloud());
    const SystemSolution& s = pr.solution;
    const MCCloud fresh = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), substream(2, 'C'));
    const Vec r = system_residuals(fig1_measure(), 3.0, pr.kappa_star, fresh, s.c, s.s);
    double fr = 0;
    for (double v : r) fr = std::max(fr, std::abs(v));
    o.detail << "kappa* = " << fmt(pr.kappa_star) << ", residual " << fmt(s.max_residual(), 3) << ", start spread "
             << fmt(s.start_spread, 3) << ", fresh-cloud residual " << fmt(fr, 3);
    o.require(s.converged && s.max_residual() <= 1e-4, "scaled residuals <= 1e-4");
    o.require(s.start_spread <= 1e-2, "5 starts agree within 1e-2");
    o.require(fr <= 5e-4, "fresh-cloud residual <= 5e-4");
    return o;
}

Outcome c8_boosting() {
    Outcome o;
    std::mt19937_64 g(88);
    int found = 0;
    double worst_ratio = std::numeric_limits<double>::infinity(), slack = -std::numeric_limits<double>::infinity();
    long worst_interp = 0, bound_at_worst = 1;
    int reached = 0, reached_plain = 0;
    const auto t0 = Clock::now();
    while (found < 20) {
        const std::size_t n = 15 + g() % 16, p = 3 * n;
        const Matrix Z = random_instance(n, p, 4.0, g());
        const MarginResult lp = max_margin_l1(Z);
        if (!lp.separable()) continue;
        ++found;
        const double M = max_abs(Z);

        const Certificate cert = certified_T(n, M, lp.kappa, 0.2);
        BoostOptions sh;
        sh.rule = StepRule::shrinkage;
        sh.beta = cert.beta;
        sh.T = cert.T;
        sh.trace_every = cert.T;
        const BoostState s = boost_run(Z, sh);
        worst_ratio = std::min(worst_ratio, s.normalized_margin() / lp.kappa);
        slack = std::max(slack, s.potential_slack);

        const Certificate zc = certified_T(n, M, lp.kappa, 1.0, 1, 1.0, BoundKind::zero_error);
        BoostOptions ad;
        ad.beta = zc.beta;
        ad.T = zc.T;
        ad.stop_at_interp = true;
        ad.trace_every = zc.T;
        const BoostState a = boost_run(Z, ad);
        slack = std::max(slack, a.potential_slack);
        if (a.interp_time && *a.interp_time <= zc.T) {
            ++reached;
            if (static_cast<double>(*a.interp_time) / zc.T > static_cast<double>(worst_interp) / bound_at_worst) {
                worst_interp = *a.interp_time;
                bound_at_worst = zc.T;
            }
        }
        // Plain AdaBoost step (beta = 1) under the same step budget, reported only.
        ad.beta = 1.0;
        const BoostState b = boost_run(Z, ad);
        if (b.interp_time) ++reached_plain;
    }
    o.detail << "20 instances: min margin ratio " << fmt(worst_ratio) << " (need > 0.8); zero error reached in "
             << reached << "/20 (slowest " << worst_interp << " of " << bound_at_worst
             << " steps; beta = 1 reached in " << reached_plain << "/20); max potential slack " << fmt(slack, 3)
             << "; " << fmt(since(t0), 3) << " s";
    o.require(worst_ratio > 0.8, "normalized margin > 0.8 kappa_LP");
    o.require(reached == 20, "zero training error within the bound");
    o.require(slack <= 1e-10, "potential inequality holds at every step");
    return o;
}

Outcome c9_lq_consistency() {
    Outcome o;
    // Theory: the generic quadrature route at q = 1 against the closed-form route.
    const auto& mu = fig1_measure();
    const auto& cloud = fig1_cloud();
    SolveOptions a;
    const double k = kappa_star(mu, 3.0, cloud).kappa_star;
    const SystemSolution s1 = solve_system(mu, 3.0, k, cloud, a);
    SolveOptions b = a;
    b.quadrature = true;
    const SystemSolution s2 = solve_system(mu, 3.0, k, cloud, b);
    const double dth = std::max({std::abs(s1.c[0] - s2.c[0]), std::abs(s1.c[1] - s2.c[1]), std::abs(s1.s - s2.s)});
    o.detail << "system routes differ by " << fmt(dth, 3) << " (10 tol = " << fmt(10 * a.tol, 2) << "); ";
    o.require(dth <= 10 * a.tol, "q = 1 system routes agree within 10 tol");

    // Finite sample: lq boosting route at q = 1 against the LP, and the l1/l2 scaling.
    std::mt19937_64 g(99);
    double worst_rel = 0, worst_l2gap = 0;
    int found = 0;
    bool scaling = true;
    LqOptions lo;
    while (found < 10) {
        const std::size_t n = 10 + g() % 11, p = 2 * n + g() % 20;
        const Matrix Z = random_instance(n, p, 3.0, g());
        const MarginResult lp = max_margin_l1(Z);
        if (!lp.separable()) continue;
        ++found;
        const MarginResult r1 = max_margin_lq(Z, 1.0, lo);
        worst_rel = std::max(worst_rel, (lp.kappa - r1.kappa) / lp.kappa);
        o.require(r1.kappa <= lp.kappa + 1e-9, "lq route never exceeds the LP optimum");
        const MarginResult r2 = max_margin_lq(Z, 2.0, lo);
        worst_l2gap = std::max(worst_l2gap, (r2.dual_value - r2.kappa) / r2.kappa);
        scaling = scaling && std::sqrt(static_cast<double>(p)) * lp.kappa >= r2.kappa;
    }
    o.detail << "lq route at q = 1 within " << fmt(100 * worst_rel, 3) << "% of the LP (eps = " << lo.eps
             << "); l2 primal-dual gap <= " << fmt(worst_l2gap, 3) << "; sqrt(p) kappa_l1 >= kappa_l2 on all "
             << found << " instances: " << (scaling ? "yes" : "no");
    o.require(worst_rel <= lo.eps, "lq route at q = 1 within eps of the LP");
    o.require(worst_l2gap <= 1e-6, "l2 margin solved to 1e-6");
    o.require(scaling, "sqrt(p) kappa_l1 >= kappa_l2");
    return o;
}

Outcome c10_universality() {
    Outcome o;
    const auto t0 = Clock::now();
    ExperimentConfig u = default_config("universality");
    u.model.n = 400;
    u.feature_ratio = 2.0;
    u.replicates = 10;
    u.activation = "compact";
    const UniversalityA ua = universality_features(u);
    const double rel = ua.mean_abs_diff / ua.mean_margin;
    o.detail << "compact sigma: mean |A - B| " << fmt(ua.mean_abs_diff) << " = " << fmt(100 * rel, 3)
             << "% of margin " << fmt(ua.mean_margin) << "; ";
    o.require(rel <= 0.05, "mean |difference| <= 5% of the margin");

    u.activation = "identity";
    u.replicates = 3;
    const UniversalityA ui = universality_features(u);
    double id_diff = 0;
    for (const auto& r : ui.rows) id_diff = std::max(id_diff, std::abs(r.kappa_a - r.kappa_b));
    o.detail << "identity max |A - B| " << id_diff << "; ";
    o.require(id_diff == 0.0, "identity activation gives exactly 0");

    // Gaussian curve is the criterion-2 sweep; the Rademacher run reuses its seeds.
    ExperimentConfig r = fig1_config();
    r.psi_list = {1, 2, 3, 4, 5, 6};
    r.model.rademacher_design = true;
    const auto rr = sweep_psi(r, false);
    double worst = 0;
    for (const SweepRow& row : rr) {
        for (const SweepRow& gr : fig1_sweep().rows)
            if (gr.psi == row.psi) {
                const double d = std::abs(gr.kappa_lp_mean - row.kappa_lp_mean);
                worst = std::max(worst, d);
                o.detail << "psi=" << row.psi << " " << fmt(gr.kappa_lp_mean) << "/" << fmt(row.kappa_lp_mean) << " ";
            }
    }
    o.detail << "; worst design gap " << fmt(worst, 3) << "; " << fmt(since(t0) / 60, 3) << " min";
    o.require(worst <= 0.05, "Gaussian and Rademacher margins within 0.05");
    return o;
}

Outcome c11_sparsity() {
    Outcome o;
    ModelConfig m;
    m.n = 400;
    m.psi = 3.0;
    m.rho = 1.0;
    m.seed = 111;
    const Matrix Z = signed_design(sample(m));
    const MarginResult lp = max_margin_l1(Z);
    const double M = max_abs(Z);
    const Certificate zc = certified_T(Z.rows, M, lp.kappa, 1.0, 1, 1.0, BoundKind::zero_error);
    BoostOptions bo;
    bo.beta = zc.beta;
    bo.T = zc.T;
    bo.stop_at_interp = true;
    bo.trace_every = zc.T;
    const BoostState s = boost_run(Z, bo);
    const double kstar = kappa_star(fig1_measure(), 3.0, fig1_cloud()).kappa_star;
    o.require(s.interp_time.has_value(), "boosting interpolates within the zero-error bound");
    if (!s.interp_time) return o;
    const double p = static_cast<double>(Z.cols), lp2 = std::log(p) * std::log(p);
    const double ratio = static_cast<double>(*s.active_at_interp) / (p * lp2), bound = 12.0 / (kstar * kstar);
    o.detail << "S0 = " << *s.active_at_interp << " at t = " << *s.interp_time << ", S0/(p log^2 p) = " << fmt(ratio)
             << " <= 12/kappa*^2 = " << fmt(bound);
    o.require(ratio <= bound, "sparsity ratio within the bound");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"separability threshold", c1_threshold},
        {"margin sweep vs prediction", c2_margin_sweep},
        {"interpolant error vs prediction", c3_error_sweep},
        {"normalized margin shape", c4_normalized_margin},
        {"duality and reciprocity", c5_duality},
        {"prox and derivative oracles", c6_prox_derivative},
        {"fixed-point health", c7_fixed_point},
        {"boosting certificates", c8_boosting},
        {"lq consistency", c9_lq_consistency},
        {"universality", c10_universality},
        {"sparsity bound", c11_sparsity},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::printf("criterion %2d %-32s %s  %s\n", id, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
