#include "hdm/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "hdm/gauss.hpp"
#include "hdm/prox.hpp"
#include "hdm/rng.hpp"

namespace hdm {

double SystemSolution::max_residual() const {
    double r = 0.0;
    for (double v : residuals) r = std::max(r, std::abs(v));
    return residuals.empty() ? std::numeric_limits<double>::infinity() : r;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_mixture(const MCCloud& cl) { return cl.kind == CloudKind::gmm || cl.kind == CloudKind::rank; }

FEval eval_F(const MCCloud& cl, double kappa, const Vec& c) {
    if (cl.kind == CloudKind::gmm && cl.opt.mode == FMode::conditional) return f_kappa_gmm_closed(kappa, c[0], c[1]);
    return f_kappa(cl, kappa, c);
}

// Everything about one (psi, kappa, cloud, measure) problem that does not depend on c.
struct Problem {
    const SpectralMeasure& mu;
    double psi, kappa;
    const MCCloud& cl;
    double q;
    bool quad;
    bool mix;
    std::size_t dim;
    Vec sig, w, theta;
    std::vector<const double*> spikes;

    Problem(const SpectralMeasure& m, double ps, double k, const MCCloud& c, const SolveOptions& o)
        : mu(m), psi(ps), kappa(k), cl(c), q(o.q), quad(o.quadrature || o.q != 1.0), mix(is_mixture(c)),
          dim(c.dim()) {
        if (!(psi > 0.0)) throw ConfigError("psi must be positive");
        if (!(kappa >= 0.0)) throw ConfigError("kappa must be nonnegative");
        if (mix && m.spike_count() + 2 != dim)
            throw ConfigError("measure spike columns do not match the cloud's latent count");
        const std::size_t p = m.size();
        sig.resize(p);
        w.resize(p);
        theta.resize(p);
        for (std::size_t i = 0; i < p; ++i) {
            const Atom& a = m.atoms()[i];
            sig[i] = std::sqrt(a.lambda);
            w[i] = a.wbar;
            theta[i] = cl.rho * a.wbar / sig[i];
            spikes.push_back(a.spikes.data());
        }
    }
};

struct Prepared {
    FEval F;
    double D = 0.0;
    Vec m;  // prox argument is sigma_i (G + m_i)
    bool ok = false;
};

Prepared prepare(const Problem& P, const Vec& c) {
    Prepared out;
    if (!(c[1] > 0.0)) return out;
    out.F = eval_F(P.cl, P.kappa, c);
    const double rs = 1.0 / std::sqrt(P.psi);
    out.D = rs * out.F.grad[1] / c[1];
    if (!(out.D > 0.0) || !std::isfinite(out.D)) return out;
    const std::size_t p = P.sig.size();
    out.m.resize(p);
    if (!P.mix) {
        const double a = rs * (out.F.grad[0] - c[0] / c[1] * out.F.grad[1]);
        for (std::size_t i = 0; i < p; ++i) out.m[i] = a * P.w[i];
    } else {
        const std::size_t L = P.dim - 2;
        for (std::size_t i = 0; i < p; ++i) {
            double b = out.F.grad[0] * P.theta[i];
            for (std::size_t k = 0; k < L; ++k) b += out.F.grad[2 + k] * P.spikes[i][k];
            out.m[i] = rs * b / P.sig[i];
        }
    }
    out.ok = true;
    return out;
}

struct Moments {
    double eabs = 0.0;  // E|h|^q
    double esq = 0.0;   // E[lambda h^2]
    Vec lin;            // glm: E[sqrt(lambda) h W]; mixture: E[Theta h], E[h~_k h]
};

// h(G) = prox^(q)_{s / (lambda D)}(-(G + m) / (sigma D)) integrated over G
// with panel breaks at the points where the prox changes regime.
void atom_quadrature(double m, double sigma, double D, double s, double q, double out[3]) {
    const double tscale = 1.0 / (sigma * D), lam = s / (sigma * sigma * D);
    const double L = 12.0;
    std::vector<double> br = {-m - s / sigma, -m, -m + s / sigma, -L, L};
    std::erase_if(br, [L](double b) { return !(b >= -L && b <= L); });
    std::sort(br.begin(), br.end());
    const Rule& gl = gauss_legendre(12);
    out[0] = out[1] = out[2] = 0.0;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        const double a = br[k], b = br[k + 1];
        if (b <= a) continue;
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / 0.75)));
        const double hw = (b - a) / pieces;
        for (int j = 0; j < pieces; ++j) {
            const double mid = a + (j + 0.5) * hw;
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                const double g = mid + 0.5 * hw * gl.x[i];
                const double wt = 0.5 * hw * gl.w[i] * npdf(g);
                const double h = prox_lq(-(g + m) * tscale, lam, q);
                out[0] += wt * h;
                out[1] += wt * h * h;
                out[2] += wt * std::pow(std::abs(h), q);
            }
        }
    }
}

Moments moments(const Problem& P, const Prepared& pr, double s) {
    Moments M;
    const std::size_t p = P.sig.size(), L = P.mix ? P.dim - 2 : 0;
    M.lin.assign(P.mix ? 1 + L : 1, 0.0);
    const auto& atoms = P.mu.atoms();
    for (std::size_t i = 0; i < p; ++i) {
        const double mass = atoms[i].mass, sg = P.sig[i];
        double eh, esq_l, eabs;  // E h, E[lambda h^2], E|h|^q
        if (!P.quad) {
            ProxMoments pm = soft_threshold_moments(pr.m[i], s / sg);
            eh = -pm.mean / (sg * pr.D);
            esq_l = pm.sq / (pr.D * pr.D);
            eabs = pm.abs / (sg * pr.D);
        } else {
            double o[3];
            atom_quadrature(pr.m[i], sg, pr.D, s, P.q, o);
            eh = o[0];
            esq_l = sg * sg * o[1];
            eabs = o[2];
        }
        M.eabs += mass * eabs;
        M.esq += mass * esq_l;
        if (!P.mix) {
            M.lin[0] += mass * sg * P.w[i] * eh;
        } else {
            M.lin[0] += mass * P.theta[i] * eh;
            for (std::size_t k = 0; k < L; ++k) M.lin[1 + k] += mass * P.spikes[i][k] * eh;
        }
    }
    return M;
}

double eabs_only(const Problem& P, const Prepared& pr, double s) {
    if (!P.quad) {
        double e = 0.0;
        const auto& atoms = P.mu.atoms();
        for (std::size_t i = 0; i < P.sig.size(); ++i) {
            ProxMoments pm = soft_threshold_moments(pr.m[i], s / P.sig[i]);
            e += atoms[i].mass * pm.abs / (P.sig[i] * pr.D);
        }
        return e;
    }
    return moments(P, pr, s).eabs;
}

// Root of the decreasing map s -> E|h|^q - 1 on s >= 0. Returns false when
// even s = 0 leaves E|h|^q below one.
bool solve_s(const Problem& P, const Prepared& pr, double& s_out, double s_hint) {
    double lo = 0.0, flo = eabs_only(P, pr, 0.0) - 1.0;
    if (!(flo > 0.0)) {
        s_out = 0.0;
        return false;
    }
    double hi = s_hint > 0.0 ? s_hint : 0.1, fhi = eabs_only(P, pr, hi) - 1.0;
    while (fhi > 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = eabs_only(P, pr, hi) - 1.0;
        if (hi > 1e12) {
            s_out = hi;
            return false;
        }
    }
    // Illinois regula falsi.
    int side = 0;
    double s = hi;
    for (int it = 0; it < 200; ++it) {
        s = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
        double fs = eabs_only(P, pr, s) - 1.0;
        if (fs == 0.0 || hi - lo <= 1e-14 * (1.0 + hi)) break;
        if (fs > 0.0) {
            lo = s;
            flo = fs;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = s;
            fhi = fs;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
        if (std::abs(fs) < 1e-15) break;
    }
    s_out = s;
    return true;
}

Vec residuals_from(const Problem& P, const Vec& c, const Moments& M) {
    const double sc = std::max(c[1], 1.0);
    Vec r;
    r.push_back((c[0] - M.lin[0]) / sc);
    if (!P.mix)
        r.push_back((c[0] * c[0] + c[1] * c[1] - M.esq) / (sc * sc));
    else
        r.push_back((c[1] * c[1] - M.esq) / (sc * sc));
    r.push_back((M.eabs - 1.0) / sc);
    for (std::size_t k = 1; k < M.lin.size(); ++k) r.push_back((c[1 + k] - M.lin[k]) / sc);
    return r;
}

Vec fixed_point_map(const Problem& P, const Moments& M) {
    Vec c(P.dim);
    c[0] = M.lin[0];
    double v = P.mix ? M.esq : M.esq - c[0] * c[0];
    c[1] = std::sqrt(std::max(v, 1e-300));
    for (std::size_t k = 1; k < M.lin.size(); ++k) c[1 + k] = M.lin[k];
    return c;
}

struct Attempt {
    Vec c;
    double s = 0.0;
    Vec res;
    int iters = 0;
    double worst = kInf;
    std::string method;
};

// Residual vector at c with s eliminated; infeasible points get a large penalty.
Vec reduced_residual(const Problem& P, const Vec& c, double& s_io) {
    Prepared pr = prepare(P, c);
    if (!pr.ok) return Vec(P.dim + 1, 1e3);
    double s;
    solve_s(P, pr, s, s_io);
    if (!std::isfinite(s)) return Vec(P.dim + 1, 1e3);
    s_io = s;
    return residuals_from(P, c, moments(P, pr, s));
}

Attempt run_fixed_point(const Problem& P, Vec c, const SolveOptions& opt) {
    Attempt at;
    at.method = "fixed-point";
    double s = 0.1;
    const double target = std::min(opt.tol * 1e-4, 1e-9);
    for (int it = 0; it < opt.max_iter; ++it) {
        Prepared pr = prepare(P, c);
        if (!pr.ok) break;
        double s_new;
        if (!solve_s(P, pr, s_new, s)) break;
        s = s_new;
        Moments M = moments(P, pr, s);
        Vec r = residuals_from(P, c, M);
        double worst = 0.0;
        for (double v : r) worst = std::max(worst, std::abs(v));
        if (!std::isfinite(worst)) break;
        at.iters = it + 1;
        if (worst < at.worst) {
            at.worst = worst;
            at.c = c;
            at.s = s;
            at.res = r;
        }
        if (worst <= target) break;
        Vec cn = fixed_point_map(P, M);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = (1.0 - opt.damping) * c[k] + opt.damping * cn[k];
    }
    return at;
}

// Derivative-free fallback on the squared residual norm in (c1, log c2, c3..).
Attempt run_nelder_mead(const Problem& P, const Vec& c0, const SolveOptions& opt) {
    const std::size_t d = P.dim;
    auto to_c = [](const Vec& x) {
        Vec c = x;
        c[1] = std::exp(x[1]);
        return c;
    };
    double s_hint = 0.1;
    auto f = [&](const Vec& x) {
        Vec r = reduced_residual(P, to_c(x), s_hint);
        double v = 0.0;
        for (double e : r) v += e * e;
        return std::isfinite(v) ? v : 1e30;
    };
    Vec x0 = c0;
    x0[1] = std::log(std::max(c0[1], 1e-6));
    std::vector<Vec> simplex(d + 1, x0);
    for (std::size_t k = 0; k < d; ++k) simplex[k + 1][k] += (k == 1 ? 0.2 : 0.1 * (1.0 + std::abs(x0[k])));
    Vec fv(d + 1);
    for (std::size_t k = 0; k <= d; ++k) fv[k] = f(simplex[k]);
    const double goal = std::pow(std::min(opt.tol * 1e-2, 1e-8), 2);
    for (int it = 0; it < 200 * static_cast<int>(d) * 10; ++it) {
        std::vector<std::size_t> idx(d + 1);
        for (std::size_t k = 0; k <= d; ++k) idx[k] = k;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<Vec> sx(d + 1);
        Vec sf(d + 1);
        for (std::size_t k = 0; k <= d; ++k) {
            sx[k] = simplex[idx[k]];
            sf[k] = fv[idx[k]];
        }
        simplex = sx;
        fv = sf;
        if (fv[0] <= goal) break;
        double spread = 0.0;
        for (std::size_t k = 1; k <= d; ++k)
            for (std::size_t j = 0; j < d; ++j) spread = std::max(spread, std::abs(simplex[k][j] - simplex[0][j]));
        if (spread < 1e-13) break;
        Vec cen(d, 0.0);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j) cen[j] += simplex[k][j] / d;
        auto along = [&](double t) {
            Vec x(d);
            for (std::size_t j = 0; j < d; ++j) x[j] = cen[j] + t * (simplex[d][j] - cen[j]);
            return x;
        };
        Vec xr = along(-1.0);
        double fr = f(xr);
        if (fr < fv[0]) {
            Vec xe = along(-2.0);
            double fe = f(xe);
            if (fe < fr) { simplex[d] = xe; fv[d] = fe; } else { simplex[d] = xr; fv[d] = fr; }
        } else if (fr < fv[d - 1]) {
            simplex[d] = xr;
            fv[d] = fr;
        } else {
            Vec xc = fr < fv[d] ? along(-0.5) : along(0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[d])) {
                simplex[d] = xc;
                fv[d] = fc;
            } else {
                for (std::size_t k = 1; k <= d; ++k) {
                    for (std::size_t j = 0; j < d; ++j) simplex[k][j] = simplex[0][j] + 0.5 * (simplex[k][j] - simplex[0][j]);
                    fv[k] = f(simplex[k]);
                }
            }
        }
    }
    std::size_t b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    Attempt at;
    at.method = "nelder-mead";
    at.c = to_c(simplex[b]);
    at.s = s_hint;
    at.res = reduced_residual(P, at.c, at.s);
    at.worst = 0.0;
    for (double v : at.res) at.worst = std::max(at.worst, std::abs(v));
    return at;
}

Vec heuristic_start(const Problem& P) {
    Vec c(P.dim, 0.0);
    c[0] = std::max(P.cl.rho, 0.1) / 2.0;
    c[1] = std::sqrt(P.psi);
    return c;
}

}  // namespace

Vec system_residuals(const SpectralMeasure& mu, double psi, double kappa, const MCCloud& cloud, const Vec& c,
                     double s, const SolveOptions& opt) {
    Problem P(mu, psi, kappa, cloud, opt);
    Prepared pr = prepare(P, c);
    if (!pr.ok) throw DomainError("residuals requested at a point with c2 <= 0 or nonpositive D");
    return residuals_from(P, c, moments(P, pr, s));
}

SystemSolution solve_system(const SpectralMeasure& mu, double psi, double kappa, const MCCloud& cloud,
                            const SolveOptions& opt) {
    Problem P(mu, psi, kappa, cloud, opt);
    if (opt.init && opt.init->size() != P.dim) throw ConfigError("initial point has wrong length");
    Stream rng(substream(opt.seed, 'I'));
    const Vec base = opt.init ? *opt.init : heuristic_start(P);
    std::vector<Attempt> done;
    Attempt best;
    for (int k = 0; k < std::max(1, opt.starts); ++k) {
        Vec c0 = base;
        if (k > 0) {
            c0 = heuristic_start(P);
            for (double& v : c0) v *= 1.0 + 0.8 * (rng.uniform() - 0.5);
            if (c0[0] == 0.0) c0[0] = 0.2 * (rng.uniform() - 0.5);
        }
        Attempt at = run_fixed_point(P, c0, opt);
        if (!(at.worst <= opt.tol)) {
            Attempt nm = run_nelder_mead(P, at.c.empty() ? c0 : at.c, opt);
            if (nm.worst < at.worst) at = nm;
        }
        if (at.worst <= opt.tol) done.push_back(at);
        if (at.worst < best.worst) best = at;
    }
    SystemSolution sol;
    sol.kappa = kappa;
    sol.psi = psi;
    sol.c = best.c;
    sol.s = best.s;
    sol.residuals = best.res;
    sol.iterations = best.iters;
    sol.method = best.method;
    sol.converged = best.worst <= opt.tol;
    for (const Attempt& a : done) {
        double d = std::abs(a.s - best.s);
        for (std::size_t k = 0; k < a.c.size(); ++k) d = std::max(d, std::abs(a.c[k] - best.c[k]));
        sol.start_spread = std::max(sol.start_spread, d);
    }
    if (!sol.converged) {
        if (sol.c.empty()) throw DomainError("no admissible (c, s) found: psi may be below the uniqueness threshold");
        throw NonConvergence("system did not converge, best scaled residual " + std::to_string(best.worst), sol);
    }
    if (sol.c[1] < 1e-8 || sol.s < 1e-10)
        throw DomainError("solution collapsed (c2 or s near zero): psi may be below the uniqueness threshold");
    return sol;
}

double T_value(double psi, double kappa, const SystemSolution& sol, const MCCloud& cloud) {
    FEval F = eval_F(cloud, kappa, sol.c);
    double v = F.value;
    for (std::size_t k = 0; k < sol.c.size(); ++k) v -= sol.c[k] * F.grad[k];
    return v / std::sqrt(psi) - sol.s;
}

double err_star(double c1, double c2, double rho, const LinkFunction& link) {
    if (!(c2 > 0.0)) throw NumericalError("err_star: c2 must be positive");
    double r = c1 / c2;
    return gauss_expect([&](double z) {
        double f = link(rho * z);
        return f * ncdf(-r * z) + (1.0 - f) * ncdf(r * z);
    });
}

double bayes_error(double rho, const LinkFunction& link) {
    return gauss_expect([&](double z) { return z < 0 ? link(rho * z) : 1.0 - link(rho * z); }, {0.0});
}

double err_star(const SystemSolution& sol, const MCCloud& cloud, const SpectralMeasure&) {
    const Vec& c = sol.c;
    if (!is_mixture(cloud)) return err_star(c[0], c[1], cloud.rho, cloud.observed_link());
    if (!(c[1] > 0.0)) throw NumericalError("err_star: c2 must be positive");
    const std::size_t L = c.size() - 2;
    if (L == 0) return ncdf(-c[0] / c[1]);
    if (cloud.opt.law == LatentLaw::gaussian) {
        double v = c[1] * c[1];
        for (std::size_t k = 0; k < L; ++k) v += c[2 + k] * c[2 + k];
        return ncdf(-c[0] / std::sqrt(v));
    }
    if (L > 20) throw ConfigError("too many Rademacher latents to enumerate");
    double e = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << L); ++mask) {
        double shift = c[0];
        for (std::size_t k = 0; k < L; ++k) shift += ((mask >> k) & 1 ? 1.0 : -1.0) * c[2 + k];
        e += ncdf(-shift / c[1]);
    }
    return e / static_cast<double>(std::size_t{1} << L);
}

namespace {

double mixture_bayes(const SpectralMeasure& mu, double rho) {
    if (mu.spike_count() > 0) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    for (const Atom& a : mu.atoms()) v += a.mass * rho * rho * a.wbar * a.wbar / (a.lambda * a.lambda);
    return ncdf(-std::sqrt(v));
}

}  // namespace

AsymptoticPrediction kappa_star(const SpectralMeasure& mu, double psi, const MCCloud& cloud, const SolveOptions& opt,
                                double kappa_tol) {
    AsymptoticPrediction out;
    const bool mix = is_mixture(cloud);
    out.bayes_err = mix ? mixture_bayes(mu, cloud.rho) : bayes_error(cloud.rho, cloud.observed_link());
    out.err_star = std::numeric_limits<double>::quiet_NaN();
    out.solution.psi = psi;
    if (!mix) {
        out.psi_threshold = separability_threshold(cloud).psi_star;
        if (psi <= out.psi_threshold) return out;
    }
    SolveOptions quick = opt;
    quick.starts = 1;
    auto solve_at = [&](double k, const SystemSolution* warm) {
        SolveOptions o = quick;
        if (warm) o.init = warm->c;
        return solve_system(mu, psi, k, cloud, o);
    };
    // Mixture models have no closed-form threshold here: a failure to solve
    // at a tiny kappa is read as non-separability.
    SystemSolution lo_sol;
    try {
        lo_sol = solve_at(std::max(kappa_tol, 1e-3), nullptr);
    } catch (const NumericalError&) {
        if (mix) return out;
        throw;
    }
    if (T_value(psi, lo_sol.kappa, lo_sol, cloud) >= 0.0) {
        if (mix) return out;
    }
    double lo = 0.0, hi = 1.0;
    SystemSolution hi_sol;
    for (;;) {
        try {
            hi_sol = solve_at(hi, &lo_sol);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (kappa = " + std::to_string(hi) + ")");
        }
        if (T_value(psi, hi, hi_sol, cloud) > 0.0) break;
        lo = hi;
        lo_sol = hi_sol;
        hi *= 2.0;
        if (hi > 1e4) throw NumericalError("kappa bracket expansion failed");
    }
    while (hi - lo > kappa_tol) {
        double mid = 0.5 * (lo + hi);
        SystemSolution ms;
        try {
            ms = solve_at(mid, &lo_sol);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (kappa = " + std::to_string(mid) + ")");
        }
        if (T_value(psi, mid, ms, cloud) < 0.0) {
            lo = mid;
            lo_sol = ms;
        } else {
            hi = mid;
            hi_sol = ms;
        }
    }
    out.kappa_star = 0.5 * (lo + hi);
    SolveOptions fin = opt;
    fin.init = lo_sol.c;
    out.solution = solve_system(mu, psi, out.kappa_star, cloud, fin);
    out.separable = true;
    const Vec& c = out.solution.c;
    double nrm = 0.0;
    for (double v : c) nrm += v * v;
    out.angle = c[0] / std::sqrt(nrm);
    out.err_star = err_star(out.solution, cloud, mu);
    out.classical_bound = std::sqrt(psi) / out.kappa_star;
    return out;
}

ZetaOmega zeta_omega(const SpectralMeasure& mu) {
    double e = 0.0;
    for (const Atom& a : mu.atoms()) e += a.mass * std::abs(a.wbar) / std::sqrt(a.lambda);
    if (!(e > 0.0)) throw NumericalError("zeta: E|Lambda^-1/2 W| is zero");
    double zeta = 1.0 / e, om = 0.0;
    for (const Atom& a : mu.atoms()) {
        double sgn = a.wbar > 0 ? 1.0 : (a.wbar < 0 ? -1.0 : 0.0);
        double d = a.wbar - zeta * sgn / std::sqrt(a.lambda);
        om += a.mass * d * d;
    }
    return {zeta, std::sqrt(om)};
}

PsiDown psi_down(double kappa, const SpectralMeasure& mu, const MCCloud& cloud) {
    ZetaOmega zo = zeta_omega(mu);
    PsiDown r{};
    r.psi_star = separability_threshold(cloud).psi_star;
    FEval fp = f_kappa(cloud, kappa, {zo.zeta, 0.0});
    FEval fm = f_kappa(cloud, kappa, {-zo.zeta, 0.0});
    const double w2 = zo.omega * zo.omega;
    r.psi_plus = fp.grad[0] > 0.0 ? 0.0 : fp.grad[1] * fp.grad[1] - w2 * fp.grad[0] * fp.grad[0];
    r.psi_minus = fm.grad[0] < 0.0 ? 0.0 : fm.grad[1] * fm.grad[1] - w2 * fm.grad[0] * fm.grad[0];
    r.psi_down = std::max({r.psi_star, r.psi_plus, r.psi_minus});
    return r;
}

void write_solution_header(std::ostream& os) { os << "psi,rho,kappa,c1,c2,s,residual,err_star,bayes,angle\n"; }

void write_solution_row(std::ostream& os, double rho, const AsymptoticPrediction& pr) {
    const SystemSolution& s = pr.solution;
    const bool has = !s.c.empty();
    os << std::setprecision(10) << s.psi << ',' << rho << ',' << pr.kappa_star << ',' << (has ? s.c[0] : 0.0) << ','
       << (has ? s.c[1] : 0.0) << ',' << s.s << ',' << (has ? s.max_residual() : 0.0) << ',' << pr.err_star << ','
       << pr.bayes_err << ',' << pr.angle << '\n';
}

}  // namespace hdm
