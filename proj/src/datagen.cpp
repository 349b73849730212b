#include "hdm/datagen.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "hdm/gauss.hpp"
#include "hdm/rng.hpp"

namespace hdm {

namespace {

enum : std::uint64_t { kX = 'X', kY = 'Y', kLatent = 'L', kHidden = 'H', kHiddenTheta = 'T', kF = 'F', kNoise = 'N' };

Vec lambdas_of(const SpectralMeasure& m) {
    Vec l(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) l[i] = m.atoms()[i].lambda;
    return l;
}

Vec rebuild_theta(const SpectralMeasure& m, double rho) {
    const std::size_t p = m.size();
    Vec th(p);
    double q = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        const Atom& a = m.atoms()[i];
        th[i] = rho * a.wbar / (std::sqrt(static_cast<double>(p)) * std::sqrt(a.lambda));
        q += a.lambda * th[i] * th[i];
    }
    if (q > 0.0) {
        const double s = rho / std::sqrt(q);
        for (double& v : th) v *= s;
    }
    return th;
}

void fill_noise(Matrix& X, const Vec& lambda, std::uint64_t key, bool rademacher) {
    const std::size_t n = X.rows, p = X.cols;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        double* r = X.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < p; ++j) {
            std::uint64_t c = static_cast<std::uint64_t>(i) * p + j;
            double g = rademacher ? rademacher_at(key, c) : normal_at(key, c);
            r[j] = std::sqrt(lambda[j]) * g;
        }
    }
}

SpectralMeasure measure_for(const ModelConfig& cfg) {
    SpectralMeasure m = cfg.resolved_measure();
    if (m.size() != cfg.p())
        throw ConfigError("measure has " + std::to_string(m.size()) + " atoms but p = " + std::to_string(cfg.p()));
    return m;
}

}  // namespace

Matrix signed_design(const Dataset& d) {
    Matrix Z = d.X;
    for (std::size_t i = 0; i < Z.rows; ++i) {
        double* r = Z.row(i);
        for (std::size_t j = 0; j < Z.cols; ++j) r[j] *= d.y[i];
    }
    return Z;
}

Dataset sample_diagonal(const ModelConfig& cfg) {
    const SpectralMeasure m = measure_for(cfg);
    const std::size_t n = cfg.n, p = m.size();
    Dataset d;
    d.lambda = lambdas_of(m);
    d.theta_star = rebuild_theta(m, cfg.rho);
    d.X = Matrix(n, p);
    fill_noise(d.X, d.lambda, substream(cfg.seed, kX), cfg.rademacher_design);
    d.y.assign(n, 1.0);
    const std::uint64_t ky = substream(cfg.seed, kY);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const double* r = d.X.row(static_cast<std::size_t>(i));
        double t = 0.0;
        for (std::size_t j = 0; j < p; ++j) t += r[j] * d.theta_star[j];
        d.y[i] = uniform_at(ky, static_cast<std::uint64_t>(i)) < cfg.link(t) ? 1.0 : -1.0;
    }
    return d;
}

Dataset sample_gmm(const ModelConfig& cfg) {
    if (!(cfg.upsilon >= 0.0 && cfg.upsilon <= 1.0)) throw ConfigError("upsilon must lie in [0,1]");
    const SpectralMeasure m = measure_for(cfg);
    const std::size_t n = cfg.n, p = m.size(), ell = m.spike_count();
    Dataset d;
    d.lambda = lambdas_of(m);
    d.theta_star = rebuild_theta(m, cfg.rho);
    d.X = Matrix(n, p);
    fill_noise(d.X, d.lambda, substream(cfg.seed, kX), cfg.rademacher_design);
    const std::uint64_t ky = substream(cfg.seed, kY), kl = substream(cfg.seed, kLatent);
    const double rp = std::sqrt(static_cast<double>(p));
    d.y.assign(n, 1.0);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double yi = uniform_at(ky, i) < cfg.upsilon ? 1.0 : -1.0;
        d.y[i] = yi;
        double* r = d.X.row(i);
        for (std::size_t j = 0; j < p; ++j) r[j] += yi * d.theta_star[j];
        for (std::size_t k = 0; k < ell; ++k) {
            std::uint64_t c = i * ell + k;
            double mk = cfg.latent == LatentLaw::rademacher ? rademacher_at(kl, c) : normal_at(kl, c);
            for (std::size_t j = 0; j < p; ++j) r[j] += mk * m.atoms()[j].spikes[k] / rp;
        }
    }
    return d;
}

Dataset sample_misspecified(const ModelConfig& cfg) {
    const SpectralMeasure m = measure_for(cfg);
    const std::size_t n = cfg.n, p = m.size();
    const std::size_t qh = static_cast<std::size_t>(std::round(cfg.phi * static_cast<double>(n)));
    Dataset d;
    d.lambda = lambdas_of(m);
    d.theta_star = rebuild_theta(m, cfg.rho);
    d.X = Matrix(n, p);
    fill_noise(d.X, d.lambda, substream(cfg.seed, kX), cfg.rademacher_design);

    Vec theta_z(qh);
    const std::uint64_t kt = substream(cfg.seed, kHiddenTheta);
    double ss = 0.0;
    for (std::size_t j = 0; j < qh; ++j) {
        theta_z[j] = normal_at(kt, j);
        ss += theta_z[j] * theta_z[j];
    }
    for (double& v : theta_z) v *= ss > 0.0 ? cfg.gamma / std::sqrt(ss) : 0.0;

    const std::uint64_t ky = substream(cfg.seed, kY), kh = substream(cfg.seed, kHidden);
    d.y.assign(n, 1.0);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double* r = d.X.row(i);
        double t = 0.0;
        for (std::size_t j = 0; j < p; ++j) t += r[j] * d.theta_star[j];
        for (std::size_t j = 0; j < qh; ++j) t += normal_at(kh, i * qh + j) * theta_z[j];
        d.y[i] = uniform_at(ky, i) < cfg.link(t) ? 1.0 : -1.0;
    }
    return d;
}

Dataset sample(const ModelConfig& cfg) {
    switch (cfg.variant) {
        case Variant::diagonal: return sample_diagonal(cfg);
        case Variant::gmm: return sample_gmm(cfg);
        case Variant::misspecified: return sample_misspecified(cfg);
    }
    throw ConfigError("unknown variant");
}

Dataset sample_test(const ModelConfig& cfg, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw ConfigError("test sample size must be positive");
    ModelConfig c = cfg;
    c.measure = cfg.resolved_measure();
    const std::size_t p = c.measure.size();
    c.n = m;
    c.psi = static_cast<double>(p) / static_cast<double>(m);
    c.seed = seed;
    return sample(c);
}

Vec theta_star_of(const SpectralMeasure& m, double rho) { return rebuild_theta(m, rho); }

double compact_odd(double t, double a) {
    if (std::abs(t) >= a) return 0.0;
    double u = 1.0 - t * t / (a * a);
    return t * u * u * u;
}

Activation identity_activation() { return {"identity", [](double t) { return t; }, Hermite{0.0, 1.0, 0.0}}; }

Activation cube_activation() {
    return {"cube", [](double t) { return t * t * t; }, Hermite{0.0, 3.0, std::sqrt(6.0)}};
}

Activation compact_activation(double a) {
    return {"compact", [a](double t) { return compact_odd(t, a); }, std::nullopt};
}

Activation activation_by_name(const std::string& name) {
    if (name == "identity") return identity_activation();
    if (name == "cube") return cube_activation();
    if (name == "compact") return compact_activation();
    throw ConfigError("unknown activation: " + name);
}

Hermite hermite_calibrate(const std::function<double(double)>& sigma, int nodes) {
    const Rule& gh = gauss_hermite(nodes);
    double e0 = 0.0, e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < gh.x.size(); ++i) {
        double s = sigma(gh.x[i]);
        e0 += gh.w[i] * s;
        e1 += gh.w[i] * gh.x[i] * s;
        e2 += gh.w[i] * s * s;
    }
    double rad = e2 - e0 * e0 - e1 * e1;
    if (rad < -1e-10) throw NumericalError("hermite calibration: negative radicand " + std::to_string(rad));
    return {e0, e1, std::sqrt(std::max(rad, 0.0))};
}

FeaturePair make_feature_pair(const Dataset& d, std::size_t dfeat, const Activation& sigma,
                              std::uint64_t seed, int nodes) {
    if (dfeat < 1) throw ConfigError("feature count d must be >= 1");
    const std::size_t n = d.n(), p = d.p();
    FeaturePair fp;
    Hermite h = sigma.exact ? *sigma.exact : hermite_calibrate(sigma.fn, nodes);
    fp.mu0 = h.mu0;
    fp.mu1 = h.mu1;
    fp.mu2 = h.mu2;
    fp.F = Matrix(p, dfeat);
    const std::uint64_t kf = substream(seed, kF), kz = substream(seed, kNoise);
    const double sc = 1.0 / std::sqrt(static_cast<double>(p));
    for (std::size_t i = 0; i < p * dfeat; ++i) fp.F.data[i] = sc * normal_at(kf, i);
    fp.A = Matrix(n, dfeat);
    fp.B = Matrix(n, dfeat);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        Vec u(dfeat, 0.0);
        const double* x = d.X.row(i);
        for (std::size_t k = 0; k < p; ++k) {
            const double* f = fp.F.row(k);
            for (std::size_t j = 0; j < dfeat; ++j) u[j] += x[k] * f[j];
        }
        double* a = fp.A.row(i);
        double* b = fp.B.row(i);
        for (std::size_t j = 0; j < dfeat; ++j) {
            a[j] = sigma(u[j]);
            double z = fp.mu2 != 0.0 ? normal_at(kz, i * dfeat + j) : 0.0;
            b[j] = fp.mu0 + fp.mu1 * u[j] + fp.mu2 * z;
        }
    }
    return fp;
}

Dataset with_features(const Dataset& d, const Matrix& features) {
    Dataset out;
    out.X = features;
    out.y = d.y;
    out.lambda.assign(features.cols, 1.0);
    return out;
}

void write_csv(const Dataset& d, std::ostream& os) {
    os << "y";
    for (std::size_t j = 0; j < d.p(); ++j) os << ",x" << (j + 1);
    os << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < d.n(); ++i) {
        os << (d.y[i] > 0 ? "1" : "-1");
        const double* r = d.X.row(i);
        for (std::size_t j = 0; j < d.p(); ++j) os << ',' << r[j];
        os << '\n';
    }
}

}  // namespace hdm
