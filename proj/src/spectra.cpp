#include "hdm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "hdm/gauss.hpp"
#include "hdm/rng.hpp"

namespace hdm {

LinkFunction LinkFunction::logistic() { return LinkFunction{}; }

LinkFunction LinkFunction::pure_noise() {
    LinkFunction f;
    f.kind_ = LinkKind::pure_noise;
    return f;
}

LinkFunction LinkFunction::tabulated(std::vector<double> t, std::vector<double> f) {
    if (t.size() != f.size() || t.size() < 2) throw ConfigError("tabulated link needs >= 2 matching points");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(f[i] >= 0.0 && f[i] <= 1.0)) throw ConfigError("tabulated link value outside [0,1]");
        if (i > 0 && !(t[i] > t[i - 1])) throw ConfigError("tabulated link grid must be strictly increasing");
        if (i > 0 && f[i] < f[i - 1]) throw ConfigError("tabulated link must be nondecreasing");
    }
    LinkFunction out;
    out.kind_ = LinkKind::tabulated;
    out.t_ = std::move(t);
    out.f_ = std::move(f);
    return out;
}

double LinkFunction::raw(double t) const {
    switch (kind_) {
        case LinkKind::logistic:
            return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
        case LinkKind::pure_noise:
            return 0.5;
        case LinkKind::tabulated: {
            if (t <= t_.front()) return f_.front();
            if (t >= t_.back()) return f_.back();
            auto it = std::upper_bound(t_.begin(), t_.end(), t);
            std::size_t k = static_cast<std::size_t>(it - t_.begin());
            double w = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
            return (1.0 - w) * f_[k - 1] + w * f_[k];
        }
    }
    return 0.5;
}

double LinkFunction::operator()(double t) const {
    if (gamma_ <= 0.0 || kind_ == LinkKind::pure_noise) return raw(t);
    const Rule& gh = gauss_hermite(64);
    double s = 0.0;
    for (std::size_t i = 0; i < gh.x.size(); ++i) s += gh.w[i] * raw(t + gamma_ * gh.x[i]);
    return s;
}

LinkFunction LinkFunction::smoothed(double gamma) const {
    LinkFunction out = *this;
    // Smoothing twice by gamma1 then gamma2 equals smoothing by their root sum of squares.
    out.gamma_ = std::sqrt(gamma_ * gamma_ + gamma * gamma);
    return out;
}

std::string LinkFunction::name() const {
    switch (kind_) {
        case LinkKind::logistic: return "logistic";
        case LinkKind::pure_noise: return "pure-noise";
        case LinkKind::tabulated: return "tabulated";
    }
    return "?";
}

bool LinkFunction::check_shape(double lo, double hi, int points) const {
    double prev = -1.0;
    for (int i = 0; i < points; ++i) {
        double v = (*this)(lo + (hi - lo) * i / (points - 1));
        if (!(v >= 0.0 && v <= 1.0) || v < prev - 1e-15) return false;
        prev = v;
    }
    return true;
}

SpectralMeasure::SpectralMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw ConfigError("invalid measure: empty atom list");
    std::size_t k = atoms_.front().spikes.size();
    for (const Atom& a : atoms_)
        if (a.spikes.size() != k) throw ConfigError("invalid measure: ragged spike columns");
}

double SpectralMeasure::second_moment() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.mass * a.wbar * a.wbar;
    return s;
}

double SpectralMeasure::abs_moment() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.mass * std::abs(a.wbar);
    return s;
}

// Format:
//   measure <atom count> <spike count>
//   <lambda> <wbar> <mass> [spike ...]     (one line per atom)
void SpectralMeasure::write(std::ostream& os) const {
    os << "measure " << atoms_.size() << ' ' << spike_count() << '\n';
    os << std::setprecision(17);
    for (const Atom& a : atoms_) {
        os << a.lambda << ' ' << a.wbar << ' ' << a.mass;
        for (double s : a.spikes) os << ' ' << s;
        os << '\n';
    }
}

SpectralMeasure SpectralMeasure::read(std::istream& is) {
    std::string tag;
    std::size_t count = 0, spikes = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream hs(line);
        if (!(hs >> tag >> count) || tag != "measure") throw ConfigError("measure header expected");
        hs >> spikes;
        break;
    }
    std::vector<Atom> atoms;
    atoms.reserve(count);
    while (atoms.size() < count && std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Atom a;
        if (!(ls >> a.lambda >> a.wbar >> a.mass)) throw ConfigError("bad atom line: " + line);
        a.spikes.resize(spikes);
        for (double& s : a.spikes)
            if (!(ls >> s)) throw ConfigError("missing spike column: " + line);
        atoms.push_back(std::move(a));
    }
    if (atoms.size() != count) throw ConfigError("measure truncated");
    return SpectralMeasure(std::move(atoms));
}

bool SpectralMeasure::operator==(const SpectralMeasure& o) const {
    if (atoms_.size() != o.atoms_.size()) return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const Atom &a = atoms_[i], &b = o.atoms_[i];
        if (a.lambda != b.lambda || a.wbar != b.wbar || a.mass != b.mass || a.spikes != b.spikes) return false;
    }
    return true;
}

SpectralMeasure standard_gaussian_measure(std::size_t p, std::uint64_t seed) {
    if (p < 1) throw ConfigError("measure needs p >= 1");
    const std::uint64_t key = substream(seed, 'W');
    std::vector<Atom> atoms(p);
    double ss = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        atoms[i].wbar = normal_at(key, i);
        ss += atoms[i].wbar * atoms[i].wbar;
    }
    const double scale = std::sqrt(static_cast<double>(p) / ss);
    for (Atom& a : atoms) {
        a.wbar *= scale;
        a.mass = 1.0 / static_cast<double>(p);
    }
    return SpectralMeasure(std::move(atoms));
}

SpectralMeasure sign_measure(std::size_t p) {
    std::vector<Atom> atoms(p);
    for (std::size_t i = 0; i < p; ++i) {
        atoms[i].wbar = (i % 2 == 0) ? 1.0 : -1.0;
        atoms[i].mass = 1.0 / static_cast<double>(p);
    }
    return SpectralMeasure(std::move(atoms));
}

SpectralMeasure with_gaussian_spikes(const SpectralMeasure& m, std::size_t count, double scale,
                                     std::uint64_t seed) {
    std::vector<Atom> atoms = m.atoms();
    const std::uint64_t key = substream(seed, 'S');
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t k = 0; k < count; ++k)
            atoms[i].spikes.push_back(scale * normal_at(key, i * count + k));
    return SpectralMeasure(std::move(atoms));
}

std::size_t ModelConfig::p() const {
    double v = std::round(psi * static_cast<double>(n));
    return v < 1.0 ? 0 : static_cast<std::size_t>(v);
}

SpectralMeasure ModelConfig::resolved_measure() const {
    if (measure.size() > 0) return measure;
    return standard_gaussian_measure(std::max<std::size_t>(p(), 1), substream(seed, 'M'));
}

std::vector<std::string> ValidationReport::violated() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.ok) out.push_back(c.name);
    return out;
}

ValidationReport validate(const SpectralMeasure& m, const AssumptionBounds& b) {
    if (m.size() == 0) throw ConfigError("invalid measure: empty atom list");
    ValidationReport r;
    double lmin = m.atoms().front().lambda, lmax = lmin, wmax = 0.0, mass = 0.0;
    bool mass_ok = true;
    for (const Atom& a : m.atoms()) {
        lmin = std::min(lmin, a.lambda);
        lmax = std::max(lmax, a.lambda);
        wmax = std::max(wmax, std::abs(a.wbar));
        mass += a.mass;
        mass_ok = mass_ok && a.mass >= 0.0;
    }
    auto add = [&r](std::string name, double measured, double bound, bool ok) {
        r.checks.push_back({std::move(name), measured, bound, ok});
        r.pass = r.pass && ok;
    };
    add("spectrum lower bound (lambda >= c)", lmin, b.c, lmin >= b.c);
    add("spectrum upper bound (lambda <= 1/c)", lmax, 1.0 / b.c, lmax <= 1.0 / b.c);
    add("masses nonnegative and sum to one", mass, 1.0, mass_ok && std::abs(mass - 1.0) <= b.moment_tol);
    double m2 = m.second_moment();
    add("second moment of wbar equals one", m2, 1.0, std::abs(m2 - 1.0) <= b.moment_tol);
    add("max |wbar| bounded", wmax, b.c_prime, wmax <= b.c_prime);
    double m1 = m.abs_moment();
    add("mean |wbar| bounded below", m1, b.c_second, m1 >= b.c_second);
    return r;
}

ValidationReport validate(const ModelConfig& cfg, const AssumptionBounds& b) {
    ValidationReport r = validate(cfg.resolved_measure(), b);
    auto add = [&r](std::string name, double measured, double bound, bool ok) {
        r.checks.push_back({std::move(name), measured, bound, ok});
        r.pass = r.pass && ok;
    };
    add("psi positive", cfg.psi, 0.0, cfg.psi > 0.0);
    add("p = round(psi n) >= 1", static_cast<double>(cfg.p()), 1.0, cfg.p() >= 1);
    add("rho nonnegative", cfg.rho, 0.0, cfg.rho >= 0.0);
    add("link in [0,1] and nondecreasing", cfg.link.check_shape() ? 1.0 : 0.0, 1.0, cfg.link.check_shape());
    if (cfg.variant == Variant::gmm)
        add("upsilon in (0,1)", cfg.upsilon, 0.5, cfg.upsilon > 0.0 && cfg.upsilon < 1.0);
    if (cfg.variant == Variant::misspecified)
        add("gamma, phi nonnegative", std::min(cfg.gamma, cfg.phi), 0.0, cfg.gamma >= 0.0 && cfg.phi >= 0.0);
    return r;
}

}  // namespace hdm
