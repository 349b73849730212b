#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hdm/common.hpp"

namespace hdm {

enum class LinkKind { logistic, pure_noise, tabulated };

// Label link f: P(y = +1 | x) = f(<theta*, x>).
class LinkFunction {
public:
    static LinkFunction logistic();
    static LinkFunction pure_noise();
    // Linear interpolation on a strictly increasing grid, flat outside it.
    // Throws ConfigError unless values lie in [0,1] and are nondecreasing.
    static LinkFunction tabulated(std::vector<double> t, std::vector<double> f);

    double operator()(double t) const;
    // t -> E f(t + gamma Z): the link seen through a hidden Gaussian term.
    LinkFunction smoothed(double gamma) const;

    LinkKind kind() const { return kind_; }
    double smoothing() const { return gamma_; }
    std::string name() const;
    // Samples the link on a grid and checks range and monotonicity.
    bool check_shape(double lo = -20, double hi = 20, int points = 2001) const;

private:
    double raw(double t) const;
    LinkKind kind_ = LinkKind::logistic;
    std::vector<double> t_, f_;
    double gamma_ = 0.0;
};

struct Atom {
    double lambda = 1.0;
    double wbar = 0.0;
    double mass = 0.0;
    std::vector<double> spikes;  // sqrt(p) * latent direction coordinates
};

// Finite atomic law of (lambda, wbar[, spikes]); immutable once built.
class SpectralMeasure {
public:
    SpectralMeasure() = default;
    explicit SpectralMeasure(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    std::size_t spike_count() const { return atoms_.empty() ? 0 : atoms_.front().spikes.size(); }
    double second_moment() const;  // sum mass * wbar^2
    double abs_moment() const;     // sum mass * |wbar|

    void write(std::ostream& os) const;
    static SpectralMeasure read(std::istream& is);

    bool operator==(const SpectralMeasure& o) const;

private:
    std::vector<Atom> atoms_;
};

// p equal-mass atoms, lambda = 1, wbar Gaussian rescaled to unit second moment.
SpectralMeasure standard_gaussian_measure(std::size_t p, std::uint64_t seed);
// lambda = 1, wbar = +-1 alternating.
SpectralMeasure sign_measure(std::size_t p);
// Appends `count` latent spike columns with i.i.d. N(0, scale^2) coordinates.
SpectralMeasure with_gaussian_spikes(const SpectralMeasure& m, std::size_t count, double scale,
                                     std::uint64_t seed);

enum class Variant { diagonal, gmm, misspecified };
enum class LatentLaw { rademacher, gaussian };

struct ModelConfig {
    double psi = 1.0;
    double rho = 1.0;
    std::size_t n = 400;
    LinkFunction link = LinkFunction::logistic();
    SpectralMeasure measure;  // empty: standard Gaussian measure with p atoms
    Variant variant = Variant::diagonal;
    double upsilon = 0.5;     // gmm: P(y = +1)
    LatentLaw latent = LatentLaw::rademacher;
    double gamma = 0.0;       // misspecified: hidden signal strength
    double phi = 0.0;         // misspecified: hidden dimension ratio
    bool rademacher_design = false;
    std::uint64_t seed = 1;

    std::size_t p() const;
    // Measure actually used: the configured one or the Gaussian default.
    SpectralMeasure resolved_measure() const;
};

struct AssumptionBounds {
    double c = 1e-2;          // lambda in [c, 1/c]
    double c_prime = 50.0;    // max |wbar|
    double c_second = 1e-2;   // sum mass |wbar| lower bound
    double moment_tol = 1e-6;
};

struct AssumptionCheck {
    std::string name;
    double measured;
    double bound;
    bool ok;
};

struct ValidationReport {
    bool pass = true;
    std::vector<AssumptionCheck> checks;
    std::vector<std::string> violated() const;
};

ValidationReport validate(const SpectralMeasure& m, const AssumptionBounds& b = {});
ValidationReport validate(const ModelConfig& cfg, const AssumptionBounds& b = {});

}  // namespace hdm
