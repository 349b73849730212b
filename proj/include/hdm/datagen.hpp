#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "hdm/common.hpp"
#include "hdm/spectra.hpp"

namespace hdm {

struct Dataset {
    Matrix X;          // n x p
    Vec y;             // entries +-1
    Vec theta_star;    // may be empty for feature-transformed data
    Vec lambda;        // diagonal covariance of the noise part, length p

    std::size_t n() const { return X.rows; }
    std::size_t p() const { return X.cols; }
};

// Z = y o X, the signed design used by margin solvers and boosting.
Matrix signed_design(const Dataset& d);

// x ~ N(0, Lambda) (or sqrt(lambda) * Rademacher), y = +1 w.p. f(<theta*, x>).
// The measure must have exactly p atoms; theta* is rebuilt from
// wbar_i = sqrt(p) sqrt(lambda_i) theta*_i / rho with theta*' Lambda theta* = rho^2.
Dataset sample_diagonal(const ModelConfig& cfg);

// Mixture: y = +1 w.p. upsilon, x = y theta* + sum_k m_k theta~_k + N(0, Lambda).
// Latent directions come from the measure's spike columns divided by sqrt(p).
Dataset sample_gmm(const ModelConfig& cfg);

// Labels from f(x' theta_x + z' theta_z) with a hidden N(0, I) block of
// round(phi n) columns and |theta_z| = gamma; only x is returned.
Dataset sample_misspecified(const ModelConfig& cfg);

// Dispatch on cfg.variant.
Dataset sample(const ModelConfig& cfg);

// m fresh points from the same model (same p, measure and theta*), drawn
// from the sub-stream `seed`.
Dataset sample_test(const ModelConfig& cfg, std::size_t m, std::uint64_t seed);

// theta* implied by the measure: theta*_i proportional to wbar_i / sqrt(lambda_i),
// scaled so that theta*' Lambda theta* = rho^2.
Vec theta_star_of(const SpectralMeasure& m, double rho);

struct Hermite {
    double mu0, mu1, mu2;
};

// Scalar activation. `exact` carries Hermite coefficients known in closed
// form (identity, cube); make_feature_pair prefers them over quadrature.
struct Activation {
    std::string name;
    std::function<double(double)> fn;
    std::optional<Hermite> exact;

    double operator()(double t) const { return fn(t); }
};

// t (1 - t^2/a^2)^3 on |t| <= a, zero outside: odd, compactly supported,
// bounded derivatives up to third order.
double compact_odd(double t, double a = 3.0);

Activation identity_activation();
Activation cube_activation();
Activation compact_activation(double a = 3.0);
// "identity", "cube", "compact" (a = 3); throws ConfigError otherwise.
Activation activation_by_name(const std::string& name);

Hermite hermite_calibrate(const std::function<double(double)>& sigma, int nodes = 128);

struct FeaturePair {
    Matrix A, B, F;
    double mu0, mu1, mu2;
};

// A = sigma(X F), B = mu0 + mu1 X F + mu2 Zstd, F_ij ~ N(0, 1/p).
FeaturePair make_feature_pair(const Dataset& d, std::size_t dfeat, const Activation& sigma,
                              std::uint64_t seed, int nodes = 128);

// Wraps a feature matrix with the labels of d for margin solvers.
Dataset with_features(const Dataset& d, const Matrix& features);

void write_csv(const Dataset& d, std::ostream& os);

}  // namespace hdm
