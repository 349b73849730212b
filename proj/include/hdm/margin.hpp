#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hdm/common.hpp"
#include "hdm/datagen.hpp"
#include "hdm/spectra.hpp"

namespace hdm {

enum class Separability { separable, non_separable };

struct MarginResult {
    double kappa = 0.0;         // max(0, optimal value)
    Vec theta;                  // |theta|_q = 1 when separable
    Vec eta;                    // dual weights on the simplex
    Separability status = Separability::non_separable;
    double dual_value = 0.0;    // |Z' eta|_{q*}
    double q = 1.0;
    int iterations = 0;
    long boost_steps = 0;
    bool certified = false;     // lq route: the certified step count was run in full

    bool separable() const { return status == Separability::separable; }
};

MarginResult max_margin_l1(const Dataset& d);
MarginResult max_margin_l1(const Matrix& Z);

struct Interpolant {
    bool feasible = false;
    Vec theta;
    double norm = 0.0;
};

// min |theta|_1 s.t. Z theta >= 1, from the dual LP
// max 1'eta s.t. -1 <= Z'eta <= 1, eta >= 0 (unbounded means infeasible).
Interpolant min_norm_interpolant_l1(const Dataset& d);
Interpolant min_norm_interpolant_l1(const Matrix& Z);

// min over the simplex of |Z' eta|_inf, solved directly as its own LP.
double dual_margin(const Dataset& d);
double dual_margin(const Matrix& Z);

struct LqOptions {
    double eps = 0.1;
    long max_T = 2000000;
    bool polish = true;
    int polish_iter = 5000;
};

// Shrinkage boosting in the lq geometry for the certified step count, with
// kappa_{n,l1} (a lower bound on kappa_{n,lq}) in the certificate. The polish
// runs accelerated projected gradient on the dual min |Z'eta|_{q*}^2 over the
// simplex and keeps whichever primal point attains the larger margin.
MarginResult max_margin_lq(const Dataset& d, double q, const LqOptions& opt = {});
MarginResult max_margin_lq(const Matrix& Z, double q, const LqOptions& opt = {});

// min over |theta|_1 <= sqrt(p) of p^-1/2 |(kappa - Z theta)_+|_2 by restarted
// FISTA. Stops once the value drops to tol or the Frank-Wolfe gap certifies it
// within 0.1%; the return value is the best iterate, an upper bound on xi.
double xi_value(const Dataset& d, double kappa, int max_iter = 10000, double tol = 1e-6);
double xi_value(const Matrix& Z, double kappa, int max_iter = 10000, double tol = 1e-6);

// Euclidean projections used by the first-order solvers.
void project_l1_ball(Vec& v, double radius);
void project_simplex(Vec& v);

// Misclassification rate of theta on a fresh draw of m_test points.
double generalization_error(const Vec& theta, const ModelConfig& cfg, std::size_t m_test, std::uint64_t seed);
// Gaussian designs: exact rate P(c1 Y Z1 + c2 Z2 < 0) (diagonal) or Phi(-<theta, theta*>/|theta|_Lambda) (gmm).
double generalization_error_exact(const Vec& theta, const ModelConfig& cfg);
// <theta, theta*>_Lambda / (|theta|_Lambda |theta*|_Lambda).
double empirical_angle(const Vec& theta, const Vec& theta_star, const Vec& lambda);
double empirical_angle(const Vec& theta, const Vec& theta_star, const SpectralMeasure& mu);

}  // namespace hdm
