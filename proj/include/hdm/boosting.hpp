#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>

#include "hdm/common.hpp"
#include "hdm/datagen.hpp"

namespace hdm {

// adaptive:  alpha_t = beta * gamma_t with beta = 1 unless overridden.
// shrinkage: the same rule with a small certified beta.
// discrete:  alpha_t = 0.5 log((1 - err)/err); only for +-1 designs and q = 1.
enum class StepRule { adaptive, shrinkage, discrete };

struct BoostOptions {
    double q = 1.0;
    StepRule rule = StepRule::adaptive;
    double beta = 1.0;
    long T = 100;
    double M = 0.0;              // entry bound for the potential check; 0 = realized max |Z_ij|
    bool stop_at_interp = false;
    long trace_every = 1;        // keep every k-th step in the traces (the last step is always kept)
};

struct BoostState {
    Vec theta, eta, margins;     // margins = Z theta
    long t = 0;
    double q = 1.0, beta = 1.0, M = 0.0;
    std::vector<long> trace_t;
    Vec gamma_trace;             // gamma_t = |Z' eta_t|_{q*} before step t+1
    std::vector<long> train_err_trace;
    Vec l1_trace;
    std::vector<long> active_trace;
    std::optional<long> interp_time;
    std::optional<std::size_t> active_at_interp;
    double min_gamma = 0.0;      // smallest gamma seen: an upper bound on the lq margin
    double step_sum = 0.0;       // sum of alpha_t, bounds |theta_T|_q
    double potential_slack = 0.0;  // max over steps of (Delta R - bound); <= 0 when the inequality holds

    // min_i (Z theta)_i / |theta|_q, or 0 for theta = 0.
    double normalized_margin() const;
};

BoostState boost_run(const Matrix& Z, const BoostOptions& opt);
BoostState boost_run(const Dataset& d, const BoostOptions& opt);

enum class BoundKind { zero_error, shrinkage };

struct Certificate {
    long T;
    double beta;
};

// zero_error: ceil(2 M^2/kappa^2 log(n e/eps)), beta = 1/M^2.
// shrinkage:  ceil(log(1.01 n e) 2 p^(2/q*) M^2 eps^-2 / kappa^2), beta = eps/(p^(2/q*) M^2).
// Throws NumericalError for kappa <= 0.
Certificate certified_T(std::size_t n, double M, double kappa, double eps, std::size_t p = 1, double q = 1.0,
                        BoundKind kind = BoundKind::shrinkage);

// n log(n)^2 * 12 psi / (eps^2 kappa*^2).
double asymptotic_T(double n, double psi, double kappa_star, double eps);

// Nonzero coordinates of theta; nullopt when the run never interpolated.
std::optional<std::size_t> active_features(const BoostState& s);
std::size_t active_features(const Vec& theta);

double max_abs(const Matrix& Z);
// Header "t,gamma,train_err,l1_norm,active_count" then one row per kept step.
void write_trace_csv(const BoostState& s, std::ostream& os);

}  // namespace hdm
