#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "hdm/common.hpp"
#include "hdm/fkappa.hpp"
#include "hdm/spectra.hpp"

namespace hdm {

struct SolveOptions {
    double q = 1.0;
    double tol = 1e-4;           // on the scaled residuals
    int max_iter = 400;
    int starts = 5;
    std::uint64_t seed = 7;
    double damping = 1.0;        // 1 = plain fixed-point step
    bool quadrature = false;     // force the generic G-quadrature route at q = 1
    std::optional<Vec> init;     // overrides the heuristic first start
};

struct SystemSolution {
    Vec c;              // (c1, c2[, c3..])
    double s = 0.0;
    Vec residuals;      // scaled by (c2 v 1)^-1, (c2 v 1)^-2, (c2 v 1)^-1[, latents (c2 v 1)^-1]
    double kappa = 0.0;
    double psi = 0.0;
    int iterations = 0;
    bool converged = false;
    double start_spread = 0.0;   // max distance between converged starts in (c, s)
    std::string method;          // "fixed-point" or "nelder-mead"

    double max_residual() const;
};

// Solver hit a degenerate point (c2 -> 0 or s -> 0, or no admissible s).
struct DomainError : NumericalError {
    using NumericalError::NumericalError;
};
// No start converged; `best` holds the smallest-residual attempt.
struct NonConvergence : NumericalError {
    NonConvergence(const std::string& what, SystemSolution best) : NumericalError(what), best(std::move(best)) {}
    SystemSolution best;
};

// Scaled residuals of the system at (c, s), used for solver output and for
// re-checking a solution on an independent cloud.
Vec system_residuals(const SpectralMeasure& mu, double psi, double kappa, const MCCloud& cloud, const Vec& c,
                     double s, const SolveOptions& opt = {});

// glm and misspec clouds: the l1/lq margin system in (c1, c2, s).
// gmm and rank clouds: the mixture system with Theta = rho wbar / sqrt(lambda)
// and latent directions from the measure's spike columns.
SystemSolution solve_system(const SpectralMeasure& mu, double psi, double kappa, const MCCloud& cloud,
                            const SolveOptions& opt = {});

double T_value(double psi, double kappa, const SystemSolution& sol, const MCCloud& cloud);

struct AsymptoticPrediction {
    double kappa_star = 0.0;
    double err_star = 0.5;
    double bayes_err = 0.5;
    double angle = 0.0;
    double classical_bound = 0.0;  // sqrt(psi) / kappa_star
    double psi_threshold = 0.0;    // separability threshold when computable
    bool separable = false;
    SystemSolution solution;
};

// kappa* = inf{kappa >= 0 : T(psi, kappa) = 0} by bracketing and bisection
// to `kappa_tol`. For q > 1 the value is the limit of p^(1/q - 1/2) kappa_{n,lq}.
AsymptoticPrediction kappa_star(const SpectralMeasure& mu, double psi, const MCCloud& cloud,
                                const SolveOptions& opt = {}, double kappa_tol = 1e-4);

// P(c1 Y Z1 + c2 Z2 < 0) by quadrature over Z1.
double err_star(double c1, double c2, double rho, const LinkFunction& link);
double err_star(const SystemSolution& sol, const MCCloud& cloud, const SpectralMeasure& mu);
// P(Y Z1 < 0).
double bayes_error(double rho, const LinkFunction& link);

struct ZetaOmega {
    double zeta, omega;
};
ZetaOmega zeta_omega(const SpectralMeasure& mu);

struct PsiDown {
    double psi_down, psi_star, psi_plus, psi_minus;
};
// Squared first partials stand in for the squares in the branch formulas.
PsiDown psi_down(double kappa, const SpectralMeasure& mu, const MCCloud& cloud);

// psi, rho, kappa, c1, c2, s, residual, err_star, bayes, angle
void write_solution_header(std::ostream& os);
void write_solution_row(std::ostream& os, double rho, const AsymptoticPrediction& pred);

}  // namespace hdm
