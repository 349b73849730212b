#pragma once

#include <cstdint>

#include "hdm/common.hpp"
#include "hdm/spectra.hpp"

namespace hdm {

// glm:     (Y, Z1, Z2) with P(Y = 1 | Z1) = f(rho Z1)
// gmm:     Z only; F depends on (kappa - c1 - c2 Z)
// rank:    latent vector M and noise Z; c = (c1, c2, c3..) = (mean, noise, latents)
// misspec: (Y, Z1, Z2, Z3) with P(Y = 1 | Z1, Z3) = f(rho Z1 + gamma Z3)
enum class CloudKind { glm, gmm, rank, misspec };

// conditional: the Gaussian noise coordinate is integrated in closed form and
// the label is averaged over its conditional law, leaving an average over Z1
// (and Z3). raw: plain Monte-Carlo average over the sampled (Y, Z1, Z2).
enum class FMode { conditional, raw };

struct CloudOptions {
    double gamma = 0.0;
    std::size_t latents = 0;
    LatentLaw law = LatentLaw::rademacher;
    FMode mode = FMode::conditional;
    bool stratified = true;  // Latin-hypercube draws for Z1 (and Z3); i.i.d. otherwise
};

struct MCCloud {
    CloudKind kind = CloudKind::glm;
    std::size_t m = 0;
    double rho = 1.0;
    LinkFunction link;
    std::uint64_t seed = 0;
    CloudOptions opt;
    Vec y, z1, z2, z3;
    Vec py;    // P(Y = +1 | Z1[, Z3]) per sample, for the conditional mode
    Matrix M;  // m x latents

    // Length of the c vector F expects.
    std::size_t dim() const { return kind == CloudKind::rank ? 2 + opt.latents : 2; }
    // Link of Y given Z1 alone (smoothed by the hidden term for misspec).
    LinkFunction observed_link() const;
};

MCCloud make_cloud(CloudKind kind, std::size_t m, double rho, const LinkFunction& link, std::uint64_t seed,
                   const CloudOptions& opt = {});

struct FEval {
    double value = 0.0;
    Vec grad;
};

FEval f_kappa(const MCCloud& cloud, double kappa, const Vec& c);

// sqrt(E (kappa - c1 - c2 Z)_+^2) and its partials, exact.
FEval f_kappa_gmm_closed(double kappa, double c1, double c2);

struct ThresholdResult {
    double psi_star;
    double argmin;
};
// min over c of F_0(c, 1)^2 by golden section on an expanding bracket.
ThresholdResult separability_threshold(const MCCloud& cloud);

// Max over coordinates of |grad - central difference|, relative to the
// largest finite-difference partial (floored at 1e-12).
double derivative_check(const MCCloud& cloud, double kappa, const Vec& c, double h = 1e-4);

namespace reference {
// Single-threaded evaluation in plain index order.
FEval f_kappa(const MCCloud& cloud, double kappa, const Vec& c);
}

}  // namespace hdm
