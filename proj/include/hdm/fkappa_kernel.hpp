#pragma once

// Per-sample contribution to F^2 and its c-gradient, shared by the threaded
// and reference evaluators.

#include <array>

#include "hdm/fkappa.hpp"
#include "hdm/gauss.hpp"

namespace hdm::detail {

inline constexpr std::size_t kMaxDim = 10;

// acc[0] += F^2 contribution, acc[1 + k] += d/dc_k of it.
inline void fk_sample(const MCCloud& cl, double kappa, const Vec& c, std::size_t j,
                      std::array<double, kMaxDim + 1>& acc) {
    const bool raw = cl.opt.mode == FMode::raw;
    switch (cl.kind) {
        case CloudKind::glm:
        case CloudKind::misspec: {
            if (raw) {
                const double yz = cl.y[j] * cl.z1[j];
                double r = kappa - c[0] * yz - c[1] * cl.z2[j];
                if (r > 0) {
                    acc[0] += r * r;
                    acc[1] -= 2 * r * yz;
                    acc[2] -= 2 * r * cl.z2[j];
                }
            } else {
                const double z = cl.z1[j], w = cl.py[j];
                const PosPart qp = pos_part_moments(kappa - c[0] * z, c[1]);
                const PosPart qm = pos_part_moments(kappa + c[0] * z, c[1]);
                acc[0] += w * qp.m2 + (1 - w) * qm.m2;
                acc[1] -= 2 * z * (w * qp.m1 - (1 - w) * qm.m1);
                acc[2] += 2 * c[1] * (w * qp.m0 + (1 - w) * qm.m0);
            }
            break;
        }
        case CloudKind::gmm: {
            if (raw) {
                double r = kappa - c[0] - c[1] * cl.z2[j];
                if (r > 0) {
                    acc[0] += r * r;
                    acc[1] -= 2 * r;
                    acc[2] -= 2 * r * cl.z2[j];
                }
            } else {
                PosPart q = pos_part_moments(kappa - c[0], c[1]);
                acc[0] += q.m2;
                acc[1] -= 2 * q.m1;
                acc[2] += 2 * c[1] * q.m0;
            }
            break;
        }
        case CloudKind::rank: {
            const std::size_t L = cl.opt.latents;
            const double* mrow = cl.M.row(j);
            double a = kappa - c[0];
            for (std::size_t k = 0; k < L; ++k) a -= c[2 + k] * mrow[k];
            double d1, d2;
            if (raw) {
                double r = a - c[1] * cl.z2[j];
                if (r <= 0) return;
                acc[0] += r * r;
                d1 = 2 * r;
                d2 = -2 * r * cl.z2[j];
            } else {
                PosPart q = pos_part_moments(a, c[1]);
                acc[0] += q.m2;
                d1 = 2 * q.m1;
                d2 = 2 * c[1] * q.m0;
            }
            acc[1] -= d1;
            acc[2] += d2;
            for (std::size_t k = 0; k < L; ++k) acc[3 + k] -= d1 * mrow[k];
            break;
        }
    }
}

inline FEval fk_finish(const std::array<double, kMaxDim + 1>& acc, std::size_t m, std::size_t dim) {
    FEval out;
    out.grad.assign(dim, 0.0);
    double f2 = acc[0] / static_cast<double>(m);
    if (f2 <= 0.0) return out;
    out.value = std::sqrt(f2);
    for (std::size_t k = 0; k < dim; ++k) out.grad[k] = acc[1 + k] / static_cast<double>(m) / (2 * out.value);
    return out;
}

}  // namespace hdm::detail
