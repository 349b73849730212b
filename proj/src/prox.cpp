#include "hdm/prox.hpp"

#include <cmath>

#include "hdm/common.hpp"

namespace hdm {

double prox_l1(double t, double lam) {
    double a = std::abs(t) - lam;
    if (a <= 0.0) return 0.0;
    return t > 0 ? a : -a;
}

double prox_lq(double t, double lam, double q) {
    if (!(q >= 1.0 && q <= 2.0)) throw ConfigError("prox_lq needs q in [1, 2]");
    if (q == 1.0) return prox_l1(t, lam);
    if (lam <= 0.0 || t == 0.0) return lam <= 0.0 ? t : 0.0;
    if (q == 2.0) return t / (1.0 + 2.0 * lam);
    const double at = std::abs(t), lq = lam * q;
    auto g = [&](double s) { return s + lq * std::pow(s, q - 1.0) - at; };
    // Root lies in (0, |t|); the power term alone gives an upper estimate.
    double lo = 0.0, hi = at;
    double s = std::min(at, std::pow(at / lq, 1.0 / (q - 1.0)));
    if (!(s > 1e-300)) return 0.0;
    for (int it = 0; it < 200; ++it) {
        double gs = g(s);
        if (gs == 0.0) break;
        if (gs > 0) hi = s; else lo = s;
        double dg = 1.0 + lq * (q - 1.0) * std::pow(s, q - 2.0);
        double next = s - gs / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-15 * s || hi - lo <= 1e-15 * hi) {
            s = next;
            return t > 0 ? s : -s;
        }
        s = next;
    }
    if (std::abs(g(s)) <= 1e-12 * (1.0 + at)) return t > 0 ? s : -s;
    throw NumericalError("prox_lq did not converge");
}

}  // namespace hdm
