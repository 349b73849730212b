#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace hdm {

inline double npdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double ncdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
// Inverse of ncdf on (0, 1), accurate to a few ulps.
double ninv(double u);

struct Rule {
    std::vector<double> x, w;
};

// Nodes and weights for E[g(Z)], Z ~ N(0,1); weights sum to one.
const Rule& gauss_hermite(int n);
// Nodes and weights on [-1, 1].
const Rule& gauss_legendre(int n);

// E[g(Z)] for Z ~ N(0,1) by Gauss-Legendre panels on [-L, L]. Kinks of g
// should be passed as breakpoints so that each panel sees a smooth integrand.
double gauss_expect(const std::function<double(double)>& g, std::vector<double> breaks = {},
                    double L = 12.0, double max_width = 1.0, int nodes = 12);

// Moments of (a - cZ)_+ for Z ~ N(0,1), c >= 0.
struct PosPart {
    double m0;  // P(a - cZ > 0)
    double m1;  // E[(a - cZ)_+]
    double m2;  // E[(a - cZ)_+^2]
    double mz;  // E[(a - cZ)_+ Z] = -c P(...)
};
PosPart pos_part_moments(double a, double c);

// Moments of the soft threshold prox_tau(G + m), G ~ N(0,1).
struct ProxMoments {
    double mean;  // E prox
    double sq;    // E prox^2
    double abs;   // E |prox|
};
ProxMoments soft_threshold_moments(double m, double tau);

}  // namespace hdm
