#include "hdm/gauss.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

#include "hdm/common.hpp"

namespace hdm {

namespace {

// Golub-Welsch would need an eigensolver; Newton on the three-term
// recurrence with asymptotic starting points is enough here.
Rule build_hermite(int n) {
    // Physicists' Hermite nodes, then rescaled to the standard normal.
    std::vector<double> x(n), w(n);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
    }
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    double tot = 0.0;
    for (int i = 0; i < n; ++i) {
        r.x[i] = x[i] * std::numbers::sqrt2;
        r.w[i] = w[i] / std::sqrt(std::numbers::pi);
        tot += r.w[i];
    }
    for (double& v : r.w) v /= tot;
    return r;
}

Rule build_legendre(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

template <class Build>
const Rule& cached(std::map<int, Rule>& cache, std::mutex& mu, int n, Build build) {
    if (n < 1) throw std::invalid_argument("quadrature size must be positive");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build(n)).first;
    return it->second;
}

}  // namespace

const Rule& gauss_hermite(int n) {
    static std::map<int, Rule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, build_hermite);
}

const Rule& gauss_legendre(int n) {
    static std::map<int, Rule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, build_legendre);
}

double gauss_expect(const std::function<double(double)>& g, std::vector<double> breaks, double L,
                    double max_width, int nodes) {
    breaks.push_back(-L);
    breaks.push_back(L);
    std::erase_if(breaks, [L](double b) { return !(b >= -L && b <= L); });
    std::sort(breaks.begin(), breaks.end());
    const Rule& gl = gauss_legendre(nodes);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        double a = breaks[k], b = breaks[k + 1];
        if (b - a <= 0.0) continue;
        int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
        double h = (b - a) / pieces;
        for (int j = 0; j < pieces; ++j) {
            double lo = a + j * h, mid = lo + 0.5 * h;
            for (int i = 0; i < nodes; ++i) {
                double z = mid + 0.5 * h * gl.x[i];
                total += 0.5 * h * gl.w[i] * g(z) * npdf(z);
            }
        }
    }
    return total;
}

PosPart pos_part_moments(double a, double c) {
    c = std::abs(c);
    if (c < 1e-300) {
        double ap = a > 0 ? a : 0.0;
        return {a > 0 ? 1.0 : 0.0, ap, ap * ap, 0.0};
    }
    double r = a / c, P = ncdf(r), d = npdf(r);
    return {P, a * P + c * d, (a * a + c * c) * P + a * c * d, -c * P};
}

ProxMoments soft_threshold_moments(double m, double tau) {
    // Right tail E(X - tau)_+ and left tail E(-X - tau)_+ for X ~ N(m, 1).
    double a = m - tau, b = -m - tau;
    double Pa = ncdf(a), Pb = ncdf(b), da = npdf(a), db = npdf(b);
    double e1 = a * Pa + da, e2 = b * Pb + db;
    double s1 = (a * a + 1.0) * Pa + a * da, s2 = (b * b + 1.0) * Pb + b * db;
    return {e1 - e2, s1 + s2, e1 + e2};
}

double ninv(double u) {
    if (!(u > 0.0 && u < 1.0)) throw NumericalError("ninv: argument outside (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

}  // namespace hdm
