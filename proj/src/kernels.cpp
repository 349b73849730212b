#include "hdm/kernels.hpp"

#include <algorithm>

namespace hdm {

void zt_times(const Matrix& Z, const Vec& eta, Vec& g) {
    const std::size_t n = Z.rows, p = Z.cols;
    g.assign(p, 0.0);
    constexpr std::size_t kCols = 256;
    const long long nb = static_cast<long long>((p + kCols - 1) / kCols);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < nb; ++b) {
        const std::size_t j0 = static_cast<std::size_t>(b) * kCols, j1 = std::min(p, j0 + kCols);
        double* gj = g.data();
        for (std::size_t i = 0; i < n; ++i) {
            const double e = eta[i];
            if (e == 0.0) continue;
            const double* r = Z.row(i);
            for (std::size_t j = j0; j < j1; ++j) gj[j] += e * r[j];
        }
    }
}

void z_times(const Matrix& Z, const Vec& theta, Vec& out) {
    const std::size_t n = Z.rows, p = Z.cols;
    out.assign(n, 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const double* r = Z.row(static_cast<std::size_t>(i));
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += r[j] * theta[j];
        out[static_cast<std::size_t>(i)] = s;
    }
}

}  // namespace hdm
