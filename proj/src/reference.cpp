// Serial reference kernels. Tests compare the threaded versions against these.
#include "hdm/fkappa_kernel.hpp"
#include "hdm/kernels.hpp"

namespace hdm {

namespace reference {

FEval f_kappa(const MCCloud& cloud, double kappa, const Vec& c) {
    if (c.size() != cloud.dim()) throw ConfigError("f_kappa: c has wrong length");
    std::array<double, detail::kMaxDim + 1> acc{};
    for (std::size_t j = 0; j < cloud.m; ++j) detail::fk_sample(cloud, kappa, c, j, acc);
    return detail::fk_finish(acc, cloud.m, cloud.dim());
}

void zt_times(const Matrix& Z, const Vec& eta, Vec& g) {
    g.assign(Z.cols, 0.0);
    for (std::size_t i = 0; i < Z.rows; ++i)
        for (std::size_t j = 0; j < Z.cols; ++j) g[j] += eta[i] * Z(i, j);
}

}  // namespace reference
}  // namespace hdm
