#include "hdm/fkappa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdm/fkappa_kernel.hpp"
#include "hdm/parallel.hpp"
#include "hdm/rng.hpp"

namespace hdm {

LinkFunction MCCloud::observed_link() const {
    return kind == CloudKind::misspec ? link.smoothed(opt.gamma) : link;
}

namespace {

// m standard normals; stratified draws put one point in each of m equal-mass
// cells, shuffled when they must be paired with another stratified column.
Vec gaussian_draws(std::size_t m, std::uint64_t key, bool stratified, bool shuffle) {
    Vec z(m);
    if (!stratified) {
        for (std::size_t j = 0; j < m; ++j) z[j] = normal_at(key, j);
        return z;
    }
    const std::uint64_t ks = substream(key, 'S'), kp = substream(key, 'P');
    for (std::size_t j = 0; j < m; ++j)
        z[j] = ninv((static_cast<double>(j) + uniform_at(ks, j)) / static_cast<double>(m));
    if (shuffle)
        for (std::size_t j = m; j-- > 1;)
            std::swap(z[j], z[static_cast<std::size_t>(uniform_at(kp, j) * static_cast<double>(j + 1))]);
    return z;
}

}  // namespace

MCCloud make_cloud(CloudKind kind, std::size_t m, double rho, const LinkFunction& link, std::uint64_t seed,
                   const CloudOptions& opt) {
    if (m < 100) throw ConfigError("cloud size must be >= 100");
    if (kind == CloudKind::rank && opt.latents + 2 > detail::kMaxDim)
        throw ConfigError("too many latent directions for the rank cloud");
    MCCloud cl;
    cl.kind = kind;
    cl.m = m;
    cl.rho = rho;
    cl.link = link;
    cl.seed = seed;
    cl.opt = opt;
    const std::uint64_t k1 = substream(seed, 1), k2 = substream(seed, 2), k3 = substream(seed, 3),
                        ku = substream(seed, 4), km = substream(seed, 5);
    cl.z2.resize(m);
    for (std::size_t j = 0; j < m; ++j) cl.z2[j] = normal_at(k2, j);
    if (kind == CloudKind::glm || kind == CloudKind::misspec) {
        cl.z1 = gaussian_draws(m, k1, opt.stratified, false);
        if (kind == CloudKind::misspec) cl.z3 = gaussian_draws(m, k3, opt.stratified, true);
        cl.y.resize(m);
        cl.py.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            double t = rho * cl.z1[j];
            if (kind == CloudKind::misspec) t += opt.gamma * cl.z3[j];
            cl.py[j] = link(t);
            cl.y[j] = uniform_at(ku, j) < cl.py[j] ? 1.0 : -1.0;
        }
    }
    if (kind == CloudKind::rank) {
        cl.M = Matrix(m, opt.latents);
        for (std::size_t i = 0; i < cl.M.data.size(); ++i)
            cl.M.data[i] = opt.law == LatentLaw::rademacher ? rademacher_at(km, i) : normal_at(km, i);
    }
    return cl;
}

FEval f_kappa(const MCCloud& cloud, double kappa, const Vec& c) {
    if (c.size() != cloud.dim()) throw ConfigError("f_kappa: c has wrong length");
    auto acc = block_sum<detail::kMaxDim + 1>(
        cloud.m, [&](std::size_t j, std::array<double, detail::kMaxDim + 1>& a) { detail::fk_sample(cloud, kappa, c, j, a); });
    return detail::fk_finish(acc, cloud.m, cloud.dim());
}

FEval f_kappa_gmm_closed(double kappa, double c1, double c2) {
    PosPart q = pos_part_moments(kappa - c1, c2);
    FEval out;
    out.grad.assign(2, 0.0);
    if (q.m2 <= 0.0) return out;
    out.value = std::sqrt(q.m2);
    out.grad[0] = -q.m1 / out.value;
    out.grad[1] = c2 * q.m0 / out.value;
    return out;
}

ThresholdResult separability_threshold(const MCCloud& cloud) {
    if (cloud.kind != CloudKind::glm && cloud.kind != CloudKind::misspec)
        throw ConfigError("separability threshold needs a glm-type cloud");
    auto g = [&](double c) {
        double v = f_kappa(cloud, 0.0, {c, 1.0}).value;
        return v * v;
    };
    // Expand [a, b] around 0 until the middle point is lower than both ends.
    double a = -1.0, b = 1.0, mid = 0.0;
    double fa = g(a), fb = g(b), fm = g(mid);
    for (int it = 0; it < 60 && !(fm <= fa && fm <= fb); ++it) {
        if (fa < fm) {
            b = mid; fb = fm;
            mid = a; fm = fa;
            a = mid - 2.0 * (b - mid); fa = g(a);
        } else {
            a = mid; fa = fm;
            mid = b; fm = fb;
            b = mid + 2.0 * (mid - a); fb = g(b);
        }
        if (std::abs(a) > 1e8 || std::abs(b) > 1e8) break;
    }
    if (!(fm <= fa && fm <= fb))
        throw NumericalError("separability threshold: bracket expansion failed near c = " + std::to_string(mid));
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = g(x1), f2 = g(x2);
    while (b - a > 1e-9 * (1.0 + std::abs(a) + std::abs(b))) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - r * (b - a); f1 = g(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + r * (b - a); f2 = g(x2);
        }
    }
    double c = 0.5 * (a + b);
    return {std::min({g(c), f1, f2}), c};
}

double derivative_check(const MCCloud& cloud, double kappa, const Vec& c, double h) {
    FEval e = f_kappa(cloud, kappa, c);
    double worst = 0.0, scale = 1e-12;
    Vec fd(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        Vec cp = c, cm = c;
        cp[k] += h;
        cm[k] -= h;
        fd[k] = (f_kappa(cloud, kappa, cp).value - f_kappa(cloud, kappa, cm).value) / (2 * h);
        scale = std::max(scale, std::abs(fd[k]));
    }
    for (std::size_t k = 0; k < c.size(); ++k) worst = std::max(worst, std::abs(e.grad[k] - fd[k]));
    return worst / scale;
}

}  // namespace hdm
