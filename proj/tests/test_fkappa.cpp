#include <doctest.h>

#include <cmath>

#include "hdm/fkappa.hpp"
#include "hdm/gauss.hpp"

using namespace hdm;

namespace {
// (a^2 + c^2) Phi(a/c) + a c phi(a/c), written out independently of the library.
double truncated_second_moment(double a, double c) {
    const double t = a / c;
    const double Phi = 0.5 * std::erfc(-t / std::sqrt(2.0));
    const double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
    return (a * a + c * c) * Phi + a * c * phi;
}
CloudOptions raw() {
    CloudOptions o;
    o.mode = FMode::raw;
    return o;
}
}  // namespace

TEST_CASE("cloud construction") {
    const MCCloud c = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 3);
    CHECK(c.m == 5000);
    const MCCloud d = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 3);
    CHECK(c.z1 == d.z1);
    CHECK(c.y == d.y);
    double m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < c.m; ++i) {
        m1 += c.z1[i] / c.m;
        m2 += c.z2[i] / c.m;
        CHECK((c.y[i] == 1.0 || c.y[i] == -1.0));
    }
    CHECK(std::abs(m1) <= 4 / std::sqrt(5000.0));
    CHECK(std::abs(m2) <= 4 / std::sqrt(5000.0));
}

TEST_CASE("pure-noise cloud decouples labels from Z1") {
    const MCCloud c = make_cloud(CloudKind::glm, 20000, 1.0, LinkFunction::pure_noise(), 4);
    double s = 0, sz = 0, szz = 0;
    for (std::size_t i = 0; i < c.m; ++i) {
        s += c.y[i] * c.z1[i];
        sz += c.z1[i];
        szz += c.z1[i] * c.z1[i];
    }
    CHECK(std::abs(s / std::sqrt(c.m * szz)) <= 4 / std::sqrt(20000.0));
    (void)sz;
}

TEST_CASE("F at c = 0 is kappa") {
    for (FMode mode : {FMode::conditional, FMode::raw}) {
        CloudOptions o;
        o.mode = mode;
        const MCCloud c = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 1, o);
        CHECK(f_kappa(c, 0.7, {0.0, 0.0}).value == doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_CASE("F at kappa = 0, c = (0, 1) is one over root two") {
    const MCCloud c = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 2, raw());
    // E[Z^2 1{Z < 0}] has MC standard error below 0.02 at m = 5000; the square
    // root halves it roughly.
    CHECK(std::abs(f_kappa(c, 0.0, {0.0, 1.0}).value - 1.0 / std::sqrt(2.0)) <= 0.02);
    const MCCloud e = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 2);
    CHECK(f_kappa(e, 0.0, {0.0, 1.0}).value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("mixture F at kappa = 1, c = (0, 1)") {
    const double oracle = std::sqrt(truncated_second_moment(1.0, 1.0));
    CHECK(oracle == doctest::Approx(1.3873).epsilon(1e-4));
    CHECK(f_kappa_gmm_closed(1.0, 0.0, 1.0).value == doctest::Approx(oracle).epsilon(1e-13));
    const MCCloud c = make_cloud(CloudKind::gmm, 5000, 1.0, LinkFunction::logistic(), 5);
    CHECK(f_kappa(c, 1.0, {0.0, 1.0}).value == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("mixture closed form versus plain Monte Carlo") {
    const MCCloud c = make_cloud(CloudKind::gmm, 200000, 1.0, LinkFunction::logistic(), 6, raw());
    for (double k : {0.0, 0.5, 1.5}) {
        const double c1 = 0.4, c2 = 0.9;
        // MC standard error of the second moment, propagated through the square root.
        double s = 0, ss = 0;
        for (std::size_t i = 0; i < c.m; ++i) {
            const double v = std::max(0.0, k - c1 - c2 * c.z2[i]);
            s += v * v;
            ss += v * v * v * v;
        }
        s /= c.m;
        const double se = std::sqrt((ss / c.m - s * s) / c.m) / (2 * std::sqrt(s));
        CHECK(std::abs(f_kappa(c, k, {c1, c2}).value - f_kappa_gmm_closed(k, c1, c2).value) <= 3 * se);
    }
}

TEST_CASE("mixture closed-form limits") {
    for (double c2 : {0.1, 1.0, 3.0}) CHECK(f_kappa_gmm_closed(0.8, 0.8, c2).value == doctest::Approx(c2 / std::sqrt(2.0)));
    CHECK(f_kappa_gmm_closed(2.0, 0.5, 1e-9).value == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("mixture closed-form gradient versus its own finite differences") {
    const double h = 1e-5;
    for (auto [k, c1, c2] : {std::tuple{1.0, 0.2, 0.7}, std::tuple{0.3, -0.5, 1.4}, std::tuple{2.0, 1.0, 0.3}}) {
        const FEval e = f_kappa_gmm_closed(k, c1, c2);
        const double d1 = (f_kappa_gmm_closed(k, c1 + h, c2).value - f_kappa_gmm_closed(k, c1 - h, c2).value) / (2 * h);
        const double d2 = (f_kappa_gmm_closed(k, c1, c2 + h).value - f_kappa_gmm_closed(k, c1, c2 - h).value) / (2 * h);
        CHECK(std::abs(e.grad[0] - d1) <= 1e-8 * std::max(1.0, std::abs(d1)));
        CHECK(std::abs(e.grad[1] - d2) <= 1e-8 * std::max(1.0, std::abs(d2)));
    }
}

TEST_CASE("gradient versus central differences on a frozen cloud") {
    const MCCloud c = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 7);
    CHECK(derivative_check(c, 1.0, {0.3, 0.8}) <= 1e-3);
    CHECK(derivative_check(c, 1.0, {0.0, 0.0}) <= 1e-3);
    const MCCloud r = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 7, raw());
    CHECK(derivative_check(r, 1.0, {0.3, 0.8}) <= 1e-3);
}

TEST_CASE("separability threshold") {
    SUBCASE("pure noise gives one half") {
        const MCCloud c = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::pure_noise(), 8);
        CHECK(separability_threshold(c).psi_star == doctest::Approx(0.5).epsilon(0.02));
    }
    SUBCASE("logistic, rho = 1") {
        const MCCloud c = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 9);
        CHECK(std::abs(separability_threshold(c).psi_star - 0.43) <= 0.03);
    }
    SUBCASE("stronger signal lowers the threshold") {
        double prev = 1.0;
        for (double rho : {1.0, 2.0, 4.0, 8.0}) {
            const MCCloud c = make_cloud(CloudKind::glm, 5000, rho, LinkFunction::logistic(), 10);
            const double t = separability_threshold(c).psi_star;
            CHECK(t < prev);
            if (rho > 1.0) CHECK(t < 0.43);
            prev = t;
        }
    }
}

TEST_CASE("inverse normal CDF") {
    CHECK(ninv(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(ninv(0.5) == 0.0);
    for (double x : {-8.0, -3.3, -1.0, -0.01, 0.2, 2.5, 3.0}) CHECK(ninv(ncdf(x)) == doctest::Approx(x).epsilon(1e-11));
    CHECK_THROWS_AS(ninv(0.0), NumericalError);
}

TEST_CASE("stratified conditional F against one-dimensional quadrature") {
    // F^2 = E_Z1[ f(rho Z1) M2(kappa - c1 Z1) + (1 - f(rho Z1)) M2(kappa + c1 Z1) ],
    // M2(a) = E (a - c2 Z2)_+^2, integrated by composite Simpson on [-12, 12].
    const double rho = 1.0, kappa = 1.0, c1 = 0.3, c2 = 0.8;
    const int N = 24000;
    double acc = 0.0;
    for (int k = 0; k <= N; ++k) {
        const double z = -12.0 + 24.0 * k / N;
        const double w = (k == 0 || k == N) ? 1 : (k % 2 ? 4 : 2);
        const double f = 1.0 / (1.0 + std::exp(-rho * z));
        const double g = f * truncated_second_moment(kappa - c1 * z, c2) +
                         (1 - f) * truncated_second_moment(kappa + c1 * z, c2);
        acc += w * g * std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI);
    }
    const double oracle = std::sqrt(acc * 24.0 / N / 3.0);
    for (std::uint64_t seed : {1, 2, 3}) {
        const MCCloud c = make_cloud(CloudKind::glm, 5000, rho, LinkFunction::logistic(), seed);
        CHECK(std::abs(f_kappa(c, kappa, {c1, c2}).value - oracle) <= 1e-4);
    }
    CloudOptions iid;
    iid.stratified = false;
    const MCCloud plain = make_cloud(CloudKind::glm, 5000, rho, LinkFunction::logistic(), 1, iid);
    CHECK(std::abs(f_kappa(plain, kappa, {c1, c2}).value - oracle) <= 0.05);
}
