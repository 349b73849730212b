#include <doctest.h>

#include <cmath>

#include "hdm/datagen.hpp"
#include "hdm/rng.hpp"

using namespace hdm;

namespace {
double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
double corr_y_signal(const Dataset& d, const Vec& theta) {
    Vec s(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) {
        double v = 0;
        for (std::size_t j = 0; j < d.p(); ++j) v += d.X(i, j) * theta[j];
        s[i] = v;
    }
    double my = 0, ms = 0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        my += d.y[i];
        ms += s[i];
    }
    my /= d.n();
    ms /= d.n();
    double cov = 0, vy = 0, vs = 0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        cov += (d.y[i] - my) * (s[i] - ms);
        vy += (d.y[i] - my) * (d.y[i] - my);
        vs += (s[i] - ms) * (s[i] - ms);
    }
    return cov / std::sqrt(vy * vs);
}
}  // namespace

TEST_CASE("pure-noise labels are fair coins") {
    ModelConfig c;
    c.n = 10000;
    c.psi = 0.002;
    c.link = LinkFunction::pure_noise();
    c.seed = 5;
    const Dataset d = sample_diagonal(c);
    double m = 0;
    for (double y : d.y) {
        CHECK((y == 1.0 || y == -1.0));
        m += y;
    }
    CHECK(std::abs(m / 1e4) <= 4.0 / 100.0);
}

TEST_CASE("rho = 0 gives labels independent of the signal direction") {
    ModelConfig c;
    c.n = 10000;
    c.psi = 0.002;
    c.rho = 0.0;
    c.seed = 6;
    const Dataset d = sample_diagonal(c);
    const Vec dir = theta_star_of(c.resolved_measure(), 1.0);
    CHECK(std::abs(corr_y_signal(d, dir)) <= 4.0 / 100.0);
}

TEST_CASE("sampling is deterministic and dimensions agree") {
    ModelConfig c;
    c.n = 50;
    c.psi = 2.0;
    c.seed = 77;
    const Dataset a = sample_diagonal(c), b = sample_diagonal(c);
    CHECK(a.X.data == b.X.data);
    CHECK(a.y == b.y);
    CHECK(a.p() == 100);
    CHECK(a.theta_star.size() == 100);
    CHECK(a.lambda.size() == 100);
    CHECK(dot(a.theta_star, a.theta_star) == doctest::Approx(1.0));
    c.seed = 78;
    CHECK_FALSE(sample_diagonal(c).X.data == a.X.data);
}

TEST_CASE("measure atom count must match p") {
    ModelConfig c;
    c.n = 10;
    c.psi = 1.0;
    c.measure = standard_gaussian_measure(7, 1);
    CHECK_THROWS_AS(sample_diagonal(c), ConfigError);
}

TEST_CASE("test draws share p and theta* with the training model") {
    ModelConfig c;
    c.n = 40;
    c.psi = 3.0;
    c.seed = 3;
    const Dataset tr = sample(c), te = sample_test(c, 1000, 99);
    CHECK(te.n() == 1000);
    CHECK(te.p() == tr.p());
    CHECK(te.theta_star == tr.theta_star);
}

TEST_CASE("mixture model") {
    ModelConfig c;
    c.variant = Variant::gmm;
    c.n = 200;
    c.psi = 0.5;
    c.seed = 8;
    SUBCASE("upsilon one gives all positive labels") {
        c.upsilon = 1.0;
        for (double y : sample_gmm(c).y) CHECK(y == 1.0);
    }
    SUBCASE("zero signal: rows are pure noise and labels carry no information") {
        c.rho = 0.0;
        c.n = 4000;
        c.psi = 0.005;
        const Dataset d = sample_gmm(c);
        Vec e(d.p(), 0.0);
        e[0] = 1.0;
        CHECK(std::abs(corr_y_signal(d, e)) <= 4.0 / std::sqrt(4000.0));
    }
    SUBCASE("top covariance eigenvalue is 4 u (1 - u) rho^2 + 1") {
        c.n = 20000;
        c.psi = 10.0 / 20000.0;
        c.upsilon = 0.3;
        c.rho = 1.5;
        const Dataset d = sample_gmm(c);
        const std::size_t p = d.p();
        // Oracle: sample covariance and power iteration.
        Vec mu(p, 0.0);
        for (std::size_t i = 0; i < d.n(); ++i)
            for (std::size_t j = 0; j < p; ++j) mu[j] += d.X(i, j) / d.n();
        std::vector<Vec> S(p, Vec(p, 0.0));
        for (std::size_t i = 0; i < d.n(); ++i)
            for (std::size_t a = 0; a < p; ++a)
                for (std::size_t b = 0; b < p; ++b) S[a][b] += (d.X(i, a) - mu[a]) * (d.X(i, b) - mu[b]) / d.n();
        Vec v(p, 1.0);
        double ev = 0;
        for (int it = 0; it < 500; ++it) {
            Vec w(p, 0.0);
            for (std::size_t a = 0; a < p; ++a)
                for (std::size_t b = 0; b < p; ++b) w[a] += S[a][b] * v[b];
            ev = std::sqrt(dot(w, w));
            for (std::size_t a = 0; a < p; ++a) v[a] = w[a] / ev;
        }
        const double target = 4 * 0.3 * 0.7 * 1.5 * 1.5 + 1.0;
        CHECK(ev == doctest::Approx(target).epsilon(0.06));
    }
}

TEST_CASE("misspecified model reduces to the diagonal one without hidden signal") {
    ModelConfig c;
    c.n = 30;
    c.psi = 1.0;
    c.seed = 12;
    c.variant = Variant::misspecified;
    c.gamma = 0.0;
    c.phi = 0.5;
    const Dataset a = sample_misspecified(c);
    CHECK(a.n() == 30);
    CHECK(a.p() == 30);
    c.phi = 0.0;
    c.gamma = 0.0;
    const Dataset b = sample_misspecified(c);
    for (double y : b.y) CHECK((y == 1.0 || y == -1.0));
}

TEST_CASE("hidden signal dominates when rho is tiny") {
    ModelConfig c;
    c.n = 6000;
    c.psi = 2.0 / 6000.0;
    c.rho = 1e-3;
    c.gamma = 5.0;
    c.phi = 1.0 / 6000.0;
    c.seed = 21;
    c.variant = Variant::misspecified;
    const Dataset d = sample_misspecified(c);
    CHECK(std::abs(corr_y_signal(d, d.theta_star)) <= 4.0 / std::sqrt(6000.0));
    // Seen through x alone the link is nearly flat.
    CHECK(LinkFunction::logistic().smoothed(5.0)(1e-3) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("Hermite calibration") {
    const Hermite id = hermite_calibrate([](double t) { return t; });
    CHECK(id.mu0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(id.mu1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(id.mu2) <= 1e-6);
    const Hermite cube = hermite_calibrate([](double t) { return t * t * t; });
    CHECK(cube.mu0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cube.mu1 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(cube.mu2 == doctest::Approx(std::sqrt(6.0)).epsilon(1e-9));
    const Hermite odd = hermite_calibrate([](double t) { return compact_odd(t); });
    CHECK(std::abs(odd.mu0) <= 1e-14);
    CHECK(odd.mu2 >= 0.0);
}

TEST_CASE("feature pairs") {
    ModelConfig c;
    c.n = 60;
    c.psi = 1.0;
    c.seed = 4;
    const Dataset d = sample(c);
    SUBCASE("identity activation gives A = B exactly") {
        const FeaturePair fp = make_feature_pair(d, 120, identity_activation(), 11);
        CHECK(fp.A.data == fp.B.data);
        CHECK(fp.mu2 == 0.0);
    }
    SUBCASE("reproducible and moment matched") {
        c.n = 2000;
        c.psi = 0.05;
        const Dataset big = sample(c);
        const FeaturePair a = make_feature_pair(big, 20, compact_activation(), 13);
        const FeaturePair b = make_feature_pair(big, 20, compact_activation(), 13);
        CHECK(a.A.data == b.A.data);
        CHECK(a.B.data == b.B.data);
        const double tol = 5.0 / std::sqrt(2000.0);
        for (std::size_t j = 0; j < 20; ++j) {
            double ma = 0, mb = 0, sa = 0, sb = 0;
            for (std::size_t i = 0; i < big.n(); ++i) {
                ma += a.A(i, j) / big.n();
                mb += a.B(i, j) / big.n();
                sa += a.A(i, j) * a.A(i, j) / big.n();
                sb += a.B(i, j) * a.B(i, j) / big.n();
            }
            CHECK(std::abs(ma - mb) <= tol);
            CHECK(std::abs(sa - sb) <= tol);
        }
    }
    SUBCASE("d < 1 is rejected") {
        CHECK_THROWS_AS(make_feature_pair(d, 0, identity_activation(), 1), ConfigError);
    }
}
