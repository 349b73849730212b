#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hdm/boosting.hpp"
#include "hdm/margin.hpp"

using namespace hdm;

namespace {
Matrix mat(std::size_t r, std::size_t c, std::initializer_list<double> v) {
    Matrix m(r, c);
    m.data.assign(v);
    return m;
}
}  // namespace

TEST_CASE("one-point instance is solved in one step") {
    BoostOptions o;
    o.T = 1;
    const BoostState s = boost_run(mat(1, 1, {1.0}), o);
    CHECK(s.t == 1);
    CHECK(s.theta[0] == doctest::Approx(1.0));
    CHECK(s.normalized_margin() == doctest::Approx(1.0));
    CHECK(active_features(s.theta) == 1);
}

TEST_CASE("weights stay uniform while all margins agree") {
    // Column 0 gives every row the same margin and always wins the selection.
    BoostOptions o;
    o.T = 25;
    o.trace_every = 1;
    const BoostState s = boost_run(mat(2, 2, {1, 0.5, 1, -0.5}), o);
    CHECK(s.eta[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.eta[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(s.theta[1]) == 0.0);
    double sum = 0;
    for (double x : s.eta) {
        CHECK(x >= 0.0);
        sum += x;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("shrinkage boosting certifies the two-point margin") {
    const Matrix Z = mat(2, 2, {1, 0, 0, 1});
    const Certificate c = certified_T(2, 1.0, 0.5, 0.1);
    BoostOptions o;
    o.rule = StepRule::shrinkage;
    o.beta = c.beta;
    o.T = c.T;
    const BoostState s = boost_run(Z, o);
    CHECK(s.normalized_margin() > 0.45);
    CHECK(s.normalized_margin() <= 0.5 + 1e-12);
    CHECK(s.potential_slack <= 1e-12);
    CHECK(s.min_gamma >= 0.5 - 1e-8);
}

TEST_CASE("dual feasibility and the potential inequality on random data") {
    ModelConfig m;
    m.n = 30;
    m.psi = 3.0;
    m.rho = 2.0;
    m.seed = 44;
    const Matrix Z = signed_design(sample(m));
    const MarginResult lp = max_margin_l1(Z);
    REQUIRE(lp.separable());
    BoostOptions o;
    o.T = 500;
    o.beta = 1.0 / (max_abs(Z) * max_abs(Z));
    const BoostState s = boost_run(Z, o);
    for (double g : s.gamma_trace) CHECK(g >= lp.kappa - 1e-8);
    CHECK(s.potential_slack <= 1e-12);
}

TEST_CASE("discrete AdaBoost needs a sign design") {
    BoostOptions o;
    o.rule = StepRule::discrete;
    o.T = 5;
    CHECK_THROWS_AS(boost_run(mat(1, 2, {0.5, 1.0}), o), ConfigError);
    const BoostState s = boost_run(mat(3, 2, {1, 1, 1, -1, -1, 1}), o);
    CHECK(s.t >= 1);
}

TEST_CASE("certified step counts") {
    CHECK(certified_T(100, 1.0, 0.5, 0.99, 1, 1.0, BoundKind::zero_error).T == 45);
    CHECK(certified_T(100, 1.0, 0.5, 0.5, 1, 1.0, BoundKind::shrinkage).T == 180);
    const double a = std::log(1.01 * 100 * std::exp(1.0)) * 2 / (0.25 * 0.25);
    CHECK(static_cast<double>(certified_T(100, 1.0, 0.5, 0.5, 4, 2.0).T) == std::ceil(4 * a));
    CHECK(certified_T(100, 1.0, 0.5, 0.5, 4, 2.0).beta == doctest::Approx(0.5 / 4));
    CHECK_THROWS_AS(certified_T(10, 1.0, 0.0, 0.5), NumericalError);
    CHECK_THROWS_AS(certified_T(10, 1.0, 0.5, 1.0), ConfigError);
    CHECK(certified_T(10, 1.0, 0.5, 1.0, 1, 1.0, BoundKind::zero_error).T ==
          static_cast<long>(std::ceil(8 * std::log(10 * std::exp(1.0)))));
}

TEST_CASE("asymptotic step count scaling") {
    const double base = asymptotic_T(400, 3, 2.0, 0.2);
    CHECK(asymptotic_T(400, 3, 4.0, 0.2) == doctest::Approx(base / 4));
    CHECK(asymptotic_T(400, 3, 2.0, 0.1) == doctest::Approx(base * 4));
}

TEST_CASE("active features") {
    CHECK(active_features(Vec{0, 1.5, 0, -2}) == 2);
    BoostState s;
    CHECK_FALSE(active_features(s).has_value());
    BoostOptions o;
    o.T = 10;
    o.stop_at_interp = true;
    const BoostState t = boost_run(mat(1, 1, {1.0}), o);
    REQUIRE(t.interp_time.has_value());
    CHECK(*active_features(t) == 1);
}

TEST_CASE("trace export") {
    BoostOptions o;
    o.T = 4;
    const BoostState s = boost_run(mat(2, 2, {1, 0, 0, 1}), o);
    std::ostringstream os;
    write_trace_csv(s, os);
    const std::string out = os.str();
    CHECK(out.rfind("t,gamma,train_err,l1_norm,active_count\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 5);
}
