#include "helpers.hpp"

#include "walras/errors.hpp"
#include "walras/rng.hpp"

#include <cmath>

using namespace walras;
using namespace walras::test;

TEST_CASE("price keeps the numeraire and rejects boundary prices") {
    const Price p = Price::from_truncated(vec({2.0, 0.5}));
    CHECK(p.goods() == 3);
    CHECK(p[2] == 1.0);
    CHECK(p.truncated() == vec({2.0, 0.5}));
    CHECK_THROWS_AS(Price(vec({1.0, 2.0})), DomainError);
    CHECK_THROWS_AS(Price(vec({0.0, 1.0})), DomainError);
    CHECK_THROWS_AS(Price(vec({-1.0, 1.0})), DomainError);
    CHECK_THROWS_AS(Price(vec({1.0})), DomainError);
}

TEST_CASE("utility specs validate their parameters") {
    CHECK_THROWS_AS(UtilitySpec::cobb_douglas(vec({0.5, 0.6})), ValidationError);
    CHECK_THROWS_AS(UtilitySpec::cobb_douglas(vec({1.2, -0.2})), ValidationError);
    CHECK_THROWS_AS(UtilitySpec::ces(vec({1.0, 1.0}), 1.0), ValidationError);
    CHECK_THROWS_AS(UtilitySpec::ces(vec({1.0, 1.0}), -0.5), ValidationError);
    CHECK_THROWS_AS(UtilitySpec::ces(vec({1.0, 0.0}), 0.5), ValidationError);
    CHECK_NOTHROW(UtilitySpec::ces(vec({0.3, 2.0, 1.0}), 3.0));
}

TEST_CASE("allocations must be nonnegative and exhaust the resources") {
    const Scenario e1 = make_e1();
    CHECK_THROWS_AS(Allocation(mat(2, 2, {1.0, 0.0, 0.0, 0.9}), e1.economy), ValidationError);
    CHECK_THROWS_AS(Allocation(mat(2, 2, {1.5, 0.0, -0.5, 1.0}), e1.economy), ValidationError);
    CHECK_THROWS_AS(Allocation(mat(1, 2, {1.0, 1.0}), e1.economy), ValidationError);
    CHECK_NOTHROW(Allocation(mat(2, 2, {0.25, 0.5, 0.75, 0.5}), e1.economy));
}

TEST_CASE("Cobb-Douglas demand in closed form") {
    const UtilitySpec cd = UtilitySpec::cobb_douglas(vec({0.5, 0.5}));
    const Vector f = demand(cd, price1(2.0), 2.0);
    CHECK(f[0] == doctest::Approx(0.5));
    CHECK(f[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(demand(cd, price1(2.0), 0.0), DomainError);
    CHECK_THROWS_AS(demand(cd, Price::from_truncated(vec({1.0, 1.0})), 1.0), DomainError);
}

TEST_CASE("CES demand maximizes utility on the budget line") {
    // oracle: dense search along the budget line for l = 2
    for (double sigma : {0.2, 0.7, 1.5, 4.0}) {
        const UtilitySpec ces = UtilitySpec::ces(vec({0.3, 0.8}), sigma);
        const Price p = price1(1.7);
        const double w = 2.3;
        const Vector f = demand(ces, p, w);
        CHECK(p.full().dot(f) == doctest::Approx(w).epsilon(1e-12));
        double best_x1 = 0.0, best_u = -1.0;
        const int grid = 200000;
        for (int k = 1; k < grid; ++k) {
            const double x1 = (w / p[0]) * k / grid;
            const double u = utility(ces, vec({x1, w - p[0] * x1}));
            if (u > best_u) {
                best_u = u;
                best_x1 = x1;
            }
        }
        CHECK(f[0] == doctest::Approx(best_x1).epsilon(1e-4));
        CHECK(utility(ces, f) >= best_u * (1.0 - 1e-12));
    }
}

TEST_CASE("utility gradient matches central differences") {
    UniformDraw draw(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int l = draw.integer(2, 4);
        const UtilitySpec spec = random_utility(draw, l);
        Vector x(l);
        for (int j = 0; j < l; ++j) x[j] = draw.uniform(0.2, 3.0);
        const Vector g = utility_gradient(spec, x);
        for (int j = 0; j < l; ++j) {
            const double h = 1e-6 * x[j];
            Vector up = x, down = x;
            up[j] += h;
            down[j] -= h;
            CHECK(g[j] == doctest::Approx((utility(spec, up) - utility(spec, down)) / (2.0 * h)).epsilon(1e-6));
        }
    }
}

TEST_CASE("demand derivatives match central differences") {
    UniformDraw draw(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int l = draw.integer(2, 4);
        const UtilitySpec spec = random_utility(draw, l);
        Vector head(l - 1);
        for (int j = 0; j < l - 1; ++j) head[j] = std::pow(10.0, draw.uniform(-1.0, 1.0));
        const Price p = Price::from_truncated(head);
        const double w = draw.uniform(0.5, 3.0);
        const DemandDerivatives d = demand_derivatives(spec, p, w);
        const double hw = 1e-6 * w;
        const Vector dw = (demand(spec, p, w + hw) - demand(spec, p, w - hw)) / (2.0 * hw);
        CHECK((d.d_income - dw).norm() <= 1e-6 * (1.0 + dw.norm()));
        for (int k = 0; k < l - 1; ++k) {
            const double h = 1e-6 * p[k];
            Vector up = p.full(), down = p.full();
            up[k] += h;
            down[k] -= h;
            const Vector col = (detail::demand_unnormalized(spec, up, w) - detail::demand_unnormalized(spec, down, w)) /
                               (2.0 * h);
            CHECK((d.d_price.col(k) - col).norm() <= 1e-6 * (1.0 + col.norm()));
        }
    }
}

TEST_CASE("indirect utility is income over unit expenditure") {
    UniformDraw draw(13);
    for (int trial = 0; trial < 100; ++trial) {
        const int l = draw.integer(2, 4);
        const UtilitySpec spec = random_utility(draw, l);
        Vector head(l - 1);
        for (int j = 0; j < l - 1; ++j) head[j] = std::pow(10.0, draw.uniform(-1.0, 1.0));
        const Price p = Price::from_truncated(head);
        const double w = draw.uniform(0.1, 5.0);
        CHECK(indirect_utility(spec, p, w) == doctest::Approx(utility(spec, demand(spec, p, w))).epsilon(1e-12));
        CHECK(indirect_utility(spec, p, w) == doctest::Approx(w / unit_expenditure(spec, p)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(indirect_utility(UtilitySpec::cobb_douglas(vec({0.5, 0.5})), price1(1.0), 0.0), DomainError);
}

TEST_CASE("Cobb-Douglas utility survives extreme bundles") {
    const UtilitySpec cd = UtilitySpec::cobb_douglas(vec({0.5, 0.5}));
    CHECK(std::isfinite(utility(cd, vec({1e300, 1e300}))));
    CHECK(utility(cd, vec({1e300, 1e300})) == doctest::Approx(1e300));
}
