#include "helpers.hpp"

#include "walras/errors.hpp"
#include "walras/newton.hpp"
#include "walras/rng.hpp"

#include <cmath>

using namespace walras;
using namespace walras::test;

TEST_CASE("excess demand on the symmetric economy") {
    const Scenario e1 = make_e1();
    const Vector z = excess_demand(e1.economy, e1.endowments, price1(1.0));
    CHECK(z.lpNorm<Eigen::Infinity>() < 1e-15);
    const Vector z2 = excess_demand(e1.economy, e1.endowments, price1(2.0));
    CHECK(z2[0] == doctest::Approx(-0.25));
    CHECK(z2[1] == doctest::Approx(0.5));
    CHECK(excess_demand_truncated(e1.economy, e1.endowments, price1(2.0))[0] == doctest::Approx(-0.25));
}

TEST_CASE("excess demand rejects zero income") {
    const Scenario e1 = make_e1();
    const Allocation lopsided(mat(2, 2, {1.0, 1.0, 0.0, 0.0}), e1.economy);
    CHECK_THROWS_AS(excess_demand(e1.economy, lopsided, price1(1.0)), DomainError);
}

TEST_CASE("Walras's law holds for random economies") {
    UniformDraw draw(3);
    for (int k = 0; k < 200; ++k) {
        const Scenario s = random_scenario(static_cast<std::uint64_t>(k) + 100);
        Vector head(s.economy.goods() - 1);
        for (int j = 0; j < head.size(); ++j) head[j] = std::pow(10.0, draw.uniform(-1.5, 1.5));
        const Price p = Price::from_truncated(head);
        CHECK(std::abs(p.full().dot(excess_demand(s.economy, s.endowments, p))) < 1e-10);
    }
}

TEST_CASE("Jacobian of the symmetric economy") {
    const Scenario e1 = make_e1();
    const Matrix j = jacobian(e1.economy, e1.endowments, price1(1.0));
    REQUIRE(j.rows() == 1);
    CHECK(j(0, 0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(jacobian(e1.economy, e1.endowments, price1(2.0))(0, 0) == doctest::Approx(-0.5 / 4.0));
}

TEST_CASE("finite-difference Jacobian is stable across steps") {
    for (int k = 0; k < 20; ++k) {
        const Scenario s = random_scenario(static_cast<std::uint64_t>(k) + 500);
        const Price p(Vector::Ones(s.economy.goods()));
        const Matrix a = jacobian(s.economy, s.endowments, p, JacobianMethod::finite_difference, 1e-4);
        for (double h : {1e-5, 1e-6}) {
            const Matrix b = jacobian(s.economy, s.endowments, p, JacobianMethod::finite_difference, h);
            CHECK((a - b).norm() < 1e-5 * std::max(1.0, a.norm()));
        }
        const Matrix an = jacobian(s.economy, s.endowments, p);
        CHECK((an - a).norm() < 1e-6 * std::max(1.0, an.norm()));
    }
}

TEST_CASE("find_equilibrium on the symmetric economy") {
    const Scenario e1 = make_e1();
    const EquilibriumRecord rec = find_equilibrium(e1.economy, e1.endowments, price1(3.0));
    CHECK(rec.p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rec.residual_norm < 1e-10);
    CHECK(rec.regular);
    CHECK(rec.index == 1);
    CHECK(rec.det_j == doctest::Approx(-0.5));

    const EquilibriumRecord again = find_equilibrium(e1.economy, e1.endowments, rec.p);
    CHECK(again.iterations <= 1);
}

TEST_CASE("find_equilibrium from a boundary start still stays positive") {
    const Scenario e1 = make_e1();
    const EquilibriumRecord rec = find_equilibrium(e1.economy, e1.endowments, price1(1e-6));
    CHECK(rec.p[0] == doctest::Approx(1.0));
}

TEST_CASE("damped Newton reports non-convergence") {
    // x^2 + 1 has no real root
    NewtonProblem problem{[](const Vector& x) -> std::optional<Vector> { return Vector::Constant(1, x[0] * x[0] + 1.0); },
                          [](const Vector& x) { return Matrix::Constant(1, 1, 2.0 * x[0]); }};
    NewtonOptions opt;
    opt.max_iterations = 30;
    CHECK_THROWS_AS(damped_newton(problem, Vector::Constant(1, 2.0), opt), Error);

    NewtonProblem undefined{[](const Vector&) -> std::optional<Vector> { return std::nullopt; },
                            [](const Vector&) { return Matrix::Identity(1, 1); }};
    CHECK_THROWS_AS(damped_newton(undefined, Vector::Constant(1, 2.0), opt), Error);
}

TEST_CASE("E2 family: three equilibria located by an independent sign-change oracle") {
    for (const Scenario& s : e2_family()) {
        CAPTURE(s.name);
        const auto recs = find_all_equilibria(s.economy, s.endowments);
        REQUIRE(recs.size() == 3);
        CHECK(recs[0].index == 1);
        CHECK(recs[1].index == -1);
        CHECK(recs[2].index == 1);

        // bracket each root on a log grid and compare with Newton seeded next to it
        const int points = 4000;
        int roots = 0;
        double prev_p = 1e-3;
        double prev_z = excess_demand(s.economy, s.endowments, price1(prev_p))[0];
        for (int k = 1; k < points; ++k) {
            const double p = std::pow(10.0, -3.0 + 6.0 * k / (points - 1));
            const double z = excess_demand(s.economy, s.endowments, price1(p))[0];
            if ((prev_z < 0.0) != (z < 0.0)) {
                REQUIRE(roots < 3);
                CHECK(recs[static_cast<std::size_t>(roots)].p[0] >= prev_p);
                CHECK(recs[static_cast<std::size_t>(roots)].p[0] <= p);
                const EquilibriumRecord near = find_equilibrium(s.economy, s.endowments, price1(prev_p));
                CHECK(relative_price_distance(near.p, recs[static_cast<std::size_t>(roots)].p) < 1e-8);
                ++roots;
            }
            prev_p = p;
            prev_z = z;
        }
        CHECK(roots == 3);
    }
}

TEST_CASE("index_of needs a regular record") {
    const Scenario e1 = make_e1();
    EquilibriumRecord rec = make_record(e1.economy, e1.endowments, price1(1.0));
    CHECK(index_of(rec) == 1);
    rec.regular = false;
    CHECK_THROWS_AS(index_of(rec), NotRegular);
    CHECK_FALSE(is_regular(Matrix::Zero(2, 2)));
    CHECK(is_regular(Matrix::Identity(2, 2)));
}

TEST_CASE("index sign convention in three goods") {
    // l = 3: index = sign(det J); two negative eigenvalues give +1
    EquilibriumRecord rec = record_with(-Matrix::Identity(2, 2));
    CHECK(index_of(rec) == 1);
    rec.det_j = -1.0;
    CHECK(index_of(rec) == -1);
}

TEST_CASE("no-trade fixtures are regular index +1 equilibria") {
    for (int k = 0; k < 10; ++k) {
        const Scenario s = no_trade_scenario(0xA11CE000ULL + static_cast<std::uint64_t>(k));
        REQUIRE(s.reference_price);
        const Price ref(*s.reference_price);
        CHECK(excess_demand(s.economy, s.endowments, ref).lpNorm<Eigen::Infinity>() < 1e-12);
        const auto recs = find_all_equilibria(s.economy, s.endowments);
        bool present = false;
        for (const auto& r : recs) {
            if (relative_price_distance(r.p, ref) < 1e-6) {
                present = true;
                CHECK(r.regular);
                CHECK(r.index == 1);
            }
        }
        CHECK(present);
    }
}

TEST_CASE("scan results are deterministic, sorted and match the serial reference") {
    for (const Scenario& s : e2_family()) {
        const auto a = find_all_equilibria(s.economy, s.endowments);
        const auto b = find_all_equilibria(s.economy, s.endowments);
        const auto c = find_all_equilibria_serial(s.economy, s.endowments);
        REQUIRE(a.size() == b.size());
        REQUIRE(a.size() == c.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].p.full() == b[k].p.full());
            CHECK(a[k].p.full() == c[k].p.full());
            if (k > 0) CHECK(a[k - 1].p[0] < a[k].p[0]);
        }
    }
}

TEST_CASE("index sums and odd counts across random economies") {
    for (int k = 0; k < 30; ++k) {
        const Scenario s = random_scenario(0xB0B00000ULL + static_cast<std::uint64_t>(k));
        const auto recs = find_all_equilibria(s.economy, s.endowments);
        REQUIRE_FALSE(recs.empty());
        int sum = 0;
        for (const auto& r : recs) {
            REQUIRE(r.regular);
            CHECK(r.residual_norm < 1e-10);
            sum += r.index;
        }
        CHECK(recs.size() % 2 == 1);
        CHECK(sum == 1);
    }
}

TEST_CASE("a scan box that misses every root returns nothing") {
    const Scenario e1 = make_e1();
    ScanSpec far;
    far.log10_lo = 8.0;
    far.log10_hi = 9.0;
    far.points_per_axis = 3;
    // every seed either converges back to p = 1, far outside the box, or fails
    CHECK(find_all_equilibria(e1.economy, e1.endowments, far).empty());
}

TEST_CASE("scan grid sizes") {
    CHECK(scan_seeds(2, {}).size() == 15);
    CHECK(scan_seeds(3, {}).size() == 225);
    CHECK(scan_seeds(4, {}).size() == 343);
    ScanSpec s;
    s.points_per_axis = 4;
    const auto seeds = scan_seeds(3, s);
    CHECK(seeds.size() == 16);
    CHECK(seeds.front()[0] == doctest::Approx(1e-3));
    CHECK(seeds.back()[1] == doctest::Approx(1e3));
}
