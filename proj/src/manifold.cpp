#include "walras/manifold.hpp"

#include "walras/equilibrium.hpp"
#include "walras/errors.hpp"
#include "walras/newton.hpp"

#include <cmath>
#include <random>
#include <string>

namespace walras {

namespace {

// Demand is linear in income for homothetic preferences, so unit-income
// quantities give demand and its derivatives at any w >= 0, including w = 0.
struct UnitDemand {
    Vector f;       // f(p, 1)
    Matrix d_price; // D_p f(p, 1)
};

UnitDemand unit_demand(const UtilitySpec& spec, const Price& p) {
    DemandDerivatives d = demand_derivatives(spec, p, 1.0);
    return {std::move(d.d_income), std::move(d.d_price)};
}

void require_levels(const Economy& eco, const UtilityLevels& u) {
    if (u.u_minus_n.size() != eco.traders() - 1) {
        throw DomainError("utility levels: expected " + std::to_string(eco.traders() - 1) + " entries");
    }
    for (Eigen::Index i = 0; i < u.u_minus_n.size(); ++i) {
        if (!(u.u_minus_n[i] >= 0.0) || !std::isfinite(u.u_minus_n[i])) {
            throw Infeasible("utility levels: level " + std::to_string(i) + " is outside U(r)");
        }
    }
}

// Incomes reaching the target utilities for traders 1..n-1; trader n gets
// the rest of p . r. nullopt when trader n's income is not positive.
std::optional<Vector> pareto_incomes(const Economy& eco, const UtilityLevels& u, const Price& p) {
    const int n = eco.traders();
    Vector w(n);
    for (int i = 0; i < n - 1; ++i) w[i] = u.u_minus_n[i] * unit_expenditure(eco.utility(i), p);
    w[n - 1] = p.full().dot(eco.resources()) - w.head(n - 1).sum();
    if (!(w[n - 1] > 0.0)) return std::nullopt;
    return w;
}

std::optional<Vector> pareto_residual(const Economy& eco, const UtilityLevels& u, const Price& p) {
    const auto w = pareto_incomes(eco, u, p);
    if (!w) return std::nullopt;
    Vector g = -eco.resources();
    for (int i = 0; i < eco.traders(); ++i) g += (*w)[i] * unit_demand(eco.utility(i), p).f;
    return g.head(eco.goods() - 1);
}

// d/dp_{-l} of the truncated Pareto residual, plus the pieces the implicit
// function theorem needs.
struct ParetoLinearization {
    Matrix g_p;  // (l-1) x (l-1)
    Matrix g_u;  // (l-1) x (n-1)
    Matrix expenditure_gradient;  // (n-1) x (l-1), d e_i / d p_{-l}
    Vector expenditure;           // e_i(p), i < n
};

ParetoLinearization linearize(const Economy& eco, const UtilityLevels& u, const Price& p) {
    const int n = eco.traders();
    const int l = eco.goods();
    const auto w = pareto_incomes(eco, u, p);
    if (!w) throw Infeasible("pareto: last trader's income is not positive");

    ParetoLinearization lin{Matrix::Zero(l - 1, l - 1), Matrix::Zero(l - 1, n - 1),
                            Matrix::Zero(n - 1, l - 1), Vector::Zero(n - 1)};
    Matrix full_p = Matrix::Zero(l, l);
    Vector grad_rest = eco.resources();  // d w_n / d p
    std::vector<UnitDemand> unit;
    for (int i = 0; i < n; ++i) unit.push_back(unit_demand(eco.utility(i), p));
    for (int i = 0; i < n - 1; ++i) {
        const double e = unit_expenditure(eco.utility(i), p);
        // Shephard's lemma: grad e(p) is the demand at income e(p)
        const Vector grad_e = e * unit[static_cast<std::size_t>(i)].f;
        lin.expenditure[i] = e;
        lin.expenditure_gradient.row(i) = grad_e.head(l - 1).transpose();
        grad_rest -= u.u_minus_n[i] * grad_e;
        full_p += (*w)[i] * unit[static_cast<std::size_t>(i)].d_price +
                  unit[static_cast<std::size_t>(i)].f * (u.u_minus_n[i] * grad_e).transpose();
    }
    const UnitDemand& last = unit.back();
    full_p += (*w)[n - 1] * last.d_price + last.f * grad_rest.transpose();
    lin.g_p = full_p.topLeftCorner(l - 1, l - 1);
    for (int k = 0; k < n - 1; ++k) {
        lin.g_u.col(k) = (lin.expenditure[k] * (unit[static_cast<std::size_t>(k)].f - last.f)).head(l - 1);
    }
    return lin;
}

NewtonOptions pareto_newton_options(const Tolerances& tol) {
    NewtonOptions opt;
    opt.tolerance = tol.newton_residual;
    opt.max_iterations = tol.newton_max_iter;
    opt.backtrack_factor = tol.backtrack_factor;
    opt.max_backtracks = tol.max_backtracks;
    opt.positivity_guard = tol.positivity_guard;
    return opt;
}

// The truncated residual can also vanish asymptotically as a relative price
// runs off to infinity (low-elasticity CES); the numeraire good then stays
// out of balance, so every Newton limit is checked on all l goods.
bool exhausts_resources(const Economy& eco, const UtilityLevels& u, const Price& p) {
    const auto w = pareto_incomes(eco, u, p);
    if (!w) return false;
    Vector total = Vector::Zero(eco.goods());
    for (int i = 0; i < eco.traders(); ++i) total += (*w)[i] * unit_demand(eco.utility(i), p).f;
    return (total - eco.resources()).lpNorm<Eigen::Infinity>() <= 1e-9 * std::max(1.0, eco.resources().maxCoeff());
}

Price solve_pareto_price(const Economy& eco, const UtilityLevels& u, const Tolerances& tol,
                         const std::optional<Price>& start) {
    NewtonProblem problem{
        [&](const Vector& head) { return pareto_residual(eco, u, Price::from_truncated(head)); },
        [&](const Vector& head) { return linearize(eco, u, Price::from_truncated(head)).g_p; }};
    const NewtonOptions opt = pareto_newton_options(tol);
    const int dims = eco.goods() - 1;

    std::vector<Vector> starts;
    if (start) starts.push_back(start->truncated());
    starts.push_back(Vector::Ones(dims));
    std::mt19937_64 rng(tol.pareto_fallback_seed);
    for (int s = 0; s < tol.pareto_fallback_starts; ++s) {
        Vector head(dims);
        for (int d = 0; d < dims; ++d) {
            const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            head[d] = std::pow(10.0, -2.0 + 4.0 * t);
        }
        starts.push_back(std::move(head));
    }
    for (const Vector& s : starts) {
        try {
            const Price p = Price::from_truncated(damped_newton(problem, s, opt).x);
            if (exhausts_resources(eco, u, p)) return p;
        } catch (const Error&) {
        }
    }
    throw Infeasible("pareto: no start reached the Pareto optimum; levels may lie outside U(r)");
}

}  // namespace

Price PriceIncomePoint::price(int goods) const { return Price::from_truncated(coords.head(goods - 1)); }

Vector PriceIncomePoint::incomes(const Economy& eco) const {
    const int l = eco.goods();
    const int n = eco.traders();
    Vector w(n);
    w.head(n - 1) = coords.tail(n - 1);
    w[n - 1] = price(l).full().dot(eco.resources()) - w.head(n - 1).sum();
    return w;
}

ParetoPoint pareto_point(const Economy& eco, const UtilityLevels& u, const Tolerances& tol,
                         const std::optional<Price>& start) {
    require_levels(eco, u);
    const Price p = solve_pareto_price(eco, u, tol, start);
    const Vector w = *pareto_incomes(eco, u, p);
    Matrix x(eco.traders(), eco.goods());
    for (int i = 0; i < eco.traders(); ++i) x.row(i) = (w[i] * unit_demand(eco.utility(i), p).f).transpose();
    const Vector total = x.colwise().sum().transpose();
    if ((total - eco.resources()).lpNorm<Eigen::Infinity>() > 1e-9 * std::max(1.0, eco.resources().maxCoeff())) {
        throw Infeasible("pareto: allocation does not exhaust the total resources");
    }
    return ParetoPoint{std::move(x), p, w};
}

PriceIncomePoint section_point(const Economy& eco, const UtilityLevels& u, const Tolerances& tol,
                               const std::optional<Price>& start) {
    const ParetoPoint pp = pareto_point(eco, u, tol, start);
    const int l = eco.goods();
    const int n = eco.traders();
    PriceIncomePoint point{Vector(l + n - 2)};
    point.coords.head(l - 1) = pp.price.truncated();
    point.coords.tail(n - 1) = pp.incomes.head(n - 1);
    if (section_residual(eco, point) > tol.section_residual) {
        throw Infeasible("section point: aggregate demand misses the total resources");
    }
    return point;
}

double section_residual(const Economy& eco, const PriceIncomePoint& point) {
    const Price p = point.price(eco.goods());
    const Vector w = point.incomes(eco);
    Vector g = -eco.resources();
    for (int i = 0; i < eco.traders(); ++i) {
        if (w[i] < 0.0) return std::numeric_limits<double>::infinity();
        g += w[i] * unit_demand(eco.utility(i), p).f;
    }
    return g.lpNorm<Eigen::Infinity>();
}

Matrix m_jacobian_columns(const Economy& eco, const UtilityLevels& u, double step_scale, const Tolerances& tol,
                          const std::optional<Price>& start) {
    require_levels(eco, u);
    const int n = eco.traders();
    const int dim = eco.goods() + n - 2;
    // anchor the finite differences on the central Pareto price
    const Price centre = section_point(eco, u, tol, start).price(eco.goods());
    Matrix cols(dim, n - 1);
    for (int i = 0; i < n - 1; ++i) {
        const double h = step_scale * (1.0 + std::abs(u.u_minus_n[i]));
        if (u.u_minus_n[i] - h < 0.0) {
            throw Infeasible("dM/du: level " + std::to_string(i) + " is within one step of the boundary of U(r)");
        }
        UtilityLevels up = u, down = u;
        up.u_minus_n[i] += h;
        down.u_minus_n[i] -= h;
        cols.col(i) = (section_point(eco, up, tol, centre).coords - section_point(eco, down, tol, centre).coords) /
                      (2.0 * h);
    }
    return cols;
}

Matrix m_jacobian_columns_analytic(const Economy& eco, const UtilityLevels& u, const Tolerances& tol,
                                   const std::optional<Price>& start) {
    require_levels(eco, u);
    const int n = eco.traders();
    const int l = eco.goods();
    const Price p = pareto_point(eco, u, tol, start).price;
    const ParetoLinearization lin = linearize(eco, u, p);
    Eigen::FullPivLU<Matrix> lu(lin.g_p);
    if (!lu.isInvertible()) throw Infeasible("dM/du: Pareto price equation is singular");
    const Matrix dp = -lu.solve(lin.g_u);  // (l-1) x (n-1)

    Matrix cols(l + n - 2, n - 1);
    cols.topRows(l - 1) = dp;
    // w_i = u_i e_i(p(u))
    Matrix dw = lin.expenditure_gradient * dp;
    for (int i = 0; i < n - 1; ++i) dw.row(i) *= u.u_minus_n[i];
    dw.diagonal() += lin.expenditure;
    cols.bottomRows(n - 1) = dw;
    return cols;
}

std::vector<Vector> budget_basis(const Allocation& omega) {
    const int n = omega.traders();
    const int l = omega.goods();
    std::vector<Vector> basis;
    for (int k = 0; k < l - 1; ++k) {
        Vector a = Vector::Zero(l + n - 2);
        a[k] = 1.0;
        for (int i = 0; i < n - 1; ++i) a[l - 1 + i] = omega.rows()(i, k);
        basis.push_back(std::move(a));
    }
    return basis;
}

Matrix budget_basis_matrix(const Allocation& omega) {
    const auto basis = budget_basis(omega);
    Matrix m(basis.front().size(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = basis[k];
    return m;
}

UtilityLevels utility_levels_at(const Economy& eco, const Allocation& omega, const Price& p) {
    const int n = eco.traders();
    const Vector w = omega.incomes(p);
    UtilityLevels u{Vector(n - 1)};
    for (int i = 0; i < n - 1; ++i) u.u_minus_n[i] = utility(eco.utility(i), demand(eco.utility(i), p, w[i]));
    return u;
}

DeltaResult delta(const Economy& eco, const Allocation& omega, const Price& p, const Tolerances& tol) {
    const double residual = excess_demand(eco, omega, p).lpNorm<Eigen::Infinity>();
    if (residual > 1e-8) throw DomainError("delta: (p, omega) is not an equilibrium");

    const UtilityLevels u = utility_levels_at(eco, omega, p);
    const int l = eco.goods();
    const int n = eco.traders();
    DeltaResult out;
    out.matrix.resize(l + n - 2, l + n - 2);
    out.matrix.leftCols(l - 1) = budget_basis_matrix(omega);
    out.matrix.rightCols(n - 1) = m_jacobian_columns(eco, u, tol.m_step_scale, tol, p);
    out.value = out.matrix.determinant();
    out.threshold = tol.delta_near_singular * out.matrix.colwise().norm().prod();
    if (std::abs(out.value) <= out.threshold) {
        throw NearSingular("delta: |Delta| = " + std::to_string(out.value) + " is below the near-singular bound");
    }
    out.sign = out.value > 0.0 ? 1 : -1;
    return out;
}

BoundaryAnchor lower_boundary_anchor(const Economy& eco, const Tolerances& tol) {
    const int n = eco.traders();
    const int l = eco.goods();
    const UtilityLevels zero{Vector::Zero(n - 1)};
    const Price p = pareto_point(eco, zero, tol).price;

    Matrix rows = Matrix::Zero(n, l);
    rows.row(n - 1) = eco.resources().transpose();
    const Allocation lower(std::move(rows), eco);

    BoundaryAnchor out{p, Matrix(l + n - 2, l + n - 2), 0.0};
    out.matrix.leftCols(l - 1) = budget_basis_matrix(lower);
    out.matrix.rightCols(n - 1) = m_jacobian_columns_analytic(eco, zero, tol, p);
    out.value = out.matrix.determinant();
    return out;
}

}  // namespace walras
