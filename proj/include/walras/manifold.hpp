#pragma once

// Geometry of the price-income space H(r) = {(p, w) : sum_i w_i = p . r}.
// Points are stored in the coordinates (p_1..p_{l-1}, w_1..w_{n-1}); the
// section manifold B(r) (aggregate demand equals r) is parametrized by the
// utility levels of the first n-1 traders through the Pareto set, and the
// budget space A(omega) is spanned by budget_basis(omega).

#include "walras/config.hpp"
#include "walras/economy.hpp"

#include <optional>
#include <vector>

namespace walras {

struct PriceIncomePoint {
    Vector coords;  // (p_1..p_{l-1}, w_1..w_{n-1})

    Price price(int goods) const;
    /// All n incomes; w_n = p . r - sum_{i<n} w_i.
    Vector incomes(const Economy& eco) const;
};

/// Target utilities of traders 1..n-1.
struct UtilityLevels {
    Vector u_minus_n;
};

struct ParetoPoint {
    Matrix allocation;  // n x l
    Price price;        // supporting price
    Vector incomes;     // p . x_i, length n
};

/// Pareto optimum maximizing trader n's utility with traders 1..n-1 held at
/// u. Solved as Newton in the supporting price: with homothetic utility the
/// income reaching u_i is u_i * e_i(p), so the first-order conditions reduce
/// to aggregate demand equal to r. `start` seeds the first attempt; fallback
/// starts are drawn deterministically. Throws Infeasible.
ParetoPoint pareto_point(const Economy& eco, const UtilityLevels& u,
                         const Tolerances& tol = default_tolerances(),
                         const std::optional<Price>& start = std::nullopt);

/// M(u): the point of B(r) associated with the Pareto optimum at u.
PriceIncomePoint section_point(const Economy& eco, const UtilityLevels& u,
                               const Tolerances& tol = default_tolerances(),
                               const std::optional<Price>& start = std::nullopt);

/// ||sum_i f_i(p, w_i) - r||_inf at a point of H(r).
double section_residual(const Economy& eco, const PriceIncomePoint& point);

/// Columns dM/du_i by central differences with step scale * (1 + |u_i|).
/// Result is (l+n-2) x (n-1). Throws Infeasible when u_i - step < 0.
Matrix m_jacobian_columns(const Economy& eco, const UtilityLevels& u, double step_scale,
                          const Tolerances& tol = default_tolerances(),
                          const std::optional<Price>& start = std::nullopt);

/// Same columns through the implicit function theorem on the Pareto price
/// equation. Defined on the closed boundary u_i = 0 as well.
Matrix m_jacobian_columns_analytic(const Economy& eco, const UtilityLevels& u,
                                   const Tolerances& tol = default_tolerances(),
                                   const std::optional<Price>& start = std::nullopt);

/// a_k(omega) = (e_k, omega_1^k, ..., omega_{n-1}^k), k = 1..l-1.
std::vector<Vector> budget_basis(const Allocation& omega);
Matrix budget_basis_matrix(const Allocation& omega);

/// u_i(f_i(p, p . omega_i)) for i < n. Throws DomainError on zero income.
UtilityLevels utility_levels_at(const Economy& eco, const Allocation& omega, const Price& p);

struct DeltaResult {
    double value = 0.0;
    double threshold = 0.0;  // Hadamard-scaled near-singular bound
    int sign = 0;
    Matrix matrix;  // columns a_1..a_{l-1}, dM/du_1..dM/du_{n-1}
};

/// Delta(p, omega) = det(a_1, ..., a_{l-1}, dM/du_1, ..., dM/du_{n-1}) at an
/// equilibrium. The column order is fixed; reordering flips the sign.
/// Throws DomainError off equilibrium, Infeasible, or NearSingular.
DeltaResult delta(const Economy& eco, const Allocation& omega, const Price& p,
                  const Tolerances& tol = default_tolerances());

/// Delta at the lower boundary omega = (0, ..., 0, r), u_{-n} = 0, where
/// trader n owns everything. Built from analytic columns because the first
/// n-1 incomes vanish there.
struct BoundaryAnchor {
    Price price;
    Matrix matrix;
    double value = 0.0;
};

BoundaryAnchor lower_boundary_anchor(const Economy& eco, const Tolerances& tol = default_tolerances());

}  // namespace walras
