#pragma once

#include "walras/config.hpp"
#include "walras/economy.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace walras {

struct EquilibriumRecord {
    Price p;
    double residual_norm = 0.0;  // ||z_{-l}||_inf
    Matrix jacobian;             // (l-1) x (l-1), d z_{-l} / d p_{-l}
    double det_j = 0.0;
    bool regular = false;
    int index = 0;  // +1 / -1 when regular, 0 otherwise
    int iterations = 0;
};

/// z(p, omega) = sum_i f_i(p, p . omega_i) - r. Throws DomainError on zero income.
Vector excess_demand(const Economy& eco, const Allocation& omega, const Price& p);

/// First l-1 components of excess_demand.
Vector excess_demand_truncated(const Economy& eco, const Allocation& omega, const Price& p);

enum class JacobianMethod { analytic, finite_difference };

/// d z_{-l} / d p_{-l}. The finite-difference variant uses central
/// differences with step h * max(1, p_k).
Matrix jacobian(const Economy& eco, const Allocation& omega, const Price& p,
                JacobianMethod method = JacobianMethod::analytic, double step = 1e-6);

bool is_regular(const Matrix& j, const Tolerances& tol = default_tolerances());

/// Evaluates residual, Jacobian, determinant, regularity and index at p.
EquilibriumRecord make_record(const Economy& eco, const Allocation& omega, const Price& p,
                              const Tolerances& tol = default_tolerances());

/// Damped Newton on z_{-l}(p, omega) = 0 from p0. Throws NoConvergence or LeftDomain.
EquilibriumRecord find_equilibrium(const Economy& eco, const Allocation& omega, const Price& p0,
                                   const Tolerances& tol = default_tolerances());

/// +1 iff (-1)^(l-1) det J > 0. Throws NotRegular.
int index_of(const EquilibriumRecord& rec);

/// Log-uniform multi-start grid over [10^log10_lo, 10^log10_hi]^(l-1).
struct ScanSpec {
    double log10_lo = -3.0;
    double log10_hi = 3.0;
    int points_per_axis = 0;  // 0: 15 for l <= 3, 7 for l = 4, 5 beyond

    int resolved_points(int goods) const;
};

std::vector<Price> scan_seeds(int goods, const ScanSpec& scan);

/// Multi-start Newton over the scan grid, deduplicated (relative distance
/// tol.dedup_relative) and sorted lexicographically by price. Seeds that
/// fail are skipped, as are Newton limits more than three decades outside
/// the scanned box (asymptotic zeros of z at the boundary); the result may
/// be empty if the range misses every root.
/// Seeds are solved in parallel with OpenMP; the output does not depend on
/// the thread count.
std::vector<EquilibriumRecord> find_all_equilibria(const Economy& eco, const Allocation& omega,
                                                   const ScanSpec& scan = {},
                                                   const Tolerances& tol = default_tolerances());

/// Single-threaded reference for find_all_equilibria.
std::vector<EquilibriumRecord> find_all_equilibria_serial(const Economy& eco, const Allocation& omega,
                                                          const ScanSpec& scan = {},
                                                          const Tolerances& tol = default_tolerances());

/// Max over coordinates of |a_j - b_j| / max(|a_j|, |b_j|).
double relative_price_distance(const Price& a, const Price& b);

}  // namespace walras
