#include "walras/equilibrium.hpp"

#include "walras/errors.hpp"
#include "walras/newton.hpp"

#include <algorithm>
#include <cmath>

namespace walras {

namespace {

void require_shapes(const Economy& eco, const Allocation& omega, const Price& p) {
    if (omega.traders() != eco.traders() || omega.goods() != eco.goods() || p.goods() != eco.goods()) {
        throw DomainError("excess demand: economy, allocation and price sizes disagree");
    }
}

NewtonOptions newton_options(const Tolerances& tol) {
    NewtonOptions opt;
    opt.tolerance = tol.newton_residual;
    opt.max_iterations = tol.newton_max_iter;
    opt.backtrack_factor = tol.backtrack_factor;
    opt.max_backtracks = tol.max_backtracks;
    opt.positivity_guard = tol.positivity_guard;
    return opt;
}

std::vector<EquilibriumRecord> deduplicate_and_sort(std::vector<std::optional<EquilibriumRecord>>&& found,
                                                    const Tolerances& tol) {
    std::vector<EquilibriumRecord> out;
    for (auto& rec : found) {
        if (!rec) continue;
        const bool seen = std::any_of(out.begin(), out.end(), [&](const EquilibriumRecord& r) {
            return relative_price_distance(r.p, rec->p) < tol.dedup_relative;
        });
        if (!seen) out.push_back(std::move(*rec));
    }
    std::sort(out.begin(), out.end(), [](const EquilibriumRecord& a, const EquilibriumRecord& b) {
        const Vector& x = a.p.full();
        const Vector& y = b.p.full();
        return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
    });
    return out;
}

// Excess demand can vanish asymptotically as a relative price runs off to
// 0 or infinity; Newton then "converges" far outside the scanned box. Such
// limits are not equilibria and are dropped.
bool escaped(const Price& p, const ScanSpec& scan) {
    const double lo = std::pow(10.0, scan.log10_lo - 3.0);
    const double hi = std::pow(10.0, scan.log10_hi + 3.0);
    for (Eigen::Index j = 0; j + 1 < p.goods(); ++j) {
        if (p[j] < lo || p[j] > hi) return true;
    }
    return false;
}

std::optional<EquilibriumRecord> try_seed(const Economy& eco, const Allocation& omega, const Price& seed,
                                          const ScanSpec& scan, const Tolerances& tol) {
    try {
        EquilibriumRecord rec = find_equilibrium(eco, omega, seed, tol);
        if (escaped(rec.p, scan)) return std::nullopt;
        return rec;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

Vector excess_demand(const Economy& eco, const Allocation& omega, const Price& p) {
    require_shapes(eco, omega, p);
    Vector z = -eco.resources();
    const Vector w = omega.incomes(p);
    for (int i = 0; i < eco.traders(); ++i) z += demand(eco.utility(i), p, w[i]);
    return z;
}

Vector excess_demand_truncated(const Economy& eco, const Allocation& omega, const Price& p) {
    const Vector z = excess_demand(eco, omega, p);
    return z.head(z.size() - 1);
}

Matrix jacobian(const Economy& eco, const Allocation& omega, const Price& p, JacobianMethod method, double step) {
    require_shapes(eco, omega, p);
    const int l = eco.goods();
    if (method == JacobianMethod::finite_difference) {
        Matrix j(l - 1, l - 1);
        const Vector head = p.truncated();
        for (int k = 0; k < l - 1; ++k) {
            const double h = step * std::max(1.0, head[k]);
            Vector up = head, down = head;
            up[k] += h;
            down[k] -= h;
            j.col(k) = (excess_demand_truncated(eco, omega, Price::from_truncated(up)) -
                        excess_demand_truncated(eco, omega, Price::from_truncated(down))) / (2.0 * h);
        }
        return j;
    }
    // d/dp_k f_i(p, p . omega_i) = d_price f_i e_k + d_income f_i omega_ik
    Matrix full = Matrix::Zero(l, l);
    const Vector w = omega.incomes(p);
    for (int i = 0; i < eco.traders(); ++i) {
        const DemandDerivatives d = demand_derivatives(eco.utility(i), p, w[i]);
        full += d.d_price + d.d_income * omega.rows().row(i);
    }
    return full.topLeftCorner(l - 1, l - 1);
}

bool is_regular(const Matrix& j, const Tolerances& tol) {
    const double norm_inf = j.cwiseAbs().rowwise().sum().maxCoeff();
    const double threshold = tol.regularity_scale * std::pow(1.0 + norm_inf, static_cast<double>(j.rows()));
    return std::abs(j.determinant()) > threshold;
}

EquilibriumRecord make_record(const Economy& eco, const Allocation& omega, const Price& p, const Tolerances& tol) {
    EquilibriumRecord rec{p, excess_demand_truncated(eco, omega, p).lpNorm<Eigen::Infinity>(),
                          jacobian(eco, omega, p), 0.0, false, 0, 0};
    rec.det_j = rec.jacobian.determinant();
    rec.regular = is_regular(rec.jacobian, tol);
    if (rec.regular) rec.index = index_of(rec);
    return rec;
}

EquilibriumRecord find_equilibrium(const Economy& eco, const Allocation& omega, const Price& p0,
                                   const Tolerances& tol) {
    require_shapes(eco, omega, p0);
    NewtonProblem problem{
        [&](const Vector& head) -> std::optional<Vector> {
            const Price p = Price::from_truncated(head);
            if ((omega.incomes(p).array() <= 0.0).any()) return std::nullopt;
            return excess_demand_truncated(eco, omega, p);
        },
        [&](const Vector& head) { return jacobian(eco, omega, Price::from_truncated(head)); }};
    const NewtonResult res = damped_newton(problem, p0.truncated(), newton_options(tol));
    EquilibriumRecord rec = make_record(eco, omega, Price::from_truncated(res.x), tol);
    rec.iterations = res.iterations;
    return rec;
}

int index_of(const EquilibriumRecord& rec) {
    if (!rec.regular) throw NotRegular("index: equilibrium is not regular");
    const double sign = (rec.jacobian.rows() % 2 == 0) ? 1.0 : -1.0;  // (-1)^(l-1)
    return sign * rec.det_j > 0.0 ? 1 : -1;
}

int ScanSpec::resolved_points(int goods) const {
    if (points_per_axis > 0) return points_per_axis;
    if (goods <= 3) return 15;
    if (goods == 4) return 7;
    return 5;
}

std::vector<Price> scan_seeds(int goods, const ScanSpec& scan) {
    const int dims = goods - 1;
    const int k = scan.resolved_points(goods);
    std::vector<double> axis(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
        const double t = k == 1 ? 0.5 : static_cast<double>(a) / (k - 1);
        axis[static_cast<std::size_t>(a)] = std::pow(10.0, scan.log10_lo + t * (scan.log10_hi - scan.log10_lo));
    }
    std::size_t total = 1;
    for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(k);
    std::vector<Price> seeds;
    seeds.reserve(total);
    for (std::size_t s = 0; s < total; ++s) {
        Vector head(dims);
        std::size_t rest = s;
        for (int d = 0; d < dims; ++d) {
            head[d] = axis[rest % static_cast<std::size_t>(k)];
            rest /= static_cast<std::size_t>(k);
        }
        seeds.push_back(Price::from_truncated(head));
    }
    return seeds;
}

std::vector<EquilibriumRecord> find_all_equilibria(const Economy& eco, const Allocation& omega,
                                                   const ScanSpec& scan, const Tolerances& tol) {
    const std::vector<Price> seeds = scan_seeds(eco.goods(), scan);
    std::vector<std::optional<EquilibriumRecord>> found(seeds.size());
    const auto count = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
        found[static_cast<std::size_t>(s)] = try_seed(eco, omega, seeds[static_cast<std::size_t>(s)], scan, tol);
    }
    return deduplicate_and_sort(std::move(found), tol);
}

std::vector<EquilibriumRecord> find_all_equilibria_serial(const Economy& eco, const Allocation& omega,
                                                          const ScanSpec& scan, const Tolerances& tol) {
    const std::vector<Price> seeds = scan_seeds(eco.goods(), scan);
    std::vector<std::optional<EquilibriumRecord>> found;
    found.reserve(seeds.size());
    for (const Price& seed : seeds) found.push_back(try_seed(eco, omega, seed, scan, tol));
    return deduplicate_and_sort(std::move(found), tol);
}

double relative_price_distance(const Price& a, const Price& b) {
    double d = 0.0;
    for (Eigen::Index j = 0; j < a.goods(); ++j) {
        const double scale = std::max(std::abs(a[j]), std::abs(b[j]));
        d = std::max(d, std::abs(a[j] - b[j]) / scale);
    }
    return d;
}

}  // namespace walras
