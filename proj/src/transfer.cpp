#include "walras/transfer.hpp"

#include "walras/equilibrium.hpp"
#include "walras/errors.hpp"
#include "walras/newton.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <string>

namespace walras {

namespace {

double unit_uniform(std::mt19937_64& rng) {
    // (0, 1]
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// d z_{-l} / dt along omega(t) = omega + t * shift; total resources stay fixed
Vector excess_demand_rate(const Economy& eco, const Allocation& omega, const Price& p, const Matrix& shift) {
    const Vector w = omega.incomes(p);
    const Vector dw = shift * p.full();
    Vector dz = Vector::Zero(eco.goods());
    for (int i = 0; i < eco.traders(); ++i) dz += demand_derivatives(eco.utility(i), p, w[i]).d_income * dw[i];
    return dz.head(eco.goods() - 1);
}

NewtonOptions corrector_options(const Tolerances& tol) {
    NewtonOptions opt;
    opt.tolerance = tol.newton_residual;
    opt.max_iterations = tol.newton_max_iter;
    opt.backtrack_factor = tol.backtrack_factor;
    opt.max_backtracks = tol.max_backtracks;
    opt.positivity_guard = tol.positivity_guard;
    return opt;
}

Price correct(const Economy& eco, const Allocation& omega, const Vector& predictor, const Tolerances& tol) {
    NewtonProblem problem{
        [&](const Vector& head) -> std::optional<Vector> {
            const Price p = Price::from_truncated(head);
            if ((omega.incomes(p).array() <= 0.0).any()) return std::nullopt;
            return excess_demand_truncated(eco, omega, p);
        },
        [&](const Vector& head) { return jacobian(eco, omega, Price::from_truncated(head)); }};
    return Price::from_truncated(damped_newton(problem, predictor, corrector_options(tol)).x);
}

void validate_transfer(const Allocation& omega, int donor, const Vector& transfer, const Vector& recipients) {
    const int n = omega.traders();
    if (donor < 0 || donor >= n) throw InvalidTransfer("transfer: donor id out of range");
    if (transfer.size() != omega.goods()) throw InvalidTransfer("transfer: wrong number of goods");
    if (recipients.size() != n) throw InvalidTransfer("transfer: recipient weights need one entry per trader");
    bool nonzero = false;
    for (int j = 0; j < omega.goods(); ++j) {
        const double t = transfer[j];
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidTransfer("transfer: amounts must be nonnegative");
        if (t > 0.0) {
            nonzero = true;
            if (!(t < omega.rows()(donor, j))) {
                throw InvalidTransfer("transfer: donor would give away all of good " + std::to_string(j));
            }
        }
    }
    if (!nonzero) throw InvalidTransfer("transfer: transfer vector is zero");
    if ((recipients.array() < 0.0).any() || recipients[donor] != 0.0 ||
        std::abs(recipients.sum() - 1.0) > 1e-12) {
        throw InvalidTransfer("transfer: recipient weights must be nonnegative, exclude the donor and sum to 1");
    }
}

void require_regular_start(const Economy& eco, const Allocation& omega, const Price& p_star, const Tolerances& tol) {
    const EquilibriumRecord rec = make_record(eco, omega, p_star, tol);
    if (rec.residual_norm > 1e-8) throw DomainError("transfer search: p_star is not an equilibrium of omega");
    if (!rec.regular) throw NotRegular("transfer search: p_star is not a regular equilibrium");
}

struct TrialOutcome {
    std::vector<TransferReport> reports;
    int attempted = 0;
    int branch_lost = 0;
    int invalid = 0;
};

TrialOutcome run_trial(const Economy& eco, const Allocation& omega, const Price& p_star, const TransferTrial& trial,
                       double magnitude, const Tolerances& tol) {
    TrialOutcome out;
    const double scale = omega.row(trial.donor).norm();
    for (const double m : {magnitude, magnitude / 2.0, magnitude / 4.0}) {
        ++out.attempted;
        try {
            TransferReport rep = transfer_experiment(eco, omega, p_star, trial.donor, m * scale * trial.direction,
                                                     trial.recipients, tol);
            rep.magnitude = m;
            rep.direction_hash = direction_hash(trial.direction);
            out.reports.push_back(std::move(rep));
        } catch (const InvalidTransfer&) {
            ++out.invalid;
        } catch (const Error&) {
            // BranchLost, or a solver failure inside the continuation
            ++out.branch_lost;
        }
    }
    return out;
}

TransferSearch reduce(std::vector<TrialOutcome>&& outcomes) {
    TransferSearch search;
    for (auto& o : outcomes) {
        search.attempted += o.attempted;
        search.branch_lost += o.branch_lost;
        search.invalid += o.invalid;
        for (auto& rep : o.reports) {
            search.found = search.found || rep.paradox;
            if (!search.best || rep.delta_u() > search.best->delta_u()) search.best = rep;
            search.reports.push_back(std::move(rep));
        }
    }
    return search;
}

}  // namespace

Price equilibrium_selection(const Economy& eco, const Allocation& omega, const Price& p_star,
                            const Allocation& omega_prime, int steps, const Tolerances& tol) {
    if (steps < 1) throw DomainError("selection: need at least one continuation step");
    if (omega_prime.traders() != omega.traders() || omega_prime.goods() != omega.goods()) {
        throw DomainError("selection: allocations have different shapes");
    }
    const EquilibriumRecord start = make_record(eco, omega, p_star, tol);
    if (start.residual_norm > 1e-8) throw DomainError("selection: p_star is not an equilibrium of omega");
    if (!start.regular) throw NotRegular("selection: p_star is not a regular equilibrium");

    const Matrix shift = omega_prime.rows() - omega.rows();
    Price p = p_star;
    int index = start.index;
    for (int k = 1; k <= steps; ++k) {
        const double t_prev = static_cast<double>(k - 1) / steps;
        const Allocation here(omega.rows() + t_prev * shift, eco);
        const Allocation next = k == steps ? omega_prime : Allocation(omega.rows() + (static_cast<double>(k) / steps) * shift, eco);

        Eigen::FullPivLU<Matrix> lu(jacobian(eco, here, p));
        if (!lu.isInvertible()) throw BranchLost("selection: Jacobian became singular along the path");
        const Vector tangent = -lu.solve(excess_demand_rate(eco, here, p, shift));
        Vector predictor = p.truncated() + tangent / steps;
        if ((predictor.array() <= tol.positivity_guard).any()) predictor = p.truncated();
        const double predicted_move = (predictor - p.truncated()).lpNorm<Eigen::Infinity>();

        Price corrected = p;
        try {
            corrected = correct(eco, next, predictor, tol);
        } catch (const Error& e) {
            throw BranchLost(std::string("selection: corrector failed: ") + e.what());
        }
        const double correction = (corrected.truncated() - predictor).lpNorm<Eigen::Infinity>();
        const double radius = tol.trust_factor * predicted_move +
                              tol.trust_floor * (1.0 + p.truncated().lpNorm<Eigen::Infinity>());
        if (correction > radius) throw BranchLost("selection: corrector jumped outside the trust radius");

        const EquilibriumRecord rec = make_record(eco, next, corrected, tol);
        if (!rec.regular || rec.index != index) throw BranchLost("selection: path crossed a critical equilibrium");
        index = rec.index;
        p = corrected;
    }
    return p;
}

Allocation apply_transfer(const Economy& eco, const Allocation& omega, int donor, const Vector& transfer,
                          const Vector& recipients) {
    validate_transfer(omega, donor, transfer, recipients);
    Matrix rows = omega.rows();
    rows.row(donor) -= transfer.transpose();
    for (int k = 0; k < omega.traders(); ++k) {
        if (k != donor) rows.row(k) += recipients[k] * transfer.transpose();
    }
    return Allocation(std::move(rows), eco);
}

TransferReport transfer_experiment(const Economy& eco, const Allocation& omega, const Price& p_star, int donor,
                                   const Vector& transfer, const Vector& recipients, const Tolerances& tol) {
    const Allocation omega_prime = apply_transfer(eco, omega, donor, transfer, recipients);
    if (!(omega_prime.row(donor).dot(p_star.full()) > 0.0)) {
        throw InvalidTransfer("transfer: donor income would vanish");
    }
    const Price p_after = equilibrium_selection(eco, omega, p_star, omega_prime, tol.continuation_steps, tol);

    const UtilitySpec& u = eco.utility(donor);
    const double before = utility(u, demand(u, p_star, omega.row(donor).dot(p_star.full())));
    const double after = utility(u, demand(u, p_after, omega_prime.row(donor).dot(p_after.full())));

    TransferReport rep{donor, transfer, recipients, transfer.norm() / omega.row(donor).norm(),
                       direction_hash(transfer / transfer.norm()), p_star, p_after, before, after, false};
    rep.paradox = after - before > tol.paradox_margin * (1.0 + std::abs(before));
    return rep;
}

std::vector<TransferTrial> make_transfer_trials(const Allocation& omega, int trials, std::uint64_t seed) {
    const int n = omega.traders();
    const int l = omega.goods();
    std::vector<int> donors;
    for (int i = 0; i < n; ++i) {
        if ((omega.rows().row(i).array() > 0.0).any()) donors.push_back(i);
    }
    std::vector<TransferTrial> out;
    if (donors.empty() || trials <= 0) return out;

    std::mt19937_64 rng(seed);
    out.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        TransferTrial trial;
        trial.donor = donors[static_cast<std::size_t>(rng() % donors.size())];

        std::vector<int> owned;
        for (int j = 0; j < l; ++j) {
            if (omega.rows()(trial.donor, j) > 0.0) owned.push_back(j);
        }
        trial.direction = Vector::Zero(l);
        for (int j : owned) {
            const double keep = unit_uniform(rng);
            const double amount = unit_uniform(rng);
            if (keep <= 0.7) trial.direction[j] = amount;
        }
        if (trial.direction.isZero()) trial.direction[owned[static_cast<std::size_t>(rng() % owned.size())]] = 1.0;
        trial.direction.normalize();

        trial.recipients = Vector::Zero(n);
        std::vector<int> others;
        for (int k = 0; k < n; ++k) {
            if (k != trial.donor) others.push_back(k);
        }
        if (unit_uniform(rng) <= 1.0 / 3.0) {
            trial.recipients[others[static_cast<std::size_t>(rng() % others.size())]] = 1.0;
        } else {
            // flat Dirichlet via normalized exponentials
            for (int k : others) trial.recipients[k] = -std::log(unit_uniform(rng));
            trial.recipients /= trial.recipients.sum();
        }
        out.push_back(std::move(trial));
    }
    return out;
}

TransferSearch detect_transfer_problem(const Economy& eco, const Allocation& omega, const Price& p_star, int trials,
                                       double magnitude, std::uint64_t seed, const Tolerances& tol) {
    require_regular_start(eco, omega, p_star, tol);
    const std::vector<TransferTrial> plan = make_transfer_trials(omega, trials, seed);
    std::vector<TrialOutcome> outcomes(plan.size());
    const auto count = static_cast<std::ptrdiff_t>(plan.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
        outcomes[static_cast<std::size_t>(t)] =
            run_trial(eco, omega, p_star, plan[static_cast<std::size_t>(t)], magnitude, tol);
    }
    return reduce(std::move(outcomes));
}

TransferSearch detect_transfer_problem_serial(const Economy& eco, const Allocation& omega, const Price& p_star,
                                              int trials, double magnitude, std::uint64_t seed,
                                              const Tolerances& tol) {
    require_regular_start(eco, omega, p_star, tol);
    std::vector<TrialOutcome> outcomes;
    for (const TransferTrial& trial : make_transfer_trials(omega, trials, seed)) {
        outcomes.push_back(run_trial(eco, omega, p_star, trial, magnitude, tol));
    }
    return reduce(std::move(outcomes));
}

bool lies_below(const Allocation& omega, const Allocation& omega_prime, int trader) {
    const Vector a = omega.row(trader);
    const Vector b = omega_prime.row(trader);
    return (a.array() <= b.array()).all() && (a.array() != b.array()).any();
}

std::uint64_t direction_hash(const Vector& v) {
    std::uint64_t h = 14695981039346656037ULL;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v[j], sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace walras
