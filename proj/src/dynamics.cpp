#include "walras/dynamics.hpp"

#include "walras/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace walras {

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

const char* to_string(TrajectoryOutcome o) {
    switch (o) {
        case TrajectoryOutcome::converged: return "converged";
        case TrajectoryOutcome::hit_guard: return "hit_guard";
        case TrajectoryOutcome::left_ball: return "left_ball";
        case TrajectoryOutcome::time_limit: return "time_limit";
    }
    return "?";
}

StabilityReport stability(const EquilibriumRecord& rec, const Tolerances& tol) {
    if (!rec.regular) throw NotRegular("stability: equilibrium is not regular");
    Eigen::EigenSolver<Matrix> solver(rec.jacobian, false);
    StabilityReport out;
    const auto& ev = solver.eigenvalues();
    out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    out.max_real_part = out.eigenvalues.back().real();
    out.margin = tol.stability_margin * rec.jacobian.cwiseAbs().rowwise().sum().maxCoeff();
    if (out.max_real_part < -out.margin) {
        out.classification = Stability::stable;
    } else if (out.max_real_part > out.margin) {
        out.classification = Stability::unstable;
    } else {
        out.classification = Stability::marginal;
    }
    return out;
}

namespace {

std::optional<Vector> field(const Economy& eco, const Allocation& omega, const Vector& head) {
    if ((head.array() <= 0.0).any() || !head.allFinite()) return std::nullopt;
    const Price p = Price::from_truncated(head);
    if ((omega.incomes(p).array() <= 0.0).any()) return std::nullopt;
    return excess_demand_truncated(eco, omega, p);
}

std::optional<Vector> rk4_step(const Economy& eco, const Allocation& omega, const Vector& x, double dt) {
    const auto k1 = field(eco, omega, x);
    if (!k1) return std::nullopt;
    const auto k2 = field(eco, omega, x + 0.5 * dt * *k1);
    if (!k2) return std::nullopt;
    const auto k3 = field(eco, omega, x + 0.5 * dt * *k2);
    if (!k3) return std::nullopt;
    const auto k4 = field(eco, omega, x + dt * *k3);
    if (!k4) return std::nullopt;
    Vector next = x + (dt / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
    if ((next.array() <= 0.0).any()) return std::nullopt;
    return next;
}

}  // namespace

Trajectory tatonnement(const Economy& eco, const Allocation& omega, const Price& p0, const TatonnementOptions& opt) {
    if (!(opt.dt > 0.0) || !(opt.t_max >= 0.0)) throw DomainError("tatonnement: dt must be positive");
    Trajectory traj;
    double dt = opt.dt;
    double t = 0.0;
    Vector x = p0.truncated();
    auto record = [&](double time, const Vector& head) {
        const double z = excess_demand(eco, omega, Price::from_truncated(head)).lpNorm<Eigen::Infinity>();
        traj.points.push_back({time, head, z});
        return z;
    };

    double z = record(t, x);
    while (true) {
        if (z < opt.residual) {
            traj.outcome = TrajectoryOutcome::converged;
            break;
        }
        if ((x.array() < opt.guard).any()) {
            traj.outcome = TrajectoryOutcome::hit_guard;
            break;
        }
        if (opt.ball_centre && (x - *opt.ball_centre).norm() > opt.ball_radius) {
            traj.outcome = TrajectoryOutcome::left_ball;
            break;
        }
        if (t >= opt.t_max) {
            traj.outcome = TrajectoryOutcome::time_limit;
            break;
        }
        const double h = std::min(dt, opt.t_max - t);
        std::optional<Vector> next;
        double step = h;
        for (int halving = 0; halving <= opt.max_halvings; ++halving) {
            next = rk4_step(eco, omega, x, step);
            if (next) break;
            step *= 0.5;
        }
        if (!next) throw StepTooLarge("tatonnement: step leaves the positive orthant even after halving dt");
        if (step < h) dt = step;
        t += step;
        x = std::move(*next);
        z = record(t, x);
    }
    traj.final_dt = dt;
    return traj;
}

}  // namespace walras
