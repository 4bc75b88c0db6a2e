#include "walras/newton.hpp"

#include "walras/errors.hpp"

#include <string>

namespace walras {

namespace {

bool inside(const Vector& x, double guard) { return (x.array() >= guard).all() && x.allFinite(); }

std::optional<Vector> evaluate(const NewtonProblem& problem, const Vector& x, double guard) {
    if (!inside(x, guard)) return std::nullopt;
    auto f = problem.residual(x);
    if (f && !f->allFinite()) return std::nullopt;
    return f;
}

void polish(const NewtonProblem& problem, NewtonResult& res, Vector& f, const NewtonOptions& opt) {
    for (int k = 0; k < opt.polish_steps; ++k) {
        Eigen::FullPivLU<Matrix> lu(problem.jacobian(res.x));
        if (!lu.isInvertible()) return;
        const Vector next = res.x - lu.solve(f);
        auto fn = evaluate(problem, next, opt.positivity_guard);
        if (!fn || fn->lpNorm<Eigen::Infinity>() >= f.lpNorm<Eigen::Infinity>()) return;
        res.x = next;
        f = *fn;
        res.residual_norm = f.lpNorm<Eigen::Infinity>();
    }
}

}  // namespace

NewtonResult damped_newton(const NewtonProblem& problem, Vector x0, const NewtonOptions& opt) {
    auto f0 = evaluate(problem, x0, opt.positivity_guard);
    if (!f0) throw LeftDomain("newton: starting point outside the domain");

    NewtonResult res{std::move(x0), f0->lpNorm<Eigen::Infinity>(), 0};
    Vector f = std::move(*f0);
    while (true) {
        if (res.residual_norm < opt.tolerance) {
            polish(problem, res, f, opt);
            return res;
        }
        if (res.iterations >= opt.max_iterations) {
            throw NoConvergence("newton: no convergence after " + std::to_string(opt.max_iterations) +
                                " iterations (residual " + std::to_string(res.residual_norm) + ")");
        }
        Eigen::FullPivLU<Matrix> lu(problem.jacobian(res.x));
        if (!lu.isInvertible()) throw NoConvergence("newton: singular Jacobian");
        const Vector step = -lu.solve(f);
        const double merit = f.norm();

        double alpha = 1.0;
        bool accepted = false;
        int guard_rejections = 0;
        for (int b = 0; b <= opt.max_backtracks; ++b, alpha *= opt.backtrack_factor) {
            const Vector trial = res.x + alpha * step;
            auto ft = evaluate(problem, trial, opt.positivity_guard);
            if (!ft) {
                ++guard_rejections;
                continue;
            }
            if (ft->norm() < (1.0 - 1e-4 * alpha) * merit) {
                res.x = trial;
                f = std::move(*ft);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (guard_rejections == opt.max_backtracks + 1) {
                throw LeftDomain("newton: every damped step leaves the positive orthant");
            }
            throw NoConvergence("newton: line search stalled (residual " + std::to_string(res.residual_norm) + ")");
        }
        res.residual_norm = f.lpNorm<Eigen::Infinity>();
        ++res.iterations;
    }
}

}  // namespace walras
