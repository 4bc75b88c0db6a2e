#pragma once

#include "walras/economy.hpp"

#include <functional>
#include <optional>

namespace walras {

/// Residual map on the positive orthant; returns nullopt where the map is
/// undefined (e.g. a trader's income would turn nonpositive).
struct NewtonProblem {
    std::function<std::optional<Vector>(const Vector&)> residual;
    std::function<Matrix(const Vector&)> jacobian;
};

struct NewtonOptions {
    double tolerance = 1e-10;  // on the sup norm of the residual
    int max_iterations = 100;
    double backtrack_factor = 0.5;
    int max_backtracks = 40;
    double positivity_guard = 1e-9;
    // extra full Newton steps after reaching the tolerance, kept only while
    // they reduce the residual
    int polish_steps = 4;
};

struct NewtonResult {
    Vector x;
    double residual_norm = 0.0;
    int iterations = 0;
};

/// Damped Newton with backtracking line search on ||F||_2 and a positivity
/// guard on every iterate. Throws NoConvergence or LeftDomain.
NewtonResult damped_newton(const NewtonProblem& problem, Vector x0, const NewtonOptions& opt);

}  // namespace walras
