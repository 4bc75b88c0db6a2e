#pragma once

#include <cstdint>

namespace walras {

// Numerical tolerances shared by the library, the tests and the CLI.
struct Tolerances {
    // Newton on truncated excess demand
    double newton_residual = 1e-10;
    int newton_max_iter = 100;
    double backtrack_factor = 0.5;
    int max_backtracks = 40;
    double positivity_guard = 1e-9;

    // |det J| > regularity_scale * (1 + ||J||_inf)^(l-1)
    double regularity_scale = 1e-8;
    double dedup_relative = 1e-6;

    // Pareto / section-manifold solves
    double section_residual = 1e-8;
    int pareto_fallback_starts = 10;
    std::uint64_t pareto_fallback_seed = 0x5eed5eedULL;
    double m_step_scale = 1e-5;

    // |Delta| <= delta_near_singular * prod(column norms) is flagged
    double delta_near_singular = 1e-8;

    // transfer experiments
    double paradox_margin = 1e-10;
    int continuation_steps = 16;
    double trust_factor = 10.0;
    double trust_floor = 1e-8;

    // tatonnement
    double tatonnement_dt = 1e-2;
    double tatonnement_guard = 1e-6;
    int max_dt_halvings = 20;
    double stability_margin = 1e-9;
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

}  // namespace walras
