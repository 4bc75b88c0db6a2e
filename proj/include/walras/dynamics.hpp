#pragma once

#include "walras/config.hpp"
#include "walras/economy.hpp"
#include "walras/equilibrium.hpp"

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

namespace walras {

enum class Stability { stable, unstable, marginal };

const char* to_string(Stability s);

struct StabilityReport {
    std::vector<std::complex<double>> eigenvalues;  // spectrum of J
    Stability classification = Stability::marginal;
    double max_real_part = 0.0;
    double margin = 0.0;
};

/// Local stability of the tatonnement dp_{-l}/dt = z_{-l} at a regular
/// equilibrium, with margin tol.stability_margin * ||J||_inf. Throws NotRegular.
StabilityReport stability(const EquilibriumRecord& rec, const Tolerances& tol = default_tolerances());

enum class TrajectoryOutcome { converged, hit_guard, left_ball, time_limit };

const char* to_string(TrajectoryOutcome o);

struct TatonnementOptions {
    double dt = 1e-2;
    double t_max = 1e3;
    double guard = 1e-6;    // a coordinate below this ends the run as diverged
    double residual = 1e-10;
    int max_halvings = 20;
    // optional ball: leaving it ends the run
    std::optional<Vector> ball_centre;  // truncated price
    double ball_radius = 0.0;
};

struct TrajectoryPoint {
    double time;
    Vector price;  // truncated
    double excess_norm;  // ||z||_inf
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    TrajectoryOutcome outcome = TrajectoryOutcome::time_limit;
    double final_dt = 0.0;
};

/// Classical RK4 on dp_{-l}/dt = z_{-l}(p, omega) with the numeraire fixed.
/// dt is halved (and kept halved) whenever a stage would leave the open
/// orthant; StepTooLarge after max_halvings consecutive halvings.
Trajectory tatonnement(const Economy& eco, const Allocation& omega, const Price& p0,
                       const TatonnementOptions& opt = {});

}  // namespace walras
