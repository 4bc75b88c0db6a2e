#pragma once

#include "walras/dynamics.hpp"
#include "walras/equilibrium.hpp"
#include "walras/manifold.hpp"
#include "walras/transfer.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace walras {

/// Shortest round-trip decimal form of a double.
std::string format_number(double x);

/// Delta columns joined to an equilibrium row; `error` holds the failure kind
/// (e.g. near_singular) when Delta could not be signed.
struct DeltaColumns {
    std::optional<DeltaResult> result;
    std::string error;
};

/// Columns p_1..p_{l-1}, residual, det_j, regular, index and, when `deltas`
/// is given, delta, sign_delta, sign_match_index.
void write_equilibria_csv(std::ostream& out, const std::vector<EquilibriumRecord>& records,
                          const std::vector<DeltaColumns>* deltas = nullptr);

/// Columns donor, magnitude, direction_hash, u_before, u_after, delta_u,
/// paradox, p_after_1..p_after_{l-1}.
void write_transfer_csv(std::ostream& out, const std::vector<TransferReport>& reports, int goods);

/// Columns time, p_1..p_{l-1}, excess_inf (tab separated).
void write_trajectory_tsv(std::ostream& out, const Trajectory& traj);

}  // namespace walras
