#pragma once

#include "walras/config.hpp"
#include "walras/economy.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace walras {

struct TransferReport {
    int donor = 0;
    Vector transfer;    // goods given away by the donor, >= 0 and nonzero
    Vector recipients;  // share of the transfer received by each trader (donor entry 0)
    double magnitude = 0.0;  // relative to the donor's endowment norm
    std::uint64_t direction_hash = 0;
    Price p_before;
    Price p_after;
    double u_donor_before = 0.0;
    double u_donor_after = 0.0;
    bool paradox = false;

    double delta_u() const { return u_donor_after - u_donor_before; }
};

/// Follows the local equilibrium price selection from (p_star, omega) to
/// omega_prime along the straight line in endowment space: tangent predictor
/// and Newton corrector at each of `steps` sub-steps. Throws NotRegular if
/// p_star is not a regular equilibrium of omega, BranchLost when a corrector
/// fails or lands outside the trust radius around its predictor.
Price equilibrium_selection(const Economy& eco, const Allocation& omega, const Price& p_star,
                            const Allocation& omega_prime, int steps,
                            const Tolerances& tol = default_tolerances());

/// Donor gives `transfer`; trader k receives recipients[k] * transfer.
/// Recipient weights are nonnegative, sum to 1 and are zero for the donor.
/// Paradox means the donor's utility at the selected equilibrium rises by
/// more than tol.paradox_margin * (1 + |u_before|). Throws InvalidTransfer or
/// BranchLost.
TransferReport transfer_experiment(const Economy& eco, const Allocation& omega, const Price& p_star, int donor,
                                   const Vector& transfer, const Vector& recipients,
                                   const Tolerances& tol = default_tolerances());

/// Endowments after the donor gives `transfer` to the recipients.
Allocation apply_transfer(const Economy& eco, const Allocation& omega, int donor, const Vector& transfer,
                          const Vector& recipients);

/// A pre-generated random trial: donor, unit direction, recipient weights.
struct TransferTrial {
    int donor = 0;
    Vector direction;   // nonnegative, unit 2-norm, zero where the donor owns nothing
    Vector recipients;
};

std::vector<TransferTrial> make_transfer_trials(const Allocation& omega, int trials, std::uint64_t seed);

struct TransferSearch {
    bool found = false;
    std::optional<TransferReport> best;  // largest donor utility change
    std::vector<TransferReport> reports; // in trial order
    int attempted = 0;
    int branch_lost = 0;
    int invalid = 0;
};

/// Randomized search for a donor-gain transfer. Each trial is run at the
/// given magnitude and at magnitude / 2 and / 4. Deterministic for a seed;
/// trials run under OpenMP and are reduced in trial order.
TransferSearch detect_transfer_problem(const Economy& eco, const Allocation& omega, const Price& p_star,
                                       int trials, double magnitude, std::uint64_t seed,
                                       const Tolerances& tol = default_tolerances());

/// Single-threaded reference for detect_transfer_problem.
TransferSearch detect_transfer_problem_serial(const Economy& eco, const Allocation& omega, const Price& p_star,
                                              int trials, double magnitude, std::uint64_t seed,
                                              const Tolerances& tol = default_tolerances());

/// True iff omega_i <= omega'_i componentwise with omega_i != omega'_i.
bool lies_below(const Allocation& omega, const Allocation& omega_prime, int trader);

/// FNV-1a over the bytes of the vector entries.
std::uint64_t direction_hash(const Vector& v);

}  // namespace walras
