#pragma once

#include "walras/json_io.hpp"
#include "walras/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace walras {

/// Two Cobb-Douglas(0.5, 0.5) traders owning one good each; unique
/// equilibrium at p = (1, 1).
Scenario make_e1();

/// Two mirrored CES traders: trader 1 has shares (s, 1-s) and owns (1, 0),
/// trader 2 has shares (1-s, s) and owns (0, 1). Strong own-good bias with
/// low elasticity gives three equilibria, the middle one at p = (1, 1).
Scenario make_e2(double own_share = 0.95, double elasticity = 0.2);

/// E2 with own share 0.99 and elasticity 0.1, plus a small Cobb-Douglas
/// trader owning (0.02, 0.02). Three equilibria; at the outer (index +1,
/// spectrally stable) ones a donor can still gain by giving to the third
/// trader. Kept out of the corpus; the tests use it as a three-trader fixture.
Scenario make_e2_three_traders();

/// The two-trader mirrored-CES multiplicity family shipped with the corpus.
std::vector<Scenario> e2_family();

/// Cobb-Douglas (weights 0.2 + U[0,1], normalized) or CES (shares U[0.2, 1],
/// elasticity U[0.2, 0.9] or U[1.1, 3]) with equal odds.
UtilitySpec random_utility(UniformDraw& d, int l);

/// Random economy with n, l in {2, 3, 4}, mixed Cobb-Douglas / CES traders
/// and endowments uniform in [0.1, 2]. Platform independent for a seed.
Scenario random_scenario(std::uint64_t seed, std::string name = {});

/// Endowments chosen as demands at a random price and random incomes, so the
/// reference price is a no-trade equilibrium.
Scenario no_trade_scenario(std::uint64_t seed, std::string name = {});

/// Every scenario shipped in the corpus, in file-name order.
std::vector<Scenario> build_corpus();

std::filesystem::path built_in_corpus_dir();
std::vector<Scenario> load_corpus(const std::filesystem::path& dir);
void write_corpus(const std::filesystem::path& dir);

}  // namespace walras
