#include "walras/acceptance.hpp"

#include "walras/corpus.hpp"
#include "walras/dynamics.hpp"
#include "walras/equilibrium.hpp"
#include "walras/errors.hpp"
#include "walras/manifold.hpp"
#include "walras/report.hpp"
#include "walras/rng.hpp"
#include "walras/transfer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace walras {

namespace {

using Clock = std::chrono::steady_clock;

struct CorpusEquilibrium {
    const Scenario* scenario;
    EquilibriumRecord rec;
};

class Suite {
public:
    Suite(std::vector<CheckResult>& out, const std::function<void(const CheckResult&)>& cb) : out_(out), cb_(cb) {}

    template <class Body>
    void run(const char* id, const char* title, double limit, Body body) {
        CheckResult r{id, title, false, 0.0, limit, {}};
        const auto t0 = Clock::now();
        std::ostringstream detail;
        try {
            r.pass = body(detail);
        } catch (const std::exception& e) {
            r.pass = false;
            detail << " unexpected exception: " << e.what();
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (limit > 0.0 && r.seconds > limit) {
            r.pass = false;
            detail << " (time limit " << limit << " s exceeded)";
        }
        r.detail = detail.str();
        out_.push_back(r);
        if (cb_) cb_(r);
    }

private:
    std::vector<CheckResult>& out_;
    const std::function<void(const CheckResult&)>& cb_;
};

const Scenario* find_named(const std::vector<Scenario>& corpus, const std::string& name) {
    for (const auto& s : corpus) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::vector<const Scenario*> family(const std::vector<Scenario>& corpus, const std::string& f) {
    std::vector<const Scenario*> out;
    for (const auto& s : corpus) {
        if (s.family == f) out.push_back(&s);
    }
    return out;
}

Price random_price(UniformDraw& d, int goods, double decades) {
    Vector head(goods - 1);
    for (int j = 0; j < goods - 1; ++j) head[j] = std::pow(10.0, d.uniform(-decades, decades));
    return Price::from_truncated(head);
}

// Sign changes of z_1 on a dense log grid, refined by bisection. Independent
// of the Newton / multi-start path.
std::vector<double> sign_change_roots(const Scenario& s, int points) {
    auto z1 = [&](double p1) {
        return excess_demand(s.economy, s.endowments, Price::from_truncated(Vector::Constant(1, p1)))[0];
    };
    std::vector<double> roots;
    double prev_p = 1e-3;
    double prev_z = z1(prev_p);
    for (int k = 1; k < points; ++k) {
        const double p = std::pow(10.0, -3.0 + 6.0 * k / (points - 1));
        const double z = z1(p);
        if ((prev_z < 0.0) != (z < 0.0)) {
            double lo = prev_p, hi = p, zlo = prev_z;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double zm = z1(mid);
                if ((zm < 0.0) == (zlo < 0.0)) {
                    lo = mid;
                    zlo = zm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_p = p;
        prev_z = z;
    }
    return roots;
}

double angle_between(const Vector& a, const Vector& b) {
    const Vector unit = b.normalized();
    const double along = a.dot(unit);
    return std::atan2((a - along * unit).norm(), along);
}

// A small redistribution from trial 0: donor gives at most `size` in norm.
std::optional<Allocation> small_transfer(const Scenario& s, double size, std::uint64_t seed) {
    const auto trials = make_transfer_trials(s.endowments, 1, seed);
    if (trials.empty()) return std::nullopt;
    const TransferTrial& t = trials.front();
    double scale = size;
    for (int j = 0; j < s.economy.goods(); ++j) {
        if (t.direction[j] > 0.0) scale = std::min(scale, 0.5 * s.endowments.rows()(t.donor, j) / t.direction[j]);
    }
    return apply_transfer(s.economy, s.endowments, t.donor, scale * t.direction, t.recipients);
}

}  // namespace

std::string format_check_line(const CheckResult& r) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%s] %-3s %-44s %8.3f s", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                  r.title.c_str(), r.seconds);
    return std::string(buf) + " |" + r.detail;
}

std::vector<CheckResult> run_acceptance(const AcceptanceConfig& cfg,
                                        const std::function<void(const CheckResult&)>& on_result) {
    std::vector<CheckResult> results;
    Suite suite(results, on_result);
    const Tolerances& tol = cfg.tol;

    const std::vector<Scenario> corpus = load_corpus(cfg.corpus_dir);
    std::vector<CorpusEquilibrium> equilibria;
    for (const Scenario& s : corpus) {
        for (auto& rec : find_all_equilibria(s.economy, s.endowments, {}, tol)) {
            equilibria.push_back({&s, std::move(rec)});
        }
    }

    suite.run("A1", "Walras's law and homogeneity", 1.0, [&](std::ostream& d) {
        UniformDraw draw(cfg.seed);
        double walras = 0.0, homog = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const int l = draw.integer(2, 4);
            const UtilitySpec spec = random_utility(draw, l);
            const Price p = random_price(draw, l, 2.0);
            const double w = std::pow(10.0, draw.uniform(-2.0, 2.0));
            const double lambda = draw.uniform(0.1, 10.0);
            const Vector f = demand(spec, p, w);
            walras = std::max(walras, std::abs(p.full().dot(f) - w) / w);
            const Vector g = detail::demand_unnormalized(spec, lambda * p.full(), lambda * w);
            homog = std::max(homog, ((g - f).array().abs() / f.array().abs()).maxCoeff());
        }
        d << " max |p.f-w|/w=" << walras << " max homogeneity error=" << homog;
        return walras < 1e-10 && homog < 1e-10;
    });

    suite.run("A2", "Symmetric anchor E1", 1.0, [&](std::ostream& d) {
        const Scenario* e1 = find_named(corpus, "e1");
        if (!e1) {
            d << " corpus has no e1";
            return false;
        }
        const auto recs = find_all_equilibria(e1->economy, e1->endowments, {}, tol);
        if (recs.size() != 1) {
            d << " expected 1 equilibrium, found " << recs.size();
            return false;
        }
        const EquilibriumRecord& r = recs.front();
        const double dp = std::abs(r.p[0] - 1.0);
        const double dj = std::abs(r.det_j + 0.5);
        const DeltaResult dl = delta(e1->economy, e1->endowments, r.p, tol);
        bool converges = true;
        for (double p1 : {0.1, 10.0}) {
            TatonnementOptions opt;
            opt.dt = tol.tatonnement_dt;
            const Trajectory t = tatonnement(e1->economy, e1->endowments,
                                             Price::from_truncated(Vector::Constant(1, p1)), opt);
            converges = converges && t.outcome == TrajectoryOutcome::converged;
        }
        d << " |p1-1|=" << dp << " |detJ+0.5|=" << dj << " index=" << r.index << " delta=" << dl.value
          << " tatonnement converges=" << converges;
        return dp < 1e-8 && dj < 1e-6 && r.index == 1 && dl.value > 0.0 && converges;
    });

    suite.run("A3", "Multiplicity corpus (E2 family)", 10.0, [&](std::ostream& d) {
        const auto members = family(corpus, "e2");
        if (members.empty()) d << " corpus has no e2 economies";
        bool ok = !members.empty();
        for (const Scenario* s : members) {
            const auto oracle = sign_change_roots(*s, 20000);
            const auto recs = find_all_equilibria(s->economy, s->endowments, {}, tol);
            bool match = oracle.size() == 3 && recs.size() == 3;
            int sum = 0;
            for (std::size_t k = 0; match && k < 3; ++k) {
                match = std::abs(recs[k].p[0] - oracle[k]) < 1e-8 * oracle[k] && recs[k].regular;
                sum += recs[k].index;
            }
            match = match && recs[0].index == 1 && recs[1].index == -1 && recs[2].index == 1 && sum == 1;
            d << ' ' << s->name << ": oracle roots=" << oracle.size() << " solver=" << recs.size()
              << (match ? " (+1,-1,+1)" : " MISMATCH");
            ok = ok && match;
        }
        return ok;
    });

    suite.run("A4", "Delta sign equals index", 300.0, [&](std::ostream& d) {
        std::vector<Scenario> extra;
        for (int k = 0; k < 100; ++k) extra.push_back(random_scenario(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(k)));
        std::vector<const Scenario*> pool = family(corpus, "random");
        for (const auto& s : extra) pool.push_back(&s);
        int evaluated = 0, mismatches = 0, near_singular = 0, failures = 0;
        for (const Scenario* s : pool) {
            for (const auto& rec : find_all_equilibria(s->economy, s->endowments, {}, tol)) {
                if (!rec.regular) continue;
                try {
                    const DeltaResult dl = delta(s->economy, s->endowments, rec.p, tol);
                    ++evaluated;
                    if (dl.sign != rec.index) ++mismatches;
                } catch (const NearSingular&) {
                    ++near_singular;
                } catch (const Error&) {
                    ++failures;
                }
            }
        }
        d << " evaluated=" << evaluated << " mismatches=" << mismatches << " near_singular=" << near_singular
          << " solver_failures=" << failures;
        return evaluated >= 100 && mismatches == 0 && failures == 0;
    });

    suite.run("A5", "Transfer paradox iff index -1", 600.0, [&](std::ostream& d) {
        int checked = 0, mismatches = 0, negative = 0, lost = 0;
        for (const auto& ce : equilibria) {
            if (!ce.rec.regular) continue;
            const bool expect = ce.rec.index == -1;
            negative += expect;
            for (double m : cfg.magnitudes) {
                const TransferSearch res = detect_transfer_problem(ce.scenario->economy, ce.scenario->endowments,
                                                                   ce.rec.p, cfg.trials, m, cfg.seed, tol);
                ++checked;
                lost += res.branch_lost;
                if (res.found != expect) {
                    ++mismatches;
                    d << " mismatch@" << ce.scenario->name << "(p1=" << ce.rec.p[0] << ",m=" << m << ")";
                }
            }
        }
        d << " searches=" << checked << " index-1 equilibria=" << negative << " mismatches=" << mismatches
          << " branch_lost=" << lost;
        return checked > 0 && negative > 0 && mismatches == 0;
    });

    suite.run("A6", "No-trade equilibria: regular, index +1", 30.0, [&](std::ostream& d) {
        const auto members = family(corpus, "no_trade");
        int good = 0;
        for (const Scenario* s : members) {
            if (!s->reference_price) continue;
            const Price ref(*s->reference_price);
            for (const auto& ce : equilibria) {
                if (ce.scenario != s || relative_price_distance(ce.rec.p, ref) >= 1e-6) continue;
                const DeltaResult dl = delta(s->economy, s->endowments, ce.rec.p, tol);
                if (ce.rec.regular && ce.rec.index == 1 && dl.value > 0.0) ++good;
            }
        }
        d << " fixtures=" << members.size() << " regular with index +1 and delta>0: " << good;
        return members.size() == 50 && good == 50;
    });

    suite.run("A7", "Spectrally stable implies index +1", 30.0, [&](std::ostream& d) {
        int stable = 0, violations = 0, plus = 0;
        for (const auto& ce : equilibria) {
            if (!ce.rec.regular) continue;
            plus += ce.rec.index == 1;
            const StabilityReport st = stability(ce.rec, tol);
            if (st.classification == Stability::stable) {
                ++stable;
                if (ce.rec.index != 1) ++violations;
            }
        }
        d << " stable=" << stable << " violations=" << violations << " index+1 equilibria=" << plus;
        return violations == 0 && plus > 0;
    });

    suite.run("A8", "Numerical hygiene", 60.0, [&](std::ostream& d) {
        UniformDraw draw(cfg.seed + 8);
        double jac = 0.0;
        for (int k = 0; k < 200; ++k) {
            const int n = draw.integer(2, 4);
            const int l = draw.integer(2, 4);
            std::vector<UtilitySpec> us;
            for (int i = 0; i < n; ++i) {
                Vector w(l);
                for (int j = 0; j < l; ++j) w[j] = 0.2 + draw.uniform(0.0, 1.0);
                w /= w.sum();
                w[l - 1] = 1.0 - w.head(l - 1).sum();
                us.push_back(UtilitySpec::cobb_douglas(w));
            }
            Matrix rows(n, l);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < l; ++j) rows(i, j) = draw.uniform(0.1, 2.0);
            }
            const Economy eco(std::move(us), rows.colwise().sum().transpose());
            const Allocation omega(rows, eco);
            const Price p = random_price(draw, l, 1.0);
            const Matrix a = jacobian(eco, omega, p, JacobianMethod::analytic);
            const Matrix f = jacobian(eco, omega, p, JacobianMethod::finite_difference, 1e-6);
            jac = std::max(jac, (a - f).norm() / a.norm());
        }

        double halving = 0.0;
        int halving_cases = 0, selection_cases = 0;
        for (const auto& ce : equilibria) {
            if (ce.scenario->family != "random") continue;
            ++halving_cases;
            const UtilityLevels u = utility_levels_at(ce.scenario->economy, ce.scenario->endowments, ce.rec.p);
            const Matrix c1 = m_jacobian_columns(ce.scenario->economy, u, tol.m_step_scale, tol, ce.rec.p);
            const Matrix c2 = m_jacobian_columns(ce.scenario->economy, u, tol.m_step_scale / 2.0, tol, ce.rec.p);
            halving = std::max(halving, (c1 - c2).norm() / c1.norm());
        }

        double selection = 0.0;
        for (const auto& ce : equilibria) {
            const Scenario& s = *ce.scenario;
            const auto shifted = small_transfer(s, 5e-4, cfg.seed);
            if (!shifted) continue;
            ++selection_cases;
            const Price one = equilibrium_selection(s.economy, s.endowments, ce.rec.p, *shifted, 1, tol);
            const Price many = equilibrium_selection(s.economy, s.endowments, ce.rec.p, *shifted, 32, tol);
            selection = std::max(selection, (one.full() - many.full()).lpNorm<Eigen::Infinity>() /
                                                std::max(1.0, ce.rec.p.full().lpNorm<Eigen::Infinity>()));
        }
        d << " jacobian rel err=" << jac << " dM/du step-halving=" << halving << " (" << halving_cases
          << " equilibria) selection 1 vs 32 steps=" << selection << " (" << selection_cases << " equilibria)";
        return jac < 1e-6 && halving < 1e-5 && selection < 1e-9 && halving_cases > 0 && selection_cases > 0;
    });

    if (!cfg.supplementary) return results;

    suite.run("S1", "Aggregate Walras's law", 0.0, [&](std::ostream& d) {
        UniformDraw draw(cfg.seed + 1);
        const auto pool = family(corpus, "random");
        if (pool.empty()) {
            d << " corpus has no random economies";
            return false;
        }
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const Scenario& s = *pool[static_cast<std::size_t>(draw.integer(0, static_cast<int>(pool.size()) - 1))];
            const Price p = random_price(draw, s.economy.goods(), 1.0);
            worst = std::max(worst, std::abs(p.full().dot(excess_demand(s.economy, s.endowments, p))));
        }
        d << " max |p.z|=" << worst;
        return worst < 1e-10;
    });

    suite.run("S2", "Odd equilibrium count, indices sum to +1", 0.0, [&](std::ostream& d) {
        int bad = 0;
        for (const Scenario& s : corpus) {
            int count = 0, sum = 0;
            bool all_regular = true;
            for (const auto& ce : equilibria) {
                if (ce.scenario != &s) continue;
                ++count;
                sum += ce.rec.index;
                all_regular = all_regular && ce.rec.regular;
            }
            if (all_regular && (count % 2 == 0 || sum != 1)) {
                ++bad;
                d << ' ' << s.name << "(count=" << count << ",sum=" << sum << ")";
            }
        }
        d << " economies=" << corpus.size() << " violations=" << bad;
        return bad == 0;
    });

    suite.run("S3", "OpenMP kernels match serial reference", 0.0, [&](std::ostream& d) {
        int differ = 0, compared = 0;
        for (std::size_t k = 0; k < corpus.size(); k += 5) {
            const Scenario& s = corpus[k];
            const auto a = find_all_equilibria(s.economy, s.endowments, {}, tol);
            const auto b = find_all_equilibria_serial(s.economy, s.endowments, {}, tol);
            const auto c = find_all_equilibria(s.economy, s.endowments, {}, tol);
            ++compared;
            bool same = a.size() == b.size() && a.size() == c.size();
            for (std::size_t r = 0; same && r < a.size(); ++r) {
                same = a[r].p.full() == b[r].p.full() && a[r].p.full() == c[r].p.full();
            }
            differ += !same;
        }
        bool transfer_same = true;
        for (const auto& ce : equilibria) {
            if (ce.rec.index != -1) continue;
            const auto& s = *ce.scenario;
            const auto a = detect_transfer_problem(s.economy, s.endowments, ce.rec.p, 64, 1e-3, cfg.seed, tol);
            const auto b = detect_transfer_problem_serial(s.economy, s.endowments, ce.rec.p, 64, 1e-3, cfg.seed, tol);
            transfer_same = transfer_same && a.reports.size() == b.reports.size() && a.found == b.found;
            for (std::size_t r = 0; transfer_same && r < a.reports.size(); ++r) {
                transfer_same = a.reports[r].u_donor_after == b.reports[r].u_donor_after &&
                                a.reports[r].direction_hash == b.reports[r].direction_hash;
            }
        }
        d << " scans compared=" << compared << " differing=" << differ << " transfer searches identical="
          << transfer_same;
        return differ == 0 && transfer_same;
    });

    suite.run("S4", "Section manifold and Pareto conditions", 0.0, [&](std::ostream& d) {
        double residual = 0.0, round_trip = 0.0, foc = 0.0;
        for (const auto& ce : equilibria) {
            const Scenario& s = *ce.scenario;
            if (s.family != "random") continue;
            const UtilityLevels u = utility_levels_at(s.economy, s.endowments, ce.rec.p);
            const PriceIncomePoint pt = section_point(s.economy, u, tol);
            residual = std::max(residual, section_residual(s.economy, pt));
            const int l = s.economy.goods();
            const int n = s.economy.traders();
            Vector expected(l + n - 2);
            expected.head(l - 1) = ce.rec.p.truncated();
            expected.tail(n - 1) = s.endowments.incomes(ce.rec.p).head(n - 1);
            round_trip = std::max(round_trip, (pt.coords - expected).lpNorm<Eigen::Infinity>() /
                                                  std::max(1.0, expected.lpNorm<Eigen::Infinity>()));
            const ParetoPoint pp = pareto_point(s.economy, u, tol);
            for (int i = 0; i < n; ++i) {
                const Vector x = pp.allocation.row(i).transpose();
                foc = std::max(foc, angle_between(utility_gradient(s.economy.utility(i), x), pp.price.full()));
            }
        }
        d << " B(r) residual=" << residual << " round trip=" << round_trip << " FOC angle=" << foc;
        return residual < 1e-8 && round_trip < 1e-7 && foc < 1e-7;
    });

    suite.run("S5", "Lower-boundary anchor has positive Delta", 0.0, [&](std::ostream& d) {
        int bad = 0;
        for (const Scenario& s : corpus) {
            const BoundaryAnchor a = lower_boundary_anchor(s.economy, tol);
            const int l = s.economy.goods();
            const int n = s.economy.traders();
            const Matrix lower_left = a.matrix.bottomLeftCorner(n - 1, l - 1);
            const Matrix w_block = a.matrix.bottomRightCorner(n - 1, n - 1);
            const bool diagonal = (w_block - Matrix(w_block.diagonal().asDiagonal())).isZero(0.0) &&
                                  (w_block.diagonal().array() > 0.0).all();
            if (!(a.value > 0.0) || !lower_left.isZero(0.0) || !diagonal) ++bad;
        }
        d << " economies=" << corpus.size() << " violations=" << bad;
        return bad == 0;
    });

    suite.run("S6", "Transfers conserve total resources", 0.0, [&](std::ostream& d) {
        double worst = 0.0;
        for (const Scenario& s : corpus) {
            for (const TransferTrial& t : make_transfer_trials(s.endowments, 20, cfg.seed)) {
                try {
                    const Vector amount = 1e-3 * s.endowments.row(t.donor).norm() * t.direction;
                    const Allocation moved = apply_transfer(s.economy, s.endowments, t.donor, amount, t.recipients);
                    const Vector total = moved.rows().colwise().sum().transpose();
                    worst = std::max(worst, (total - s.economy.resources()).lpNorm<Eigen::Infinity>());
                } catch (const InvalidTransfer&) {
                }
            }
        }
        d << " max |sum omega' - r|=" << worst;
        return worst < 1e-12;
    });

    return results;
}

}  // namespace walras
