// Command-line front end: solve, scan, delta, transfer, dynamics, verify.
#include "walras/acceptance.hpp"
#include "walras/corpus.hpp"
#include "walras/dynamics.hpp"
#include "walras/equilibrium.hpp"
#include "walras/errors.hpp"
#include "walras/json_io.hpp"
#include "walras/manifold.hpp"
#include "walras/report.hpp"
#include "walras/transfer.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace walras;

namespace {

constexpr int exit_validation = 1;
constexpr int exit_no_convergence = 2;
constexpr int exit_suite_failed = 3;

struct Options {
    std::string command;
    std::string economy;
    std::string out = "walras_out";
    std::string corpus;
    std::uint64_t seed = 20261019;
    int trials = 500;
    std::vector<double> magnitudes;
    int grid_points = 0;
    double tol_newton = default_tolerances().newton_residual;
    int equilibrium_index = -1;
    std::vector<double> start;
    double dt = default_tolerances().tatonnement_dt;
    double t_max = 1e3;
};

class Failure : public std::runtime_error {
public:
    Failure(int code, std::string kind, const std::string& msg)
        : std::runtime_error(msg), code(code), kind(std::move(kind)) {}
    int code;
    std::string kind;
};

int fail(int code, const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
}

json tolerances_json(const Tolerances& t) {
    return {{"newton_residual", t.newton_residual},
            {"newton_max_iter", t.newton_max_iter},
            {"backtrack_factor", t.backtrack_factor},
            {"max_backtracks", t.max_backtracks},
            {"positivity_guard", t.positivity_guard},
            {"regularity_scale", t.regularity_scale},
            {"dedup_relative", t.dedup_relative},
            {"section_residual", t.section_residual},
            {"pareto_fallback_starts", t.pareto_fallback_starts},
            {"pareto_fallback_seed", t.pareto_fallback_seed},
            {"m_step_scale", t.m_step_scale},
            {"delta_near_singular", t.delta_near_singular},
            {"paradox_margin", t.paradox_margin},
            {"continuation_steps", t.continuation_steps},
            {"trust_factor", t.trust_factor},
            {"trust_floor", t.trust_floor},
            {"tatonnement_dt", t.tatonnement_dt},
            {"tatonnement_guard", t.tatonnement_guard},
            {"max_dt_halvings", t.max_dt_halvings},
            {"stability_margin", t.stability_margin}};
}

json price_json(const Price& p) { return vector_to_json(p.full()); }

class Run {
public:
    explicit Run(const Options& o) : opt_(o) {
        tol_.newton_residual = o.tol_newton;
        tol_.tatonnement_dt = o.dt;
        scan_.points_per_axis = o.grid_points;
        magnitudes_ = o.magnitudes;
        if (magnitudes_.empty()) {
            magnitudes_ = o.command == "verify" ? std::vector<double>{1e-3, 1e-4} : std::vector<double>{1e-2, 1e-3, 1e-4};
        }
        summary_["command"] = o.command;
        summary_["seed"] = o.seed;
        summary_["inputs"] = {{"economy_path", o.economy},
                              {"out", o.out},
                              {"seed", o.seed},
                              {"trials", o.trials},
                              {"magnitudes", magnitudes_},
                              {"grid_points", o.grid_points},
                              {"equilibrium_index", o.equilibrium_index},
                              {"start", o.start},
                              {"dt", o.dt},
                              {"t_max", o.t_max},
                              {"tolerances", tolerances_json(tol_)}};
        summary_["findings"] = json::object();
        summary_["checks"] = json::object();
    }

    int execute() {
        fs::create_directories(opt_.out);
        int code = 0;
        if (opt_.command == "verify") {
            code = verify();
        } else {
            load_economy();
            if (opt_.command == "solve") solve();
            else if (opt_.command == "scan") scan(false);
            else if (opt_.command == "delta") scan(true);
            else if (opt_.command == "transfer") transfer();
            else if (opt_.command == "dynamics") dynamics();
        }
        std::ofstream(fs::path(opt_.out) / "summary.json") << summary_.dump(2) << '\n';
        return code;
    }

private:
    void load_economy() {
        if (opt_.economy.empty()) throw Failure(exit_validation, "validation_error", "--economy is required");
        scenario_.emplace(load_scenario(opt_.economy));
        summary_["inputs"]["economy"] = scenario_to_json(*scenario_);
        summary_["inputs"]["grid_points_resolved"] = scan_.resolved_points(eco().goods());
    }

    const Economy& eco() const { return scenario_->economy; }
    const Allocation& omega() const { return scenario_->endowments; }

    void check(const std::string& name, bool pass) { summary_["checks"][name] = pass ? "pass" : "fail"; }

    std::ofstream artifact(const std::string& file) {
        summary_["artifacts"].push_back(file);
        return std::ofstream(fs::path(opt_.out) / file);
    }

    std::vector<EquilibriumRecord> equilibria() {
        auto recs = find_all_equilibria(eco(), omega(), scan_, tol_);
        if (recs.empty()) throw Failure(exit_no_convergence, "no_convergence", "scan found no equilibrium");
        return recs;
    }

    const EquilibriumRecord& pick(const std::vector<EquilibriumRecord>& recs) const {
        const int k = std::max(opt_.equilibrium_index, 0);
        if (k >= static_cast<int>(recs.size())) {
            throw Failure(exit_validation, "validation_error",
                          "--equilibrium-index " + std::to_string(k) + " out of range (found " +
                              std::to_string(recs.size()) + ")");
        }
        return recs[static_cast<std::size_t>(k)];
    }

    Price start_price() const {
        const int l = eco().goods();
        if (opt_.start.empty()) return Price(Vector::Ones(l));
        if (static_cast<int>(opt_.start.size()) != l - 1) {
            throw Failure(exit_validation, "validation_error", "--start needs l-1 = " + std::to_string(l - 1) + " values");
        }
        return Price::from_truncated(Eigen::Map<const Vector>(opt_.start.data(), l - 1));
    }

    static json record_json(const EquilibriumRecord& r) {
        return {{"p", price_json(r.p)},     {"residual", r.residual_norm}, {"det_j", r.det_j},
                {"regular", r.regular},    {"index", r.index},            {"iterations", r.iterations}};
    }

    void solve() {
        const EquilibriumRecord rec = find_equilibrium(eco(), omega(), start_price(), tol_);
        auto out = artifact("equilibria.csv");
        write_equilibria_csv(out, {rec});
        summary_["findings"]["equilibrium"] = record_json(rec);
        check("converged", rec.residual_norm < tol_.newton_residual);
        check("regular", rec.regular);
    }

    void scan(bool with_delta) {
        const auto recs = equilibria();
        std::vector<DeltaColumns> deltas;
        int index_sum = 0, mismatches = 0, near_singular = 0;
        bool all_regular = true;
        json list = json::array();
        for (const auto& r : recs) {
            index_sum += r.index;
            all_regular = all_regular && r.regular;
            json item = record_json(r);
            if (with_delta) {
                DeltaColumns col;
                try {
                    col.result = delta(eco(), omega(), r.p, tol_);
                    item["delta"] = col.result->value;
                    item["sign_delta"] = col.result->sign;
                    mismatches += r.regular && col.result->sign != r.index;
                } catch (const NearSingular& e) {
                    col.error = e.kind();
                    item["delta_error"] = col.error;
                    ++near_singular;
                }
                deltas.push_back(std::move(col));
            }
            list.push_back(std::move(item));
        }
        auto out = artifact("equilibria.csv");
        write_equilibria_csv(out, recs, with_delta ? &deltas : nullptr);
        summary_["findings"]["count"] = recs.size();
        summary_["findings"]["index_sum"] = index_sum;
        summary_["findings"]["equilibria"] = std::move(list);
        check("all_regular", all_regular);
        if (all_regular) check("index_sum_is_one", index_sum == 1);
        if (with_delta) {
            summary_["findings"]["near_singular"] = near_singular;
            summary_["findings"]["sign_mismatches"] = mismatches;
            check("delta_sign_matches_index", mismatches == 0);
        }
    }

    void transfer() {
        const auto recs = equilibria();
        const EquilibriumRecord& rec = pick(recs);
        if (!rec.regular) throw Failure(exit_no_convergence, "not_regular", "selected equilibrium is not regular");
        summary_["findings"]["equilibrium"] = record_json(rec);
        std::vector<TransferReport> all;
        json per = json::array();
        for (double m : magnitudes_) {
            const TransferSearch res = detect_transfer_problem(eco(), omega(), rec.p, opt_.trials, m, opt_.seed, tol_);
            json item{{"magnitude", m},
                      {"found", res.found},
                      {"attempted", res.attempted},
                      {"branch_lost", res.branch_lost},
                      {"invalid", res.invalid}};
            if (res.best) {
                item["best_delta_u"] = res.best->delta_u();
                item["best_donor"] = res.best->donor + 1;
            }
            per.push_back(std::move(item));
            check("found_iff_index_minus_one@" + format_number(m), res.found == (rec.index == -1));
            all.insert(all.end(), res.reports.begin(), res.reports.end());
        }
        auto out = artifact("transfers.csv");
        write_transfer_csv(out, all, eco().goods());
        summary_["findings"]["searches"] = std::move(per);
    }

    void dynamics() {
        const auto recs = equilibria();
        auto table = artifact("stability.csv");
        for (int j = 0; j + 1 < eco().goods(); ++j) table << "p_" << j + 1 << ',';
        table << "index,max_real_part,classification\n";
        bool implication = true;
        for (const auto& r : recs) {
            if (!r.regular) continue;
            const StabilityReport st = stability(r, tol_);
            for (int j = 0; j + 1 < eco().goods(); ++j) table << format_number(r.p[j]) << ',';
            table << r.index << ',' << format_number(st.max_real_part) << ',' << to_string(st.classification) << '\n';
            implication = implication && (st.classification != Stability::stable || r.index == 1);
        }
        check("stable_implies_index_plus_one", implication);

        Price p0 = start_price();
        if (opt_.start.empty() && opt_.equilibrium_index >= 0) {
            p0 = Price::from_truncated(pick(recs).p.truncated() * (1.0 + 1e-4));
        }
        TatonnementOptions topt;
        topt.dt = opt_.dt;
        topt.t_max = opt_.t_max;
        topt.guard = tol_.tatonnement_guard;
        topt.max_halvings = tol_.max_dt_halvings;
        const Trajectory traj = tatonnement(eco(), omega(), p0, topt);
        auto out = artifact("trajectory.tsv");
        write_trajectory_tsv(out, traj);
        summary_["findings"]["trajectory"] = {{"start", price_json(p0)},
                                              {"outcome", to_string(traj.outcome)},
                                              {"points", traj.points.size()},
                                              {"final_dt", traj.final_dt},
                                              {"final_price", vector_to_json(traj.points.back().price)}};
    }

    int verify() {
        AcceptanceConfig cfg;
        cfg.corpus_dir = opt_.corpus.empty() ? built_in_corpus_dir() : fs::path(opt_.corpus);
        cfg.seed = opt_.seed;
        cfg.trials = opt_.trials;
        cfg.magnitudes = magnitudes_;
        cfg.tol = tol_;
        summary_["inputs"]["corpus"] = cfg.corpus_dir.string();
        const auto results = run_acceptance(cfg, [](const CheckResult& r) {
            std::cout << format_check_line(r) << std::endl;
        });
        auto out = artifact("checks.csv");
        out << "id,title,pass,time_limit_s\n";
        bool all = true;
        for (const auto& r : results) {
            out << r.id << ",\"" << r.title << "\"," << (r.pass ? "true" : "false") << ',' << format_number(r.time_limit)
                << '\n';
            check(r.id, r.pass);
            all = all && r.pass;
        }
        summary_["findings"]["suites"] = results.size();
        return all ? 0 : exit_suite_failed;
    }

    Options opt_;
    Tolerances tol_;
    ScanSpec scan_;
    std::vector<double> magnitudes_;
    std::optional<Scenario> scenario_;
    json summary_;
};

void apply_worker_env() {
    const char* env = std::getenv("WALRAS_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw Failure(exit_validation, "validation_error", "WALRAS_THREADS must be a positive integer");
    omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Exchange-economy equilibria, indices and the transfer paradox"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub, bool needs_economy) {
        auto* e = sub->add_option("--economy", o.economy, "economy JSON file");
        if (needs_economy) e->required();
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
        sub->add_option("--grid-points", o.grid_points, "scan points per price axis (0: by dimension)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--tol-newton", o.tol_newton, "Newton residual tolerance")
            ->check(CLI::PositiveNumber)->capture_default_str();
    };

    auto* solve = app.add_subcommand("solve", "damped Newton from one start price");
    common(solve, true);
    solve->add_option("--start", o.start, "start price p_1..p_{l-1} (default all ones)");
    common(app.add_subcommand("scan", "multi-start search for all equilibria"), true);
    common(app.add_subcommand("delta", "scan, then evaluate Delta at each equilibrium"), true);

    auto* transfer = app.add_subcommand("transfer", "search for the transfer paradox at one equilibrium");
    common(transfer, true);
    transfer->add_option("--equilibrium-index", o.equilibrium_index, "0-based position in the sorted scan")
        ->check(CLI::NonNegativeNumber);
    transfer->add_option("--trials", o.trials, "random transfer directions")->check(CLI::PositiveNumber);
    transfer->add_option("--magnitude", o.magnitudes, "relative transfer size (repeatable)")
        ->check(CLI::PositiveNumber);

    auto* dyn = app.add_subcommand("dynamics", "stability of each equilibrium plus one tatonnement path");
    common(dyn, true);
    dyn->add_option("--start", o.start, "start price p_1..p_{l-1}");
    dyn->add_option("--equilibrium-index", o.equilibrium_index, "start 1e-4 off this equilibrium")
        ->check(CLI::NonNegativeNumber);
    dyn->add_option("--dt", o.dt, "initial RK4 step")->check(CLI::PositiveNumber)->capture_default_str();
    dyn->add_option("--t-max", o.t_max, "integration horizon")->check(CLI::PositiveNumber)->capture_default_str();

    auto* verify = app.add_subcommand("verify", "acceptance and property suite on the built-in corpus");
    common(verify, false);
    verify->add_option("--corpus", o.corpus, "corpus directory (default: built-in)");
    verify->add_option("--trials", o.trials, "transfer trials per equilibrium")->check(CLI::PositiveNumber);
    verify->add_option("--magnitude", o.magnitudes, "relative transfer size (repeatable)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(exit_validation, "usage_error", e.what());
    }
    o.command = app.get_subcommands().front()->get_name();

    try {
        apply_worker_env();
        return Run(o).execute();
    } catch (const Failure& f) {
        return fail(f.code, f.kind, f.what());
    } catch (const ValidationError& e) {
        return fail(exit_validation, e.kind(), e.what());
    } catch (const DomainError& e) {
        return fail(exit_validation, e.kind(), e.what());
    } catch (const InvalidTransfer& e) {
        return fail(exit_validation, e.kind(), e.what());
    } catch (const Error& e) {
        return fail(exit_no_convergence, e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail(exit_validation, "error", e.what());
    }
}
