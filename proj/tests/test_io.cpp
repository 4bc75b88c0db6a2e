#include "helpers.hpp"

#include "walras/errors.hpp"
#include "walras/json_io.hpp"
#include "walras/report.hpp"

#include <algorithm>
#include <sstream>

using namespace walras;
using namespace walras::test;
using nlohmann::json;

namespace {

json e1_json() {
    return json::parse(R"({"n":2,"l":2,"r":[1,1],
        "utilities":[{"type":"cobb_douglas","weights":[0.5,0.5]},{"type":"cobb_douglas","weights":[0.5,0.5]}],
        "endowments":[[1,0],[0,1]]})");
}

}  // namespace

TEST_CASE("economy json parses the normative field names") {
    const Scenario s = scenario_from_json(e1_json());
    CHECK(s.economy.traders() == 2);
    CHECK(s.economy.goods() == 2);
    CHECK(s.endowments.rows()(0, 0) == 1.0);
    CHECK_FALSE(s.reference_price);

    json ces = e1_json();
    ces["utilities"][1] = {{"type", "ces"}, {"shares", {0.2, 0.8}}, {"elasticity", 0.5}};
    const Scenario c = scenario_from_json(ces);
    CHECK_FALSE(c.economy.utility(1).is_cobb_douglas());
    CHECK(c.economy.utility(1).as_ces().elasticity == 0.5);
}

TEST_CASE("economy json rejects malformed input") {
    auto broken = [](auto edit) {
        json doc = e1_json();
        edit(doc);
        return doc;
    };
    CHECK_THROWS_AS(scenario_from_json(json::array()), ValidationError);
    CHECK_THROWS_AS(scenario_from_json(broken([](json& d) { d.erase("r"); })), ValidationError);
    CHECK_THROWS_AS(scenario_from_json(broken([](json& d) { d["n"] = 3; })), ValidationError);
    CHECK_THROWS_AS(scenario_from_json(broken([](json& d) { d["r"] = {1, 1, 1}; })), ValidationError);
    CHECK_THROWS_AS(scenario_from_json(broken([](json& d) { d["utilities"][0]["type"] = "leontief"; })),
                    ValidationError);
    CHECK_THROWS_AS(scenario_from_json(broken([](json& d) { d["utilities"][0]["weights"] = {0.5, 0.6}; })),
                    ValidationError);
    CHECK_THROWS_AS(scenario_from_json(broken([](json& d) { d["endowments"][0] = {1, 0.5}; })), ValidationError);
    CHECK_THROWS_AS(scenario_from_json(broken([](json& d) { d["endowments"][0][1] = "x"; })), ValidationError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/economy.json"), ValidationError);
}

TEST_CASE("scenario json round trip") {
    for (const Scenario& s : {make_e1(), make_e2(), random_scenario(4), no_trade_scenario(8)}) {
        const json doc = scenario_to_json(s);
        const Scenario back = scenario_from_json(doc);
        CHECK(scenario_to_json(back) == doc);
        CHECK(back.name == s.name);
        CHECK(back.reference_price.has_value() == s.reference_price.has_value());
    }
}

TEST_CASE("shipped corpus matches the generator") {
    const auto shipped = load_corpus(built_in_corpus_dir());
    const auto built = build_corpus();
    REQUIRE(shipped.size() == built.size());
    for (std::size_t k = 0; k < built.size(); ++k) CHECK(scenario_to_json(shipped[k]) == scenario_to_json(built[k]));
    int e1 = 0, e2 = 0, no_trade = 0, random = 0;
    for (const auto& s : shipped) {
        e1 += s.family == "e1";
        e2 += s.family == "e2";
        no_trade += s.family == "no_trade";
        random += s.family == "random";
        CHECK(s.economy.traders() <= 4);
        CHECK(s.economy.goods() <= 4);
    }
    CHECK(e1 == 1);
    CHECK(e2 == 3);
    CHECK(no_trade == 50);
    CHECK(random == 50);
}

TEST_CASE("numbers print in shortest round-trip form") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1e-10) == "1e-10");
    CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("equilibria csv layout") {
    const Scenario e1 = make_e1();
    const auto recs = find_all_equilibria(e1.economy, e1.endowments);
    std::ostringstream plain;
    write_equilibria_csv(plain, recs);
    CHECK(plain.str().rfind("p_1,residual,det_j,regular,index\n1,", 0) == 0);

    std::vector<DeltaColumns> deltas(1);
    deltas[0].result = delta(e1.economy, e1.endowments, recs[0].p);
    std::ostringstream with;
    write_equilibria_csv(with, recs, &deltas);
    const std::string text = with.str();
    CHECK(text.rfind("p_1,residual,det_j,regular,index,delta,sign_delta,sign_match_index\n", 0) == 0);
    CHECK(text.find(",true,1,") != std::string::npos);
    CHECK(text.substr(text.size() - 8) == ",1,true\n");
}

TEST_CASE("transfer csv and trajectory tsv headers") {
    const Scenario e1 = make_e1();
    const TransferSearch search = detect_transfer_problem(e1.economy, e1.endowments, price1(1.0), 2, 1e-3, 1);
    std::ostringstream csv;
    write_transfer_csv(csv, search.reports, 2);
    const std::string text = csv.str();
    CHECK(text.substr(0, text.find('\n')) == "donor,magnitude,direction_hash,u_before,u_after,delta_u,paradox,p_after_1");
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + static_cast<long>(search.reports.size()));

    std::ostringstream tsv;
    write_trajectory_tsv(tsv, tatonnement(e1.economy, e1.endowments, price1(2.0)));
    CHECK(tsv.str().rfind("time\tp_1\texcess_inf\n0\t2\t", 0) == 0);
}
