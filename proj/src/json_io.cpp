#include "walras/json_io.hpp"

#include "walras/errors.hpp"

#include <fstream>

namespace walras {

using nlohmann::json;

nlohmann::json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index j = 0; j < v.size(); ++j) arr.push_back(v[j]);
    return arr;
}

Vector vector_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) throw ValidationError(std::string(what) + ": expected an array");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t j = 0; j < arr.size(); ++j) {
        if (!arr[j].is_number()) throw ValidationError(std::string(what) + ": expected numbers");
        v[static_cast<Eigen::Index>(j)] = arr[j].get<double>();
    }
    return v;
}

namespace {

const json& field(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ValidationError(std::string("economy json: missing field \"") + key + "\"");
    return *it;
}

UtilitySpec utility_from_json(const json& u) {
    const auto type = field(u, "type").get<std::string>();
    if (type == "cobb_douglas") return UtilitySpec::cobb_douglas(vector_from_json(field(u, "weights"), "weights"));
    if (type == "ces") {
        const json& e = field(u, "elasticity");
        if (!e.is_number()) throw ValidationError("ces: elasticity must be a number");
        return UtilitySpec::ces(vector_from_json(field(u, "shares"), "shares"), e.get<double>());
    }
    throw ValidationError("economy json: unknown utility type \"" + type + "\"");
}

json utility_to_json(const UtilitySpec& u) {
    if (u.is_cobb_douglas()) return {{"type", "cobb_douglas"}, {"weights", vector_to_json(u.as_cobb_douglas().weights)}};
    return {{"type", "ces"}, {"shares", vector_to_json(u.as_ces().shares)}, {"elasticity", u.as_ces().elasticity}};
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
    try {
        if (!doc.is_object()) throw ValidationError("economy json: expected an object");
        const int n = field(doc, "n").get<int>();
        const int l = field(doc, "l").get<int>();
        Vector r = vector_from_json(field(doc, "r"), "r");
        const json& us = field(doc, "utilities");
        if (!us.is_array() || static_cast<int>(us.size()) != n) {
            throw ValidationError("economy json: \"utilities\" must list n entries");
        }
        if (r.size() != l) throw ValidationError("economy json: \"r\" must have l entries");
        std::vector<UtilitySpec> utilities;
        for (const auto& u : us) utilities.push_back(utility_from_json(u));
        Economy eco(std::move(utilities), std::move(r));

        const json& rows = field(doc, "endowments");
        if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
            throw ValidationError("economy json: \"endowments\" must list n rows");
        }
        Matrix omega(n, l);
        for (int i = 0; i < n; ++i) {
            Vector row = vector_from_json(rows[static_cast<std::size_t>(i)], "endowments");
            if (row.size() != l) throw ValidationError("economy json: endowment rows must have l entries");
            omega.row(i) = row.transpose();
        }
        Allocation alloc(std::move(omega), eco);

        std::optional<Vector> reference;
        if (auto it = doc.find("reference_price"); it != doc.end()) {
            reference = vector_from_json(*it, "reference_price");
            if (reference->size() != l) throw ValidationError("economy json: reference_price must have l entries");
        }
        return Scenario{doc.value("name", std::string{}), doc.value("family", std::string{}),
                        std::move(eco), std::move(alloc), std::move(reference)};
    } catch (const json::exception& e) {
        throw ValidationError(std::string("economy json: ") + e.what());
    }
}

json scenario_to_json(const Scenario& s) {
    json doc;
    if (!s.name.empty()) doc["name"] = s.name;
    if (!s.family.empty()) doc["family"] = s.family;
    doc["n"] = s.economy.traders();
    doc["l"] = s.economy.goods();
    doc["r"] = vector_to_json(s.economy.resources());
    json us = json::array();
    for (const auto& u : s.economy.utilities()) us.push_back(utility_to_json(u));
    doc["utilities"] = us;
    json rows = json::array();
    for (int i = 0; i < s.endowments.traders(); ++i) rows.push_back(vector_to_json(s.endowments.row(i)));
    doc["endowments"] = rows;
    if (s.reference_price) doc["reference_price"] = vector_to_json(*s.reference_price);
    return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open economy file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("economy file " + path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << scenario_to_json(s).dump(2) << '\n';
}

}  // namespace walras
