#pragma once

#include "walras/economy.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace walras {

/// An economy together with its endowments, as stored in economy JSON files.
struct Scenario {
    std::string name;
    std::string family;
    Economy economy;
    Allocation endowments;
    // For constructed no-trade fixtures: the price at which nobody trades.
    std::optional<Vector> reference_price;
};

/// Parses {"n","l","r","utilities","endowments"} plus the optional
/// "name", "family" and "reference_price" fields. Throws ValidationError.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& s);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& arr, const char* what);

}  // namespace walras
