#include "walras/corpus.hpp"

#include "walras/errors.hpp"
#include "walras/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace walras {

UtilitySpec random_utility(UniformDraw& d, int l) {
    if (d.uniform(0.0, 1.0) < 0.5) {
        Vector w(l);
        for (int j = 0; j < l; ++j) w[j] = 0.2 + d.uniform(0.0, 1.0);
        w /= w.sum();
        w[l - 1] = 1.0 - w.head(l - 1).sum();
        return UtilitySpec::cobb_douglas(std::move(w));
    }
    Vector s(l);
    for (int j = 0; j < l; ++j) s[j] = d.uniform(0.2, 1.0);
    const double sigma = d.uniform(0.0, 1.0) < 0.5 ? d.uniform(0.2, 0.9) : d.uniform(1.1, 3.0);
    return UtilitySpec::ces(std::move(s), sigma);
}

namespace {

std::string numbered(const char* stem, int k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%02d", stem, k);
    return buf;
}

}  // namespace

Scenario make_e1() {
    const Vector half = Vector::Constant(2, 0.5);
    Economy eco({UtilitySpec::cobb_douglas(half), UtilitySpec::cobb_douglas(half)}, Vector::Ones(2));
    Allocation omega(Matrix::Identity(2, 2), eco);
    return Scenario{"e1", "e1", std::move(eco), std::move(omega), std::nullopt};
}

Scenario make_e2(double own_share, double elasticity) {
    Vector s1(2), s2(2);
    s1 << own_share, 1.0 - own_share;
    s2 << 1.0 - own_share, own_share;
    Economy eco({UtilitySpec::ces(s1, elasticity), UtilitySpec::ces(s2, elasticity)}, Vector::Ones(2));
    Allocation omega(Matrix::Identity(2, 2), eco);
    char name[64];
    std::snprintf(name, sizeof name, "e2_s%03d_e%03d", static_cast<int>(std::lround(own_share * 100)),
                  static_cast<int>(std::lround(elasticity * 100)));
    return Scenario{name, "e2", std::move(eco), std::move(omega), std::nullopt};
}

Scenario make_e2_three_traders() {
    const Scenario base = make_e2(0.99, 0.1);
    std::vector<UtilitySpec> us = base.economy.utilities();
    us.push_back(UtilitySpec::cobb_douglas(Vector::Constant(2, 0.5)));
    Economy eco(std::move(us), Vector::Constant(2, 1.02));
    Matrix rows(3, 2);
    rows << 1.0, 0.0, 0.0, 1.0, 0.02, 0.02;
    Allocation omega(std::move(rows), eco);
    return Scenario{"e2_three_traders", "e2", std::move(eco), std::move(omega), std::nullopt};
}

std::vector<Scenario> e2_family() {
    std::vector<Scenario> out;
    out.push_back(make_e2(0.95, 0.2));
    out.push_back(make_e2(0.95, 0.1));
    out.push_back(make_e2(0.97, 0.25));
    return out;
}

Scenario random_scenario(std::uint64_t seed, std::string name) {
    UniformDraw d(seed);
    const int n = d.integer(2, 4);
    const int l = d.integer(2, 4);
    std::vector<UtilitySpec> us;
    for (int i = 0; i < n; ++i) us.push_back(random_utility(d, l));
    Matrix rows(n, l);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < l; ++j) rows(i, j) = d.uniform(0.1, 2.0);
    }
    Economy eco(std::move(us), rows.colwise().sum().transpose());
    Allocation omega(std::move(rows), eco);
    return Scenario{std::move(name), "random", std::move(eco), std::move(omega), std::nullopt};
}

Scenario no_trade_scenario(std::uint64_t seed, std::string name) {
    UniformDraw d(seed);
    const int n = d.integer(2, 4);
    const int l = d.integer(2, 4);
    std::vector<UtilitySpec> us;
    for (int i = 0; i < n; ++i) us.push_back(random_utility(d, l));
    Vector head(l - 1);
    for (int j = 0; j < l - 1; ++j) head[j] = std::pow(10.0, d.uniform(-0.5, 0.5));
    const Price p = Price::from_truncated(head);
    Matrix rows(n, l);
    for (int i = 0; i < n; ++i) rows.row(i) = demand(us[static_cast<std::size_t>(i)], p, d.uniform(0.5, 2.0)).transpose();
    Economy eco(std::move(us), rows.colwise().sum().transpose());
    Allocation omega(std::move(rows), eco);
    return Scenario{std::move(name), "no_trade", std::move(eco), std::move(omega), p.full()};
}

std::vector<Scenario> build_corpus() {
    std::vector<Scenario> out;
    out.push_back(make_e1());
    for (auto& s : e2_family()) out.push_back(std::move(s));
    for (int k = 0; k < 50; ++k) out.push_back(no_trade_scenario(0xA11CE000ULL + static_cast<std::uint64_t>(k), numbered("no_trade", k)));
    for (int k = 0; k < 50; ++k) out.push_back(random_scenario(0xB0B00000ULL + static_cast<std::uint64_t>(k), numbered("random", k)));
    std::sort(out.begin(), out.end(), [](const Scenario& a, const Scenario& b) { return a.name < b.name; });
    return out;
}

std::filesystem::path built_in_corpus_dir() { return WALRAS_CORPUS_DIR; }

std::vector<Scenario> load_corpus(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir)) throw ValidationError("corpus directory not found: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    for (const auto& f : files) {
        Scenario s = load_scenario(f);
        if (s.name.empty()) s.name = f.stem().string();
        out.push_back(std::move(s));
    }
    return out;
}

void write_corpus(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const Scenario& s : build_corpus()) save_scenario(dir / (s.name + ".json"), s);
}

}  // namespace walras
