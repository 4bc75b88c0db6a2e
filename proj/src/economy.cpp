#include "walras/economy.hpp"

#include "walras/errors.hpp"

#include <cmath>
#include <string>

namespace walras {

namespace {

void require_interior(const Vector& x, const char* what) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (!(x[j] > 0.0) || !std::isfinite(x[j])) {
            throw DomainError(std::string(what) + ": component " + std::to_string(j) +
                              " is not strictly positive");
        }
    }
}

void require_size(const UtilitySpec& spec, Eigen::Index size, const char* what) {
    if (spec.goods() != size) {
        throw DomainError(std::string(what) + ": expected " + std::to_string(spec.goods()) +
                          " goods, got " + std::to_string(size));
    }
}

double ces_exponent(const Ces& c) { return (c.elasticity - 1.0) / c.elasticity; }

// sum_k s_k^sigma p_k^(1-sigma)
double ces_price_index(const Ces& c, const Vector& p) {
    double d = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        d += std::pow(c.shares[k], c.elasticity) * std::pow(p[k], 1.0 - c.elasticity);
    }
    return d;
}

}  // namespace

Price::Price(Vector full) : full_(std::move(full)) {
    if (full_.size() < 2) throw DomainError("price: need at least two goods");
    require_interior(full_, "price");
    if (full_[full_.size() - 1] != 1.0) throw DomainError("price: numeraire component must equal 1");
}

Price Price::from_truncated(const Vector& head) {
    Vector full(head.size() + 1);
    full.head(head.size()) = head;
    full[head.size()] = 1.0;
    return Price(std::move(full));
}

UtilitySpec UtilitySpec::cobb_douglas(Vector weights) {
    if (weights.size() < 2) throw ValidationError("cobb_douglas: need at least two goods");
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
        if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) {
            throw ValidationError("cobb_douglas: weights must be positive");
        }
    }
    if (std::abs(weights.sum() - 1.0) > 1e-12) {
        throw ValidationError("cobb_douglas: weights must sum to 1");
    }
    return UtilitySpec(CobbDouglas{std::move(weights)});
}

UtilitySpec UtilitySpec::ces(Vector shares, double elasticity) {
    if (shares.size() < 2) throw ValidationError("ces: need at least two goods");
    for (Eigen::Index j = 0; j < shares.size(); ++j) {
        if (!(shares[j] > 0.0) || !std::isfinite(shares[j])) {
            throw ValidationError("ces: shares must be positive");
        }
    }
    if (!(elasticity > 0.0) || !std::isfinite(elasticity) || std::abs(elasticity - 1.0) <= 1e-9) {
        throw ValidationError("ces: elasticity must be positive and different from 1");
    }
    return UtilitySpec(Ces{std::move(shares), elasticity});
}

Eigen::Index UtilitySpec::goods() const {
    return std::visit([](const auto& f) -> Eigen::Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, CobbDouglas>) {
            return f.weights.size();
        } else {
            return f.shares.size();
        }
    }, form_);
}

Economy::Economy(std::vector<UtilitySpec> utilities, Vector resources)
    : utilities_(std::move(utilities)), resources_(std::move(resources)) {
    if (utilities_.size() < 2) throw ValidationError("economy: need at least two traders");
    if (resources_.size() < 2) throw ValidationError("economy: need at least two goods");
    for (Eigen::Index j = 0; j < resources_.size(); ++j) {
        if (!(resources_[j] > 0.0) || !std::isfinite(resources_[j])) {
            throw ValidationError("economy: total resources must be positive");
        }
    }
    for (std::size_t i = 0; i < utilities_.size(); ++i) {
        if (utilities_[i].goods() != resources_.size()) {
            throw ValidationError("economy: utility " + std::to_string(i) +
                                  " has the wrong number of goods");
        }
    }
}

Allocation::Allocation(Matrix rows, const Economy& eco) : rows_(std::move(rows)) {
    if (rows_.rows() != eco.traders() || rows_.cols() != eco.goods()) {
        throw ValidationError("allocation: expected " + std::to_string(eco.traders()) + "x" +
                              std::to_string(eco.goods()) + " endowment matrix");
    }
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
            if (!(rows_(i, j) >= 0.0) || !std::isfinite(rows_(i, j))) {
                throw ValidationError("allocation: endowments must be nonnegative");
            }
        }
    }
    const Vector total = rows_.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < total.size(); ++j) {
        const double r = eco.resources()[j];
        if (std::abs(total[j] - r) > 1e-10 * std::max(1.0, std::abs(r))) {
            throw ValidationError("allocation: endowments of good " + std::to_string(j) +
                                  " do not sum to the total resources");
        }
    }
}

double utility(const UtilitySpec& spec, const Vector& x) {
    require_size(spec, x.size(), "utility");
    require_interior(x, "utility");
    if (spec.is_cobb_douglas()) {
        // log domain: prod x_j^a_j overflows for extreme bundles
        return std::exp(spec.as_cobb_douglas().weights.dot(x.array().log().matrix()));
    }
    const Ces& c = spec.as_ces();
    const double rho = ces_exponent(c);
    const double s = (c.shares.array() * x.array().pow(rho)).sum();
    return std::pow(s, 1.0 / rho);
}

Vector utility_gradient(const UtilitySpec& spec, const Vector& x) {
    const double u = utility(spec, x);
    if (spec.is_cobb_douglas()) {
        return u * spec.as_cobb_douglas().weights.cwiseQuotient(x);
    }
    const Ces& c = spec.as_ces();
    const double rho = ces_exponent(c);
    const double s = (c.shares.array() * x.array().pow(rho)).sum();
    // u^(1-rho) = u / s
    return (u / s) * (c.shares.array() * x.array().pow(rho - 1.0)).matrix();
}

namespace detail {

Vector demand_unnormalized(const UtilitySpec& spec, const Vector& p, double income) {
    require_size(spec, p.size(), "demand");
    require_interior(p, "demand price");
    if (!(income > 0.0) || !std::isfinite(income)) {
        throw DomainError("demand: income must be strictly positive");
    }
    if (spec.is_cobb_douglas()) {
        return income * spec.as_cobb_douglas().weights.cwiseQuotient(p);
    }
    const Ces& c = spec.as_ces();
    const double d = ces_price_index(c, p);
    Vector x(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        x[j] = income * std::pow(c.shares[j], c.elasticity) * std::pow(p[j], -c.elasticity) / d;
    }
    return x;
}

}  // namespace detail

Vector demand(const UtilitySpec& spec, const Price& p, double income) {
    return detail::demand_unnormalized(spec, p.full(), income);
}

DemandDerivatives demand_derivatives(const UtilitySpec& spec, const Price& p, double income) {
    const Vector f = demand(spec, p, income);
    const Vector& q = p.full();
    const Eigen::Index l = q.size();
    DemandDerivatives out{Matrix::Zero(l, l), f / income};
    if (spec.is_cobb_douglas()) {
        for (Eigen::Index j = 0; j < l; ++j) out.d_price(j, j) = -f[j] / q[j];
        return out;
    }
    const Ces& c = spec.as_ces();
    const double sigma = c.elasticity;
    const double d = ces_price_index(c, q);
    for (Eigen::Index k = 0; k < l; ++k) {
        // d D / d p_k divided by D
        const double dlog_d = (1.0 - sigma) * std::pow(c.shares[k], sigma) * std::pow(q[k], -sigma) / d;
        for (Eigen::Index j = 0; j < l; ++j) out.d_price(j, k) = -f[j] * dlog_d;
        out.d_price(k, k) -= sigma * f[k] / q[k];
    }
    return out;
}

double unit_expenditure(const UtilitySpec& spec, const Price& p) {
    require_size(spec, p.goods(), "unit_expenditure");
    const Vector& q = p.full();
    if (spec.is_cobb_douglas()) {
        const Vector& a = spec.as_cobb_douglas().weights;
        return std::exp(a.dot((q.array() / a.array()).log().matrix()));
    }
    const Ces& c = spec.as_ces();
    return std::pow(ces_price_index(c, q), 1.0 / (1.0 - c.elasticity));
}

double indirect_utility(const UtilitySpec& spec, const Price& p, double income) {
    if (!(income > 0.0)) throw DomainError("indirect_utility: income must be strictly positive");
    return income / unit_expenditure(spec, p);
}

}  // namespace walras
