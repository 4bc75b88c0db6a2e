#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace walras {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Strictly positive price vector whose last component (the numeraire) is 1.
class Price {
public:
    /// Validates positivity and the numeraire; throws DomainError.
    explicit Price(Vector full);

    /// Builds a price from its first l-1 components; the numeraire is appended.
    static Price from_truncated(const Vector& head);

    const Vector& full() const { return full_; }
    Vector truncated() const { return full_.head(full_.size() - 1); }
    Eigen::Index goods() const { return full_.size(); }
    double operator[](Eigen::Index j) const { return full_[j]; }

private:
    Vector full_;
};

struct CobbDouglas {
    Vector weights;  // positive, sum to 1
};

struct Ces {
    Vector shares;      // positive
    double elasticity;  // positive, != 1
};

/// Cobb-Douglas or CES preferences. Both families are homogeneous of
/// degree one, so indirect utility is income divided by unit expenditure.
class UtilitySpec {
public:
    static UtilitySpec cobb_douglas(Vector weights);
    static UtilitySpec ces(Vector shares, double elasticity);

    Eigen::Index goods() const;
    bool is_cobb_douglas() const { return std::holds_alternative<CobbDouglas>(form_); }
    const CobbDouglas& as_cobb_douglas() const { return std::get<CobbDouglas>(form_); }
    const Ces& as_ces() const { return std::get<Ces>(form_); }

private:
    explicit UtilitySpec(std::variant<CobbDouglas, Ces> form) : form_(std::move(form)) {}
    std::variant<CobbDouglas, Ces> form_;
};

class Economy {
public:
    Economy(std::vector<UtilitySpec> utilities, Vector resources);

    int traders() const { return static_cast<int>(utilities_.size()); }
    int goods() const { return static_cast<int>(resources_.size()); }
    const std::vector<UtilitySpec>& utilities() const { return utilities_; }
    const UtilitySpec& utility(int i) const { return utilities_[static_cast<std::size_t>(i)]; }
    const Vector& resources() const { return resources_; }

private:
    std::vector<UtilitySpec> utilities_;
    Vector resources_;
};

/// Endowment matrix, one row per trader, rows summing to the total resources.
class Allocation {
public:
    /// Checks shape, nonnegativity and the resource constraint (1e-10).
    Allocation(Matrix rows, const Economy& eco);

    const Matrix& rows() const { return rows_; }
    Vector row(int i) const { return rows_.row(i).transpose(); }
    int traders() const { return static_cast<int>(rows_.rows()); }
    int goods() const { return static_cast<int>(rows_.cols()); }

    /// Incomes p . omega_i for every trader.
    Vector incomes(const Price& p) const { return rows_ * p.full(); }

private:
    Matrix rows_;
};

double utility(const UtilitySpec& spec, const Vector& x);
Vector utility_gradient(const UtilitySpec& spec, const Vector& x);

/// Utility-maximizing bundle on the budget set {x : p.x <= income}.
Vector demand(const UtilitySpec& spec, const Price& p, double income);

struct DemandDerivatives {
    Matrix d_price;   // l x l, d f_j / d p_k at fixed income
    Vector d_income;  // d f_j / d w
};

DemandDerivatives demand_derivatives(const UtilitySpec& spec, const Price& p, double income);

/// Minimum expenditure reaching utility 1 at prices p.
double unit_expenditure(const UtilitySpec& spec, const Price& p);

/// Utility of the demanded bundle, computed as income / unit_expenditure.
double indirect_utility(const UtilitySpec& spec, const Price& p, double income);

namespace detail {
// Closed-form demand for an arbitrary positive price vector (no numeraire
// normalization); homogeneous of degree zero in (p, income).
Vector demand_unnormalized(const UtilitySpec& spec, const Vector& p, double income);
}  // namespace detail

}  // namespace walras
