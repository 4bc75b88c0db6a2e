#pragma once

#include "walras/corpus.hpp"
#include "walras/economy.hpp"
#include "walras/equilibrium.hpp"

#include <doctest.h>

namespace walras::test {

inline Price price1(double p1) { return Price::from_truncated(Vector::Constant(1, p1)); }

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) v[k++] = x;
    return v;
}

inline Matrix mat(int rows, int cols, std::initializer_list<double> xs) {
    Matrix m(rows, cols);
    auto it = xs.begin();
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = *it++;
    }
    return m;
}

// Record carrying only a Jacobian, for index and stability logic.
inline EquilibriumRecord record_with(const Matrix& j, bool regular = true) {
    EquilibriumRecord rec{Price(Vector::Ones(j.rows() + 1)), 0.0, j, j.determinant(), regular, 0, 0};
    return rec;
}

inline const EquilibriumRecord& middle(const std::vector<EquilibriumRecord>& recs) {
    REQUIRE(recs.size() == 3);
    return recs[1];
}

}  // namespace walras::test
