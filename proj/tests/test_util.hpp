#pragma once

#include <random>

#include "epiclust/types.hpp"

namespace epiclust::test {

inline AgeStructure ages_n(int n) {
    AgeStructure a;
    for (int i = 0; i < n; ++i) {
        a.labels.push_back("b" + std::to_string(i));
        a.lower_bounds.push_back(static_cast<double>(i));
    }
    return a;
}

inline ContactMatrix cm(const Matrix& values, const std::string& country = "AAA",
                        Setting setting = Setting::Full) {
    return ContactMatrix{country, setting, ages_n(static_cast<int>(values.rows())), values, false};
}

inline PopulationVector pv(const Vector& counts, const std::string& country = "AAA") {
    return PopulationVector{country, ages_n(static_cast<int>(counts.size())), counts};
}

inline Matrix random_nonneg(std::mt19937& rng, int n, double lo = 0.0, double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    return m;
}

inline Vector random_pop(std::mt19937& rng, int n, double lo = 1e3, double hi = 1e6) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

}  // namespace epiclust::test
