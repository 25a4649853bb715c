#include "epiclust/types.hpp"

#include <cmath>

namespace epiclust {

const char* setting_name(Setting s) {
    switch (s) {
        case Setting::Home: return "home";
        case Setting::School: return "school";
        case Setting::Work: return "work";
        case Setting::Other: return "other";
        case Setting::Full: return "full";
    }
    return "?";
}

Setting setting_from_name(const std::string& name) {
    if (name == "home") return Setting::Home;
    if (name == "school") return Setting::School;
    if (name == "work") return Setting::Work;
    if (name == "other") return Setting::Other;
    if (name == "full") return Setting::Full;
    throw InputError("unknown setting: " + name);
}

void AgeStructure::validate() const {
    if (labels.empty()) throw InputError("age structure has no bins");
    if (labels.size() != lower_bounds.size())
        throw InputError("age structure label/bound count mismatch");
    for (std::size_t i = 1; i < lower_bounds.size(); ++i)
        if (!(lower_bounds[i] > lower_bounds[i - 1]))
            throw InputError("age bin lower bounds must be strictly increasing");
}

AgeStructure AgeStructure::five_year_16() {
    AgeStructure a;
    for (int i = 0; i < 15; ++i) {
        a.labels.push_back(std::to_string(5 * i) + "-" + std::to_string(5 * i + 4));
        a.lower_bounds.push_back(5.0 * i);
    }
    a.labels.push_back("75+");
    a.lower_bounds.push_back(75.0);
    return a;
}

AgeStructure AgeStructure::coarse_6() {
    return AgeStructure{{"0-4", "5-14", "15-19", "20-24", "25-64", "65+"},
                        {0, 5, 15, 20, 25, 65}};
}

void PopulationVector::validate() const {
    ages.validate();
    if (static_cast<std::size_t>(counts.size()) != ages.size())
        throw InputError("population vector length does not match age structure (" + country + ")");
    double tot = 0;
    for (Eigen::Index i = 0; i < counts.size(); ++i) {
        if (!(counts[i] >= 0) || !std::isfinite(counts[i]))
            throw InputError("negative or non-finite population count (" + country + ")");
        tot += counts[i];
    }
    if (!(tot > 0)) throw InputError("total population must be positive (" + country + ")");
}

void ContactMatrix::validate() const {
    ages.validate();
    if (values.rows() != values.cols())
        throw InputError("contact matrix must be square (" + country + ")");
    if (static_cast<std::size_t>(values.rows()) != ages.size())
        throw InputError("contact matrix dimension does not match age structure (" + country + ")");
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            if (!(values(i, j) >= 0) || !std::isfinite(values(i, j)))
                throw InputError("contact matrix entries must be finite and nonnegative (" +
                                 country + ")");
}

void AgePartition::validate(std::size_t source_dim) const {
    if (groups.empty()) throw InputError("age partition has no groups");
    int next = 0;
    for (const auto& [lo, hi] : groups) {
        if (lo != next || hi < lo)
            throw InputError("age partition groups must be contiguous, nonempty and ordered");
        next = hi + 1;
    }
    if (next != static_cast<int>(source_dim))
        throw InputError("age partition does not cover all source bins");
}

AgePartition AgePartition::identity(std::size_t n) {
    AgePartition p;
    for (std::size_t i = 0; i < n; ++i) p.groups.emplace_back(i, i);
    return p;
}

AgePartition AgePartition::six_bin() {
    return AgePartition{{{0, 0}, {1, 2}, {3, 3}, {4, 4}, {5, 12}, {13, 15}}};
}

}  // namespace epiclust
