#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "epiclust/errors.hpp"

namespace epiclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Setting { Home, School, Work, Other, Full };

const char* setting_name(Setting s);
Setting setting_from_name(const std::string& name);

/// Ordered age bins shared by matrices, population vectors and parameters.
struct AgeStructure {
    std::vector<std::string> labels;
    std::vector<double> lower_bounds;

    std::size_t size() const { return labels.size(); }
    void validate() const;
    bool operator==(const AgeStructure&) const = default;

    static AgeStructure five_year_16();
    static AgeStructure coarse_6();
};

struct PopulationVector {
    std::string country;
    AgeStructure ages;
    Vector counts;

    void validate() const;
    double total() const { return counts.sum(); }
};

/// Mean daily contacts between age groups for one country and setting.
struct ContactMatrix {
    std::string country;
    Setting setting = Setting::Full;
    AgeStructure ages;
    Matrix values;
    bool standardized = false;

    std::size_t dim() const { return ages.size(); }
    void validate() const;
};

/// Contiguous index ranges (inclusive, 0-based) partitioning source bins.
struct AgePartition {
    std::vector<std::pair<int, int>> groups;

    std::size_t size() const { return groups.size(); }
    void validate(std::size_t source_dim) const;

    static AgePartition identity(std::size_t n);
    /// The shipped 16 -> 6 partition: 0-4, 5-14, 15-19, 20-24, 25-64, 65+.
    static AgePartition six_bin();
};

}  // namespace epiclust
