#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epiclust/clustering.hpp"
#include "epiclust/epi_model.hpp"
#include "epiclust/reduction.hpp"
#include "epiclust/types.hpp"

namespace epiclust::io {

namespace fs = std::filesystem;

/// 16x16 contact CSV: header row of bin labels, then 16 data rows.
ContactMatrix read_contact_csv(const fs::path& path, const std::string& country,
                               Setting setting, const AgeStructure& ages);

/// population.csv columns: iso3, bin_label, count.
std::map<std::string, PopulationVector> read_population_csv(const fs::path& path,
                                                            const AgeStructure& ages);

struct IndicatorData {
    IndicatorTable table;
    std::map<std::string, int> indicator_year;
};

/// indicators.csv columns: iso3, indicator_name, value, year. Pivoted to a
/// countries x indicators table; absent pairs become missing entries.
IndicatorData read_indicator_csv(const fs::path& path);

struct ParameterProfile {
    double target_r0 = 3.68;
    EpiParams params;  // per-age vectors at source (16-bin) resolution
};

/// JSON profile with scalar rates, 16-bin age vectors and the target R0.
ParameterProfile read_params_profile(const fs::path& path);

void write_matrix_csv(const fs::path& path, const Matrix& m,
                      const std::vector<std::string>& labels);
Matrix read_matrix_csv(const fs::path& path, std::vector<std::string>* labels = nullptr);

void write_features_csv(const fs::path& path, const std::vector<std::string>& countries,
                        const Matrix& features, const std::string& prefix);
void write_clusters_csv(const fs::path& path, const ClusterAssignment& assignment);
void write_trajectory_csv(const fs::path& path, const Trajectory& traj,
                          const AgeStructure& ages);

/// Nested {children, height, leaf} document plus the merge table.
void write_dendrogram_json(const fs::path& path, const Dendrogram& dend);

std::string format_double(double v);

/// FNV-1a 64-bit content digest, hex encoded.
std::string file_digest(const fs::path& path);

}  // namespace epiclust::io
