#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "epiclust/io.hpp"

namespace epiclust {

namespace fs = std::filesystem;

enum class FeatureMode { ContactsOnly, Combined, SocioOnly };

FeatureMode feature_mode_from_name(const std::string& name);
const char* feature_mode_name(FeatureMode m);

struct PipelineConfig {
    fs::path contacts_dir = "data/contacts";
    fs::path population_file = "data/population.csv";
    fs::path indicators_file = "data/indicators.csv";
    fs::path params_file = "data/params.profile";
    fs::path output_dir = "out";

    double target_r0 = 3.68;
    int pca_k = 4;
    int twod_row_k = 2;
    int twod_col_k = 2;
    double cut_height_combined = 8.0;
    double cut_height_contacts = 2.5;
    double cut_height_socio = 8.0;
    FeatureMode mode = FeatureMode::Combined;
    Linkage linkage = Linkage::Complete;
    bool calibrate_on_16_bins = false;
    bool impute_missing = false;
    std::array<double, 4> setting_weights = {1.0, 1.0, 1.0, 1.0};

    void validate() const;
    static PipelineConfig from_json_file(const fs::path& path);
};

struct CountryData {
    std::string iso3;
    std::map<Setting, ContactMatrix> settings;  // home/school/work/other
    PopulationVector population;                // 16-bin
};

struct Dataset {
    std::vector<std::string> countries;  // sorted iso3
    std::map<std::string, CountryData> data;
    IndicatorTable indicators;
    std::map<std::string, int> indicator_year;
    io::ParameterProfile profile;
};

/// Load and cross-validate all inputs; collects every validation problem
/// before failing so one run reports all of them.
Dataset ingest(const PipelineConfig& config);

struct StageRecord {
    std::string name;
    double seconds = 0.0;
    std::vector<std::string> outputs;
};

struct RunManifest {
    std::string version;
    std::string config_json;
    std::map<std::string, std::string> input_digests;
    std::vector<StageRecord> stages;
    bool completed = false;
    std::string failed_stage;

    void write(const fs::path& path) const;
};

struct PipelineResult {
    RunManifest manifest;
    std::map<std::string, double> beta0;          // per country
    std::vector<ContactMatrix> standardized;      // 6x6 S_C, country-ordered
    Matrix contact_features;                      // n x 4
    Matrix socio_features;                        // n x pca_k
    std::vector<std::string> indicator_names;
    PcaResult pca_result;
    TwoDProjection projection;
    Matrix features;                              // per the configured mode
    DistanceMatrix distances;
    Dendrogram dendrogram;
    ClusterAssignment clusters;
    DistanceMatrix seriated;
};

/// Full pipeline: sum -> symmetrize -> aggregate -> calibrate -> standardize
/// -> z-score -> reduce -> append -> distance -> cluster -> cut -> seriate.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Long-format plot data: heatmaps, scree, loadings, 2D projection,
/// dendrogram segments.
void export_plots(const PipelineConfig& config, const PipelineResult& result);

}  // namespace epiclust
