#include "epiclust/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epiclust/contacts.hpp"

namespace epiclust {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

constexpr Setting kRawSettings[4] = {Setting::Home, Setting::School, Setting::Work,
                                     Setting::Other};

json config_to_json(const PipelineConfig& c) {
    return json{{"contacts_dir", c.contacts_dir.string()},
                {"population_file", c.population_file.string()},
                {"indicators_file", c.indicators_file.string()},
                {"params_file", c.params_file.string()},
                {"output_dir", c.output_dir.string()},
                {"target_r0", c.target_r0},
                {"pca_k", c.pca_k},
                {"twod_row_k", c.twod_row_k},
                {"twod_col_k", c.twod_col_k},
                {"cut_height_combined", c.cut_height_combined},
                {"cut_height_contacts", c.cut_height_contacts},
                {"cut_height_socio", c.cut_height_socio},
                {"mode", feature_mode_name(c.mode)},
                {"linkage", linkage_name(c.linkage)},
                {"calibrate_on_16_bins", c.calibrate_on_16_bins},
                {"impute_missing", c.impute_missing},
                {"setting_weights", c.setting_weights}};
}

}  // namespace

FeatureMode feature_mode_from_name(const std::string& name) {
    if (name == "contacts-only") return FeatureMode::ContactsOnly;
    if (name == "combined") return FeatureMode::Combined;
    if (name == "socio-only") return FeatureMode::SocioOnly;
    throw InputError("unknown feature mode: " + name);
}

const char* feature_mode_name(FeatureMode m) {
    switch (m) {
        case FeatureMode::ContactsOnly: return "contacts-only";
        case FeatureMode::Combined: return "combined";
        case FeatureMode::SocioOnly: return "socio-only";
    }
    return "?";
}

void PipelineConfig::validate() const {
    if (!(target_r0 > 0)) throw InputError("target R0 must be positive");
    if (pca_k < 1 || twod_row_k < 1 || twod_col_k < 1)
        throw InputError("component counts must be at least 1");
    for (const fs::path* p : {&contacts_dir, &population_file, &indicators_file, &params_file})
        if (!fs::exists(*p)) throw InputError("input path does not exist: " + p->string());
}

PipelineConfig PipelineConfig::from_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    PipelineConfig c;
    c.contacts_dir = j.value("contacts_dir", c.contacts_dir.string());
    c.population_file = j.value("population_file", c.population_file.string());
    c.indicators_file = j.value("indicators_file", c.indicators_file.string());
    c.params_file = j.value("params_file", c.params_file.string());
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.target_r0 = j.value("target_r0", c.target_r0);
    c.pca_k = j.value("pca_k", c.pca_k);
    c.twod_row_k = j.value("twod_row_k", c.twod_row_k);
    c.twod_col_k = j.value("twod_col_k", c.twod_col_k);
    c.cut_height_combined = j.value("cut_height_combined", c.cut_height_combined);
    c.cut_height_contacts = j.value("cut_height_contacts", c.cut_height_contacts);
    c.cut_height_socio = j.value("cut_height_socio", c.cut_height_socio);
    if (j.contains("mode")) c.mode = feature_mode_from_name(j["mode"]);
    if (j.contains("linkage")) c.linkage = linkage_from_name(j["linkage"]);
    c.calibrate_on_16_bins = j.value("calibrate_on_16_bins", c.calibrate_on_16_bins);
    c.impute_missing = j.value("impute_missing", c.impute_missing);
    if (j.contains("setting_weights")) {
        auto w = j["setting_weights"].get<std::vector<double>>();
        if (w.size() != 4) throw InputError("setting_weights needs 4 entries");
        std::copy(w.begin(), w.end(), c.setting_weights.begin());
    }
    return c;
}

Dataset ingest(const PipelineConfig& config) {
    config.validate();
    std::vector<std::string> problems;
    Dataset ds;

    const AgeStructure ages16 = AgeStructure::five_year_16();
    std::map<std::string, PopulationVector> pops;
    try {
        pops = io::read_population_csv(config.population_file, ages16);
    } catch (const std::exception& e) {
        problems.push_back(e.what());
    }

    io::IndicatorData ind;
    try {
        ind = io::read_indicator_csv(config.indicators_file);
    } catch (const std::exception& e) {
        problems.push_back(e.what());
    }

    try {
        ds.profile = io::read_params_profile(config.params_file);
    } catch (const std::exception& e) {
        problems.push_back(e.what());
    }

    // country universe: everything any source mentions
    std::set<std::string> universe;
    for (const auto& [iso, _] : pops) universe.insert(iso);
    for (const auto& iso : ind.table.countries) universe.insert(iso);
    for (const auto& entry : fs::directory_iterator(config.contacts_dir)) {
        auto stem = entry.path().stem().string();
        auto us = stem.find('_');
        if (us != std::string::npos) universe.insert(stem.substr(0, us));
    }
    if (universe.empty()) problems.push_back("no countries found in any input");

    std::set<std::string> ind_set(ind.table.countries.begin(), ind.table.countries.end());
    for (const auto& iso : universe) {
        CountryData cd;
        cd.iso3 = iso;
        bool ok = true;
        for (Setting s : kRawSettings) {
            fs::path f = config.contacts_dir / (iso + "_" + setting_name(s) + ".csv");
            if (!fs::exists(f)) {
                problems.push_back("missing contact file: " + f.string());
                ok = false;
                continue;
            }
            try {
                cd.settings.emplace(s, io::read_contact_csv(f, iso, s, ages16));
            } catch (const std::exception& e) {
                problems.push_back(e.what());
                ok = false;
            }
        }
        auto pit = pops.find(iso);
        if (pit == pops.end()) {
            problems.push_back("country " + iso + " has no population data");
            ok = false;
        } else {
            cd.population = pit->second;
        }
        if (!ind_set.contains(iso)) {
            problems.push_back("country " + iso + " is missing from the indicator table");
            ok = false;
        }
        if (ok) {
            ds.countries.push_back(iso);
            ds.data.emplace(iso, std::move(cd));
        }
    }

    if (!problems.empty()) {
        std::ostringstream msg;
        msg << problems.size() << " ingestion problem(s):";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw InputError(msg.str());
    }

    ds.indicators = ind.table;
    ds.indicator_year = ind.indicator_year;
    if (ds.indicators.has_missing() && !config.impute_missing) {
        std::ostringstream msg;
        msg << "indicator table has missing values; pass --impute to fill with column means";
        throw InputError(msg.str());
    }
    return ds;
}

void RunManifest::write(const fs::path& path) const {
    json j;
    j["version"] = version;
    j["config"] = json::parse(config_json);
    j["input_digests"] = input_digests;
    j["completed"] = completed;
    if (!failed_stage.empty()) j["failed_stage"] = failed_stage;
    json stages_j = json::array();
    for (const auto& s : stages)
        stages_j.push_back({{"name", s.name}, {"seconds", s.seconds}, {"outputs", s.outputs}});
    j["stages"] = stages_j;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    config.validate();
    fs::create_directories(config.output_dir);
    fs::create_directories(config.output_dir / "standardized");
    fs::create_directories(config.output_dir / "contacts6");

    PipelineResult result;
    RunManifest& manifest = result.manifest;
    manifest.version = kVersion;
    manifest.config_json = config_to_json(config).dump();
    manifest.input_digests["population"] = io::file_digest(config.population_file);
    manifest.input_digests["indicators"] = io::file_digest(config.indicators_file);
    manifest.input_digests["params"] = io::file_digest(config.params_file);

    auto stage = [&](const std::string& name, auto&& fn) {
        auto t0 = Clock::now();
        StageRecord rec;
        rec.name = name;
        try {
            fn(rec);
        } catch (...) {
            manifest.failed_stage = name;
            manifest.write(config.output_dir / "manifest.json");
            throw;
        }
        rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        manifest.stages.push_back(std::move(rec));
    };

    Dataset ds;
    stage("ingest", [&](StageRecord&) {
        ds = ingest(config);
        for (const auto& iso : ds.countries)
            for (Setting s : kRawSettings) {
                fs::path f = config.contacts_dir / (iso + "_" + std::string(setting_name(s)) + ".csv");
                manifest.input_digests["contacts/" + iso + "_" + setting_name(s)] =
                    io::file_digest(f);
            }
    });

    const AgePartition part = AgePartition::six_bin();
    std::map<std::string, ContactMatrix> mu6;       // aggregated symmetrized full matrices
    std::map<std::string, PopulationVector> pop6;
    std::map<std::string, ContactMatrix> mu16;      // symmetrized 16-bin full matrices

    stage("contacts", [&](StageRecord& rec) {
        for (const auto& iso : ds.countries) {
            const auto& cd = ds.data.at(iso);
            ContactMatrix full = sum_settings(cd.settings.at(Setting::Home),
                                              cd.settings.at(Setting::School),
                                              cd.settings.at(Setting::Work),
                                              cd.settings.at(Setting::Other),
                                              config.setting_weights);
            ContactMatrix sym = symmetrize(full, cd.population);
            mu16.emplace(iso, sym);
            mu6.emplace(iso, aggregate_matrix(sym, cd.population, part));
            pop6.emplace(iso, aggregate_population(cd.population, part));
            fs::path f = config.output_dir / "contacts6" / (iso + ".csv");
            io::write_matrix_csv(f, mu6.at(iso).values, mu6.at(iso).ages.labels);
            rec.outputs.push_back(f.string());
        }
    });

    stage("calibrate", [&](StageRecord& rec) {
        for (const auto& iso : ds.countries) {
            const auto& cd = ds.data.at(iso);
            double beta;
            if (config.calibrate_on_16_bins) {
                EpiParams p16 = ds.profile.params;
                beta = calibrate_beta(mu16.at(iso), p16, cd.population, config.target_r0);
            } else {
                EpiParams p6 = ds.profile.params;
                p6.theta = aggregate_params(ds.profile.params.theta, cd.population, part);
                p6.eta = aggregate_params(ds.profile.params.eta, cd.population, part);
                p6.zeta = aggregate_params(ds.profile.params.zeta, cd.population, part);
                p6.h = aggregate_params(ds.profile.params.h, cd.population, part);
                beta = calibrate_beta(mu6.at(iso), p6, pop6.at(iso), config.target_r0);
            }
            result.beta0[iso] = beta;
            result.standardized.push_back(standardize_contacts(beta, mu6.at(iso)));
            fs::path f = config.output_dir / "standardized" / (iso + ".csv");
            io::write_matrix_csv(f, result.standardized.back().values,
                                 result.standardized.back().ages.labels);
            rec.outputs.push_back(f.string());
        }
        fs::path bf = config.output_dir / "beta0.csv";
        std::ofstream out(bf);
        out << "iso3,beta0\n";
        for (const auto& [iso, b] : result.beta0) out << iso << "," << io::format_double(b) << "\n";
        rec.outputs.push_back(bf.string());
    });

    stage("reduce", [&](StageRecord& rec) {
        auto zstack = zscore_matrix_stack(result.standardized);
        result.projection = two_d2_pca(zstack, config.twod_row_k, config.twod_col_k);
        result.contact_features = result.projection.flattened;

        IndicatorTable table = ds.indicators;
        if (config.impute_missing) table = impute_column_means(table);
        table = zscore_columns(table);
        result.pca_result = pca(table, config.pca_k);
        result.socio_features = result.pca_result.scores;
        result.indicator_names = ds.indicators.indicators;

        switch (config.mode) {
            case FeatureMode::ContactsOnly:
                result.features = result.contact_features;
                break;
            case FeatureMode::SocioOnly:
                result.features = result.socio_features;
                break;
            case FeatureMode::Combined:
                result.features = append_features(ds.countries, result.contact_features,
                                                  result.socio_features)
                                      .values;
                break;
        }

        const fs::path& od = config.output_dir;
        io::write_features_csv(od / "contact_features.csv", ds.countries,
                               result.contact_features, "s");
        io::write_features_csv(od / "socio_features.csv", ds.countries,
                               result.socio_features, "p");
        io::write_features_csv(od / "features.csv", ds.countries, result.features, "f");
        {
            std::ofstream out(od / "pca_loadings.csv");
            out << "indicator";
            for (int i = 0; i < config.pca_k; ++i) out << ",PC" << (i + 1);
            out << "\n";
            for (Eigen::Index r = 0; r < result.pca_result.loadings.rows(); ++r) {
                out << "\"" << ds.indicators.indicators[r] << "\"";
                for (Eigen::Index c = 0; c < result.pca_result.loadings.cols(); ++c)
                    out << "," << io::format_double(result.pca_result.loadings(r, c));
                out << "\n";
            }
        }
        {
            std::ofstream out(od / "pca_explained_variance.csv");
            out << "component,eigenvalue,explained_ratio\n";
            for (Eigen::Index i = 0; i < result.pca_result.eigenvalues.size(); ++i) {
                double ratio = i < result.pca_result.explained_variance_ratio.size()
                                   ? result.pca_result.explained_variance_ratio[i]
                                   : result.pca_result.eigenvalues[i] /
                                         result.pca_result.eigenvalues.sum();
                out << (i + 1) << "," << io::format_double(result.pca_result.eigenvalues[i])
                    << "," << io::format_double(ratio) << "\n";
            }
        }
        for (const char* f : {"contact_features.csv", "socio_features.csv", "features.csv",
                              "pca_loadings.csv", "pca_explained_variance.csv"})
            rec.outputs.push_back((od / f).string());
    });

    stage("cluster", [&](StageRecord& rec) {
        result.distances = pairwise_euclidean(ds.countries, result.features);
        result.dendrogram = agglomerate(result.distances, config.linkage);
        double height = config.mode == FeatureMode::ContactsOnly ? config.cut_height_contacts
                        : config.mode == FeatureMode::SocioOnly  ? config.cut_height_socio
                                                                 : config.cut_height_combined;
        result.clusters = cut(result.dendrogram, height);
        result.seriated = seriate(result.distances, leaf_order(result.dendrogram));

        const fs::path& od = config.output_dir;
        io::write_matrix_csv(od / "distance_matrix.csv", result.distances.values,
                             result.distances.labels);
        io::write_matrix_csv(od / "distance_matrix_seriated.csv", result.seriated.values,
                             result.seriated.labels);
        io::write_clusters_csv(od / "clusters.csv", result.clusters);
        io::write_dendrogram_json(od / "dendrogram.json", result.dendrogram);
        {
            std::ofstream out(od / "dendrogram.newick");
            out << to_newick(result.dendrogram) << "\n";
        }
        for (const char* f : {"distance_matrix.csv", "distance_matrix_seriated.csv",
                              "clusters.csv", "dendrogram.json", "dendrogram.newick"})
            rec.outputs.push_back((od / f).string());
    });

    manifest.completed = true;
    manifest.write(config.output_dir / "manifest.json");
    return result;
}

void export_plots(const PipelineConfig& config, const PipelineResult& result) {
    if (!result.manifest.completed) {
        std::string missing = result.manifest.stages.empty()
                                  ? std::string("ingest")
                                  : result.manifest.failed_stage;
        throw InputError("cannot export plots: pipeline incomplete at stage '" + missing + "'");
    }
    const fs::path od = config.output_dir / "plots";
    fs::create_directories(od);

    {  // aggregated full-matrix heatmaps, 36 rows per country
        std::ofstream out(od / "heatmap_contacts.csv");
        out << "iso3,row_bin,col_bin,value\n";
        for (const auto& m : result.standardized) {
            // unscale back to the aggregated matrix for the heatmap
            double beta = result.beta0.at(m.country);
            for (Eigen::Index i = 0; i < m.values.rows(); ++i)
                for (Eigen::Index j = 0; j < m.values.cols(); ++j)
                    out << m.country << "," << m.ages.labels[i] << "," << m.ages.labels[j] << ","
                        << io::format_double(m.values(i, j) / beta) << "\n";
        }
    }
    {  // standardized matrices, the cross-country comparable form
        std::ofstream out(od / "heatmap_standardized.csv");
        out << "iso3,row_bin,col_bin,value\n";
        for (const auto& m : result.standardized)
            for (Eigen::Index i = 0; i < m.values.rows(); ++i)
                for (Eigen::Index j = 0; j < m.values.cols(); ++j)
                    out << m.country << "," << m.ages.labels[i] << "," << m.ages.labels[j] << ","
                        << io::format_double(m.values(i, j)) << "\n";
    }
    {
        std::ofstream out(od / "heatmap_distance_seriated.csv");
        out << "row_iso3,col_iso3,value\n";
        const auto& s = result.seriated;
        for (Eigen::Index i = 0; i < s.values.rows(); ++i)
            for (Eigen::Index j = 0; j < s.values.cols(); ++j)
                out << s.labels[i] << "," << s.labels[j] << ","
                    << io::format_double(s.values(i, j)) << "\n";
    }
    {
        std::ofstream out(od / "scree.csv");
        out << "component,explained_ratio\n";
        for (Eigen::Index i = 0; i < result.pca_result.explained_variance_ratio.size(); ++i)
            out << (i + 1) << ","
                << io::format_double(result.pca_result.explained_variance_ratio[i]) << "\n";
    }
    {
        std::ofstream out(od / "loadings.csv");
        out << "indicator";
        for (Eigen::Index c = 0; c < result.pca_result.loadings.cols(); ++c)
            out << ",PC" << (c + 1);
        out << "\n";
        for (Eigen::Index r = 0; r < result.pca_result.loadings.rows(); ++r) {
            out << "\"" << result.indicator_names[r] << "\"";
            for (Eigen::Index c = 0; c < result.pca_result.loadings.cols(); ++c)
                out << "," << io::format_double(result.pca_result.loadings(r, c));
            out << "\n";
        }
    }
    {  // country projection on the first two socioeconomic components
        std::ofstream out(od / "projection2d.csv");
        out << "iso3,dim1,dim2\n";
        for (Eigen::Index i = 0; i < result.socio_features.rows(); ++i)
            out << result.distances.labels[i] << ","
                << io::format_double(result.socio_features(i, 0)) << ","
                << io::format_double(result.socio_features.cols() > 1
                                         ? result.socio_features(i, 1)
                                         : 0.0)
                << "\n";
    }
    {  // dendrogram node coordinates for plotting
        const auto& dend = result.dendrogram;
        const int n = static_cast<int>(dend.leaves.size());
        auto order = leaf_order(dend);
        std::map<std::string, double> leaf_x;
        for (std::size_t i = 0; i < order.size(); ++i) leaf_x[order[i]] = static_cast<double>(i);
        std::vector<double> x(2 * n - 1), h(2 * n - 1, 0.0);
        for (int i = 0; i < n; ++i) x[i] = leaf_x[dend.leaves[i]];
        std::ofstream out(od / "dendrogram_coords.csv");
        out << "node,x,height,left_x,left_height,right_x,right_height\n";
        for (std::size_t k = 0; k < dend.merges.size(); ++k) {
            const auto& m = dend.merges[k];
            int node = n + static_cast<int>(k);
            x[node] = 0.5 * (x[m.left] + x[m.right]);
            h[node] = m.height;
            out << node << "," << io::format_double(x[node]) << ","
                << io::format_double(m.height) << "," << io::format_double(x[m.left]) << ","
                << io::format_double(h[m.left]) << "," << io::format_double(x[m.right]) << ","
                << io::format_double(h[m.right]) << "\n";
        }
    }
}

}  // namespace epiclust
