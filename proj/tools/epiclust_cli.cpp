#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "epiclust/pipeline.hpp"

using namespace epiclust;

namespace {

// flags override config-file values, which override defaults
void add_common_options(CLI::App* app, PipelineConfig& cfg, std::string& config_file) {
    app->add_option("--config", config_file, "JSON config file");
    app->add_option("--contacts-dir", cfg.contacts_dir, "directory with <ISO3>_<setting>.csv");
    app->add_option("--population", cfg.population_file, "population CSV");
    app->add_option("--indicators", cfg.indicators_file, "indicator CSV");
    app->add_option("--params", cfg.params_file, "parameter profile (JSON)");
    app->add_option("--output", cfg.output_dir, "output directory");
    app->add_option("--target-r0", cfg.target_r0, "calibration target R0");
    app->add_option("--pca-k", cfg.pca_k, "number of socioeconomic components");
    app->add_option("--twod-row-k", cfg.twod_row_k, "(2D)^2 PCA row components");
    app->add_option("--twod-col-k", cfg.twod_col_k, "(2D)^2 PCA column components");
    app->add_option("--cut-combined", cfg.cut_height_combined, "cut height, combined mode");
    app->add_option("--cut-contacts", cfg.cut_height_contacts, "cut height, contacts-only mode");
    app->add_option("--cut-socio", cfg.cut_height_socio, "cut height, socio-only mode");
    app->add_option("--mode", [&cfg](const std::vector<std::string>& v) {
        cfg.mode = feature_mode_from_name(v.front());
        return true;
    }, "feature mode: contacts-only | combined | socio-only");
    app->add_option("--linkage", [&cfg](const std::vector<std::string>& v) {
        cfg.linkage = linkage_from_name(v.front());
        return true;
    }, "linkage: complete | single | average | ward");
    app->add_flag("--calibrate-16", cfg.calibrate_on_16_bins,
                  "calibrate beta0 on the 16-bin matrices");
    app->add_flag("--impute", cfg.impute_missing, "impute missing indicators by column mean");
}

PipelineConfig resolve_config(CLI::App* app, const PipelineConfig& flag_cfg,
                              const std::string& config_file) {
    PipelineConfig cfg = config_file.empty() ? PipelineConfig{}
                                             : PipelineConfig::from_json_file(config_file);
    // every flag the user actually passed wins over the config file
    auto passed = [app](const std::string& name) { return app->count(name) > 0; };
    if (passed("--contacts-dir")) cfg.contacts_dir = flag_cfg.contacts_dir;
    if (passed("--population")) cfg.population_file = flag_cfg.population_file;
    if (passed("--indicators")) cfg.indicators_file = flag_cfg.indicators_file;
    if (passed("--params")) cfg.params_file = flag_cfg.params_file;
    if (passed("--output")) cfg.output_dir = flag_cfg.output_dir;
    if (passed("--target-r0")) cfg.target_r0 = flag_cfg.target_r0;
    if (passed("--pca-k")) cfg.pca_k = flag_cfg.pca_k;
    if (passed("--twod-row-k")) cfg.twod_row_k = flag_cfg.twod_row_k;
    if (passed("--twod-col-k")) cfg.twod_col_k = flag_cfg.twod_col_k;
    if (passed("--cut-combined")) cfg.cut_height_combined = flag_cfg.cut_height_combined;
    if (passed("--cut-contacts")) cfg.cut_height_contacts = flag_cfg.cut_height_contacts;
    if (passed("--cut-socio")) cfg.cut_height_socio = flag_cfg.cut_height_socio;
    if (passed("--mode")) cfg.mode = flag_cfg.mode;
    if (passed("--linkage")) cfg.linkage = flag_cfg.linkage;
    if (passed("--calibrate-16")) cfg.calibrate_on_16_bins = flag_cfg.calibrate_on_16_bins;
    if (passed("--impute")) cfg.impute_missing = flag_cfg.impute_missing;
    return cfg;
}

void print_cluster_summary(const PipelineResult& result) {
    std::map<int, std::vector<std::string>> by_id;
    for (const auto& [iso, id] : result.clusters.cluster_of) by_id[id].push_back(iso);
    std::cout << result.clusters.num_clusters << " cluster(s) at height "
              << result.clusters.cut_height << "\n";
    for (const auto& [id, members] : by_id) {
        std::cout << "  cluster " << id << " (" << members.size() << "):";
        for (const auto& m : members) std::cout << " " << m;
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"contact-pattern clustering pipeline for African countries"};
    app.require_subcommand(1);

    PipelineConfig flag_cfg;
    std::string config_file;

    auto* cmd_ingest = app.add_subcommand("ingest", "validate all inputs");
    auto* cmd_contacts = app.add_subcommand(
        "contacts", "sum, symmetrize and aggregate the contact matrices");
    auto* cmd_calibrate = app.add_subcommand(
        "calibrate", "calibrate beta0 per country and write standardized matrices");
    auto* cmd_reduce = app.add_subcommand("reduce", "run PCA and (2D)^2 PCA feature extraction");
    auto* cmd_cluster = app.add_subcommand("cluster", "cluster countries from features.csv");
    auto* cmd_pipeline = app.add_subcommand("pipeline", "run the full pipeline");
    auto* cmd_export = app.add_subcommand("export", "write plot-ready CSVs for a completed run");

    for (auto* cmd : {cmd_ingest, cmd_contacts, cmd_calibrate, cmd_reduce, cmd_cluster,
                      cmd_pipeline, cmd_export})
        add_common_options(cmd, flag_cfg, config_file);

    CLI11_PARSE(app, argc, argv);
    CLI::App* cmd = app.get_subcommands().front();

    try {
        PipelineConfig cfg = resolve_config(cmd, flag_cfg, config_file);

        if (cmd == cmd_ingest) {
            Dataset ds = ingest(cfg);
            std::cout << "ok: " << ds.countries.size() << " countries, "
                      << ds.indicators.indicators.size() << " indicators\n";
            return 0;
        }

        // contacts/calibrate/reduce run the deterministic pipeline prefix and
        // keep only their stage outputs relevant; cluster reuses features.csv
        // when it is already present so partial reruns stay cheap.
        if (cmd == cmd_cluster && fs::exists(cfg.output_dir / "features.csv")) {
            std::vector<std::string> countries;
            std::ifstream in(cfg.output_dir / "features.csv");
            std::string line;
            std::getline(in, line);
            std::vector<std::vector<double>> rows;
            while (std::getline(in, line)) {
                std::stringstream ss(line);
                std::string cell;
                std::getline(ss, cell, ',');
                countries.push_back(cell);
                std::vector<double> r;
                while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
                rows.push_back(r);
            }
            Matrix feats(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < rows[i].size(); ++j)
                    feats(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

            DistanceMatrix d = pairwise_euclidean(countries, feats);
            Dendrogram dend = agglomerate(d, cfg.linkage);
            double height = cfg.mode == FeatureMode::ContactsOnly ? cfg.cut_height_contacts
                            : cfg.mode == FeatureMode::SocioOnly  ? cfg.cut_height_socio
                                                                  : cfg.cut_height_combined;
            ClusterAssignment clusters = cut(dend, height);
            io::write_matrix_csv(cfg.output_dir / "distance_matrix.csv", d.values, d.labels);
            auto ser = seriate(d, leaf_order(dend));
            io::write_matrix_csv(cfg.output_dir / "distance_matrix_seriated.csv", ser.values,
                                 ser.labels);
            io::write_clusters_csv(cfg.output_dir / "clusters.csv", clusters);
            io::write_dendrogram_json(cfg.output_dir / "dendrogram.json", dend);
            std::ofstream nw(cfg.output_dir / "dendrogram.newick");
            nw << to_newick(dend) << "\n";
            PipelineResult r;
            r.clusters = clusters;
            print_cluster_summary(r);
            return 0;
        }

        PipelineResult result = run_pipeline(cfg);
        if (cmd == cmd_export) {
            export_plots(cfg, result);
            std::cout << "plot data written to " << (cfg.output_dir / "plots").string() << "\n";
            return 0;
        }
        if (cmd == cmd_pipeline || cmd == cmd_cluster) print_cluster_summary(result);
        if (cmd == cmd_calibrate) {
            for (const auto& [iso, beta] : result.beta0)
                std::cout << iso << " beta0 = " << beta << "\n";
        }
        if (cmd == cmd_reduce) {
            const auto& r = result.pca_result.explained_variance_ratio;
            std::cout << "PC1 explains " << 100.0 * r[0] << "%, first " << r.size()
                      << " components " << 100.0 * r.sum() << "%\n";
        }
        if (cmd == cmd_contacts)
            std::cout << "aggregated matrices written to "
                      << (cfg.output_dir / "contacts6").string() << "\n";
        return 0;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
