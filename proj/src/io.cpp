#include "epiclust/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace epiclust::io {

namespace {

using nlohmann::json;

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(parse_csv_line(line));
    }
    if (rows.empty()) throw IoError("empty CSV file: " + path.string());
    return rows;
}

double parse_double(const std::string& s, const fs::path& path) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("malformed number '" + s + "' in " + path.string());
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ContactMatrix read_contact_csv(const fs::path& path, const std::string& country,
                               Setting setting, const AgeStructure& ages) {
    auto rows = read_csv(path);
    const std::size_t n = ages.size();
    if (rows.size() != n + 1)
        throw IoError(path.string() + ": expected header plus " + std::to_string(n) + " rows");
    if (rows[0].size() != n)
        throw IoError(path.string() + ": header must list " + std::to_string(n) + " age bins");

    ContactMatrix m;
    m.country = country;
    m.setting = setting;
    m.ages = ages;
    m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i + 1].size() != n)
            throw IoError(path.string() + ": row " + std::to_string(i + 1) + " has " +
                          std::to_string(rows[i + 1].size()) + " columns, expected " +
                          std::to_string(n));
        for (std::size_t j = 0; j < n; ++j)
            m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_double(rows[i + 1][j], path);
    }
    m.validate();
    return m;
}

std::map<std::string, PopulationVector> read_population_csv(const fs::path& path,
                                                            const AgeStructure& ages) {
    auto rows = read_csv(path);
    std::map<std::string, std::map<std::string, double>> raw;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3)
            throw IoError(path.string() + ": population rows need iso3, bin_label, count");
        raw[rows[r][0]][rows[r][1]] = parse_double(rows[r][2], path);
    }
    std::map<std::string, PopulationVector> out;
    for (const auto& [iso, bins] : raw) {
        PopulationVector p;
        p.country = iso;
        p.ages = ages;
        p.counts.resize(static_cast<Eigen::Index>(ages.size()));
        for (std::size_t i = 0; i < ages.size(); ++i) {
            auto it = bins.find(ages.labels[i]);
            if (it == bins.end())
                throw IoError(path.string() + ": " + iso + " is missing age bin '" +
                              ages.labels[i] + "'");
            p.counts[static_cast<Eigen::Index>(i)] = it->second;
        }
        p.validate();
        out.emplace(iso, std::move(p));
    }
    return out;
}

IndicatorData read_indicator_csv(const fs::path& path) {
    auto rows = read_csv(path);
    std::set<std::string> country_set;
    std::vector<std::string> indicators;
    IndicatorData out;
    struct Cell {
        double value;
        bool missing;
    };
    std::map<std::string, std::map<std::string, Cell>> raw;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 4)
            throw IoError(path.string() + ": indicator rows need iso3, indicator_name, value, year");
        const auto& iso = rows[r][0];
        const auto& name = rows[r][1];
        country_set.insert(iso);
        if (std::find(indicators.begin(), indicators.end(), name) == indicators.end())
            indicators.push_back(name);
        bool missing = rows[r][2].empty() || rows[r][2] == "NA";
        raw[iso][name] = {missing ? 0.0 : parse_double(rows[r][2], path), missing};
        if (!rows[r][3].empty())
            out.indicator_year[name] = static_cast<int>(parse_double(rows[r][3], path));
    }

    IndicatorTable& t = out.table;
    t.countries.assign(country_set.begin(), country_set.end());
    t.indicators = indicators;
    const auto nr = static_cast<Eigen::Index>(t.countries.size());
    const auto nc = static_cast<Eigen::Index>(indicators.size());
    t.values = Matrix::Zero(nr, nc);
    t.missing.setConstant(nr, nc, true);
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index j = 0; j < nc; ++j) {
            auto ci = raw.find(t.countries[i]);
            if (ci == raw.end()) continue;
            auto cj = ci->second.find(indicators[j]);
            if (cj == ci->second.end()) continue;
            t.values(i, j) = cj->second.value;
            t.missing(i, j) = cj->second.missing;
        }
    t.validate();
    return out;
}

ParameterProfile read_params_profile(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }

    ParameterProfile p;
    p.target_r0 = j.value("target_r0", 3.68);
    auto& rates = j.at("rates");
    EpiParams& e = p.params;
    e.phi_l = rates.value("phi_l", e.phi_l);
    e.phi_p = rates.value("phi_p", e.phi_p);
    e.delta_a = rates.value("delta_a", e.delta_a);
    e.delta_s = rates.value("delta_s", e.delta_s);
    e.delta_h = rates.value("delta_h", e.delta_h);
    e.delta_c = rates.value("delta_c", e.delta_c);
    e.delta_cr = rates.value("delta_cr", e.delta_cr);
    e.inf_a = rates.value("inf_a", e.inf_a);

    auto read_vec = [&](const char* name) {
        auto arr = j.at("age_vectors").at(name).get<std::vector<double>>();
        return Eigen::Map<Vector>(arr.data(), static_cast<Eigen::Index>(arr.size())).eval();
    };
    e.theta = read_vec("theta");
    e.eta = read_vec("eta");
    e.zeta = read_vec("zeta");
    e.h = read_vec("h");
    e.validate();
    return p;
}

void write_matrix_csv(const fs::path& path, const Matrix& m,
                      const std::vector<std::string>& labels) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "label";
    for (const auto& l : labels) out << "," << l;
    out << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << labels[i];
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << "," << format_double(m(i, j));
        out << "\n";
    }
}

Matrix read_matrix_csv(const fs::path& path, std::vector<std::string>* labels) {
    auto rows = read_csv(path);
    const std::size_t n = rows.size() - 1;
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (labels) labels->clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i + 1].size() != n + 1)
            throw IoError(path.string() + ": malformed labeled matrix");
        if (labels) labels->push_back(rows[i + 1][0]);
        for (std::size_t j = 0; j < n; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_double(rows[i + 1][j + 1], path);
    }
    return m;
}

void write_features_csv(const fs::path& path, const std::vector<std::string>& countries,
                        const Matrix& features, const std::string& prefix) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "iso3";
    for (Eigen::Index j = 0; j < features.cols(); ++j) out << "," << prefix << (j + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        out << countries[i];
        for (Eigen::Index j = 0; j < features.cols(); ++j)
            out << "," << format_double(features(i, j));
        out << "\n";
    }
}

void write_clusters_csv(const fs::path& path, const ClusterAssignment& assignment) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "iso3,cluster_id\n";
    for (const auto& [label, id] : assignment.cluster_of) out << label << "," << id << "\n";
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj,
                          const AgeStructure& ages) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t,age_group,compartment,value\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        for (std::size_t a = 0; a < ages.size(); ++a)
            for (int c = 0; c < kNumCompartments; ++c)
                out << format_double(traj.times[k]) << "," << ages.labels[a] << ","
                    << compartment_name(c) << ","
                    << format_double(traj.states[k].values(c, static_cast<Eigen::Index>(a)))
                    << "\n";
}

void write_dendrogram_json(const fs::path& path, const Dendrogram& dend) {
    const int n = static_cast<int>(dend.leaves.size());
    std::function<json(int)> node_json = [&](int node) -> json {
        if (node < n) return json{{"leaf", dend.leaves[node]}, {"height", 0.0}};
        const auto& m = dend.merges[node - n];
        return json{{"height", m.height},
                    {"size", m.size},
                    {"children", json::array({node_json(m.left), node_json(m.right)})}};
    };
    json j;
    j["leaves"] = dend.leaves;
    j["tree"] = node_json(2 * n - 2);
    json merges = json::array();
    for (const auto& m : dend.merges)
        merges.push_back({{"left", m.left}, {"right", m.right},
                          {"height", m.height}, {"size", m.size}});
    j["merges"] = merges;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    char buf[8192];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace epiclust::io
