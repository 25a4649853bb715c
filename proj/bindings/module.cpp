#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "epiclust/contacts.hpp"
#include "epiclust/epi_model.hpp"
#include "epiclust/pipeline.hpp"

namespace py = pybind11;
using namespace epiclust;

namespace {

AgeStructure generic_ages(Eigen::Index n) {
    AgeStructure a;
    for (Eigen::Index i = 0; i < n; ++i) {
        a.labels.push_back("bin" + std::to_string(i));
        a.lower_bounds.push_back(static_cast<double>(i));
    }
    return a;
}

ContactMatrix wrap_matrix(const Matrix& m) {
    return ContactMatrix{"", Setting::Full, generic_ages(m.rows()), m, false};
}

PopulationVector wrap_pop(const Vector& w) {
    return PopulationVector{"", generic_ages(w.size()), w};
}

AgePartition wrap_partition(const std::vector<std::pair<int, int>>& groups) {
    return AgePartition{groups};
}

EpiParams params_from_kwargs(const Vector& theta, const Vector& eta, const Vector& zeta,
                             const Vector& h, const py::dict& rates) {
    EpiParams p;
    p.theta = theta;
    p.eta = eta;
    p.zeta = zeta;
    p.h = h;
    auto set = [&](const char* k, double& field) {
        if (rates.contains(k)) field = rates[k].cast<double>();
    };
    set("phi_l", p.phi_l);
    set("phi_p", p.phi_p);
    set("delta_a", p.delta_a);
    set("delta_s", p.delta_s);
    set("delta_h", p.delta_h);
    set("delta_c", p.delta_c);
    set("delta_cr", p.delta_cr);
    set("inf_a", p.inf_a);
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "contact-pattern clustering pipeline: core numerical operations";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    m.def(
        "sum_settings",
        [](const Matrix& home, const Matrix& school, const Matrix& work, const Matrix& other,
           const std::array<double, 4>& weights) {
            return sum_settings(wrap_matrix(home), wrap_matrix(school), wrap_matrix(work),
                                wrap_matrix(other), weights)
                .values;
        },
        py::arg("home"), py::arg("school"), py::arg("work"), py::arg("other"),
        py::arg("weights") = std::array<double, 4>{1, 1, 1, 1},
        "Weighted sum of the four setting matrices.");

    m.def(
        "symmetrize",
        [](const Matrix& m_, const Vector& pop) {
            return symmetrize(wrap_matrix(m_), wrap_pop(pop)).values;
        },
        py::arg("matrix"), py::arg("population"),
        "Enforce population-weighted contact reciprocity.");

    m.def(
        "aggregate_matrix",
        [](const Matrix& m_, const Vector& pop, const std::vector<std::pair<int, int>>& groups) {
            return aggregate_matrix(wrap_matrix(m_), wrap_pop(pop), wrap_partition(groups)).values;
        },
        py::arg("matrix"), py::arg("population"), py::arg("groups"),
        "Merge age bins; groups are contiguous inclusive (lo, hi) index ranges.");

    m.def(
        "aggregate_population",
        [](const Vector& pop, const std::vector<std::pair<int, int>>& groups) {
            return aggregate_population(wrap_pop(pop), wrap_partition(groups)).counts;
        },
        py::arg("population"), py::arg("groups"));

    m.def(
        "aggregate_params",
        [](const Vector& p, const Vector& pop, const std::vector<std::pair<int, int>>& groups) {
            return aggregate_params(p, wrap_pop(pop), wrap_partition(groups));
        },
        py::arg("params"), py::arg("population"), py::arg("groups"));

    m.def(
        "ngm_spectral_radius",
        [](const Matrix& mu, const Vector& theta, const Vector& eta, const Vector& zeta,
           const Vector& h, const py::dict& rates) {
            EpiParams p = params_from_kwargs(theta, eta, zeta, h, rates);
            return spectral_radius(build_ngm(p, wrap_matrix(mu), wrap_pop(Vector::Ones(mu.rows()))));
        },
        py::arg("contacts"), py::arg("theta"), py::arg("eta"), py::arg("zeta"), py::arg("h"),
        py::arg("rates") = py::dict(),
        "Spectral radius of -T Sigma^{-1} for the transmission model.");

    m.def(
        "calibrate_beta0",
        [](const Matrix& mu, const Vector& theta, const Vector& eta, const Vector& zeta,
           const Vector& h, double target_r0, const py::dict& rates) {
            EpiParams p = params_from_kwargs(theta, eta, zeta, h, rates);
            return calibrate_beta(wrap_matrix(mu), p, wrap_pop(Vector::Ones(mu.rows())),
                                  target_r0);
        },
        py::arg("contacts"), py::arg("theta"), py::arg("eta"), py::arg("zeta"), py::arg("h"),
        py::arg("target_r0") = 3.68, py::arg("rates") = py::dict());

    m.def(
        "pca",
        [](const Matrix& table, int k) {
            IndicatorTable t;
            for (Eigen::Index i = 0; i < table.rows(); ++i)
                t.countries.push_back("r" + std::to_string(i));
            for (Eigen::Index j = 0; j < table.cols(); ++j)
                t.indicators.push_back("c" + std::to_string(j));
            t.values = table;
            PcaResult r = pca(t, k);
            return py::make_tuple(r.scores, r.loadings, r.explained_variance_ratio,
                                  r.eigenvalues);
        },
        py::arg("table"), py::arg("k"),
        "SVD-based PCA; returns (scores, loadings, explained_ratios, eigenvalues).");

    m.def(
        "two_d2_pca",
        [](const std::vector<Matrix>& stack, int row_k, int col_k) {
            std::vector<ContactMatrix> wrapped;
            wrapped.reserve(stack.size());
            for (const auto& s : stack) wrapped.push_back(wrap_matrix(s));
            TwoDProjection r = two_d2_pca(wrapped, row_k, col_k);
            return py::make_tuple(r.row_proj, r.col_proj, r.flattened);
        },
        py::arg("stack"), py::arg("row_k") = 2, py::arg("col_k") = 2,
        "(2D)^2 PCA; returns (Y, Z, flattened per-country features).");

    m.def(
        "zscore_matrix_stack",
        [](const std::vector<Matrix>& stack) {
            std::vector<ContactMatrix> wrapped;
            for (const auto& s : stack) wrapped.push_back(wrap_matrix(s));
            std::vector<Matrix> out;
            for (const auto& z : zscore_matrix_stack(wrapped)) out.push_back(z.values);
            return out;
        },
        py::arg("stack"));

    m.def(
        "linkage",
        [](const Matrix& features, const std::vector<std::string>& labels,
           const std::string& method) {
            DistanceMatrix d = pairwise_euclidean(labels, features);
            Dendrogram dend = agglomerate(d, linkage_from_name(method));
            Matrix merges(static_cast<Eigen::Index>(dend.merges.size()), 4);
            for (std::size_t k = 0; k < dend.merges.size(); ++k) {
                merges(static_cast<Eigen::Index>(k), 0) = dend.merges[k].left;
                merges(static_cast<Eigen::Index>(k), 1) = dend.merges[k].right;
                merges(static_cast<Eigen::Index>(k), 2) = dend.merges[k].height;
                merges(static_cast<Eigen::Index>(k), 3) = dend.merges[k].size;
            }
            return merges;
        },
        py::arg("features"), py::arg("labels"), py::arg("method") = "complete",
        "Agglomerative clustering; returns an (n-1) x 4 merge table "
        "(left, right, height, size).");

    m.def(
        "cut_clusters",
        [](const Matrix& features, const std::vector<std::string>& labels, double height,
           const std::string& method) {
            DistanceMatrix d = pairwise_euclidean(labels, features);
            ClusterAssignment a = cut(agglomerate(d, linkage_from_name(method)), height);
            return a.cluster_of;
        },
        py::arg("features"), py::arg("labels"), py::arg("height"),
        py::arg("method") = "complete");

    m.def(
        "run_pipeline",
        [](const fs::path& config_path) {
            PipelineConfig cfg = PipelineConfig::from_json_file(config_path);
            PipelineResult r = run_pipeline(cfg);
            py::dict out;
            out["num_clusters"] = r.clusters.num_clusters;
            out["clusters"] = r.clusters.cluster_of;
            out["beta0"] = r.beta0;
            out["explained_variance_ratio"] = r.pca_result.explained_variance_ratio;
            out["features"] = r.features;
            out["countries"] = r.distances.labels;
            return out;
        },
        py::arg("config_path"), "Run the full pipeline from a JSON config file.");
}
