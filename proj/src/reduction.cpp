#include "epiclust/reduction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace epiclust {

namespace {

// Deterministic sign convention: the entry of largest magnitude in each
// column is made nonnegative (first such entry on ties).
void fix_column_signs(Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Eigen::Index arg = 0;
        m.col(c).cwiseAbs().maxCoeff(&arg);
        if (m(arg, c) < 0) m.col(c) = -m.col(c);
    }
}

}  // namespace

void IndicatorTable::validate() const {
    if (values.rows() != static_cast<Eigen::Index>(countries.size()) ||
        values.cols() != static_cast<Eigen::Index>(indicators.size()))
        throw InputError("indicator table shape does not match name lists");
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            bool miss = missing.size() > 0 && missing(i, j);
            if (!miss && !std::isfinite(values(i, j)))
                throw InputError("non-finite indicator value outside the missing mask (" +
                                 countries[i] + ", " + indicators[j] + ")");
        }
}

IndicatorTable zscore_columns(const IndicatorTable& table) {
    table.validate();
    IndicatorTable out = table;
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
        double sum = 0, n = 0;
        for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
            if (table.missing.size() > 0 && table.missing(i, j)) continue;
            sum += table.values(i, j);
            n += 1;
        }
        if (n < 2)
            throw InputError("indicator '" + table.indicators[j] +
                             "' has fewer than two observed values");
        double mean = sum / n;
        double ss = 0;
        for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
            if (table.missing.size() > 0 && table.missing(i, j)) continue;
            ss += (table.values(i, j) - mean) * (table.values(i, j) - mean);
        }
        double sd = std::sqrt(ss / (n - 1));
        if (!(sd > 0))
            throw InputError("indicator '" + table.indicators[j] + "' is constant");
        for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
            if (table.missing.size() > 0 && table.missing(i, j)) continue;
            out.values(i, j) = (table.values(i, j) - mean) / sd;
        }
    }
    return out;
}

IndicatorTable impute_column_means(const IndicatorTable& table) {
    table.validate();
    IndicatorTable out = table;
    if (table.missing.size() == 0) return out;
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
        double sum = 0, n = 0;
        for (Eigen::Index i = 0; i < table.values.rows(); ++i)
            if (!table.missing(i, j)) {
                sum += table.values(i, j);
                n += 1;
            }
        if (!(n > 0))
            throw InputError("indicator '" + table.indicators[j] + "' has no observed values");
        for (Eigen::Index i = 0; i < table.values.rows(); ++i)
            if (table.missing(i, j)) out.values(i, j) = sum / n;
    }
    out.missing.setConstant(false);
    return out;
}

std::vector<ContactMatrix> zscore_matrix_stack(const std::vector<ContactMatrix>& stack) {
    if (stack.empty()) throw InputError("empty contact matrix stack");
    const Eigen::Index d = stack.front().values.rows();
    for (const auto& m : stack)
        if (m.values.rows() != d || m.values.cols() != d)
            throw InputError("contact matrix stack has mixed dimensions");
    const double n = static_cast<double>(stack.size());
    if (n < 2) throw InputError("matrix stack needs at least two countries");

    Matrix mean = Matrix::Zero(d, d);
    for (const auto& m : stack) mean += m.values;
    mean /= n;
    Matrix ss = Matrix::Zero(d, d);
    for (const auto& m : stack) ss += (m.values - mean).cwiseAbs2();
    Matrix sd = (ss / (n - 1)).cwiseSqrt();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            if (!(sd(i, j) > 0))
                throw InputError("contact cell (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") has zero cross-country variance");

    std::vector<ContactMatrix> out = stack;
    for (auto& m : out) m.values = (m.values - mean).cwiseQuotient(sd);
    return out;
}

PcaResult pca(const IndicatorTable& table, int k) {
    table.validate();
    if (table.has_missing())
        throw InputError("PCA input has missing values; impute or drop them first");
    const Eigen::Index n = table.values.rows();
    const Eigen::Index p = table.values.cols();
    if (k < 1 || k > std::min<Eigen::Index>(n - 1, p))
        throw InputError("PCA component count out of range");

    PcaResult res;
    res.column_means = table.values.colwise().mean();
    Matrix centered = table.values.rowwise() - res.column_means.transpose();

    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sv = svd.singularValues();
    const Eigen::Index r = std::min<Eigen::Index>(n - 1, p);
    res.eigenvalues = (sv.head(r).array().square() / double(n - 1)).matrix();
    double total = sv.array().square().sum();

    res.loadings = svd.matrixV().leftCols(k);
    fix_column_signs(res.loadings);
    res.scores = centered * res.loadings;
    res.explained_variance_ratio = (sv.head(k).array().square() / total).matrix();
    return res;
}

TwoDProjection two_d2_pca(const std::vector<ContactMatrix>& stack, int row_k, int col_k) {
    if (stack.empty()) throw InputError("empty contact matrix stack");
    const Eigen::Index d = stack.front().values.rows();
    for (const auto& m : stack)
        if (m.values.rows() != d || m.values.cols() != d)
            throw InputError("contact matrix stack has mixed dimensions");
    if (row_k < 1 || row_k > d || col_k < 1 || col_k > d)
        throw InputError("(2D)^2 PCA projection ranks out of range");

    Matrix mean = Matrix::Zero(d, d);
    for (const auto& m : stack) mean += m.values;
    mean /= static_cast<double>(stack.size());

    Matrix g_col = Matrix::Zero(d, d);  // (S - Sbar)^T (S - Sbar)
    Matrix g_row = Matrix::Zero(d, d);  // (S - Sbar) (S - Sbar)^T
    for (const auto& m : stack) {
        Matrix c = m.values - mean;
        g_col += c.transpose() * c;
        g_row += c * c.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Matrix> ec(g_col), er(g_row);
    if (ec.info() != Eigen::Success || er.info() != Eigen::Success)
        throw NumericalError("scatter eigendecomposition failed");

    TwoDProjection res;
    res.col_eigenvalues = ec.eigenvalues().reverse();
    res.row_eigenvalues = er.eigenvalues().reverse();
    res.col_proj = ec.eigenvectors().rowwise().reverse().leftCols(col_k);
    res.row_proj = er.eigenvectors().rowwise().reverse().leftCols(row_k);
    fix_column_signs(res.col_proj);
    fix_column_signs(res.row_proj);

    res.flattened.resize(static_cast<Eigen::Index>(stack.size()),
                         static_cast<Eigen::Index>(col_k) * row_k);
    for (std::size_t c = 0; c < stack.size(); ++c) {
        Matrix reduced = res.col_proj.transpose() * stack[c].values * res.row_proj;
        res.reduced.push_back(reduced);
        Eigen::Index f = 0;
        for (Eigen::Index i = 0; i < reduced.rows(); ++i)
            for (Eigen::Index j = 0; j < reduced.cols(); ++j)
                res.flattened(static_cast<Eigen::Index>(c), f++) = reduced(i, j);
    }
    return res;
}

AppendedFeatures append_features(const std::vector<std::string>& countries,
                                 const Matrix& contact_feats, const Matrix& socio_feats) {
    const auto n = static_cast<Eigen::Index>(countries.size());
    if (contact_feats.rows() != n || socio_feats.rows() != n)
        throw InputError("feature blocks do not cover the same countries");
    AppendedFeatures out;
    out.countries = countries;
    out.values.resize(n, contact_feats.cols() + socio_feats.cols());
    out.values << contact_feats, socio_feats;
    return out;
}

}  // namespace epiclust
