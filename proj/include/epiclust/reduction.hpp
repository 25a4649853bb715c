#pragma once

#include <vector>

#include "epiclust/types.hpp"

namespace epiclust {

struct IndicatorTable {
    std::vector<std::string> countries;
    std::vector<std::string> indicators;
    Matrix values;                              // n_countries x n_indicators
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> missing;

    void validate() const;
    bool has_missing() const { return missing.size() > 0 && missing.any(); }
};

struct PcaResult {
    Matrix scores;                    // n x k
    Matrix loadings;                  // p x k, orthonormal columns
    Vector explained_variance_ratio;  // k entries
    Vector eigenvalues;               // all min(n-1, p) covariance eigenvalues
    Vector column_means;              // p entries, of the input table
};

struct TwoDProjection {
    Matrix row_proj;              // Y, d x row_k
    Matrix col_proj;              // Z, d x col_k
    std::vector<Matrix> reduced;  // per country, col_k x row_k
    Matrix flattened;             // n x (col_k * row_k), row-major per matrix
    Vector row_eigenvalues;       // all eigenvalues of the row scatter
    Vector col_eigenvalues;
};

struct AppendedFeatures {
    std::vector<std::string> countries;
    Matrix values;  // n x (contact dims + socio dims)
};

/// Standardize each indicator column to mean 0, sample sd 1 (observed entries).
IndicatorTable zscore_columns(const IndicatorTable& table);

/// Replace missing entries by their column means (opt-in; ingestion is
/// fail-fast by default).
IndicatorTable impute_column_means(const IndicatorTable& table);

/// Standardize each matrix cell across the country stack to mean 0, sd 1.
std::vector<ContactMatrix> zscore_matrix_stack(const std::vector<ContactMatrix>& stack);

/// PCA via SVD of the column-centered table. Sign convention: in each loading
/// column the entry of largest magnitude is nonnegative.
PcaResult pca(const IndicatorTable& table, int k);

/// (2D)^2 PCA: Z spans the top col_k eigenvectors of the column scatter
/// sum (S - Sbar)^T (S - Sbar), Y the top row_k of the row scatter; each
/// country matrix is reduced to Z^T * S * Y.
TwoDProjection two_d2_pca(const std::vector<ContactMatrix>& stack, int row_k, int col_k);

AppendedFeatures append_features(const std::vector<std::string>& countries,
                                 const Matrix& contact_feats, const Matrix& socio_feats);

}  // namespace epiclust
