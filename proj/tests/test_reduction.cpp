#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "epiclust/reduction.hpp"
#include "test_util.hpp"

using namespace epiclust;
using namespace epiclust::test;

namespace {

IndicatorTable table_of(const Matrix& values) {
    IndicatorTable t;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        t.countries.push_back("C" + std::to_string(i));
    for (Eigen::Index j = 0; j < values.cols(); ++j)
        t.indicators.push_back("ind" + std::to_string(j));
    t.values = values;
    t.missing.setConstant(values.rows(), values.cols(), false);
    return t;
}

Matrix random_matrix(std::mt19937& rng, int rows, int cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
    return m;
}

}  // namespace

TEST_CASE("zscore_columns: hand case, fixed point, constant column") {
    Matrix v(3, 1);
    v << 1, 2, 3;
    auto z = zscore_columns(table_of(v));
    CHECK(z.values(0, 0) == doctest::Approx(-1.0));
    CHECK(z.values(1, 0) == doctest::Approx(0.0));
    CHECK(z.values(2, 0) == doctest::Approx(1.0));

    auto zz = zscore_columns(z);
    CHECK(zz.values.isApprox(z.values, 1e-12));

    Matrix c = Matrix::Constant(4, 1, 7.0);
    CHECK_THROWS_WITH_AS(zscore_columns(table_of(c)), doctest::Contains("ind0"), InputError);
}

TEST_CASE("zscore_columns uses only observed entries") {
    Matrix v(4, 1);
    v << 1, 2, 3, 1e9;  // last entry flagged missing, must not distort the scale
    auto t = table_of(v);
    t.missing(3, 0) = true;
    auto z = zscore_columns(t);
    CHECK(z.values(0, 0) == doctest::Approx(-1.0));
    CHECK(z.values(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("impute_column_means fills gaps with observed means") {
    Matrix v(3, 2);
    v << 1, 10, 3, 20, 0, 30;
    auto t = table_of(v);
    t.missing(2, 0) = true;
    auto filled = impute_column_means(t);
    CHECK(filled.values(2, 0) == doctest::Approx(2.0));
    CHECK(filled.values(2, 1) == doctest::Approx(30.0));
    CHECK_FALSE(filled.has_missing());
}

TEST_CASE("zscore_matrix_stack: per-cell mean 0 and sample sd 1") {
    std::mt19937 rng(101);
    std::vector<ContactMatrix> stack;
    for (int c = 0; c < 8; ++c) stack.push_back(cm(random_nonneg(rng, 4)));
    auto z = zscore_matrix_stack(stack);

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double mean = 0, ss = 0;
            for (const auto& m : z) mean += m.values(i, j);
            mean /= 8;
            for (const auto& m : z) ss += std::pow(m.values(i, j) - mean, 2);
            CHECK(std::abs(mean) < 1e-12);
            CHECK(std::sqrt(ss / 7) == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("zscore_matrix_stack rejects degenerate stacks") {
    Matrix ones = Matrix::Ones(3, 3);
    CHECK_THROWS_AS(zscore_matrix_stack({cm(ones)}), InputError);
    CHECK_THROWS_AS(zscore_matrix_stack({cm(ones), cm(ones)}), InputError);  // zero variance
    CHECK_THROWS_AS(zscore_matrix_stack({}), InputError);
}

TEST_CASE("pca: rank-1 data is fully explained by the first component") {
    Vector dir(3);
    dir << 2, -1, 2;  // norm 3
    Matrix x(5, 3);
    for (int i = 0; i < 5; ++i) x.row(i) = (i - 2.0) * dir.transpose();
    auto res = pca(table_of(x), 1);
    CHECK(res.explained_variance_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(res.loadings.col(0).dot(dir / 3.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pca: symmetric square splits variance evenly") {
    Matrix x(4, 2);
    x << 1, 0, -1, 0, 0, 1, 0, -1;
    auto res = pca(table_of(x), 2);
    CHECK(res.explained_variance_ratio[0] == doctest::Approx(0.5));
    CHECK(res.explained_variance_ratio[1] == doctest::Approx(0.5));
    CHECK(res.explained_variance_ratio.sum() == doctest::Approx(1.0));
}

TEST_CASE("pca: orthonormal loadings, score reconstruction, sign convention") {
    std::mt19937 rng(7);
    Matrix x = random_matrix(rng, 20, 6);
    auto res = pca(table_of(x), 5);

    Matrix gram = res.loadings.transpose() * res.loadings;
    CHECK((gram - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);

    Matrix centered = x.rowwise() - res.column_means.transpose();
    CHECK((centered * res.loadings - res.scores).cwiseAbs().maxCoeff() < 1e-10);

    for (int c = 0; c < 5; ++c) {
        Eigen::Index arg = 0;
        res.loadings.col(c).cwiseAbs().maxCoeff(&arg);
        CHECK(res.loadings(arg, c) >= 0);
    }

    // eigenvalues should match the column variance total
    double trace = (centered.transpose() * centered / 19.0).trace();
    CHECK(res.eigenvalues.sum() == doctest::Approx(trace).epsilon(1e-10));
}

TEST_CASE("pca: explained ratios are invariant under row permutation") {
    std::mt19937 rng(15);
    Matrix x = random_matrix(rng, 12, 5);
    auto base = pca(table_of(x), 4);

    std::vector<int> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix shuffled(12, 5);
    for (int i = 0; i < 12; ++i) shuffled.row(i) = x.row(perm[i]);
    auto permuted = pca(table_of(shuffled), 4);
    CHECK((base.explained_variance_ratio - permuted.explained_variance_ratio)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("pca rejects bad inputs") {
    std::mt19937 rng(19);
    Matrix x = random_matrix(rng, 6, 4);
    CHECK_THROWS_AS(pca(table_of(x), 0), InputError);
    CHECK_THROWS_AS(pca(table_of(x), 5), InputError);
    auto t = table_of(x);
    t.missing(1, 1) = true;
    CHECK_THROWS_AS(pca(t, 2), InputError);
}

TEST_CASE("two_d2_pca: projections are orthonormal and full rank is an isometry") {
    std::mt19937 rng(23);
    std::vector<ContactMatrix> stack;
    for (int c = 0; c < 10; ++c) stack.push_back(cm(random_nonneg(rng, 5, -2, 2)));

    auto proj = two_d2_pca(stack, 5, 5);
    CHECK((proj.row_proj.transpose() * proj.row_proj - Matrix::Identity(5, 5))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((proj.col_proj.transpose() * proj.col_proj - Matrix::Identity(5, 5))
              .cwiseAbs()
              .maxCoeff() < 1e-10);

    // full-rank projection preserves pairwise Frobenius distances
    for (int a = 0; a < 10; ++a)
        for (int b = a + 1; b < 10; ++b) {
            double orig = (stack[a].values - stack[b].values).norm();
            double red = (proj.flattened.row(a) - proj.flattened.row(b)).norm();
            CHECK(red == doctest::Approx(orig).epsilon(1e-10));
        }
}

TEST_CASE("two_d2_pca on a diagonal stack keeps the high-variance axis") {
    // diag(a_C, b_C) with var(a) > var(b): both scatters pick axis 0 and the
    // one-dimensional reduction returns a_C itself
    const double a[5] = {1, 4, 9, 2, 7};
    const double b[5] = {1.0, 1.1, 0.9, 1.05, 0.95};
    std::vector<ContactMatrix> stack;
    for (int c = 0; c < 5; ++c) {
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = a[c];
        m(1, 1) = b[c];
        stack.push_back(cm(m));
    }
    auto proj = two_d2_pca(stack, 1, 1);
    CHECK(std::abs(proj.col_proj(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(proj.row_proj(0, 0)) == doctest::Approx(1.0));
    for (int c = 0; c < 5; ++c)
        CHECK(proj.flattened(c, 0) == doctest::Approx(a[c]));
}

TEST_CASE("two_d2_pca recovers the shared factor of a rank-1 stack") {
    std::mt19937 rng(53);
    std::normal_distribution<double> g(0.0, 1.0);
    Vector u(4);
    u << 2, -1, 3, 0.5;
    std::vector<ContactMatrix> stack;
    for (int c = 0; c < 8; ++c) {
        Vector v(4);
        for (int i = 0; i < 4; ++i) v[i] = g(rng);
        stack.push_back(cm(Matrix(u * v.transpose())));
    }
    auto proj = two_d2_pca(stack, 1, 1);
    double align = std::abs(proj.row_proj.col(0).dot(u.normalized()));
    CHECK(align == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("two_d2_pca beats every alternative axis subset on retained scatter") {
    std::mt19937 rng(31);
    const int d = 4, n = 12, rk = 2;
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<ContactMatrix> stack;
        for (int c = 0; c < n; ++c) stack.push_back(cm(random_nonneg(rng, d, -3, 3)));
        Matrix mean = Matrix::Zero(d, d);
        for (const auto& m : stack) mean += m.values;
        mean /= n;

        Matrix g_col = Matrix::Zero(d, d), g_row = Matrix::Zero(d, d);
        for (const auto& m : stack) {
            Matrix c = m.values - mean;
            g_col += c.transpose() * c;
            g_row += c * c.transpose();
        }

        auto proj = two_d2_pca(stack, rk, rk);
        auto retained = [](const Matrix& axes, const Matrix& scatter) {
            return (axes.transpose() * scatter * axes).trace();
        };
        double best_col = retained(proj.col_proj, g_col);
        double best_row = retained(proj.row_proj, g_row);

        // no other eigenvector pair of either scatter retains more of it
        Eigen::SelfAdjointEigenSolver<Matrix> ec(g_col), er(g_row);
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) {
                Matrix z(d, rk), y(d, rk);
                z << ec.eigenvectors().col(a), ec.eigenvectors().col(b);
                y << er.eigenvectors().col(a), er.eigenvectors().col(b);
                CHECK(retained(z, g_col) <= best_col * (1 + 1e-10));
                CHECK(retained(y, g_row) <= best_row * (1 + 1e-10));
            }
    }
}

TEST_CASE("two_d2_pca rank validation") {
    std::mt19937 rng(43);
    std::vector<ContactMatrix> stack{cm(random_nonneg(rng, 3)), cm(random_nonneg(rng, 3))};
    CHECK_THROWS_AS(two_d2_pca(stack, 0, 1), InputError);
    CHECK_THROWS_AS(two_d2_pca(stack, 1, 4), InputError);
    CHECK_THROWS_AS(two_d2_pca({}, 1, 1), InputError);
}

TEST_CASE("append_features: layout, distances add in quadrature, validation") {
    std::vector<std::string> names{"AAA", "BBB", "CCC"};
    Matrix a(3, 2), b(3, 1);
    a << 1, 2, 3, 4, 5, 6;
    b << 7, 8, 9;
    auto f = append_features(names, a, b);
    CHECK(f.values.rows() == 3);
    CHECK(f.values.cols() == 3);
    CHECK(f.values(1, 0) == 3);
    CHECK(f.values(2, 2) == 9);

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double combined = (f.values.row(i) - f.values.row(j)).squaredNorm();
            double split = (a.row(i) - a.row(j)).squaredNorm() +
                           (b.row(i) - b.row(j)).squaredNorm();
            CHECK(combined == doctest::Approx(split));
        }

    Matrix short_block(2, 1);
    short_block << 1, 2;
    CHECK_THROWS_AS(append_features(names, a, short_block), InputError);
}
