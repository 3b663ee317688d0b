#include "gsnmf/error.hpp"
#include "gsnmf/matrix.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace gsnmf;
using testing::Rng;

TEST_CASE("eisen distance on hand-checked pairs") {
    Vector a(2), b(2);
    a << 3, 4;
    CHECK(eisen_distance(a, a) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eisen_distance(Vector::Unit(2, 0), Vector::Unit(2, 1)) == doctest::Approx(1.0));
    a << 1, 0;
    b << 1, 1;
    CHECK(eisen_distance(a, b) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(eisen_distance(a, b) == doctest::Approx(0.29289).epsilon(1e-5));
}

TEST_CASE("eisen distance rejects a zero vector and names it") {
    Vector z = Vector::Zero(3), x = Vector::Ones(3);
    CHECK_THROWS_AS(eisen_distance(z, x), DomainError);
    try {
        eisen_distance(x, z);
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("second") != std::string::npos);
    }
    Vector tiny = Vector::Constant(3, 1e-14);
    CHECK_THROWS_AS(eisen_distance(tiny, x), DomainError);
}

TEST_CASE("relative residue") {
    Rng rng(3);
    const Matrix c = rng.uniform_matrix(10, 3);
    const Matrix p = rng.uniform_matrix(3, 5);
    const Matrix cp = c * p;
    CHECK(relative_residue(cp, c, p) == doctest::Approx(0.0));
    CHECK(relative_residue(cp, Matrix::Zero(10, 3), p) == doctest::Approx(1.0));

    Matrix z = rng.normal_matrix(10, 5);
    z *= 0.1 * cp.norm() / z.norm();
    const Matrix g = cp + z;
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            double fit = 0.0;
            for (Eigen::Index r = 0; r < 3; ++r) fit += c(i, r) * p(r, j);
            num += (g(i, j) - fit) * (g(i, j) - fit);
            den += g(i, j) * g(i, j);
        }
    }
    CHECK(relative_residue(g, c, p) == doctest::Approx(std::sqrt(num / den)).epsilon(1e-13));
    CHECK_THROWS_AS(relative_residue(Matrix::Zero(10, 5), c, p), DomainError);
    CHECK_THROWS_AS(relative_residue(g, c, rng.uniform_matrix(3, 4)), ParameterError);
}

TEST_CASE("l1 column normalization") {
    Matrix m(3, 3);
    m << 2, 1, 1, 2, 0, 2, 0, 0, 3;
    const Matrix out = l1_normalize_columns(m);
    CHECK(out(0, 0) == 0.5);
    CHECK(out(1, 0) == 0.5);
    CHECK(out(2, 0) == 0.0);
    CHECK(out.col(1) == Vector::Unit(3, 0));
    CHECK(out(0, 2) == doctest::Approx(1.0 / 6));
    CHECK(out(1, 2) == doctest::Approx(2.0 / 6));
    CHECK(out(2, 2) == doctest::Approx(3.0 / 6));
    m.col(1).setZero();
    try {
        l1_normalize_columns(m);
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
}

TEST_CASE("expression matrix validation") {
    Matrix v(2, 2);
    v << 1, 2, 3, 4;
    ExpressionMatrix g(v, {"a", "b"}, {"s1", "s2"});
    CHECK(g.n_genes() == 2);
    CHECK(g.gene_ids()[1] == "b");
    CHECK_THROWS_AS(ExpressionMatrix(v, {"a", "a"}, {"s1", "s2"}), ParameterError);
    CHECK_THROWS_AS(ExpressionMatrix(v, {"a", "b"}, {"s", "s"}), ParameterError);
    CHECK_THROWS_AS(ExpressionMatrix(v, {"a"}, {"s1", "s2"}), ParameterError);
    v(1, 0) = -1;
    CHECK_THROWS_AS(ExpressionMatrix(v, {"a", "b"}, {"s1", "s2"}), DomainError);
    CHECK_NOTHROW(ExpressionMatrix(v, {"a", "b"}, {"s1", "s2"}, ExpressionMatrix::Sign::any));
    v(1, 0) = std::nan("");
    CHECK_THROWS_AS(ExpressionMatrix(v, {"a", "b"}, {"s1", "s2"}, ExpressionMatrix::Sign::any), DomainError);

    const auto d = ExpressionMatrix::with_default_ids(Matrix::Ones(3, 2));
    CHECK(d.gene_ids() == std::vector<std::string>{"gene_1", "gene_2", "gene_3"});
    const std::size_t rows[] = {2, 0};
    const auto s = d.select_rows(rows);
    CHECK(s.gene_ids() == std::vector<std::string>{"gene_3", "gene_1"});
}

TEST_CASE("factor types enforce their contracts") {
    CHECK_THROWS_AS(SignatureMatrix(Matrix::Ones(4, 1)), ParameterError);
    CHECK_THROWS_AS(SignatureMatrix(-Matrix::Ones(4, 2)), DomainError);
    Matrix p(2, 2);
    p << 0.25, 1, 0.75, 0;
    CHECK_NOTHROW(ProportionMatrix{p});
    p(0, 0) = 0.3;
    CHECK_THROWS_AS(ProportionMatrix{p}, DomainError);
    p << 0.5, 0.5, 0.5, 0.5;
    CHECK_THROWS_AS(FactorPair(SignatureMatrix(Matrix::Ones(3, 3)), ProportionMatrix(p)), ParameterError);
}

TEST_CASE("property: eisen distance is symmetric") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const int n = rng.integer(1, 12);
        const Vector x = rng.normal_vector(n), y = rng.normal_vector(n);
        CHECK(eisen_distance(x, y) == doctest::Approx(eisen_distance(y, x)).epsilon(1e-15));
    }
}

TEST_CASE("property: eisen distance ignores positive scale") {
    Rng rng(12);
    for (int t = 0; t < 200; ++t) {
        const Vector x = rng.normal_vector(rng.integer(1, 12));
        const double alpha = std::exp(rng.uniform(-8, 8));
        CHECK(std::abs(eisen_distance(x, alpha * x)) <= 1e-14);
        const Vector y = rng.normal_vector(x.size());
        CHECK(eisen_distance(alpha * x, y) == doctest::Approx(eisen_distance(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("property: eisen distance range") {
    Rng rng(13);
    for (int t = 0; t < 300; ++t) {
        const int n = rng.integer(1, 10);
        const Vector x = rng.normal_vector(n), y = rng.normal_vector(n);
        const double d = eisen_distance(x, y);
        CHECK(d >= 0.0);
        CHECK(d <= 2.0);
        CHECK(d == doctest::Approx(1.0 - testing::cosine(x, y)).epsilon(1e-12));
        const Vector xp = x.cwiseAbs(), yp = y.cwiseAbs();
        const double dp = eisen_distance(xp, yp);
        CHECK(dp >= 0.0);
        CHECK(dp <= 1.0 + 1e-15);
        CHECK(eisen_distance(x, -3.0 * x) == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("property: relative residue is invariant under a common row permutation") {
    Rng rng(14);
    for (int t = 0; t < 50; ++t) {
        const int n_genes = rng.integer(2, 30), n = rng.integer(1, 8), k = rng.integer(2, 4);
        const Matrix c = rng.uniform_matrix(n_genes, k), p = rng.uniform_matrix(k, n);
        const Matrix g = c * p + 0.2 * rng.uniform_matrix(n_genes, n);
        const auto perm = rng.permutation(static_cast<std::size_t>(n_genes));
        CHECK(relative_residue(testing::permute_rows(g, perm), testing::permute_rows(c, perm), p) ==
              doctest::Approx(relative_residue(g, c, p)).epsilon(1e-13));
    }
}

TEST_CASE("row cosine matrix zeroes tiny rows") {
    Matrix m(3, 2);
    m << 1, 0, 0, 0, 1, 1;
    const Matrix cs = row_cosine_matrix(m);
    CHECK(cs(0, 0) == doctest::Approx(1.0));
    CHECK(cs(1, 1) == 0.0);
    CHECK(cs(0, 2) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(row_norms(m)(2) == doctest::Approx(std::sqrt(2.0)));
}
