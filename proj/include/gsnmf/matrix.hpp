#ifndef GSNMF_MATRIX_HPP
#define GSNMF_MATRIX_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

/**
 * @file matrix.hpp
 *
 * @brief Matrix types shared by every stage of the deconvolution pipeline,
 * together with the Eisen cosine distance and residue metrics.
 */

namespace gsnmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Norms below this are treated as zero by the distance functions.
inline constexpr double kZeroNormTolerance = 1e-12;

/**
 * @brief Gene-by-sample expression matrix with row and column identifiers.
 *
 * Entries are nonnegative unless the matrix was built with `Sign::any`, which
 * is reserved for synthetic data where additive noise may cross zero.
 */
class ExpressionMatrix {
public:
    enum class Sign { nonnegative, any };

    ExpressionMatrix(Matrix values,
                     std::vector<std::string> gene_ids,
                     std::vector<std::string> sample_ids,
                     Sign sign = Sign::nonnegative);

    /// Identifiers default to `gene_<i>` and `sample_<j>`, 1-based.
    static ExpressionMatrix with_default_ids(Matrix values, Sign sign = Sign::nonnegative);

    const Matrix& values() const noexcept { return values_; }
    const std::vector<std::string>& gene_ids() const noexcept { return gene_ids_; }
    const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
    Eigen::Index n_genes() const noexcept { return values_.rows(); }
    Eigen::Index n_samples() const noexcept { return values_.cols(); }
    Sign sign() const noexcept { return sign_; }

    ExpressionMatrix select_rows(std::span<const std::size_t> rows) const;
    ExpressionMatrix select_columns(std::span<const std::size_t> cols) const;

private:
    Matrix values_;
    std::vector<std::string> gene_ids_;
    std::vector<std::string> sample_ids_;
    Sign sign_;
};

/// Nonnegative N x k cell-type signature matrix, k >= 2.
class SignatureMatrix {
public:
    explicit SignatureMatrix(Matrix values);
    const Matrix& values() const noexcept { return values_; }
    Eigen::Index n_types() const noexcept { return values_.cols(); }

private:
    Matrix values_;
};

/// Nonnegative k x n proportion matrix whose columns sum to one.
class ProportionMatrix {
public:
    /// Column sums must be within `tolerance` of one.
    explicit ProportionMatrix(Matrix values, double tolerance = 1e-10);
    const Matrix& values() const noexcept { return values_; }
    Eigen::Index n_types() const noexcept { return values_.rows(); }

private:
    Matrix values_;
};

struct FactorPair {
    FactorPair(SignatureMatrix c, ProportionMatrix p);
    SignatureMatrix c;
    ProportionMatrix p;
};

/// 1 - <x,y>/(|x||y|). Throws DomainError when either vector has zero norm.
double eisen_distance(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// ||G - CP||_F / ||G||_F.
double relative_residue(const Matrix& g, const Matrix& c, const Matrix& p);
double relative_residue(const ExpressionMatrix& g, const FactorPair& f);

/// Scales every column to unit sum. Columns must be nonnegative with positive sum.
Matrix l1_normalize_columns(const Matrix& m);

/// Euclidean norm of every row.
Vector row_norms(const Matrix& m);

/**
 * Cosine similarity between all pairs of rows. Rows whose norm is below
 * `zero_norm` get zero similarity with everything, including themselves.
 */
Matrix row_cosine_matrix(const Matrix& m, double zero_norm = kZeroNormTolerance);

}  // namespace gsnmf

#endif
