#include "gsnmf/matrix.hpp"

#include "gsnmf/error.hpp"

#include <cmath>
#include <unordered_set>

namespace gsnmf {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw ParameterError(std::string("duplicate ") + what + " identifier '" + id + "'");
        }
    }
}

std::vector<std::string> numbered(const char* prefix, Eigen::Index n) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        out.push_back(std::string(prefix) + std::to_string(i + 1));
    }
    return out;
}

}  // namespace

ExpressionMatrix::ExpressionMatrix(Matrix values,
                                   std::vector<std::string> gene_ids,
                                   std::vector<std::string> sample_ids,
                                   Sign sign)
    : values_(std::move(values)),
      gene_ids_(std::move(gene_ids)),
      sample_ids_(std::move(sample_ids)),
      sign_(sign) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw ParameterError("expression matrix must have at least one gene and one sample");
    }
    if (static_cast<Eigen::Index>(gene_ids_.size()) != values_.rows()) {
        throw ParameterError("gene identifier count does not match the number of rows");
    }
    if (static_cast<Eigen::Index>(sample_ids_.size()) != values_.cols()) {
        throw ParameterError("sample identifier count does not match the number of columns");
    }
    require_unique(gene_ids_, "gene");
    require_unique(sample_ids_, "sample");
    if (!values_.allFinite()) {
        throw DomainError("expression matrix contains non-finite values");
    }
    if (sign_ == Sign::nonnegative) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            for (Eigen::Index i = 0; i < values_.rows(); ++i) {
                if (values_(i, j) < 0) {
                    throw DomainError("negative expression value at gene '" + gene_ids_[i] +
                                      "', sample '" + sample_ids_[j] + "'");
                }
            }
        }
    }
}

ExpressionMatrix ExpressionMatrix::with_default_ids(Matrix values, Sign sign) {
    auto genes = numbered("gene_", values.rows());
    auto samples = numbered("sample_", values.cols());
    return ExpressionMatrix(std::move(values), std::move(genes), std::move(samples), sign);
}

ExpressionMatrix ExpressionMatrix::select_rows(std::span<const std::size_t> rows) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
        ids.push_back(gene_ids_.at(rows[r]));
    }
    return ExpressionMatrix(std::move(out), std::move(ids), sample_ids_, sign_);
}

ExpressionMatrix ExpressionMatrix::select_columns(std::span<const std::size_t> cols) const {
    Matrix out(values_.rows(), static_cast<Eigen::Index>(cols.size()));
    std::vector<std::string> ids;
    ids.reserve(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out.col(static_cast<Eigen::Index>(c)) = values_.col(static_cast<Eigen::Index>(cols[c]));
        ids.push_back(sample_ids_.at(cols[c]));
    }
    return ExpressionMatrix(std::move(out), gene_ids_, std::move(ids), sign_);
}

SignatureMatrix::SignatureMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.cols() < 2) {
        throw ParameterError("signature matrix needs at least two cell types");
    }
    if ((values_.array() < 0).any()) {
        throw DomainError("signature matrix has negative entries");
    }
}

ProportionMatrix::ProportionMatrix(Matrix values, double tolerance) : values_(std::move(values)) {
    if ((values_.array() < 0).any()) {
        throw DomainError("proportion matrix has negative entries");
    }
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        if (std::abs(values_.col(j).sum() - 1.0) > tolerance) {
            throw DomainError("proportion column " + std::to_string(j) + " does not sum to one");
        }
    }
}

FactorPair::FactorPair(SignatureMatrix c_, ProportionMatrix p_) : c(std::move(c_)), p(std::move(p_)) {
    if (c.values().cols() != p.values().rows()) {
        throw ParameterError("signature has " + std::to_string(c.values().cols()) +
                             " types but proportions have " + std::to_string(p.values().rows()));
    }
}

double eisen_distance(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    if (x.size() != y.size()) {
        throw ParameterError("eisen_distance: vectors differ in length");
    }
    const double nx = x.norm();
    const double ny = y.norm();
    if (nx < kZeroNormTolerance) {
        throw DomainError("eisen_distance: first vector (x) has zero norm");
    }
    if (ny < kZeroNormTolerance) {
        throw DomainError("eisen_distance: second vector (y) has zero norm");
    }
    return 1.0 - x.dot(y) / (nx * ny);
}

double relative_residue(const Matrix& g, const Matrix& c, const Matrix& p) {
    if (c.rows() != g.rows() || p.cols() != g.cols() || c.cols() != p.rows()) {
        throw ParameterError("relative_residue: incompatible dimensions");
    }
    const double gn = g.norm();
    if (gn == 0.0) {
        throw DomainError("relative_residue: data matrix has zero Frobenius norm");
    }
    return (g - c * p).norm() / gn;
}

double relative_residue(const ExpressionMatrix& g, const FactorPair& f) {
    return relative_residue(g.values(), f.c.values(), f.p.values());
}

Matrix l1_normalize_columns(const Matrix& m) {
    Matrix out = m;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if ((m.col(j).array() < 0).any()) {
            throw DomainError("l1_normalize_columns: column " + std::to_string(j) + " has negative entries");
        }
        const double s = m.col(j).sum();
        if (!(s > 0)) {
            throw DomainError("l1_normalize_columns: column " + std::to_string(j) + " sums to zero");
        }
        out.col(j) /= s;
    }
    return out;
}

Vector row_norms(const Matrix& m) {
    return m.rowwise().norm();
}

Matrix row_cosine_matrix(const Matrix& m, double zero_norm) {
    const Vector norms = row_norms(m);
    Matrix unit = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (norms(i) < zero_norm) {
            unit.row(i).setZero();
        } else {
            unit.row(i) /= norms(i);
        }
    }
    Matrix cos = Matrix::Zero(m.rows(), m.rows());
    cos.selfadjointView<Eigen::Lower>().rankUpdate(unit);
    return cos.selfadjointView<Eigen::Lower>();
}

}  // namespace gsnmf
