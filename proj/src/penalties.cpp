#include "gsnmf/penalties.hpp"

#include "gsnmf/error.hpp"

#include <cmath>
#include <vector>

namespace gsnmf {

void PenaltyConfig::validate() const {
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
        throw ParameterError("penalty weights lambda1 and lambda2 must be nonnegative");
    }
    if (!(epsilon_norm > 0.0)) {
        throw ParameterError("epsilon_norm must be positive");
    }
}

SparseMatrix penalty_graph(const Matrix& adjacency) {
    if (adjacency.rows() != adjacency.cols()) {
        throw ParameterError("adjacency matrix must be square");
    }
    const Eigen::Index n = adjacency.rows();
    std::vector<Eigen::Triplet<double>> entries;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double w = 0.5 * (adjacency(i, j) + adjacency(j, i));
            if (w != 0.0) {
                entries.emplace_back(i, j, w);
            }
        }
    }
    SparseMatrix out(n, n);
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

SparseMatrix penalty_graph(const SimilarityGraph& graph) {
    return penalty_graph(graph.adjacency);
}

namespace {

void check_markers(const Matrix& c, const MarkerAssignment& markers) {
    if (static_cast<Eigen::Index>(markers.n_rows()) != c.rows()) {
        throw ParameterError("marker assignment covers " + std::to_string(markers.n_rows()) + " rows but C has " +
                             std::to_string(c.rows()));
    }
    if (markers.k != c.cols()) {
        throw ParameterError("marker assignment has k=" + std::to_string(markers.k) + " but C has " +
                             std::to_string(c.cols()) + " columns");
    }
}

void check_graph(const Matrix& c, Eigen::Index graph_size) {
    if (graph_size != c.rows()) {
        throw ParameterError("graph has " + std::to_string(graph_size) + " vertices but C has " +
                             std::to_string(c.rows()) + " rows");
    }
}

}  // namespace

PenaltyWeights build_penalty_weights(const Matrix& c, const MarkerAssignment& markers, const SparseMatrix& omega,
                                     const PenaltyConfig& cfg) {
    check_markers(c, markers);
    check_graph(c, omega.rows());
    const Eigen::Index n = c.rows();

    PenaltyWeights out;
    out.row_norms = row_norms(c);
    out.inv_sq_norms = Vector::Zero(n);
    Vector inv = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (out.row_norms(i) >= cfg.epsilon_norm) {
            inv(i) = 1.0 / out.row_norms(i);
            out.inv_sq_norms(i) = inv(i) * inv(i);
        }
    }

    out.w1 = Vector::Zero(n);
    out.w2 = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int g = markers.type_of[static_cast<std::size_t>(i)];
        if (g == 0 || inv(i) == 0.0) {
            continue;
        }
        const double cg = c(i, g - 1);
        out.w1(i) = (1.0 - cg * inv(i)) * inv(i);
        out.w2(i) = cg * out.inv_sq_norms(i);
    }

    out.omega = omega;
    out.coc = omega;
    out.w3 = omega;
    out.w4 = omega;
    out.w3_row_sums = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        SparseMatrix::InnerIterator it3(out.w3, i);
        SparseMatrix::InnerIterator it4(out.w4, i);
        for (SparseMatrix::InnerIterator it(out.coc, i); it; ++it, ++it3, ++it4) {
            const Eigen::Index j = it.col();
            const double w = it.value();
            const double cos = (inv(i) == 0.0 || inv(j) == 0.0) ? 0.0 : c.row(i).dot(c.row(j)) * inv(i) * inv(j);
            it.valueRef() = cos;
            it3.valueRef() = w * (1.0 - cos) * cos;
            it4.valueRef() = w * (1.0 - cos) * inv(i) * inv(j);
            out.w3_row_sums(i) += it3.value();
        }
    }
    return out;
}

double f1_value(const Matrix& c, const MarkerAssignment& markers, const PenaltyConfig& cfg) {
    check_markers(c, markers);
    double total = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const int g = markers.type_of[static_cast<std::size_t>(i)];
        if (g == 0) {
            continue;
        }
        const double norm = c.row(i).norm();
        const double cos = norm < cfg.epsilon_norm ? 0.0 : c(i, g - 1) / norm;
        total += (1.0 - cos) * (1.0 - cos);
    }
    return 0.5 * cfg.lambda1 * total;
}

Matrix f1_gradient(const Matrix& c, const MarkerAssignment& markers, const PenaltyConfig& cfg) {
    const PenaltyWeights w = build_penalty_weights(c, markers, SparseMatrix(c.rows(), c.rows()), cfg);
    return cfg.lambda1 * w.w1.asDiagonal() * (w.w2.asDiagonal() * c - markers.indicator);
}

Matrix f1_gradient_elementwise(const Matrix& c, const MarkerAssignment& markers, const PenaltyConfig& cfg) {
    check_markers(c, markers);
    Matrix out = Matrix::Zero(c.rows(), c.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const int g = markers.type_of[static_cast<std::size_t>(i)];
        double sq = 0.0;
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            sq += c(i, j) * c(i, j);
        }
        const double norm = std::sqrt(sq);
        if (g == 0 || norm < cfg.epsilon_norm) {
            continue;
        }
        const double cg = c(i, g - 1);
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            const double delta = (j == g - 1) ? 1.0 : 0.0;
            out(i, j) = cfg.lambda1 * (1.0 - cg / norm) / norm * (cg / (norm * norm) * c(i, j) - delta);
        }
    }
    return out;
}

double f2_value(const PenaltyWeights& weights, const SparseMatrix& omega, const PenaltyConfig& cfg) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < omega.outerSize(); ++i) {
        SparseMatrix::InnerIterator cos(weights.coc, i);
        for (SparseMatrix::InnerIterator it(omega, i); it; ++it, ++cos) {
            const double d = 1.0 - cos.value();
            total += it.value() * d * d;
        }
    }
    return 0.5 * cfg.lambda2 * total;
}

double f2_value(const Matrix& c, const SparseMatrix& omega, const PenaltyConfig& cfg) {
    check_graph(c, omega.rows());
    const Vector norms = row_norms(c);
    double total = 0.0;
    for (Eigen::Index i = 0; i < omega.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(omega, i); it; ++it) {
            const Eigen::Index j = it.col();
            const bool zero = norms(i) < cfg.epsilon_norm || norms(j) < cfg.epsilon_norm;
            const double d = 1.0 - (zero ? 0.0 : c.row(i).dot(c.row(j)) / (norms(i) * norms(j)));
            total += it.value() * d * d;
        }
    }
    return 0.5 * cfg.lambda2 * total;
}

double f2_value(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg) {
    check_graph(c, graph.size());
    const Matrix cos = row_cosine_matrix(c, cfg.epsilon_norm);
    double total = 0.0;
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
        for (Eigen::Index i = 0; i < c.rows(); ++i) {
            if (i == j) {
                continue;
            }
            const double d = 1.0 - cos(i, j);
            total += graph.adjacency(i, j) * d * d;
        }
    }
    return 0.5 * cfg.lambda2 * total;
}

namespace {

Matrix f2_gradient_scaled(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg, double diag_factor) {
    check_graph(c, graph.size());
    const MarkerAssignment none = MarkerAssignment::from_types(std::vector<int>(static_cast<std::size_t>(c.rows()), 0),
                                                               static_cast<int>(c.cols()));
    const SparseMatrix omega = penalty_graph(graph);
    const PenaltyWeights w = build_penalty_weights(c, none, omega, cfg);
    const Vector s = w.w3_row_sums.cwiseProduct(w.inv_sq_norms);
    Matrix out = cfg.lambda2 * (diag_factor * (s.asDiagonal() * c) - 2.0 * (w.w4 * c));
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        if (w.inv_sq_norms(i) == 0.0) {
            out.row(i).setZero();
        }
    }
    return out;
}

}  // namespace

Matrix f2_gradient(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg) {
    return f2_gradient_scaled(c, graph, cfg, 2.0);
}

Matrix f2_gradient_printed(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg) {
    return f2_gradient_scaled(c, graph, cfg, 1.0);
}

EuclideanTraceForms f2_euclidean_trace(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg) {
    check_graph(c, graph.size());
    const Matrix& w = graph.adjacency;
    EuclideanTraceForms out;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.rows(); ++j) {
            out.loop += w(i, j) * (c.row(i) - c.row(j)).squaredNorm();
        }
    }
    out.loop *= 0.5 * cfg.lambda2;
    Matrix l = -w;
    l.diagonal() += w.rowwise().sum();
    out.trace = cfg.lambda2 * (c.transpose() * l * c).trace();
    return out;
}

double surrogate_value(const Matrix& a, const PenaltyWeights& weights, const MarkerAssignment& markers,
                       const PenaltyConfig& cfg) {
    double f1 = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const int g = markers.type_of[static_cast<std::size_t>(i)];
        if (g != 0) {
            f1 += weights.w1(i) * (0.5 * weights.w2(i) * a.row(i).squaredNorm() - a(i, g - 1));
        }
    }
    const Vector s = weights.w3_row_sums.cwiseProduct(weights.inv_sq_norms);
    const double diag = (s.asDiagonal() * a).cwiseProduct(a).sum();
    const double coupling = (weights.w4 * a).cwiseProduct(a).sum();
    return cfg.lambda1 * f1 + cfg.lambda2 * (diag - coupling);
}

Matrix surrogate_gradient(const Matrix& a, const PenaltyWeights& weights, const MarkerAssignment& markers,
                          const PenaltyConfig& cfg) {
    const Vector s = weights.w3_row_sums.cwiseProduct(weights.inv_sq_norms);
    return cfg.lambda1 * weights.w1.asDiagonal() * (weights.w2.asDiagonal() * a - markers.indicator) +
           2.0 * cfg.lambda2 * (s.asDiagonal() * a - weights.w4 * a);
}

}  // namespace gsnmf
