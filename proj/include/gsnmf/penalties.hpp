#ifndef GSNMF_PENALTIES_HPP
#define GSNMF_PENALTIES_HPP

#include "gsnmf/graph.hpp"
#include "gsnmf/matrix.hpp"

#include <Eigen/SparseCore>

/**
 * @file penalties.hpp
 *
 * @brief Solvability penalty F1 (marker rows pulled toward their vertex) and
 * manifold penalty F2 (graph neighbours pulled toward a common direction),
 * with gradients and the frozen-weight quadratic used by the inner solver.
 */

namespace gsnmf {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct PenaltyConfig {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double epsilon_norm = kZeroNormTolerance;  ///< rows with smaller norm are treated as zero

    void validate() const;
};

/**
 * Off-diagonal part of (W + W^T)/2 as a sparse matrix. The diagonal never
 * contributes to F2 because d(x, x) = 0.
 */
SparseMatrix penalty_graph(const SimilarityGraph& graph);
SparseMatrix penalty_graph(const Matrix& adjacency);

/**
 * @brief Weights frozen at one value of C.
 *
 * The N x N quantities are stored on the sparsity pattern of the penalty
 * graph only; entries outside the graph are never needed.
 */
struct PenaltyWeights {
    Vector w1;            ///< (1 - c_{i,g(i)}/|C_i|) chi_i / |C_i|
    Vector w2;            ///< c_{i,g(i)} / |C_i|^2
    SparseMatrix coc;     ///< row cosines on the graph pattern
    SparseMatrix w3;      ///< omega (1 - coc) coc
    SparseMatrix w4;      ///< omega (1 - coc) / (|C_i| |C_j|)
    Vector w3_row_sums;
    Vector row_norms;
    Vector inv_sq_norms;  ///< 1/|C_i|^2, zero for floored rows
    SparseMatrix omega;   ///< the graph the weights were built on
};

PenaltyWeights build_penalty_weights(const Matrix& c, const MarkerAssignment& markers, const SparseMatrix& omega,
                                     const PenaltyConfig& cfg);

/// (lambda1/2) sum_r sum_{i in S_r} d(C_i, e_r)^2
double f1_value(const Matrix& c, const MarkerAssignment& markers, const PenaltyConfig& cfg);

/// lambda1 W1 (W2 C - C_g)
Matrix f1_gradient(const Matrix& c, const MarkerAssignment& markers, const PenaltyConfig& cfg);

/// Entry-by-entry evaluation of the same gradient.
Matrix f1_gradient_elementwise(const Matrix& c, const MarkerAssignment& markers, const PenaltyConfig& cfg);

/// (lambda2/2) sum_i sum_j omega_ij d(C_i, C_j)^2
double f2_value(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg);
double f2_value(const Matrix& c, const SparseMatrix& omega, const PenaltyConfig& cfg);
double f2_value(const PenaltyWeights& weights, const SparseMatrix& omega, const PenaltyConfig& cfg);

/**
 * Gradient of f2_value: 2 lambda2 [diag(W3 1) diag(|C|^-2) C - W4 C], with W3
 * and W4 built from the symmetrized graph.
 */
Matrix f2_gradient(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg);

/// The matrix form with factor one on the diag(W3 1) term. Kept for comparison only.
Matrix f2_gradient_printed(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg);

/// F2 with the Euclidean distance in place of the Eisen distance, two ways.
struct EuclideanTraceForms {
    double loop = 0.0;   ///< (lambda2/2) sum omega_ij |C_i - C_j|^2
    double trace = 0.0;  ///< lambda2 Tr(C^T L C), L = D - W
};

EuclideanTraceForms f2_euclidean_trace(const Matrix& c, const SimilarityGraph& graph, const PenaltyConfig& cfg);

/**
 * Quadratic in A whose gradient is the penalty gradient with W1..W4 frozen:
 *   lambda1 W1 (W2 A - C_g) + 2 lambda2 [diag(W3 1) diag(|C|^-2) A - W4 A].
 */
double surrogate_value(const Matrix& a, const PenaltyWeights& weights, const MarkerAssignment& markers,
                       const PenaltyConfig& cfg);
Matrix surrogate_gradient(const Matrix& a, const PenaltyWeights& weights, const MarkerAssignment& markers,
                          const PenaltyConfig& cfg);

}  // namespace gsnmf

#endif
