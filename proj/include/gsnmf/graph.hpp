#ifndef GSNMF_GRAPH_HPP
#define GSNMF_GRAPH_HPP

#include "gsnmf/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

/**
 * @file graph.hpp
 *
 * @brief Gene similarity graph, graph Laplacians, spectral embedding,
 * k-means clustering of the embedding and marker-gene selection.
 */

namespace gsnmf {

/// How the dense Gaussian-of-Eisen kernel is pruned.
struct Sparsity {
    enum class Mode { dense, knn, threshold };

    Mode mode = Mode::dense;
    std::size_t neighbors = 0;  ///< used by Mode::knn
    double threshold = 0.0;     ///< used by Mode::threshold

    static Sparsity dense() { return {}; }
    static Sparsity knn(std::size_t m) { return {Mode::knn, m, 0.0}; }
    static Sparsity above(double tau) { return {Mode::threshold, 0, tau}; }

    /// Accepts "dense", "knn:<m>" or "threshold:<tau>".
    static Sparsity parse(const std::string& text);
    std::string describe() const;
};

/**
 * @brief Weighted graph over gene rows.
 *
 * The diagonal is always kept (self-similarity one), so every degree is
 * positive in every sparsity mode.
 */
struct SimilarityGraph {
    Matrix adjacency;
    Vector degrees;
    double sigma = 0.0;
    Sparsity sparsity;

    Eigen::Index size() const noexcept { return adjacency.rows(); }

    /// Wraps an arbitrary nonnegative adjacency matrix, computing degrees.
    static SimilarityGraph from_adjacency(Matrix adjacency);
};

/// omega_ij = exp(-d_eisen(G_i, G_j)^2 / sigma), then pruned per `sparsity`.
SimilarityGraph build_adjacency(const Matrix& rows, double sigma, Sparsity sparsity = Sparsity::dense());
SimilarityGraph build_adjacency(const ExpressionMatrix& g, double sigma, Sparsity sparsity = Sparsity::dense());

enum class LaplacianKind { unnormalized, symmetric, random_walk };

/// D - W, I - D^-1/2 W D^-1/2 or I - D^-1 W.
Matrix graph_laplacian(const SimilarityGraph& graph, LaplacianKind kind);

enum class EigenMethod { automatic, dense, lanczos };

struct SpectralEmbedding {
    Matrix vectors;      ///< N x k, unit columns, largest-magnitude entry positive
    Vector eigenvalues;  ///< ascending
};

/// Dense eigendecomposition is used up to this many rows under EigenMethod::automatic.
inline constexpr Eigen::Index kDenseEigenLimit = 2000;

/// The k eigenpairs of smallest eigenvalue of a symmetric Laplacian.
SpectralEmbedding spectral_embed(const Matrix& laplacian, int k, EigenMethod method = EigenMethod::automatic);

struct KMeansOptions {
    int restarts = 100;
    int max_iterations = 300;
    double tolerance = 1e-9;  ///< on total centroid movement
    int workers = 1;
};

struct ClusterAssignment {
    std::vector<int> labels;                        ///< 1..k per row
    std::vector<std::vector<std::size_t>> groups;   ///< row indices per cluster, ascending
    Matrix embedding;                               ///< the embedding that was clustered
    std::vector<Eigen::Index> features;             ///< embedding columns fed to k-means
    double inertia = 0.0;
    int k() const noexcept { return static_cast<int>(groups.size()); }
};

/**
 * k-means on the embedding rows with k-means++ seeding. Restart r draws from
 * its own stream seeded by (seed, r), so the result does not depend on the
 * worker count. Clusters are numbered by their smallest member index.
 */
ClusterAssignment cluster_rows(const Matrix& embedding, int k, std::uint64_t seed,
                               const KMeansOptions& options = {});

/// Mean silhouette width of `labels` (1..k) over the rows of `points`.
double silhouette(const Matrix& points, const std::vector<int>& labels);

enum class MarkerStrategy { medoid, centroid, max_mean_correlation };

MarkerStrategy parse_marker_strategy(const std::string& text);
std::string to_string(MarkerStrategy strategy);

struct MarkerAssignment {
    int k = 0;
    std::vector<std::vector<std::size_t>> marker_sets;  ///< S_r, ascending row indices
    std::vector<int> type_of;                           ///< g(i): 1..k for markers, 0 otherwise
    std::vector<std::uint8_t> chi;                      ///< 1 iff type_of[i] != 0
    Matrix indicator;                                   ///< N x k, row i = e_{g(i)} or zero

    std::size_t n_rows() const noexcept { return type_of.size(); }

    /// Builds every field from g(i). Throws when a label falls outside 0..k.
    static MarkerAssignment from_types(std::vector<int> type_of, int k);
};

/**
 * Picks the `per_cluster` members of every cluster that sit closest to the
 * cluster's vertex region. The default medoid strategy ranks members by
 * embedding distance to the medoid of the 5% most mutually correlated members.
 */
MarkerAssignment select_markers(const ExpressionMatrix& g, const ClusterAssignment& clusters,
                                std::size_t per_cluster, MarkerStrategy strategy = MarkerStrategy::medoid);
MarkerAssignment select_markers(const Matrix& g, const ClusterAssignment& clusters,
                                std::size_t per_cluster, MarkerStrategy strategy = MarkerStrategy::medoid);

}  // namespace gsnmf

#endif
