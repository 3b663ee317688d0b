#ifndef GSNMF_PIPELINE_HPP
#define GSNMF_PIPELINE_HPP

#include "gsnmf/admm.hpp"
#include "gsnmf/graph.hpp"
#include "gsnmf/matrix.hpp"
#include "gsnmf/synthetic.hpp"

#include <cstdint>
#include <optional>
#include <vector>

/**
 * @file pipeline.hpp
 *
 * @brief End-to-end workflows: graph, embedding, clustering, markers, solver,
 * and the synthetic benchmark built on top of them.
 */

namespace gsnmf {

struct PipelineConfig {
    int k = 0;
    double sigma = 0.2;
    Sparsity sparsity;                          ///< graph used for the embedding
    Sparsity penalty_sparsity = Sparsity::knn(1);  ///< graph used by F2
    EigenMethod eigen_method = EigenMethod::automatic;
    KMeansOptions kmeans;
    std::size_t markers_per_cluster = 0;  ///< 0 picks max(1, N/10) capped at the smallest cluster
    MarkerStrategy strategy = MarkerStrategy::medoid;
    SolverConfig solver;                  ///< solver.seed also seeds k-means

    void validate() const;
};

struct ClusteringResult {
    SimilarityGraph graph;
    SpectralEmbedding embedding;
    ClusterAssignment clusters;
    double silhouette = 0.0;
};

struct PipelineResult {
    ClusteringResult clustering;
    SparseMatrix penalty_graph;
    MarkerAssignment markers;
    Solution solution;
};

/// max(1, N/10), reduced to the smallest cluster size.
std::size_t default_markers_per_cluster(const ClusterAssignment& clusters);

/// Graph, L_sym embedding, k-means and silhouette of the clustered features.
ClusteringResult cluster_genes(const ExpressionMatrix& g, int k, double sigma, Sparsity sparsity,
                               std::uint64_t seed, const KMeansOptions& kmeans = {},
                               EigenMethod method = EigenMethod::automatic);

PipelineResult run_pipeline(const ExpressionMatrix& g, const PipelineConfig& cfg);

struct BenchConfig {
    Eigen::Index n_genes = 800;
    Eigen::Index n_samples = 30;
    int k = 3;
    std::vector<Eigen::Index> marker_split;  ///< empty: equal split into k + 1 groups
    std::vector<double> ndrs{0.071, 0.162, 0.336, 0.599};
    std::vector<std::uint64_t> seeds{0};
    double marker_tightness = 0.05;
    PipelineConfig pipeline;  ///< k is taken from this struct

    std::vector<Eigen::Index> split() const;
};

struct BenchRun {
    double ndr = 0.0;
    std::uint64_t seed = 0;
    double achieved_ndr = 0.0;
    SolutionMetrics metrics;
    double raw_err_c = 0.0;
    double raw_err_p = 0.0;
    int iterations = 0;
    bool converged = false;
    double marker_precision = 0.0;  ///< fraction of selected markers whose generating type matches
};

struct BenchArtifacts {
    GroundTruth truth;
    PipelineResult result;
    AlignmentReport alignment;
};

/// Same data seed drives generator, clustering and solver initialization.
BenchRun run_bench_case(const BenchConfig& cfg, double ndr, std::uint64_t seed,
                        std::optional<BenchArtifacts>* artifacts = nullptr);

/// Fraction of selected marker rows whose generator label maps onto the selected type
/// under the best one-to-one matching of clusters to labels.
double marker_precision(const MarkerAssignment& markers, const std::vector<int>& labels);

}  // namespace gsnmf

#endif
