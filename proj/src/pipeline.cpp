#include "gsnmf/pipeline.hpp"

#include "gsnmf/error.hpp"

#include <algorithm>

namespace gsnmf {

void PipelineConfig::validate() const {
    if (k < 2) {
        throw ParameterError("k must be at least 2");
    }
    if (!(sigma > 0.0)) {
        throw ParameterError("sigma must be positive");
    }
    solver.validate();
}

std::size_t default_markers_per_cluster(const ClusterAssignment& clusters) {
    std::size_t smallest = clusters.labels.size();
    for (const auto& grp : clusters.groups) {
        smallest = std::min(smallest, grp.size());
    }
    const std::size_t wanted = std::max<std::size_t>(1, clusters.labels.size() / 10);
    return std::max<std::size_t>(1, std::min(wanted, smallest));
}

ClusteringResult cluster_genes(const ExpressionMatrix& g, int k, double sigma, Sparsity sparsity,
                               std::uint64_t seed, const KMeansOptions& kmeans, EigenMethod method) {
    if (k < 2 || k > g.n_genes()) {
        throw ParameterError("k must satisfy 2 <= k <= number of genes (k=" + std::to_string(k) + ")");
    }
    ClusteringResult out{build_adjacency(g, sigma, sparsity), {}, {}, 0.0};
    const Matrix l = graph_laplacian(out.graph, LaplacianKind::symmetric);
    out.embedding = spectral_embed(l, k, method);
    out.clusters = cluster_rows(out.embedding.vectors, k, seed, kmeans);
    Matrix features(out.embedding.vectors.rows(), static_cast<Eigen::Index>(out.clusters.features.size()));
    for (std::size_t c = 0; c < out.clusters.features.size(); ++c) {
        features.col(static_cast<Eigen::Index>(c)) = out.embedding.vectors.col(out.clusters.features[c]);
    }
    out.silhouette = silhouette(features, out.clusters.labels);
    return out;
}

PipelineResult run_pipeline(const ExpressionMatrix& g, const PipelineConfig& cfg) {
    cfg.validate();
    ClusteringResult clustering =
        cluster_genes(g, cfg.k, cfg.sigma, cfg.sparsity, cfg.solver.seed, cfg.kmeans, cfg.eigen_method);
    const std::size_t per_cluster =
        cfg.markers_per_cluster == 0 ? default_markers_per_cluster(clustering.clusters) : cfg.markers_per_cluster;
    MarkerAssignment markers = select_markers(g, clustering.clusters, per_cluster, cfg.strategy);
    SparseMatrix omega = cfg.penalty_sparsity.describe() == cfg.sparsity.describe()
                             ? penalty_graph(clustering.graph)
                             : penalty_graph(build_adjacency(g, cfg.sigma, cfg.penalty_sparsity));
    Solution solution = solve(g.values(), markers, omega, cfg.solver);
    return PipelineResult{std::move(clustering), std::move(omega), std::move(markers), std::move(solution)};
}

std::vector<Eigen::Index> BenchConfig::split() const {
    if (!marker_split.empty()) {
        return marker_split;
    }
    const int k_types = pipeline.k;
    std::vector<Eigen::Index> out(static_cast<std::size_t>(k_types) + 1, n_genes / (k_types + 1));
    out.back() += n_genes - (n_genes / (k_types + 1)) * (k_types + 1);
    return out;
}

double marker_precision(const MarkerAssignment& markers, const std::vector<int>& labels) {
    if (labels.size() != markers.n_rows()) {
        throw ParameterError("marker_precision: label count does not match");
    }
    const int k = markers.k;
    Matrix counts = Matrix::Zero(k, k);
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int t = markers.type_of[i];
        if (t == 0) {
            continue;
        }
        total += 1.0;
        if (labels[i] >= 1 && labels[i] <= k) {
            counts(t - 1, labels[i] - 1) += 1.0;
        }
    }
    if (total == 0.0) {
        return 0.0;
    }
    const auto match = max_weight_assignment(counts);
    double hits = 0.0;
    for (int r = 0; r < k; ++r) {
        hits += counts(r, match[static_cast<std::size_t>(r)]);
    }
    return hits / total;
}

BenchRun run_bench_case(const BenchConfig& cfg, double ndr, std::uint64_t seed,
                        std::optional<BenchArtifacts>* artifacts) {
    SyntheticSpec spec;
    spec.n_genes = cfg.n_genes;
    spec.n_samples = cfg.n_samples;
    spec.n_types = cfg.pipeline.k;
    spec.marker_split = cfg.split();
    spec.ndr = ndr;
    spec.marker_tightness = cfg.marker_tightness;
    spec.seed = seed;
    GroundTruth truth = generate_synthetic(spec);

    PipelineConfig pc = cfg.pipeline;
    pc.solver.seed = seed;
    PipelineResult res = run_pipeline(truth.g, pc);
    AlignmentReport rep =
        align_solution(res.solution.c, res.solution.p, truth.c_true.values(), truth.p_true.values());

    BenchRun run;
    run.ndr = ndr;
    run.seed = seed;
    run.achieved_ndr = truth.achieved_ndr;
    run.metrics = solution_errors(rep, truth.g.values());
    run.raw_err_c = rep.raw_err_c;
    run.raw_err_p = rep.raw_err_p;
    run.iterations = res.solution.iterations;
    run.converged = res.solution.converged;
    run.marker_precision = marker_precision(res.markers, truth.labels);
    if (artifacts != nullptr) {
        artifacts->emplace(BenchArtifacts{std::move(truth), std::move(res), std::move(rep)});
    }
    return run;
}

}  // namespace gsnmf
