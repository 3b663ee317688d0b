#include "gsnmf/error.hpp"
#include "gsnmf/pipeline.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace gsnmf;

namespace {

GroundTruth small_truth(double ndr, std::uint64_t seed, double tightness = 0.05) {
    SyntheticSpec s;
    s.n_genes = 160;
    s.n_samples = 15;
    s.n_types = 3;
    s.marker_split = {40, 40, 40, 40};
    s.ndr = ndr;
    s.seed = seed;
    s.marker_tightness = tightness;
    s.clip_negative = true;
    return generate_synthetic(s);
}

/// Reference: best fraction over all label bijections, computed by brute force.
double precision_oracle(const MarkerAssignment& m, const std::vector<int>& labels) {
    std::vector<int> perm(static_cast<std::size_t>(m.k));
    std::iota(perm.begin(), perm.end(), 1);
    std::size_t total = 0, best = 0;
    for (int r = 0; r < m.k; ++r) total += m.marker_sets[static_cast<std::size_t>(r)].size();
    do {
        std::size_t hits = 0;
        for (int r = 0; r < m.k; ++r)
            for (auto i : m.marker_sets[static_cast<std::size_t>(r)])
                if (labels[i] == perm[static_cast<std::size_t>(r)]) ++hits;
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("default marker count") {
    ClusterAssignment c;
    c.labels.assign(100, 1);
    c.groups = {std::vector<std::size_t>(50), std::vector<std::size_t>(30), std::vector<std::size_t>(20)};
    CHECK(default_markers_per_cluster(c) == 10);
    c.groups[2].resize(4);
    CHECK(default_markers_per_cluster(c) == 4);
    c.labels.assign(5, 1);
    c.groups = {std::vector<std::size_t>(3), std::vector<std::size_t>(2)};
    CHECK(default_markers_per_cluster(c) == 1);
}

TEST_CASE("marker precision against generator labels") {
    const std::vector<int> labels{1, 1, 2, 2, 3, 0};
    auto m = MarkerAssignment::from_types({2, 2, 3, 3, 1, 0}, 3);
    CHECK(marker_precision(m, labels) == 1.0);
    m = MarkerAssignment::from_types({1, 2, 2, 2, 3, 1}, 3);
    CHECK(marker_precision(m, labels) == doctest::Approx(precision_oracle(m, labels)));
    testing::Rng rng(31);
    for (int t = 0; t < 30; ++t) {
        const auto truth = rng.marker_types(20, 3);
        const auto found = MarkerAssignment::from_types(rng.marker_types(20, 3), 3);
        CHECK(marker_precision(found, truth) == doctest::Approx(precision_oracle(found, truth)).epsilon(1e-12));
    }
}

TEST_CASE("pipeline configuration checks") {
    PipelineConfig cfg;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.k = 3;
    CHECK_NOTHROW(cfg.validate());
    cfg.sigma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("narrow kernel separates clusters better than a wide one") {
    const auto t = small_truth(0.05, 2, 0.02);
    KMeansOptions km;
    km.restarts = 10;
    const auto narrow = cluster_genes(t.g, 3, 0.2, Sparsity::dense(), 0, km);
    const auto wide = cluster_genes(t.g, 3, 1.0, Sparsity::dense(), 0, km);
    CHECK(narrow.silhouette > wide.silhouette);
    CHECK(narrow.clusters.k() == 3);
    CHECK(narrow.embedding.vectors.rows() == 160);
}

TEST_CASE("end-to-end run on a small mixture") {
    const auto t = small_truth(0.05, 3);
    PipelineConfig cfg;
    cfg.k = 3;
    cfg.kmeans.restarts = 10;
    cfg.solver = SolverConfig::from_lambda_tilde(4.0);
    cfg.solver.max_outer = 400;
    const auto res = run_pipeline(t.g, cfg);
    CHECK(res.markers.n_rows() == 160);
    CHECK(res.solution.c.minCoeff() >= 0.0);
    CHECK((res.solution.p.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(marker_precision(res.markers, t.labels) >= 0.9);
    const auto rep = align_solution(res.solution.c, res.solution.p, t.c_true.values(), t.p_true.values());
    CHECK(rep.err_p <= 0.3);
    CHECK(static_cast<int>(res.solution.history.size()) == res.solution.iterations);
}

TEST_CASE("bench case fills every field and returns artifacts") {
    BenchConfig cfg;
    cfg.n_genes = 120;
    cfg.n_samples = 12;
    cfg.pipeline.k = 3;
    cfg.pipeline.kmeans.restarts = 5;
    cfg.pipeline.solver = SolverConfig::from_lambda_tilde(4.0);
    cfg.pipeline.solver.max_outer = 100;
    CHECK(cfg.split() == std::vector<Eigen::Index>{30, 30, 30, 30});
    std::optional<BenchArtifacts> art;
    const auto run = run_bench_case(cfg, 0.1, 4, &art);
    REQUIRE(art.has_value());
    CHECK(run.ndr == 0.1);
    CHECK(run.seed == 4);
    CHECK(std::abs(run.achieved_ndr - 0.1) <= 0.02);
    CHECK(run.metrics.err_c == art->alignment.err_c);
    CHECK(run.iterations == art->result.solution.iterations);
    CHECK(run.marker_precision > 0.5);
    const auto again = run_bench_case(cfg, 0.1, 4);
    CHECK(again.metrics.err_c == run.metrics.err_c);
    CHECK(again.metrics.residue == run.metrics.residue);
}
