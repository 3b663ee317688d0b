#include "gsnmf/error.hpp"
#include "gsnmf/graph.hpp"
#include "gsnmf/pipeline.hpp"
#include "gsnmf/synthetic.hpp"

#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace gsnmf;
using testing::Rng;

namespace {

GroundTruth low_noise(Eigen::Index per_type, Eigen::Index rest, std::uint64_t seed, double ndr = 0.01) {
    SyntheticSpec spec;
    spec.n_genes = 3 * per_type + rest;
    spec.n_samples = 20;
    spec.n_types = 3;
    spec.marker_split = {per_type, per_type, per_type, rest};
    spec.ndr = ndr;
    spec.seed = seed;
    spec.clip_negative = true;
    return generate_synthetic(spec);
}

/// Three tight clouds around the vertices of a triangle.
Matrix clouds(Rng& rng, int per_cloud, std::vector<int>& truth) {
    Matrix pts(3 * per_cloud, 2);
    const double cx[] = {0.0, 10.0, 5.0}, cy[] = {0.0, 0.0, 8.0};
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < per_cloud; ++i) {
            pts(c * per_cloud + i, 0) = cx[c] + 0.3 * rng.normal();
            pts(c * per_cloud + i, 1) = cy[c] + 0.3 * rng.normal();
            truth.push_back(c + 1);
        }
    }
    return pts;
}

}  // namespace

TEST_CASE("adjacency weights on hand-checked pairs") {
    Matrix g(2, 2);
    g << 1, 2, 2, 4;
    CHECK(build_adjacency(g, 0.7).adjacency(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    g << 1, 0, 0, 1;
    CHECK(build_adjacency(g, 0.5).adjacency(0, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(build_adjacency(g, 0.5).adjacency(0, 1) == doctest::Approx(0.13534).epsilon(1e-4));
    g << 1, 0, 1, 1;
    const double d = 1.0 - 1.0 / std::sqrt(2.0);
    CHECK(build_adjacency(g, 0.2).adjacency(0, 1) == doctest::Approx(std::exp(-d * d / 0.2)).epsilon(1e-14));
    const auto graph = build_adjacency(g, 0.2);
    CHECK(graph.adjacency(0, 0) == 1.0);
    CHECK(graph.degrees(0) == doctest::Approx(1.0 + std::exp(-d * d / 0.2)));
}

TEST_CASE("adjacency argument checks") {
    Matrix g = Matrix::Ones(3, 2);
    CHECK_THROWS_AS(build_adjacency(g, 0.0), ParameterError);
    CHECK_THROWS_AS(build_adjacency(g, -1.0), ParameterError);
    g.row(1).setZero();
    CHECK_THROWS_AS(build_adjacency(g, 0.2), DomainError);
}

TEST_CASE("sparsity descriptors parse and print") {
    CHECK(Sparsity::parse("dense").mode == Sparsity::Mode::dense);
    CHECK(Sparsity::parse("knn:7").neighbors == 7);
    CHECK(Sparsity::parse("threshold:0.25").threshold == 0.25);
    for (const char* s : {"dense", "knn:10", "threshold:0.5"}) {
        CHECK(Sparsity::parse(Sparsity::parse(s).describe()).describe() == Sparsity::parse(s).describe());
    }
    CHECK_THROWS_AS(Sparsity::parse("knn:0"), ParameterError);
    CHECK_THROWS_AS(Sparsity::parse("knn:x"), ParameterError);
    CHECK_THROWS_AS(Sparsity::parse("sparse"), ParameterError);
    CHECK_THROWS_AS(Sparsity::parse("threshold:2"), ParameterError);
}

TEST_CASE("knn graph keeps the strongest neighbours and symmetrizes by maximum") {
    Rng rng(21);
    const Matrix g = rng.uniform_matrix(12, 4, 0.1, 1.0);
    const auto dense = build_adjacency(g, 0.2);
    const auto knn = build_adjacency(g, 0.2, Sparsity::knn(3));
    for (Eigen::Index i = 0; i < 12; ++i) {
        std::vector<double> off;
        for (Eigen::Index j = 0; j < 12; ++j)
            if (j != i) off.push_back(dense.adjacency(i, j));
        std::sort(off.rbegin(), off.rend());
        for (Eigen::Index j = 0; j < 12; ++j) {
            if (j == i) continue;
            const double w = knn.adjacency(i, j);
            if (w != 0.0) CHECK(w == dense.adjacency(i, j));
            if (dense.adjacency(i, j) > off[3]) CHECK(w == dense.adjacency(i, j));
        }
        CHECK(knn.adjacency(i, i) == 1.0);
    }
}

TEST_CASE("Laplacians of the two-point graph") {
    const auto graph = SimilarityGraph::from_adjacency(Matrix::Ones(2, 2));
    Matrix expect(2, 2);
    expect << 1, -1, -1, 1;
    const Matrix l = graph_laplacian(graph, LaplacianKind::unnormalized);
    CHECK((l - expect).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(l);
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(2.0));
    const Matrix ls = graph_laplacian(graph, LaplacianKind::symmetric);
    CHECK((ls - 0.5 * expect).norm() <= 1e-15);
    Eigen::SelfAdjointEigenSolver<Matrix> es2(ls);
    CHECK(es2.eigenvalues()(1) == doctest::Approx(1.0));
    const Matrix lrw = graph_laplacian(graph, LaplacianKind::random_walk);
    CHECK((lrw - 0.5 * expect).norm() <= 1e-15);
}

TEST_CASE("Laplacian variants on a random graph") {
    Rng rng(22);
    Matrix w = rng.symmetric_weights(5, 0.8);
    w.diagonal().setOnes();
    const auto graph = SimilarityGraph::from_adjacency(w);
    const Matrix l = graph_laplacian(graph, LaplacianKind::unnormalized);
    CHECK((l * Vector::Ones(5)).cwiseAbs().maxCoeff() <= 1e-14);
    const Vector d = w.rowwise().sum();
    const Matrix lrw = graph_laplacian(graph, LaplacianKind::random_walk);
    const Matrix ls = graph_laplacian(graph, LaplacianKind::symmetric);
    for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = 0; j < 5; ++j) {
            const double id = i == j ? 1.0 : 0.0;
            CHECK(lrw(i, j) == doctest::Approx(id - w(i, j) / d(i)).epsilon(1e-14));
            CHECK(ls(i, j) == doctest::Approx(id - w(i, j) / std::sqrt(d(i) * d(j))).epsilon(1e-14));
        }
    }
    Matrix z = Matrix::Zero(2, 2);
    z(0, 0) = 1.0;
    CHECK_THROWS_AS(graph_laplacian(SimilarityGraph::from_adjacency(z), LaplacianKind::symmetric), DomainError);
}

TEST_CASE("embedding of two disconnected pairs") {
    Matrix w = Matrix::Zero(4, 4);
    w.block(0, 0, 2, 2).setOnes();
    w.block(2, 2, 2, 2).setOnes();
    const auto emb = spectral_embed(graph_laplacian(SimilarityGraph::from_adjacency(w), LaplacianKind::symmetric), 2);
    CHECK(std::abs(emb.eigenvalues(0)) <= 1e-12);
    CHECK(std::abs(emb.eigenvalues(1)) <= 1e-12);
    // rows of the same component coincide, rows of different components do not
    CHECK((emb.vectors.row(0) - emb.vectors.row(1)).norm() <= 1e-12);
    CHECK((emb.vectors.row(2) - emb.vectors.row(3)).norm() <= 1e-12);
    CHECK((emb.vectors.row(0) - emb.vectors.row(2)).norm() >= 0.5);
}

TEST_CASE("3x3 embedding matches a dense eigensolver") {
    Matrix w(3, 3);
    w << 1, 0.8, 0.1, 0.8, 1, 0.3, 0.1, 0.3, 1;
    const Matrix l = graph_laplacian(SimilarityGraph::from_adjacency(w), LaplacianKind::symmetric);
    const auto emb = spectral_embed(l, 2);
    Eigen::SelfAdjointEigenSolver<Matrix> es(l);
    for (int c = 0; c < 2; ++c) {
        CHECK(emb.eigenvalues(c) == doctest::Approx(es.eigenvalues()(c)).epsilon(1e-10));
        Vector v = es.eigenvectors().col(c);
        Eigen::Index at = 0;
        v.cwiseAbs().maxCoeff(&at);
        if (v(at) < 0) v = -v;
        CHECK((emb.vectors.col(c) - v).norm() <= 1e-10);
        CHECK(emb.vectors.col(c).norm() == doctest::Approx(1.0));
    }
}

TEST_CASE("Lanczos and dense embeddings agree") {
    const auto truth = low_noise(40, 30, 5, 0.05);
    const Matrix l = graph_laplacian(build_adjacency(truth.g, 0.2), LaplacianKind::symmetric);
    const auto dense = spectral_embed(l, 3, EigenMethod::dense);
    const auto lanczos = spectral_embed(l, 3, EigenMethod::lanczos);
    CHECK((dense.eigenvalues - lanczos.eigenvalues).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((dense.vectors - lanczos.vectors).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("spectral embedding argument checks") {
    Matrix l = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(spectral_embed(l, 1), ParameterError);
    CHECK_THROWS_AS(spectral_embed(l, 4), ParameterError);
    l(0, 1) = 0.5;
    CHECK_THROWS_AS(spectral_embed(l, 2), ParameterError);
}

TEST_CASE("first eigenvector of L_sym is nearly constant on three-type data") {
    const auto truth = low_noise(100, 0, 1);
    const auto emb = spectral_embed(graph_laplacian(build_adjacency(truth.g, 0.2), LaplacianKind::symmetric), 3);
    const Vector v = emb.vectors.col(0);
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().mean());
    CHECK(sd / std::abs(mean) < 0.05);
}

TEST_CASE("k-means recovers well separated clouds") {
    Rng rng(23);
    std::vector<int> truth;
    const Matrix pts = clouds(rng, 30, truth);
    Matrix emb(pts.rows(), 3);
    emb.col(0).setConstant(1.0);
    emb.rightCols(2) = pts;
    const auto res = cluster_rows(emb, 3, 7);
    CHECK(testing::purity(res.labels, truth, 3) == 1.0);
    CHECK(res.features == std::vector<Eigen::Index>{1, 2});
    CHECK(res.labels[0] == 1);
    std::size_t total = 0;
    for (const auto& grp : res.groups) total += grp.size();
    CHECK(total == truth.size());
}

TEST_CASE("k-means refuses a degenerate embedding") {
    CHECK_THROWS_AS(cluster_rows(Matrix::Ones(10, 3), 3, 0), ClusteringError);
}

TEST_CASE("k-means result does not depend on the worker count") {
    Rng rng(24);
    std::vector<int> truth;
    Matrix pts = clouds(rng, 20, truth);
    pts += 3.0 * rng.normal_matrix(pts.rows(), 2);
    KMeansOptions one, four;
    four.workers = 4;
    const auto a = cluster_rows(pts, 3, 99, one);
    const auto b = cluster_rows(pts, 3, 99, four);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("silhouette of separated clouds is near one") {
    Rng rng(25);
    std::vector<int> truth;
    const Matrix pts = clouds(rng, 20, truth);
    CHECK(silhouette(pts, truth) > 0.9);
    std::vector<int> shuffled = truth;
    std::rotate(shuffled.begin(), shuffled.begin() + 7, shuffled.end());
    CHECK(silhouette(pts, shuffled) < silhouette(pts, truth));
}

TEST_CASE("marker strategy names round-trip") {
    for (auto s : {MarkerStrategy::medoid, MarkerStrategy::centroid, MarkerStrategy::max_mean_correlation}) {
        CHECK(parse_marker_strategy(to_string(s)) == s);
    }
    CHECK(to_string(MarkerStrategy::max_mean_correlation) == "max-mean-correlation");
    CHECK_THROWS_AS(parse_marker_strategy("closest"), ParameterError);
}

TEST_CASE("marker assignment from types") {
    const auto m = MarkerAssignment::from_types({0, 2, 1, 0, 2}, 2);
    CHECK(m.marker_sets[0] == std::vector<std::size_t>{2});
    CHECK(m.marker_sets[1] == std::vector<std::size_t>{1, 4});
    for (std::size_t i = 0; i < 5; ++i) {
        const double row_sum = m.indicator.row(static_cast<Eigen::Index>(i)).sum();
        CHECK(row_sum == (m.type_of[i] != 0 ? 1.0 : 0.0));
        CHECK(m.chi[i] == (m.type_of[i] != 0 ? 1 : 0));
        if (m.type_of[i] != 0) CHECK(m.indicator(static_cast<Eigen::Index>(i), m.type_of[i] - 1) == 1.0);
    }
    CHECK_THROWS_AS(MarkerAssignment::from_types({0, 3}, 2), ParameterError);
}

TEST_CASE("markers on all-marker data come from the right generator type") {
    const auto truth = low_noise(60, 0, 2);
    const auto cl = cluster_genes(truth.g, 3, 0.2, Sparsity::dense(), 2);
    for (auto strategy : {MarkerStrategy::medoid, MarkerStrategy::centroid, MarkerStrategy::max_mean_correlation}) {
        const auto m = select_markers(truth.g, cl.clusters, 20, strategy);
        CHECK(marker_precision(m, truth.labels) >= 0.95);
    }
}

TEST_CASE("per-cluster count equal to the cluster size selects whole clusters") {
    const auto truth = low_noise(30, 0, 3);
    const auto cl = cluster_genes(truth.g, 3, 0.2, Sparsity::dense(), 3);
    std::set<std::size_t> sizes;
    for (const auto& grp : cl.clusters.groups) sizes.insert(grp.size());
    REQUIRE(sizes.size() == 1);
    const auto m = select_markers(truth.g, cl.clusters, *sizes.begin());
    for (int r = 0; r < 3; ++r) CHECK(m.marker_sets[static_cast<std::size_t>(r)] == cl.clusters.groups[static_cast<std::size_t>(r)]);
    try {
        select_markers(truth.g, cl.clusters, *sizes.begin() + 1);
        FAIL("expected a parameter error");
    } catch (const ParameterError& e) {
        CHECK(std::string(e.what()).find("30") != std::string::npos);
    }
}

TEST_CASE("property: adjacency is exactly symmetric in every sparsity mode") {
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const Matrix g = rng.uniform_matrix(rng.integer(3, 25), rng.integer(2, 6), 0.01, 1.0);
        for (const auto& sp : {Sparsity::dense(), Sparsity::knn(static_cast<std::size_t>(rng.integer(1, 4))),
                               Sparsity::above(rng.uniform(0.0, 0.9))}) {
            const auto graph = build_adjacency(g, rng.uniform(0.05, 2.0), sp);
            CHECK((graph.adjacency - graph.adjacency.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(graph.degrees.minCoeff() > 0.0);
            CHECK(graph.adjacency.maxCoeff() <= 1.0);
        }
    }
}

TEST_CASE("property: L_sym spectrum lies in [0, 2] with a zero eigenvalue") {
    Rng rng(32);
    for (int t = 0; t < 20; ++t) {
        const Matrix g = rng.uniform_matrix(rng.integer(3, 30), rng.integer(2, 6), 0.01, 1.0);
        const Matrix l = graph_laplacian(build_adjacency(g, rng.uniform(0.05, 2.0)), LaplacianKind::symmetric);
        const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(l).eigenvalues();
        CHECK(ev.minCoeff() >= -1e-12);
        CHECK(ev.maxCoeff() <= 2.0 + 1e-12);
        CHECK(std::abs(ev(0)) <= 1e-10);
    }
}

TEST_CASE("property: the unnormalized Laplacian annihilates constants") {
    Rng rng(33);
    for (int t = 0; t < 20; ++t) {
        const int n = rng.integer(2, 40);
        Matrix w = rng.symmetric_weights(n, rng.uniform(0.1, 1.0));
        w.diagonal().setOnes();
        const Matrix l = graph_laplacian(SimilarityGraph::from_adjacency(w), LaplacianKind::unnormalized);
        CHECK((l * Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-10 * l.cwiseAbs().maxCoeff() * n);
    }
}

TEST_CASE("property: cluster labels follow a row reordering of G") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto truth = low_noise(25, 10, 40 + seed, 0.03);
        Rng rng(seed);
        const auto perm = rng.permutation(static_cast<std::size_t>(truth.g.n_genes()));
        const Matrix shuffled = testing::permute_rows(truth.g.values(), perm);
        const auto a = cluster_genes(truth.g, 3, 0.2, Sparsity::dense(), seed).clusters.labels;
        const auto b = cluster_genes(ExpressionMatrix::with_default_ids(shuffled, ExpressionMatrix::Sign::any), 3, 0.2,
                                     Sparsity::dense(), seed)
                           .clusters.labels;
        std::vector<int> a_perm(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) a_perm[i] = a[perm[i]];
        CHECK(testing::purity(b, a_perm, 3) == 1.0);
    }
}

TEST_CASE("property: marker sets are deterministic") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto truth = low_noise(20, 20, 50 + seed, 0.1);
        const auto cl = cluster_genes(truth.g, 3, 0.2, Sparsity::dense(), seed);
        const auto a = select_markers(truth.g, cl.clusters, 8);
        const auto b = select_markers(truth.g, cluster_genes(truth.g, 3, 0.2, Sparsity::dense(), seed).clusters, 8);
        CHECK(a.marker_sets == b.marker_sets);
        CHECK(a.type_of == b.type_of);
        for (int r = 1; r <= 3; ++r) {
            for (auto i : a.marker_sets[static_cast<std::size_t>(r - 1)]) {
                CHECK(a.type_of[i] == r);
                CHECK(cl.clusters.labels[i] == r);
            }
        }
    }
}
