#include "gsnmf/graph.hpp"

#include "gsnmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace gsnmf {

Sparsity Sparsity::parse(const std::string& text) {
    if (text == "dense") {
        return dense();
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ParameterError("unknown sparsity '" + text + "' (expected dense, knn:<m> or threshold:<tau>)");
    }
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    try {
        std::size_t used = 0;
        if (head == "knn") {
            const long m = std::stol(tail, &used);
            if (used != tail.size() || m < 1) {
                throw ParameterError("knn neighbor count must be a positive integer");
            }
            return knn(static_cast<std::size_t>(m));
        }
        if (head == "threshold") {
            const double tau = std::stod(tail, &used);
            if (used != tail.size() || !(tau >= 0.0 && tau <= 1.0)) {
                throw ParameterError("threshold must lie in [0, 1]");
            }
            return above(tau);
        }
    } catch (const std::logic_error&) {
        throw ParameterError("malformed sparsity '" + text + "'");
    }
    throw ParameterError("unknown sparsity '" + text + "'");
}

std::string Sparsity::describe() const {
    std::ostringstream out;
    switch (mode) {
    case Mode::dense:
        out << "dense";
        break;
    case Mode::knn:
        out << "knn:" << neighbors;
        break;
    case Mode::threshold:
        out << "threshold:" << threshold;
        break;
    }
    return out.str();
}

SimilarityGraph SimilarityGraph::from_adjacency(Matrix adjacency) {
    if (adjacency.rows() != adjacency.cols()) {
        throw ParameterError("adjacency matrix must be square");
    }
    if ((adjacency.array() < 0).any() || !adjacency.allFinite()) {
        throw DomainError("adjacency weights must be finite and nonnegative");
    }
    SimilarityGraph graph;
    graph.degrees = adjacency.rowwise().sum();
    graph.adjacency = std::move(adjacency);
    return graph;
}

SimilarityGraph build_adjacency(const Matrix& rows, double sigma, Sparsity sparsity) {
    if (!(sigma > 0.0)) {
        throw ParameterError("sigma must be positive");
    }
    const Eigen::Index n = rows.rows();
    const Vector norms = row_norms(rows);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (norms(i) < kZeroNormTolerance) {
            throw DomainError("row " + std::to_string(i) + " has zero norm; filter zero rows before building the graph");
        }
    }

    Matrix w = row_cosine_matrix(rows);
    w = (-(1.0 - w.array()).square() / sigma).exp().matrix();
    w.diagonal().setOnes();

    if (sparsity.mode == Sparsity::Mode::knn) {
        if (sparsity.neighbors < 1) {
            throw ParameterError("knn sparsity needs at least one neighbor");
        }
        const auto m = std::min<Eigen::Index>(static_cast<Eigen::Index>(sparsity.neighbors), n - 1);
        Matrix pruned = Matrix::Zero(n, n);
        std::vector<Eigen::Index> order;
        for (Eigen::Index i = 0; i < n; ++i) {
            order.resize(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            std::erase(order, i);
            std::partial_sort(order.begin(), order.begin() + m, order.end(),
                              [&](Eigen::Index a, Eigen::Index b) {
                                  return w(i, a) > w(i, b) || (w(i, a) == w(i, b) && a < b);
                              });
            for (Eigen::Index t = 0; t < m; ++t) {
                pruned(i, order[static_cast<std::size_t>(t)]) = w(i, order[static_cast<std::size_t>(t)]);
            }
            pruned(i, i) = 1.0;
        }
        w = pruned.cwiseMax(pruned.transpose());
    } else if (sparsity.mode == Sparsity::Mode::threshold) {
        w = (w.array() >= sparsity.threshold).select(w, 0.0);
        w.diagonal().setOnes();
    }

    SimilarityGraph graph = SimilarityGraph::from_adjacency(std::move(w));
    graph.sigma = sigma;
    graph.sparsity = sparsity;
    return graph;
}

SimilarityGraph build_adjacency(const ExpressionMatrix& g, double sigma, Sparsity sparsity) {
    return build_adjacency(g.values(), sigma, sparsity);
}

Matrix graph_laplacian(const SimilarityGraph& graph, LaplacianKind kind) {
    const Eigen::Index n = graph.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(graph.degrees(i) > 0.0)) {
            throw DomainError("vertex " + std::to_string(i) + " has zero degree");
        }
    }
    switch (kind) {
    case LaplacianKind::unnormalized: {
        Matrix l = -graph.adjacency;
        l.diagonal() += graph.degrees;
        return l;
    }
    case LaplacianKind::symmetric: {
        const Vector s = graph.degrees.cwiseSqrt().cwiseInverse();
        Matrix l = -(s.asDiagonal() * graph.adjacency * s.asDiagonal());
        l.diagonal().array() += 1.0;
        return l;
    }
    case LaplacianKind::random_walk: {
        Matrix l = -(graph.degrees.cwiseInverse().asDiagonal() * graph.adjacency);
        l.diagonal().array() += 1.0;
        return l;
    }
    }
    throw ParameterError("unknown Laplacian kind");
}

namespace {

void fix_signs(Matrix& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        Eigen::Index arg = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, j) < 0) {
            vectors.col(j) = -vectors.col(j);
        }
        vectors.col(j).normalize();
    }
}

SpectralEmbedding dense_smallest(const Matrix& l, int k) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(l);
    if (solver.info() != Eigen::Success) {
        throw NumericError("dense symmetric eigensolver failed on a " + std::to_string(l.rows()) + "x" +
                           std::to_string(l.cols()) + " Laplacian");
    }
    SpectralEmbedding out;
    out.vectors = solver.eigenvectors().leftCols(k);
    out.eigenvalues = solver.eigenvalues().head(k);
    return out;
}

// Lanczos with full reorthogonalization. The Krylov dimension doubles until
// every requested Ritz pair has a small residual.
SpectralEmbedding lanczos_smallest(const Matrix& l, int k) {
    const Eigen::Index n = l.rows();
    const double scale = std::max(1.0, l.cwiseAbs().rowwise().sum().maxCoeff());
    const double tolerance = 1e-9 * scale;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_unit = [&](const Matrix& basis, Eigen::Index used) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v(i) = unif(rng);
        }
        for (int pass = 0; pass < 2; ++pass) {
            v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
        }
        return Vector(v.normalized());
    };

    Eigen::Index m = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * k + 40, 80));
    double worst = 0.0;
    while (true) {
        Matrix basis(n, m);
        Vector alpha = Vector::Zero(m);
        Vector beta = Vector::Zero(m);
        basis.col(0) = random_unit(basis, 0);
        for (Eigen::Index j = 0; j < m; ++j) {
            Vector w = l * basis.col(j);
            alpha(j) = basis.col(j).dot(w);
            for (int pass = 0; pass < 2; ++pass) {
                w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            }
            if (j + 1 == m) {
                break;
            }
            const double b = w.norm();
            if (b < 1e-12 * scale) {
                // Invariant subspace found; continue from a fresh direction.
                beta(j) = 0.0;
                basis.col(j + 1) = random_unit(basis, j + 1);
            } else {
                beta(j) = b;
                basis.col(j + 1) = w / b;
            }
        }

        Matrix t = Matrix::Zero(m, m);
        t.diagonal() = alpha;
        for (Eigen::Index j = 0; j + 1 < m; ++j) {
            t(j, j + 1) = beta(j);
            t(j + 1, j) = beta(j);
        }
        Eigen::SelfAdjointEigenSolver<Matrix> small(t);
        if (small.info() != Eigen::Success) {
            throw NumericError("Lanczos tridiagonal eigensolver failed at Krylov dimension " + std::to_string(m));
        }
        SpectralEmbedding out;
        out.vectors = basis * small.eigenvectors().leftCols(k);
        out.eigenvalues = small.eigenvalues().head(k);
        worst = 0.0;
        for (int c = 0; c < k; ++c) {
            const double r = (l * out.vectors.col(c) - out.eigenvalues(c) * out.vectors.col(c)).norm();
            worst = std::max(worst, r);
        }
        if (worst <= tolerance || m == n) {
            if (worst > tolerance * 1e3) {
                break;
            }
            return out;
        }
        m = std::min(n, 2 * m);
    }
    throw NumericError("Lanczos did not converge: worst Ritz residual " + std::to_string(worst));
}

}  // namespace

SpectralEmbedding spectral_embed(const Matrix& laplacian, int k, EigenMethod method) {
    const Eigen::Index n = laplacian.rows();
    if (laplacian.cols() != n) {
        throw ParameterError("Laplacian must be square");
    }
    if (k < 2 || k > n) {
        throw ParameterError("spectral_embed needs 2 <= k <= N (k=" + std::to_string(k) +
                             ", N=" + std::to_string(n) + ")");
    }
    const double asym = (laplacian - laplacian.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, laplacian.cwiseAbs().maxCoeff())) {
        throw ParameterError("spectral_embed needs a symmetric Laplacian; use the symmetric variant");
    }
    if (method == EigenMethod::automatic) {
        method = n <= kDenseEigenLimit ? EigenMethod::dense : EigenMethod::lanczos;
    }
    SpectralEmbedding out = method == EigenMethod::dense ? dense_smallest(laplacian, k) : lanczos_smallest(laplacian, k);
    if (!out.vectors.allFinite()) {
        throw NumericError("eigensolver produced non-finite eigenvectors");
    }
    fix_signs(out.vectors);
    return out;
}

namespace {

struct KMeansRun {
    std::vector<int> labels;  // 0-based
    double inertia = std::numeric_limits<double>::infinity();
};

std::size_t distinct_rows(const Matrix& x) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            if (x(a, c) != x(b, c)) {
                return x(a, c) < x(b, c);
            }
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t count = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (less(order[i - 1], order[i])) {
            ++count;
        }
    }
    return count;
}

KMeansRun kmeans_once(const Matrix& x, int k, std::uint64_t seed, int restart, const KMeansOptions& opt) {
    const Eigen::Index n = x.rows();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // k-means++ seeding
    Matrix centers(k, x.cols());
    Vector closest(n);
    const auto first = static_cast<Eigen::Index>(unif(rng) * static_cast<double>(n)) % n;
    centers.row(0) = x.row(first);
    for (Eigen::Index i = 0; i < n; ++i) {
        closest(i) = (x.row(i) - centers.row(0)).squaredNorm();
    }
    for (int c = 1; c < k; ++c) {
        const double total = closest.sum();
        Eigen::Index pick = n - 1;
        if (total > 0) {
            const double target = unif(rng) * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += closest(i);
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(unif(rng) * static_cast<double>(n)) % n;
        }
        centers.row(c) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            closest(i) = std::min(closest(i), (x.row(i) - centers.row(c)).squaredNorm());
        }
    }

    KMeansRun run;
    run.labels.assign(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (x.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            run.labels[static_cast<std::size_t>(i)] = best;
            inertia += best_d;
        }
        run.inertia = inertia;

        Matrix sums = Matrix::Zero(k, x.cols());
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = run.labels[static_cast<std::size_t>(i)];
            sums.row(c) += x.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        double movement = 0.0;
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) {
                continue;  // empty clusters keep their centroid
            }
            const Eigen::RowVectorXd updated = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            movement += (updated - centers.row(c)).norm();
            centers.row(c) = updated;
        }
        if (movement <= opt.tolerance) {
            break;
        }
    }
    // Final assignment against the settled centroids.
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const double d = (x.row(i) - centers.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        run.labels[static_cast<std::size_t>(i)] = best;
        inertia += best_d;
    }
    run.inertia = inertia;
    return run;
}

}  // namespace

ClusterAssignment cluster_rows(const Matrix& embedding, int k, std::uint64_t seed, const KMeansOptions& options) {
    const Eigen::Index n = embedding.rows();
    if (k < 2 || k > n) {
        throw ParameterError("cluster_rows needs 2 <= k <= N");
    }
    if (embedding.cols() < 2) {
        throw ParameterError("cluster_rows needs an embedding with at least two columns");
    }
    if (!embedding.allFinite()) {
        throw DomainError("embedding contains non-finite values");
    }
    if (options.restarts < 1 || options.max_iterations < 1 || options.workers < 1) {
        throw ParameterError("k-means restarts, iterations and workers must be positive");
    }

    ClusterAssignment out;
    double mean0 = embedding.col(0).mean();
    double var0 = (embedding.col(0).array() - mean0).square().sum() / static_cast<double>(n);
    if (var0 > 1e-8) {
        out.features.push_back(0);
    }
    for (Eigen::Index c = 1; c < embedding.cols(); ++c) {
        out.features.push_back(c);
    }
    Matrix x(n, static_cast<Eigen::Index>(out.features.size()));
    for (std::size_t c = 0; c < out.features.size(); ++c) {
        x.col(static_cast<Eigen::Index>(c)) = embedding.col(out.features[c]);
    }
    if (distinct_rows(x) < static_cast<std::size_t>(k)) {
        throw ClusteringError("degenerate embedding: fewer than k distinct points; try a different sigma or k");
    }

    std::vector<KMeansRun> runs(static_cast<std::size_t>(options.restarts));
    auto work = [&](int worker) {
        for (int r = worker; r < options.restarts; r += options.workers) {
            runs[static_cast<std::size_t>(r)] = kmeans_once(x, k, seed, r, options);
        }
    };
    if (options.workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < options.workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].inertia < runs[best].inertia) {
            best = r;
        }
    }
    const KMeansRun& chosen = runs[best];

    // Renumber clusters by their smallest member.
    std::vector<int> rename(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& slot = rename[static_cast<std::size_t>(chosen.labels[static_cast<std::size_t>(i)])];
        if (slot < 0) {
            slot = next++;
        }
    }
    if (next < k) {
        throw ClusteringError("k-means left " + std::to_string(k - next) +
                              " cluster(s) empty; try a different sigma or k");
    }
    out.labels.resize(static_cast<std::size_t>(n));
    out.groups.assign(static_cast<std::size_t>(k), {});
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = rename[static_cast<std::size_t>(chosen.labels[static_cast<std::size_t>(i)])];
        out.labels[static_cast<std::size_t>(i)] = c + 1;
        out.groups[static_cast<std::size_t>(c)].push_back(static_cast<std::size_t>(i));
    }
    out.embedding = embedding;
    out.inertia = chosen.inertia;
    return out;
}

double silhouette(const Matrix& points, const std::vector<int>& labels) {
    const Eigen::Index n = points.rows();
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw ParameterError("silhouette: label count does not match point count");
    }
    const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
    std::vector<double> sizes(static_cast<std::size_t>(k) + 1, 0.0);
    for (int l : labels) {
        if (l < 1) {
            throw ParameterError("silhouette: labels must be 1..k");
        }
        sizes[static_cast<std::size_t>(l)] += 1.0;
    }
    double total = 0.0;
    std::vector<double> sum(static_cast<std::size_t>(k) + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::fill(sum.begin(), sum.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) {
                sum[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += (points.row(i) - points.row(j)).norm();
            }
        }
        const int own = labels[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(own)] <= 1.0) {
            continue;  // singleton contributes zero
        }
        const double a = sum[static_cast<std::size_t>(own)] / (sizes[static_cast<std::size_t>(own)] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 1; c <= k; ++c) {
            if (c != own && sizes[static_cast<std::size_t>(c)] > 0) {
                b = std::min(b, sum[static_cast<std::size_t>(c)] / sizes[static_cast<std::size_t>(c)]);
            }
        }
        if (std::isfinite(b) && std::max(a, b) > 0) {
            total += (b - a) / std::max(a, b);
        }
    }
    return n > 0 ? total / static_cast<double>(n) : 0.0;
}

MarkerStrategy parse_marker_strategy(const std::string& text) {
    if (text == "medoid") {
        return MarkerStrategy::medoid;
    }
    if (text == "centroid") {
        return MarkerStrategy::centroid;
    }
    if (text == "max-mean-correlation") {
        return MarkerStrategy::max_mean_correlation;
    }
    throw ParameterError("unknown marker strategy '" + text + "' (medoid | centroid | max-mean-correlation)");
}

std::string to_string(MarkerStrategy strategy) {
    switch (strategy) {
    case MarkerStrategy::medoid:
        return "medoid";
    case MarkerStrategy::centroid:
        return "centroid";
    case MarkerStrategy::max_mean_correlation:
        return "max-mean-correlation";
    }
    return "unknown";
}

MarkerAssignment MarkerAssignment::from_types(std::vector<int> type_of, int k) {
    if (k < 1) {
        throw ParameterError("marker assignment needs k >= 1");
    }
    MarkerAssignment out;
    out.k = k;
    out.marker_sets.assign(static_cast<std::size_t>(k), {});
    out.chi.assign(type_of.size(), 0);
    out.indicator = Matrix::Zero(static_cast<Eigen::Index>(type_of.size()), k);
    for (std::size_t i = 0; i < type_of.size(); ++i) {
        const int t = type_of[i];
        if (t < 0 || t > k) {
            throw ParameterError("marker type " + std::to_string(t) + " outside 0.." + std::to_string(k));
        }
        if (t > 0) {
            out.marker_sets[static_cast<std::size_t>(t - 1)].push_back(i);
            out.chi[i] = 1;
            out.indicator(static_cast<Eigen::Index>(i), t - 1) = 1.0;
        }
    }
    out.type_of = std::move(type_of);
    return out;
}

namespace {

std::vector<double> mean_member_correlation(const Matrix& g, const std::vector<std::size_t>& members) {
    Matrix rows(static_cast<Eigen::Index>(members.size()), g.cols());
    for (std::size_t m = 0; m < members.size(); ++m) {
        rows.row(static_cast<Eigen::Index>(m)) = g.row(static_cast<Eigen::Index>(members[m]));
    }
    const Matrix cos = row_cosine_matrix(rows);
    std::vector<double> out(members.size(), 0.0);
    if (members.size() < 2) {
        return out;
    }
    for (std::size_t m = 0; m < members.size(); ++m) {
        const auto mi = static_cast<Eigen::Index>(m);
        out[m] = (cos.row(mi).sum() - cos(mi, mi)) / static_cast<double>(members.size() - 1);
    }
    return out;
}

// Returns the positions (into `members`) ordered by ascending score, ties by position.
std::vector<std::size_t> rank_ascending(const std::vector<double>& score) {
    std::vector<std::size_t> order(score.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
    return order;
}

}  // namespace

MarkerAssignment select_markers(const Matrix& g, const ClusterAssignment& clusters, std::size_t per_cluster,
                                MarkerStrategy strategy) {
    const int k = clusters.k();
    if (static_cast<Eigen::Index>(clusters.labels.size()) != g.rows()) {
        throw ParameterError("cluster labels do not match the number of genes");
    }
    std::size_t smallest = std::numeric_limits<std::size_t>::max();
    for (const auto& grp : clusters.groups) {
        smallest = std::min(smallest, grp.size());
    }
    if (per_cluster < 1 || per_cluster > smallest) {
        std::ostringstream msg;
        msg << "markers per cluster must be in [1, " << smallest << "]; cluster sizes:";
        for (const auto& grp : clusters.groups) {
            msg << ' ' << grp.size();
        }
        throw ParameterError(msg.str());
    }

    const Matrix& emb = clusters.embedding;
    std::vector<int> type_of(static_cast<std::size_t>(g.rows()), 0);
    for (int r = 0; r < k; ++r) {
        const auto& members = clusters.groups[static_cast<std::size_t>(r)];
        std::vector<double> score(members.size(), 0.0);

        if (strategy == MarkerStrategy::max_mean_correlation) {
            const auto corr = mean_member_correlation(g, members);
            for (std::size_t m = 0; m < members.size(); ++m) {
                score[m] = -corr[m];
            }
        } else {
            Eigen::RowVectorXd anchor;
            if (strategy == MarkerStrategy::centroid) {
                anchor = Eigen::RowVectorXd::Zero(emb.cols());
                for (auto i : members) {
                    anchor += emb.row(static_cast<Eigen::Index>(i));
                }
                anchor /= static_cast<double>(members.size());
            } else {
                const auto corr = mean_member_correlation(g, members);
                std::vector<double> neg(corr.size());
                std::transform(corr.begin(), corr.end(), neg.begin(), [](double v) { return -v; });
                const auto order = rank_ascending(neg);
                const auto top = std::max<std::size_t>(
                    1, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(members.size()))));
                std::size_t medoid = order[0];
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t a = 0; a < top; ++a) {
                    double total = 0.0;
                    const auto ia = static_cast<Eigen::Index>(members[order[a]]);
                    for (std::size_t b = 0; b < top; ++b) {
                        total += (emb.row(ia) - emb.row(static_cast<Eigen::Index>(members[order[b]]))).norm();
                    }
                    if (total < best) {
                        best = total;
                        medoid = order[a];
                    }
                }
                anchor = emb.row(static_cast<Eigen::Index>(members[medoid]));
            }
            for (std::size_t m = 0; m < members.size(); ++m) {
                score[m] = (emb.row(static_cast<Eigen::Index>(members[m])) - anchor).norm();
            }
        }

        const auto order = rank_ascending(score);
        for (std::size_t t = 0; t < per_cluster; ++t) {
            type_of[members[order[t]]] = r + 1;
        }
    }
    return MarkerAssignment::from_types(std::move(type_of), k);
}

MarkerAssignment select_markers(const ExpressionMatrix& g, const ClusterAssignment& clusters,
                                std::size_t per_cluster, MarkerStrategy strategy) {
    return select_markers(g.values(), clusters, per_cluster, strategy);
}

}  // namespace gsnmf
