#include "gsnmf/synthetic.hpp"

#include "gsnmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace gsnmf {

void SyntheticSpec::validate() const {
    if (n_genes < 1 || n_samples < 1) {
        throw ParameterError("synthetic data needs at least one gene and one sample");
    }
    if (n_types < 2) {
        throw ParameterError("synthetic data needs at least two cell types");
    }
    if (marker_split.size() != static_cast<std::size_t>(n_types) + 1) {
        throw ParameterError("marker split must list k marker counts followed by the non-marker count");
    }
    Eigen::Index total = 0;
    for (auto count : marker_split) {
        if (count < 0) {
            throw ParameterError("marker split entries must be nonnegative");
        }
        total += count;
    }
    if (total != n_genes) {
        throw ParameterError("marker split sums to " + std::to_string(total) + ", expected " +
                             std::to_string(n_genes));
    }
    if (!(ndr >= 0.0) || !std::isfinite(ndr)) {
        throw ParameterError("ndr must be a finite nonnegative number");
    }
    if (!(marker_tightness >= 0.0)) {
        throw ParameterError("marker tightness must be nonnegative");
    }
}

GroundTruth generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const Eigen::Index n = spec.n_genes;
    const int k = spec.n_types;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_real_distribution<double> amplitude(0.5, 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    Matrix c(n, k);
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    Eigen::Index row = 0;
    for (int l = 0; l <= k; ++l) {
        for (Eigen::Index t = 0; t < spec.marker_split[static_cast<std::size_t>(l)]; ++t, ++row) {
            if (l < k) {
                const double alpha = amplitude(rng);
                for (int j = 0; j < k; ++j) {
                    c(row, j) = j == l ? alpha : std::abs(normal(rng) * spec.marker_tightness * alpha);
                }
                labels[static_cast<std::size_t>(row)] = l + 1;
            } else {
                for (int j = 0; j < k; ++j) {
                    c(row, j) = unif(rng);
                }
            }
        }
    }

    // Fisher-Yates with an explicit draw so the order only depends on the seed.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    Matrix shuffled(n, k);
    std::vector<int> shuffled_labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        shuffled.row(i) = c.row(order[static_cast<std::size_t>(i)]);
        shuffled_labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    }

    Matrix p(k, spec.n_samples);
    for (Eigen::Index j = 0; j < spec.n_samples; ++j) {
        for (int r = 0; r < k; ++r) {
            p(r, j) = unif(rng);
        }
    }
    p = l1_normalize_columns(p);

    const Matrix clean = shuffled * p;
    Matrix g = clean;
    if (spec.ndr > 0.0) {
        Matrix z(n, spec.n_samples);
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                z(i, j) = normal(rng);
            }
        }
        const double zn = z.norm();
        if (!(zn > 0.0)) {
            throw NumericError("noise draw has zero norm");
        }
        g += z * (spec.ndr * clean.norm() / zn);
    }
    if (spec.clip_negative) {
        g = g.cwiseMax(0.0);
    }
    const double achieved = (g - clean).norm() / clean.norm();
    const auto sign = spec.clip_negative || spec.ndr == 0.0 ? ExpressionMatrix::Sign::nonnegative
                                                            : ExpressionMatrix::Sign::any;
    return GroundTruth{ExpressionMatrix::with_default_ids(std::move(g), sign), SignatureMatrix(std::move(shuffled)),
                       ProportionMatrix(std::move(p), 1e-12), std::move(shuffled_labels), achieved};
}

double pearson(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    if (x.size() != y.size() || x.size() == 0) {
        throw ParameterError("pearson: vectors must have equal nonzero length");
    }
    const Vector xc = x.array() - x.mean();
    const Vector yc = y.array() - y.mean();
    const double denom = xc.norm() * yc.norm();
    return denom > 0 ? xc.dot(yc) / denom : 0.0;
}

std::vector<int> max_weight_assignment(const Matrix& score) {
    const auto n = static_cast<int>(score.rows());
    if (score.cols() != n) {
        throw ParameterError("assignment needs a square score matrix");
    }
    // Hungarian algorithm on cost = -score, potentials u (rows) and v (columns), 1-based.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = -score(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        out[static_cast<std::size_t>(match[j] - 1)] = j - 1;
    }
    return out;
}

namespace {

std::vector<int> exhaustive_assignment(const Matrix& score) {
    const auto n = static_cast<int>(score.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_total = -std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int r = 0; r < n; ++r) {
            total += score(r, perm[static_cast<std::size_t>(r)]);
        }
        if (total > best_total) {
            best_total = total;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

AlignmentReport align_solution(const Matrix& c_found, const Matrix& p_found, const Matrix& c_true,
                               const Matrix& p_true, AlignMode mode) {
    const auto k = c_true.cols();
    if (c_found.rows() != c_true.rows() || c_found.cols() != k || p_found.rows() != k || p_true.rows() != k ||
        p_found.cols() != p_true.cols()) {
        throw ParameterError("align_solution: found and true factors differ in shape");
    }
    if (mode == AlignMode::exhaustive && k > 12) {
        throw ParameterError("exhaustive alignment is limited to k <= 12; use assignment mode");
    }
    Matrix score(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index s = 0; s < k; ++s) {
            score(r, s) = pearson(p_true.row(r).transpose(), p_found.row(s).transpose());
        }
    }
    const bool exhaustive = mode == AlignMode::exhaustive || (mode == AlignMode::automatic && k <= 8);

    AlignmentReport out;
    out.permutation = exhaustive ? exhaustive_assignment(score) : max_weight_assignment(score);
    out.c_aligned.resize(c_true.rows(), k);
    out.p_aligned.resize(k, p_true.cols());
    Matrix c_raw(c_true.rows(), k);
    Matrix p_raw(k, p_true.cols());
    for (Eigen::Index r = 0; r < k; ++r) {
        const int s = out.permutation[static_cast<std::size_t>(r)];
        const auto cf = c_found.col(s);
        const double denom = cf.squaredNorm();
        double scale = denom > 0 ? cf.dot(c_true.col(r)) / denom : 1.0;
        if (!(scale > 0)) {
            scale = 1.0;
        }
        out.scales.push_back(scale);
        c_raw.col(r) = cf;
        p_raw.row(r) = p_found.row(s);
        out.c_aligned.col(r) = scale * cf;
        out.p_aligned.row(r) = p_found.row(s) / scale;
    }
    out.err_c = (out.c_aligned - c_true).norm() / c_true.norm();
    out.err_p = (out.p_aligned - p_true).norm() / p_true.norm();
    out.raw_err_c = (c_raw - c_true).norm() / c_true.norm();
    out.raw_err_p = (p_raw - p_true).norm() / p_true.norm();
    for (Eigen::Index r = 0; r < k; ++r) {
        out.corr_c.push_back(pearson(out.c_aligned.col(r), c_true.col(r)));
        out.corr_p.push_back(pearson(out.p_aligned.row(r).transpose(), p_true.row(r).transpose()));
    }
    return out;
}

AlignmentReport align_solution(const FactorPair& found, const GroundTruth& truth, AlignMode mode) {
    return align_solution(found.c.values(), found.p.values(), truth.c_true.values(), truth.p_true.values(), mode);
}

SolutionMetrics solution_errors(const AlignmentReport& report, const Matrix& g) {
    SolutionMetrics m;
    m.err_c = report.err_c;
    m.err_p = report.err_p;
    m.residue = relative_residue(g, report.c_aligned, report.p_aligned);
    return m;
}

namespace {

ProbeArm run_arm(const GroundTruth& truth, const MarkerAssignment& markers, const SparseMatrix& omega, int n_seeds,
                 SolverConfig cfg) {
    ProbeArm arm;
    std::vector<Matrix> aligned;
    const std::uint64_t base = cfg.seed;
    for (int s = 0; s < n_seeds; ++s) {
        cfg.seed = base + static_cast<std::uint64_t>(s);
        const Solution sol = solve(truth.g.values(), markers, omega, cfg);
        const AlignmentReport rep = align_solution(sol.c, sol.p, truth.c_true.values(), truth.p_true.values());
        arm.residues.push_back(sol.final_residue);
        arm.err_c.push_back(rep.err_c);
        arm.err_p.push_back(rep.err_p);
        arm.iterations.push_back(sol.iterations);
        arm.all_converged = arm.all_converged && sol.converged;
        aligned.push_back(rep.c_aligned);
    }
    const double ref = truth.c_true.values().norm();
    for (std::size_t a = 0; a < aligned.size(); ++a) {
        for (std::size_t b = a + 1; b < aligned.size(); ++b) {
            arm.max_pairwise_err_c = std::max(arm.max_pairwise_err_c, (aligned[a] - aligned[b]).norm() / ref);
        }
    }
    return arm;
}

}  // namespace

ProbeReport identifiability_probe(const GroundTruth& truth, const MarkerAssignment& markers,
                                  const SparseMatrix& omega, int n_seeds, const SolverConfig& cfg) {
    if (n_seeds < 1) {
        throw ParameterError("identifiability probe needs at least one seed");
    }
    SolverConfig free_cfg = cfg;
    free_cfg.penalty.lambda1 = 0.0;
    free_cfg.penalty.lambda2 = 0.0;
    ProbeReport out;
    out.unconstrained = run_arm(truth, markers, omega, n_seeds, free_cfg);
    out.constrained = run_arm(truth, markers, omega, n_seeds, cfg);
    return out;
}

std::vector<ScatteringEntry> scattering_diagnostic(const Matrix& c, const MarkerAssignment& markers,
                                                   double threshold) {
    if (static_cast<Eigen::Index>(markers.n_rows()) != c.rows() || markers.k != c.cols()) {
        throw ParameterError("scattering_diagnostic: markers do not match C");
    }
    std::vector<ScatteringEntry> out(static_cast<std::size_t>(markers.k));
    for (int r = 0; r < markers.k; ++r) {
        auto& entry = out[static_cast<std::size_t>(r)];
        const auto& set = markers.marker_sets[static_cast<std::size_t>(r)];
        if (set.empty()) {
            continue;
        }
        entry.has_markers = true;
        double total = 0.0;
        for (auto i : set) {
            const double norm = c.row(static_cast<Eigen::Index>(i)).norm();
            const double cos = norm < kZeroNormTolerance ? 0.0 : c(static_cast<Eigen::Index>(i), r) / norm;
            entry.max_cosine = std::max(entry.max_cosine, cos);
            total += cos;
        }
        entry.mean_cosine = total / static_cast<double>(set.size());
        entry.covered = entry.max_cosine >= threshold;
    }
    return out;
}

}  // namespace gsnmf
