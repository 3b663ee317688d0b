#include "gsnmf/admm.hpp"

#include "gsnmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace gsnmf {

SolverConfig SolverConfig::from_lambda_tilde(double lambda_tilde, double rho, double gamma) {
    SolverConfig cfg;
    cfg.rho = rho;
    cfg.gamma = gamma;
    cfg.penalty.lambda1 = lambda_tilde * rho;
    cfg.penalty.lambda2 = lambda_tilde * rho;
    return cfg;
}

void SolverConfig::validate() const {
    if (!(rho > 0.0) || !(gamma > 0.0)) {
        throw ParameterError("rho and gamma must be positive");
    }
    penalty.validate();
    if (!(tol_outer > 0.0) || !(inner.tolerance > 0.0)) {
        throw ParameterError("solver tolerances must be positive");
    }
    if (max_outer < 1 || inner.max_steps < 1 || inner.max_halvings < 1) {
        throw ParameterError("iteration caps must be at least 1");
    }
    if (!(inner.armijo > 0.0 && inner.armijo < 1.0) || !(inner.shrink > 0.0 && inner.shrink < 1.0)) {
        throw ParameterError("Armijo constant and step shrink must lie in (0, 1)");
    }
}

FactorPair Solution::factors() const {
    return FactorPair(SignatureMatrix(c), ProportionMatrix(p, 1e-9));
}

namespace {

double qp_objective(const Matrix& h, const Vector& b, const Vector& x) {
    return 0.5 * x.dot(h * x) - b.dot(x);
}

// Solves the subproblem with the given free set; clamped coordinates are zero.
Vector solve_free(const Matrix& h, const Vector& b, const std::vector<bool>& free) {
    const auto k = h.rows();
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < k; ++j) {
        if (free[static_cast<std::size_t>(j)]) {
            idx.push_back(j);
        }
    }
    Vector x = Vector::Zero(k);
    if (idx.empty()) {
        return x;
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix hf(m, m);
    Vector bf(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        bf(r) = b(idx[static_cast<std::size_t>(r)]);
        for (Eigen::Index s = 0; s < m; ++s) {
            hf(r, s) = h(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(s)]);
        }
    }
    Eigen::LLT<Matrix> llt(hf);
    if (llt.info() != Eigen::Success) {
        throw NumericError("active-set subproblem is not positive definite");
    }
    const Vector xf = llt.solve(bf);
    for (Eigen::Index r = 0; r < m; ++r) {
        x(idx[static_cast<std::size_t>(r)]) = xf(r);
    }
    return x;
}

Vector enumerate_active_sets(const Matrix& h, const Vector& b) {
    const auto k = h.rows();
    if (k > 12) {
        throw NumericError("active-set iteration did not terminate and k > 12 is too large to enumerate");
    }
    Vector best = Vector::Zero(k);
    double best_value = 0.0;
    std::vector<bool> free(static_cast<std::size_t>(k));
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        for (Eigen::Index j = 0; j < k; ++j) {
            free[static_cast<std::size_t>(j)] = (mask >> j) & 1u;
        }
        const Vector x = solve_free(h, b, free);
        if ((x.array() < 0).any()) {
            continue;
        }
        const double value = qp_objective(h, b, x);
        if (value < best_value) {
            best_value = value;
            best = x;
        }
    }
    return best;
}

}  // namespace

Vector nonnegative_qp(const Matrix& h, const Vector& b) {
    const auto k = h.rows();
    const double scale = std::max({1.0, h.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    const double tol = 1e-13 * scale;
    std::vector<bool> free(static_cast<std::size_t>(k), true);
    const int cap = 3 * static_cast<int>(k) + 10;
    for (int iter = 0; iter < cap; ++iter) {
        Vector x = solve_free(h, b, free);
        bool clamped = false;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (free[static_cast<std::size_t>(j)] && x(j) < 0) {
                free[static_cast<std::size_t>(j)] = false;
                clamped = true;
            }
        }
        if (clamped) {
            continue;
        }
        // KKT: the gradient on clamped coordinates must be nonnegative.
        const Vector grad = h * x - b;
        Eigen::Index worst = -1;
        double worst_value = -tol;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (!free[static_cast<std::size_t>(j)] && grad(j) < worst_value) {
                worst_value = grad(j);
                worst = j;
            }
        }
        if (worst < 0) {
            return x;
        }
        free[static_cast<std::size_t>(worst)] = true;
    }
    return enumerate_active_sets(h, b);
}

Matrix update_c(const Matrix& g, const Matrix& p, const Matrix& a, const Matrix& a_dual, double rho) {
    if (p.cols() != g.cols() || a.rows() != g.rows() || a.cols() != p.rows() || a_dual.rows() != a.rows() ||
        a_dual.cols() != a.cols()) {
        throw ParameterError("update_c: incompatible dimensions");
    }
    Matrix h = p * p.transpose();
    h.diagonal().array() += rho;
    const Matrix rhs = g * p.transpose() + rho * (a - a_dual);
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success) {
        throw NumericError("update_c: P P^T + rho I is not positive definite");
    }
    Matrix c = llt.solve(rhs.transpose()).transpose();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        if ((c.row(i).array() < 0).any()) {
            c.row(i) = nonnegative_qp(h, rhs.row(i).transpose()).transpose();
        }
    }
    return c;
}

Vector project_simplex(const Vector& v) {
    const auto k = v.size();
    if (k == 0) {
        throw ParameterError("project_simplex: empty vector");
    }
    if (!v.allFinite()) {
        throw DomainError("project_simplex: non-finite input");
    }
    std::vector<double> u(v.data(), v.data() + k);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        cumulative += u[static_cast<std::size_t>(j)];
        const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - t > 0) {
            theta = t;
        }
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

Matrix update_p(const Matrix& g, const Matrix& c, const Matrix& q, const Matrix& q_dual, double gamma) {
    if (c.rows() != g.rows() || q.rows() != c.cols() || q.cols() != g.cols() || q_dual.rows() != q.rows() ||
        q_dual.cols() != q.cols()) {
        throw ParameterError("update_p: incompatible dimensions");
    }
    Matrix h = c.transpose() * c;
    h.diagonal().array() += gamma;
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success) {
        throw NumericError("update_p: C^T C + gamma I is not positive definite");
    }
    Matrix p = llt.solve(c.transpose() * g + gamma * (q - q_dual));
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        p.col(j) = project_simplex(p.col(j));
    }
    return p;
}

InnerResult update_a(const Matrix& c, const Matrix& a_dual, const PenaltyWeights& weights,
                     const MarkerAssignment& markers, const SolverConfig& cfg) {
    const PenaltyConfig& pen = cfg.penalty;
    const double rho = cfg.rho;
    const Matrix v = c + a_dual;
    InnerResult out;
    out.a = v;
    if (pen.lambda1 == 0.0 && pen.lambda2 == 0.0) {
        out.objective.push_back(0.0);
        return out;
    }

    // Frozen mode: W1..W4 stay at C, the gradient is linear in A and the Armijo
    // test runs on the matching quadratic. Otherwise the weights follow A.
    const InnerOptions& opt = cfg.inner;
    const bool frozen = opt.weights == InnerWeights::frozen;
    const Vector s = weights.w3_row_sums.cwiseProduct(weights.inv_sq_norms);
    const Vector d1 = pen.lambda1 * weights.w1.cwiseProduct(weights.w2) + 2.0 * pen.lambda2 * s;
    auto objective = [&](const Matrix& a) {
        const double fit = 0.5 * rho * (a - v).squaredNorm();
        if (frozen) {
            return surrogate_value(a, weights, markers, pen) + fit;
        }
        return f1_value(a, markers, pen) + f2_value(a, weights.omega, pen) + fit;
    };
    auto gradient = [&](const Matrix& a) -> Matrix {
        if (frozen) {
            return surrogate_gradient(a, weights, markers, pen) + rho * (a - v);
        }
        const PenaltyWeights local = build_penalty_weights(a, markers, weights.omega, pen);
        return surrogate_gradient(a, local, markers, pen) + rho * (a - v);
    };

    Matrix& a = out.a;
    Matrix grad = gradient(a);
    double f = objective(a);
    out.objective.push_back(f);
    for (int step = 0; step < opt.max_steps; ++step) {
        const double gnorm2 = grad.squaredNorm();
        const double anorm = a.norm();
        out.gradient_ratio = std::sqrt(gnorm2) / (anorm > 0 ? anorm : 1.0);
        if (out.gradient_ratio <= opt.tolerance) {
            return out;
        }
        double t = 1.0 / rho;
        bool accepted = false;
        double trial_f = f;
        for (int halving = 0; halving <= opt.max_halvings; ++halving) {
            trial_f = objective(a - t * grad);
            if (trial_f <= f - opt.armijo * t * gnorm2) {
                accepted = true;
                break;
            }
            t *= opt.shrink;
        }
        if (!accepted) {
            out.line_search_failed = true;
            return out;
        }
        f = trial_f;
        if (frozen) {
            const Matrix hg = d1.asDiagonal() * grad - 2.0 * pen.lambda2 * (weights.w4 * grad) + rho * grad;
            a -= t * grad;
            grad -= t * hg;
        } else {
            a -= t * grad;
            grad = gradient(a);
        }
        out.objective.push_back(f);
        ++out.steps;
    }
    const double anorm = a.norm();
    out.gradient_ratio = grad.norm() / (anorm > 0 ? anorm : 1.0);
    return out;
}

Matrix update_q(const Matrix& p, const Matrix& q_dual) {
    if (p.rows() != q_dual.rows() || p.cols() != q_dual.cols()) {
        throw ParameterError("update_q: incompatible dimensions");
    }
    return (p + q_dual).cwiseMax(0.0);
}

SolverState initial_state(const Matrix& g, int k, std::uint64_t seed) {
    if (k < 1) {
        throw ParameterError("initial_state: k must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SolverState st;
    st.c.resize(g.rows(), k);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            st.c(i, j) = unif(rng);
        }
    }
    st.p.resize(k, g.cols());
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index r = 0; r < k; ++r) {
            st.p(r, j) = unif(rng);
        }
    }
    st.p = l1_normalize_columns(st.p);
    const double fit = (st.c * st.p).norm();
    if (fit > 0) {
        st.c *= g.norm() / fit;
    }
    st.a = st.c;
    st.q = st.p;
    st.a_dual = Matrix::Zero(g.rows(), k);
    st.q_dual = Matrix::Zero(k, g.cols());
    return st;
}

namespace {

double relative_change(const Matrix& next, const Matrix& prev) {
    const double base = prev.norm();
    const double diff = (next - prev).norm();
    return base > 0 ? diff / base : diff;
}

}  // namespace

Solution solve(const Matrix& g, const MarkerAssignment& markers, const SparseMatrix& omega, const SolverConfig& cfg) {
    cfg.validate();
    if (static_cast<Eigen::Index>(markers.n_rows()) != g.rows()) {
        throw ParameterError("markers cover " + std::to_string(markers.n_rows()) + " genes but G has " +
                             std::to_string(g.rows()));
    }
    if (omega.rows() != g.rows() || omega.cols() != g.rows()) {
        throw ParameterError("graph size does not match the number of genes");
    }
    const double gnorm = g.norm();
    if (gnorm == 0.0) {
        throw DomainError("expression matrix is identically zero");
    }

    SolverState st = initial_state(g, markers.k, cfg.seed);
    Solution out;
    for (int it = 1; it <= cfg.max_outer; ++it) {
        const Matrix c = update_c(g, st.p, st.a, st.a_dual, cfg.rho);
        const Matrix p = update_p(g, c, st.q, st.q_dual, cfg.gamma);
        const PenaltyWeights weights = build_penalty_weights(c, markers, omega, cfg.penalty);
        InnerResult inner = update_a(c, st.a_dual, weights, markers, cfg);
        const Matrix q = update_q(p, st.q_dual);

        if (cfg.literal_dual_update) {
            st.a_dual += st.c - st.a;
            st.q_dual += st.p - st.q;
        } else {
            st.a_dual += c - inner.a;
            st.q_dual += p - q;
        }

        IterationRecord rec;
        rec.iteration = it;
        rec.delta_c = relative_change(c, st.c);
        rec.delta_p = relative_change(p, st.p);
        rec.residue = (g - c * p).norm() / gnorm;
        rec.f1 = f1_value(c, markers, cfg.penalty);
        rec.f2 = f2_value(weights, omega, cfg.penalty);
        rec.primal_c = (c - inner.a).norm();
        rec.primal_p = (p - q).norm();
        rec.inner_steps = inner.steps;
        rec.line_search_failed = inner.line_search_failed;

        if (!c.allFinite() || !p.allFinite() || !inner.a.allFinite() || !q.allFinite() || !st.a_dual.allFinite() ||
            !st.q_dual.allFinite()) {
            const double last = st.history.empty() ? std::numeric_limits<double>::quiet_NaN() : st.history.back().residue;
            throw NumericError("non-finite iterate at outer iteration " + std::to_string(it) +
                               " (last finite residue " + std::to_string(last) + ")");
        }

        st.c = c;
        st.p = p;
        st.a = std::move(inner.a);
        st.q = q;
        st.iteration = it;
        if (rec.line_search_failed) {
            ++out.line_search_warnings;
        }
        st.history.push_back(rec);
        if (rec.delta_c <= cfg.tol_outer && rec.delta_p <= cfg.tol_outer) {
            out.converged = true;
            break;
        }
    }

    out.c = std::move(st.c);
    out.p = std::move(st.p);
    out.iterations = st.iteration;
    out.final_residue = st.history.empty() ? 0.0 : st.history.back().residue;
    out.history = std::move(st.history);
    return out;
}

Solution solve(const ExpressionMatrix& g, const MarkerAssignment& markers, const SimilarityGraph& graph,
               const SolverConfig& cfg) {
    if (graph.size() != g.n_genes()) {
        throw ParameterError("graph has " + std::to_string(graph.size()) + " vertices but G has " +
                             std::to_string(g.n_genes()) + " genes");
    }
    return solve(g.values(), markers, penalty_graph(graph), cfg);
}

}  // namespace gsnmf
