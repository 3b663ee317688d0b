#ifndef GSNMF_ADMM_HPP
#define GSNMF_ADMM_HPP

#include "gsnmf/graph.hpp"
#include "gsnmf/matrix.hpp"
#include "gsnmf/penalties.hpp"

#include <cstdint>
#include <vector>

/**
 * @file admm.hpp
 *
 * @brief Scaled ADMM for min 1/2 |G - CP|^2 + F1(C) + F2(C) with C >= 0 and
 * column-stochastic P. The splitting C = A carries the penalties, P = Q the
 * nonnegativity of the proportions.
 */

namespace gsnmf {

enum class InnerWeights {
    refreshed,  ///< W1..W4 rebuilt at every inner iterate (exact gradient of f)
    frozen      ///< W1..W4 kept at the outer C; descent on the frozen quadratic
};

struct InnerOptions {
    double tolerance = 1e-6;  ///< stop when |grad f|_F / |A|_F falls below this
    int max_steps = 50;
    double armijo = 1e-4;
    double shrink = 0.5;
    int max_halvings = 60;
    InnerWeights weights = InnerWeights::refreshed;
};

struct SolverConfig {
    double rho = 1600.0;
    double gamma = 15000.0;
    PenaltyConfig penalty;
    double tol_outer = 1e-5;
    int max_outer = 2000;
    InnerOptions inner;
    std::uint64_t seed = 0;
    /// Update the duals with the previous iterates instead of the new ones.
    bool literal_dual_update = false;

    /// lambda1 = lambda2 = lambda_tilde * rho.
    static SolverConfig from_lambda_tilde(double lambda_tilde, double rho = 1600.0, double gamma = 15000.0);

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;  ///< 1-based
    double residue = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double primal_c = 0.0;  ///< |C - A|_F
    double primal_p = 0.0;  ///< |P - Q|_F
    double delta_c = 0.0;   ///< |C_new - C_old|_F / |C_old|_F
    double delta_p = 0.0;
    int inner_steps = 0;
    bool line_search_failed = false;
};

struct SolverState {
    Matrix c, a, a_dual;  ///< N x k
    Matrix p, q, q_dual;  ///< k x n
    int iteration = 0;
    std::vector<IterationRecord> history;
};

struct Solution {
    Matrix c;
    Matrix p;
    bool converged = false;
    int iterations = 0;
    double final_residue = 0.0;
    int line_search_warnings = 0;
    std::vector<IterationRecord> history;

    FactorPair factors() const;
};

/**
 * Minimizes 1/2 x^T H x - b^T x subject to x >= 0 for symmetric positive
 * definite H by the clamp/release active-set iteration. Falls back to
 * enumerating active sets if the iteration cycles (k <= 12).
 */
Vector nonnegative_qp(const Matrix& h, const Vector& b);

/// Row-wise argmin |G_i - c P|^2 + rho |c - (A - Atilde)_i|^2 subject to c >= 0.
Matrix update_c(const Matrix& g, const Matrix& p, const Matrix& a, const Matrix& a_dual, double rho);

/// Euclidean projection onto {x >= 0, sum x = 1}.
Vector project_simplex(const Vector& v);

/// Columns of (C^T C + gamma I)^-1 [C^T G + gamma (Q - Qtilde)] projected onto the simplex.
Matrix update_p(const Matrix& g, const Matrix& c, const Matrix& q, const Matrix& q_dual, double gamma);

struct InnerResult {
    Matrix a;
    int steps = 0;
    bool line_search_failed = false;
    double gradient_ratio = 0.0;     ///< final |grad f| / |A|
    std::vector<double> objective;   ///< f at the start and after every accepted step
};

/**
 * Gradient descent on f(A) = F1(A) + F2(A) + rho/2 |C - A + Atilde|^2 from
 * C + Atilde with Armijo backtracking. `weights` must be built from C; in
 * InnerWeights::frozen mode they are used for every step, otherwise only
 * their graph is reused and the gradient is exact at each iterate.
 */
InnerResult update_a(const Matrix& c, const Matrix& a_dual, const PenaltyWeights& weights,
                     const MarkerAssignment& markers, const SolverConfig& cfg);

/// max(P + Qtilde, 0)
Matrix update_q(const Matrix& p, const Matrix& q_dual);

/// Random start: C0 ~ U(0,1) scaled so |C0 P0| = |G|, P0 ~ U(0,1) with unit column sums.
SolverState initial_state(const Matrix& g, int k, std::uint64_t seed);

Solution solve(const ExpressionMatrix& g, const MarkerAssignment& markers, const SimilarityGraph& graph,
               const SolverConfig& cfg);
Solution solve(const Matrix& g, const MarkerAssignment& markers, const SparseMatrix& omega, const SolverConfig& cfg);

}  // namespace gsnmf

#endif
