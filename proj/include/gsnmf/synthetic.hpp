#ifndef GSNMF_SYNTHETIC_HPP
#define GSNMF_SYNTHETIC_HPP

#include "gsnmf/admm.hpp"
#include "gsnmf/graph.hpp"
#include "gsnmf/matrix.hpp"

#include <cstdint>
#include <optional>
#include <vector>

/**
 * @file synthetic.hpp
 *
 * @brief Ground-truthed synthetic mixtures, alignment of computed factors to
 * the truth, and the identifiability and scattering diagnostics.
 */

namespace gsnmf {

struct SyntheticSpec {
    Eigen::Index n_genes = 0;
    Eigen::Index n_samples = 0;
    int n_types = 0;
    /// N_1..N_k marker rows per type, then the non-marker count. Sums to n_genes.
    std::vector<Eigen::Index> marker_split;
    double ndr = 0.0;
    double marker_tightness = 0.05;
    std::uint64_t seed = 0;
    bool clip_negative = false;

    void validate() const;
};

struct GroundTruth {
    ExpressionMatrix g;
    SignatureMatrix c_true;
    ProportionMatrix p_true;
    std::vector<int> labels;  ///< generating type 1..k, 0 for non-marker rows
    double achieved_ndr = 0.0;
};

/**
 * Marker row for type l: alpha e_l + |N(0, tau alpha)| off the l-th entry,
 * alpha ~ U(0.5, 2). Other rows are U(0,1). Rows are shuffled, P is uniform
 * with unit column sums and G = CP + eps with |eps| = ndr |CP|.
 */
GroundTruth generate_synthetic(const SyntheticSpec& spec);

enum class AlignMode { automatic, exhaustive, assignment };

struct AlignmentReport {
    std::vector<int> permutation;  ///< true type r is matched with found type permutation[r] (0-based)
    std::vector<double> scales;
    Matrix c_aligned;
    Matrix p_aligned;
    double err_c = 0.0;
    double err_p = 0.0;
    double raw_err_c = 0.0;  ///< permutation only, no scaling
    double raw_err_p = 0.0;
    std::vector<double> corr_c;  ///< per column, aligned vs truth
    std::vector<double> corr_p;  ///< per row, aligned vs truth
};

/// Pearson correlation; zero when either input is constant.
double pearson(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// Maximum-weight perfect matching on a square score matrix. Entry r is the column matched to row r.
std::vector<int> max_weight_assignment(const Matrix& score);

AlignmentReport align_solution(const Matrix& c_found, const Matrix& p_found, const Matrix& c_true,
                               const Matrix& p_true, AlignMode mode = AlignMode::automatic);
AlignmentReport align_solution(const FactorPair& found, const GroundTruth& truth,
                               AlignMode mode = AlignMode::automatic);

struct SolutionMetrics {
    double err_c = 0.0;
    double err_p = 0.0;
    double residue = 0.0;
};

SolutionMetrics solution_errors(const AlignmentReport& report, const Matrix& g);

struct ProbeArm {
    std::vector<double> residues;
    std::vector<double> err_c;           ///< aligned against the truth
    std::vector<double> err_p;
    std::vector<int> iterations;
    bool all_converged = true;
    double max_pairwise_err_c = 0.0;     ///< max over seed pairs of |C_a - C_b| / |C_true| after alignment
};

struct ProbeReport {
    ProbeArm unconstrained;
    ProbeArm constrained;
};

/**
 * Solves from n_seeds initializations (cfg.seed, cfg.seed + 1, ...) once with
 * the penalties switched off and once with cfg as given.
 */
ProbeReport identifiability_probe(const GroundTruth& truth, const MarkerAssignment& markers,
                                  const SparseMatrix& omega, int n_seeds, const SolverConfig& cfg);

struct ScatteringEntry {
    bool has_markers = false;
    double max_cosine = 0.0;
    double mean_cosine = 0.0;
    bool covered = false;
};

/// Cosine of every marker row of C against its vertex e_r.
std::vector<ScatteringEntry> scattering_diagnostic(const Matrix& c, const MarkerAssignment& markers,
                                                   double threshold = 0.95);

}  // namespace gsnmf

#endif
