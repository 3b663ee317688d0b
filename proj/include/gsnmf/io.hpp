#ifndef GSNMF_IO_HPP
#define GSNMF_IO_HPP

#include "gsnmf/admm.hpp"
#include "gsnmf/graph.hpp"
#include "gsnmf/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

/**
 * @file io.hpp
 *
 * @brief Tab-separated matrix files, marker tables, diagnostics in JSON
 * lines, and the row filters applied before deconvolution.
 *
 * Numbers are written with 17 significant digits so every file reads back
 * to the identical double.
 */

namespace gsnmf {

/// A numeric table with row and column labels; values may be negative.
struct LabeledTable {
    std::string corner;
    std::vector<std::string> row_ids;
    std::vector<std::string> column_ids;
    Matrix values;
};

/**
 * Header row holds the column ids (first cell is a corner label); each later
 * row holds a row id and one number per column. Errors carry the line number.
 */
LabeledTable load_table_tsv(const std::string& path);

/// load_table_tsv plus the expression-matrix checks (unique ids, nonnegative unless `sign` is any).
ExpressionMatrix load_expression_tsv(const std::string& path,
                                     ExpressionMatrix::Sign sign = ExpressionMatrix::Sign::nonnegative);

void write_table_tsv(const std::string& path, const LabeledTable& table);
void write_expression_tsv(const std::string& path, const ExpressionMatrix& g);

/// Shortest round-trip formatting is not used; every value gets %.17g.
std::string format_double(double value);

struct MarkerRow {
    std::string gene_id;
    int cluster = 0;
    bool is_marker = false;
    int assigned_type = 0;
};

void write_markers_tsv(const std::string& path, const std::vector<std::string>& gene_ids,
                       const ClusterAssignment& clusters, const MarkerAssignment& markers);
std::vector<MarkerRow> load_markers_tsv(const std::string& path);

void write_diagnostics_jsonl(const std::string& path, const std::vector<IterationRecord>& history);
std::vector<IterationRecord> load_diagnostics_jsonl(const std::string& path);

struct PreprocessConfig {
    double min_row_norm_quantile = 0.02;
    double max_row_norm_quantile = 0.995;
    bool drop_zero_rows = true;
    std::optional<std::size_t> target_gene_count;
    /// Optional sample filter on column norms, off by default.
    std::optional<std::pair<double, double>> column_norm_quantiles;

    void validate() const;
};

struct PreprocessResult {
    ExpressionMatrix g;
    std::vector<std::size_t> kept_rows;     ///< original row index of every surviving gene
    std::vector<std::size_t> kept_columns;  ///< original column index of every surviving sample
};

/// Linear-interpolation quantile of `values` (copied and sorted), q in [0, 1].
double quantile(std::vector<double> values, double q);

PreprocessResult preprocess(const ExpressionMatrix& g, const PreprocessConfig& cfg);

/// 64-bit FNV-1a of a file's bytes, as 16 lowercase hex digits.
std::string file_digest(const std::string& path);

/// Creates the directory (and parents) and checks that a file can be written inside it.
void ensure_output_dir(const std::string& dir);

}  // namespace gsnmf

#endif
