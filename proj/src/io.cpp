#include "gsnmf/io.hpp"

#include "gsnmf/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace gsnmf {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_for_writing(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

// Lines without their terminators; a UTF-8 byte order mark is dropped.
std::vector<std::string_view> split_lines(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    return lines;
}

double parse_number(std::string_view cell, std::size_t line_no, std::size_t column) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, value);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last) {
        throw ParseError("line " + std::to_string(line_no) + ", field " + std::to_string(column + 1) +
                         ": '" + std::string(cell) + "' is not a number");
    }
    if (!std::isfinite(value)) {
        throw ParseError("line " + std::to_string(line_no) + ", field " + std::to_string(column + 1) +
                         ": non-finite value '" + std::string(cell) + "'");
    }
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

LabeledTable load_table_tsv(const std::string& path) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty()) {
        throw ParseError(path + ": file is empty");
    }
    LabeledTable table;
    const auto header = split_tabs(lines[0]);
    if (header.size() < 2) {
        throw ParseError(path + ": line 1: header needs a corner cell and at least one column id");
    }
    table.corner = std::string(header[0]);
    for (std::size_t c = 1; c < header.size(); ++c) {
        table.column_ids.emplace_back(header[c]);
    }
    const std::size_t n = table.column_ids.size();
    std::vector<double> values;
    values.reserve((lines.size() - 1) * n);
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto cells = split_tabs(lines[l]);
        if (cells.size() != n + 1) {
            throw ParseError(path + ": line " + std::to_string(l + 1) + ": expected " + std::to_string(n + 1) +
                             " fields, found " + std::to_string(cells.size()));
        }
        table.row_ids.emplace_back(cells[0]);
        for (std::size_t c = 1; c <= n; ++c) {
            values.push_back(parse_number(cells[c], l + 1, c));
        }
    }
    table.values.resize(static_cast<Eigen::Index>(table.row_ids.size()), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
            table.values(i, j) = values[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
        }
    }
    return table;
}

ExpressionMatrix load_expression_tsv(const std::string& path, ExpressionMatrix::Sign sign) {
    LabeledTable t = load_table_tsv(path);
    if (t.row_ids.empty()) {
        throw ParseError(path + ": no gene rows");
    }
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t c = 0; c < t.column_ids.size(); ++c) {
        if (!seen.emplace(t.column_ids[c], c).second) {
            throw ParseError(path + ": line 1: duplicate sample id '" + t.column_ids[c] + "'");
        }
    }
    seen.clear();
    for (std::size_t r = 0; r < t.row_ids.size(); ++r) {
        const auto [it, fresh] = seen.emplace(t.row_ids[r], r);
        if (!fresh) {
            throw ParseError(path + ": line " + std::to_string(r + 2) + ": duplicate gene id '" + t.row_ids[r] +
                             "' (first seen on line " + std::to_string(it->second + 2) + ")");
        }
    }
    if (sign == ExpressionMatrix::Sign::nonnegative) {
        for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
            for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
                if (t.values(i, j) < 0) {
                    throw ParseError(path + ": line " + std::to_string(i + 2) + ": negative value " +
                                     format_double(t.values(i, j)) + " at gene '" +
                                     t.row_ids[static_cast<std::size_t>(i)] + "', sample '" +
                                     t.column_ids[static_cast<std::size_t>(j)] + "'");
                }
            }
        }
    }
    return ExpressionMatrix(std::move(t.values), std::move(t.row_ids), std::move(t.column_ids), sign);
}

void write_table_tsv(const std::string& path, const LabeledTable& table) {
    if (static_cast<Eigen::Index>(table.row_ids.size()) != table.values.rows() ||
        static_cast<Eigen::Index>(table.column_ids.size()) != table.values.cols()) {
        throw ParameterError("write_table_tsv: labels do not match the matrix shape");
    }
    auto out = open_for_writing(path);
    out << table.corner;
    for (const auto& id : table.column_ids) {
        out << '\t' << id;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        out << table.row_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
            out << '\t' << format_double(table.values(i, j));
        }
        out << '\n';
    }
    finish(out, path);
}

void write_expression_tsv(const std::string& path, const ExpressionMatrix& g) {
    write_table_tsv(path, LabeledTable{"gene", g.gene_ids(), g.sample_ids(), g.values()});
}

void write_markers_tsv(const std::string& path, const std::vector<std::string>& gene_ids,
                       const ClusterAssignment& clusters, const MarkerAssignment& markers) {
    if (gene_ids.size() != clusters.labels.size() || gene_ids.size() != markers.n_rows()) {
        throw ParameterError("write_markers_tsv: gene, cluster and marker counts differ");
    }
    auto out = open_for_writing(path);
    out << "gene_id\tcluster\tis_marker\tassigned_type\n";
    for (std::size_t i = 0; i < gene_ids.size(); ++i) {
        out << gene_ids[i] << '\t' << clusters.labels[i] << '\t' << int(markers.chi[i]) << '\t'
            << markers.type_of[i] << '\n';
    }
    finish(out, path);
}

std::vector<MarkerRow> load_markers_tsv(const std::string& path) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "gene_id\tcluster\tis_marker\tassigned_type") {
        throw ParseError(path + ": line 1: expected header gene_id, cluster, is_marker, assigned_type");
    }
    std::vector<MarkerRow> rows;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto cells = split_tabs(lines[l]);
        if (cells.size() != 4) {
            throw ParseError(path + ": line " + std::to_string(l + 1) + ": expected 4 fields");
        }
        auto integer = [&](std::string_view cell) {
            int v = 0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                throw ParseError(path + ": line " + std::to_string(l + 1) + ": '" + std::string(cell) +
                                 "' is not an integer");
            }
            return v;
        };
        MarkerRow row;
        row.gene_id = std::string(cells[0]);
        row.cluster = integer(cells[1]);
        row.is_marker = integer(cells[2]) != 0;
        row.assigned_type = integer(cells[3]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_diagnostics_jsonl(const std::string& path, const std::vector<IterationRecord>& history) {
    auto out = open_for_writing(path);
    for (const auto& r : history) {
        const nlohmann::ordered_json j = {
            {"iter", r.iteration},         {"residue", r.residue},         {"f1", r.f1},
            {"f2", r.f2},                  {"primal_c", r.primal_c},       {"primal_p", r.primal_p},
            {"delta_c", r.delta_c},        {"delta_p", r.delta_p},         {"inner_steps", r.inner_steps},
            {"line_search_failed", r.line_search_failed},
        };
        out << j.dump() << '\n';
    }
    finish(out, path);
}

std::vector<IterationRecord> load_diagnostics_jsonl(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<IterationRecord> out;
    const auto lines = split_lines(text);
    for (std::size_t l = 0; l < lines.size(); ++l) {
        try {
            const auto j = nlohmann::json::parse(lines[l]);
            IterationRecord r;
            r.iteration = j.at("iter").get<int>();
            r.residue = j.at("residue").get<double>();
            r.f1 = j.at("f1").get<double>();
            r.f2 = j.at("f2").get<double>();
            r.primal_c = j.at("primal_c").get<double>();
            r.primal_p = j.at("primal_p").get<double>();
            r.delta_c = j.at("delta_c").get<double>();
            r.delta_p = j.at("delta_p").get<double>();
            r.inner_steps = j.at("inner_steps").get<int>();
            r.line_search_failed = j.at("line_search_failed").get<bool>();
            out.push_back(r);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": line " + std::to_string(l + 1) + ": " + e.what());
        }
    }
    return out;
}

void PreprocessConfig::validate() const {
    auto check = [](double lo, double hi, const char* what) {
        if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
            throw ParameterError(std::string(what) + " quantiles must satisfy 0 <= min < max <= 1");
        }
    };
    check(min_row_norm_quantile, max_row_norm_quantile, "row-norm");
    if (column_norm_quantiles) {
        check(column_norm_quantiles->first, column_norm_quantiles->second, "column-norm");
    }
    if (target_gene_count && *target_gene_count < 1) {
        throw ParameterError("target gene count must be at least 1");
    }
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw ParameterError("quantile of an empty set");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

PreprocessResult preprocess(const ExpressionMatrix& g, const PreprocessConfig& cfg) {
    cfg.validate();
    const Matrix& v = g.values();

    std::vector<std::size_t> columns(static_cast<std::size_t>(v.cols()));
    std::iota(columns.begin(), columns.end(), 0);
    if (cfg.column_norm_quantiles) {
        std::vector<double> norms;
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            norms.push_back(v.col(j).norm());
        }
        const double lo = quantile(norms, cfg.column_norm_quantiles->first);
        const double hi = quantile(norms, cfg.column_norm_quantiles->second);
        std::erase_if(columns, [&](std::size_t j) { return norms[j] < lo || norms[j] > hi; });
        if (columns.empty()) {
            throw DomainError("every sample was removed by the column-norm filter; loosen its quantiles");
        }
    }

    const Vector norms = row_norms(v);
    std::vector<std::size_t> rows;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        if (!cfg.drop_zero_rows || norms(i) > 0.0) {
            rows.push_back(static_cast<std::size_t>(i));
        }
    }
    if (!rows.empty()) {
        std::vector<double> kept;
        for (auto i : rows) {
            kept.push_back(norms(static_cast<Eigen::Index>(i)));
        }
        const double lo = quantile(kept, cfg.min_row_norm_quantile);
        const double hi = quantile(kept, cfg.max_row_norm_quantile);
        std::erase_if(rows, [&](std::size_t i) {
            const double n = norms(static_cast<Eigen::Index>(i));
            return n < lo || n > hi;
        });
    }
    if (cfg.target_gene_count && rows.size() > *cfg.target_gene_count) {
        std::vector<double> variance(static_cast<std::size_t>(v.rows()), 0.0);
        for (auto i : rows) {
            const auto r = v.row(static_cast<Eigen::Index>(i));
            variance[i] = (r.array() - r.mean()).square().mean();
        }
        std::vector<std::size_t> order = rows;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return variance[a] > variance[b]; });
        order.resize(*cfg.target_gene_count);
        std::sort(order.begin(), order.end());
        rows = std::move(order);
    }
    if (rows.empty()) {
        throw DomainError("every gene was removed by preprocessing; loosen the row-norm quantiles");
    }
    ExpressionMatrix out = g.select_rows(rows);
    if (columns.size() != static_cast<std::size_t>(v.cols())) {
        out = out.select_columns(columns);
    }
    return PreprocessResult{std::move(out), std::move(rows), std::move(columns)};
}

std::string file_digest(const std::string& path) {
    const std::string bytes = read_file(path);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir + "'");
    }
    const auto probe = std::filesystem::path(dir) / ".write-check";
    {
        std::ofstream out(probe);
        if (!out) {
            throw IoError("output directory '" + dir + "' is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace gsnmf
