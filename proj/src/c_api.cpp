#include "gsnmf/gsnmf.h"

#include "gsnmf/error.hpp"
#include "gsnmf/io.hpp"
#include "gsnmf/pipeline.hpp"
#include "gsnmf/synthetic.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

struct gsnmf_dataset {
    gsnmf::ExpressionMatrix g;
};

struct gsnmf_result {
    gsnmf::ExpressionMatrix g;
    gsnmf::PipelineResult result;
};

struct gsnmf_clustering {
    std::vector<std::string> gene_ids;
    gsnmf::ClusteringResult result;
};

struct gsnmf_truth {
    gsnmf::GroundTruth truth;
};

struct gsnmf_bench_report {
    std::vector<gsnmf_bench_row> rows;
};

namespace {

thread_local std::string last_error;

gsnmf_status status_of(gsnmf::ErrorKind kind) {
    switch (kind) {
        case gsnmf::ErrorKind::parameter: return GSNMF_ERR_PARAMETER;
        case gsnmf::ErrorKind::domain: return GSNMF_ERR_DOMAIN;
        case gsnmf::ErrorKind::parse: return GSNMF_ERR_PARSE;
        case gsnmf::ErrorKind::numeric: return GSNMF_ERR_NUMERIC;
        case gsnmf::ErrorKind::clustering: return GSNMF_ERR_CLUSTERING;
        case gsnmf::ErrorKind::io: return GSNMF_ERR_IO;
    }
    return GSNMF_ERR_INTERNAL;
}

template <class F>
gsnmf_status guarded(F&& body) {
    last_error.clear();
    try {
        body();
        return GSNMF_OK;
    } catch (const gsnmf::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return GSNMF_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return GSNMF_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) {
        throw gsnmf::ParameterError(what);
    }
}

std::string str_or(const char* s, const char* fallback) {
    return s != nullptr ? std::string(s) : std::string(fallback);
}

std::filesystem::path in_dir(const char* dir, const char* name) {
    return std::filesystem::path(dir) / name;
}

std::vector<std::string> numbered(const char* prefix, Eigen::Index n) {
    std::vector<std::string> ids;
    for (Eigen::Index i = 1; i <= n; ++i) {
        ids.push_back(prefix + std::to_string(i));
    }
    return ids;
}

void write_labels(const std::filesystem::path& path, const char* column, const std::vector<std::string>& ids,
                  const std::vector<int>& labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw gsnmf::IoError("cannot open '" + path.string() + "' for writing");
    }
    out << "gene_id\t" << column << '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << '\t' << labels[i] << '\n';
    }
    if (!out.flush()) {
        throw gsnmf::IoError("write to '" + path.string() + "' failed");
    }
}

void write_embedding(const std::filesystem::path& path, const std::vector<std::string>& ids, const gsnmf::Matrix& v) {
    gsnmf::write_table_tsv(path.string(), gsnmf::LabeledTable{"gene_id", ids, numbered("e", v.cols()), v});
}

std::vector<Eigen::Index> to_split(const size_t* split, size_t len) {
    std::vector<Eigen::Index> out;
    if (split != nullptr) {
        for (size_t i = 0; i < len; ++i) {
            out.push_back(static_cast<Eigen::Index>(split[i]));
        }
    }
    return out;
}

gsnmf::SolverConfig solver_config(double lambda_tilde, double rho, double gamma, double tol, int max_iter,
                                  std::uint64_t seed) {
    require(lambda_tilde >= 0.0, "lambda_tilde must be nonnegative");
    gsnmf::SolverConfig cfg = gsnmf::SolverConfig::from_lambda_tilde(lambda_tilde, rho, gamma);
    cfg.tol_outer = tol;
    cfg.max_outer = max_iter;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

void write_factors(const char* dir, const gsnmf::ExpressionMatrix& g, const gsnmf::PipelineResult& r) {
    const auto types = numbered("type_", r.solution.c.cols());
    gsnmf::write_table_tsv(in_dir(dir, "C.tsv").string(),
                           gsnmf::LabeledTable{"gene_id", g.gene_ids(), types, r.solution.c});
    gsnmf::write_table_tsv(in_dir(dir, "P.tsv").string(),
                           gsnmf::LabeledTable{"type", types, g.sample_ids(), r.solution.p});
    gsnmf::write_markers_tsv(in_dir(dir, "markers.tsv").string(), g.gene_ids(), r.clustering.clusters, r.markers);
    gsnmf::write_diagnostics_jsonl(in_dir(dir, "diagnostics.jsonl").string(), r.solution.history);
}

std::string run_dir_name(double ndr, std::uint64_t seed) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ndr_%g_seed_%llu", ndr, static_cast<unsigned long long>(seed));
    return buf;
}

}  // namespace

extern "C" {

const char* gsnmf_version(void) { return "0.3.0"; }

const char* gsnmf_status_name(gsnmf_status status) {
    switch (status) {
        case GSNMF_OK: return "ok";
        case GSNMF_ERR_PARAMETER: return "parameter error";
        case GSNMF_ERR_DOMAIN: return "domain error";
        case GSNMF_ERR_PARSE: return "parse error";
        case GSNMF_ERR_NUMERIC: return "numeric error";
        case GSNMF_ERR_CLUSTERING: return "clustering error";
        case GSNMF_ERR_IO: return "i/o error";
        case GSNMF_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* gsnmf_last_error(void) { return last_error.c_str(); }

gsnmf_status gsnmf_file_digest(const char* path, char out[17]) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "gsnmf_file_digest: null argument");
        const std::string d = gsnmf::file_digest(path);
        std::memcpy(out, d.c_str(), 17);
    });
}

gsnmf_status gsnmf_ensure_output_dir(const char* path) {
    return guarded([&] {
        require(path != nullptr, "gsnmf_ensure_output_dir: null path");
        gsnmf::ensure_output_dir(path);
    });
}

gsnmf_status gsnmf_dataset_load(const char* path, int allow_negative, gsnmf_dataset** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "gsnmf_dataset_load: null argument");
        *out = nullptr;
        auto sign = allow_negative ? gsnmf::ExpressionMatrix::Sign::any : gsnmf::ExpressionMatrix::Sign::nonnegative;
        *out = new gsnmf_dataset{gsnmf::load_expression_tsv(path, sign)};
    });
}

gsnmf_status gsnmf_dataset_from_values(const double* values, size_t n_genes, size_t n_samples, int allow_negative,
                                       gsnmf_dataset** out) {
    return guarded([&] {
        require(values != nullptr && out != nullptr, "gsnmf_dataset_from_values: null argument");
        *out = nullptr;
        gsnmf::Matrix m(static_cast<Eigen::Index>(n_genes), static_cast<Eigen::Index>(n_samples));
        for (size_t i = 0; i < n_genes; ++i) {
            for (size_t j = 0; j < n_samples; ++j) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * n_samples + j];
            }
        }
        auto sign = allow_negative ? gsnmf::ExpressionMatrix::Sign::any : gsnmf::ExpressionMatrix::Sign::nonnegative;
        *out = new gsnmf_dataset{gsnmf::ExpressionMatrix::with_default_ids(std::move(m), sign)};
    });
}

void gsnmf_dataset_free(gsnmf_dataset* dataset) { delete dataset; }

size_t gsnmf_dataset_genes(const gsnmf_dataset* dataset) {
    return dataset != nullptr ? static_cast<size_t>(dataset->g.n_genes()) : 0;
}

size_t gsnmf_dataset_samples(const gsnmf_dataset* dataset) {
    return dataset != nullptr ? static_cast<size_t>(dataset->g.n_samples()) : 0;
}

gsnmf_status gsnmf_dataset_write(const gsnmf_dataset* dataset, const char* path) {
    return guarded([&] {
        require(dataset != nullptr && path != nullptr, "gsnmf_dataset_write: null argument");
        gsnmf::write_expression_tsv(path, dataset->g);
    });
}

void gsnmf_preprocess_options_init(gsnmf_preprocess_options* options) {
    if (options == nullptr) {
        return;
    }
    const gsnmf::PreprocessConfig d;
    options->min_row_norm_quantile = d.min_row_norm_quantile;
    options->max_row_norm_quantile = d.max_row_norm_quantile;
    options->drop_zero_rows = d.drop_zero_rows ? 1 : 0;
    options->target_gene_count = 0;
}

gsnmf_status gsnmf_dataset_preprocess(const gsnmf_dataset* dataset, const gsnmf_preprocess_options* options,
                                      gsnmf_dataset** out) {
    return guarded([&] {
        require(dataset != nullptr && options != nullptr && out != nullptr,
                "gsnmf_dataset_preprocess: null argument");
        *out = nullptr;
        gsnmf::PreprocessConfig cfg;
        cfg.min_row_norm_quantile = options->min_row_norm_quantile;
        cfg.max_row_norm_quantile = options->max_row_norm_quantile;
        cfg.drop_zero_rows = options->drop_zero_rows != 0;
        if (options->target_gene_count > 0) {
            cfg.target_gene_count = options->target_gene_count;
        }
        *out = new gsnmf_dataset{gsnmf::preprocess(dataset->g, cfg).g};
    });
}

void gsnmf_deconvolve_options_init(gsnmf_deconvolve_options* options) {
    if (options == nullptr) {
        return;
    }
    const gsnmf::SolverConfig s;
    options->k = 0;
    options->sigma = 0.2;
    options->lambda_tilde = 0.6;
    options->rho = s.rho;
    options->gamma = s.gamma;
    options->markers_per_cluster = 0;
    options->tol = s.tol_outer;
    options->max_iter = s.max_outer;
    options->seed = 0;
    options->sparsify = "dense";
    options->penalty_graph = "knn:1";
    options->marker_strategy = "medoid";
    options->kmeans_restarts = gsnmf::KMeansOptions{}.restarts;
    options->workers = 1;
    options->literal_dual_update = 0;
}

gsnmf_status gsnmf_deconvolve(const gsnmf_dataset* dataset, const gsnmf_deconvolve_options* options,
                              gsnmf_result** out) {
    return guarded([&] {
        require(dataset != nullptr && options != nullptr && out != nullptr, "gsnmf_deconvolve: null argument");
        *out = nullptr;
        gsnmf::PipelineConfig cfg;
        cfg.k = options->k;
        cfg.sigma = options->sigma;
        cfg.sparsity = gsnmf::Sparsity::parse(str_or(options->sparsify, "dense"));
        cfg.penalty_sparsity = gsnmf::Sparsity::parse(str_or(options->penalty_graph, "knn:1"));
        cfg.kmeans.restarts = options->kmeans_restarts;
        cfg.kmeans.workers = options->workers;
        cfg.markers_per_cluster = options->markers_per_cluster;
        cfg.strategy = gsnmf::parse_marker_strategy(str_or(options->marker_strategy, "medoid"));
        cfg.solver = solver_config(options->lambda_tilde, options->rho, options->gamma, options->tol,
                                   options->max_iter, options->seed);
        cfg.solver.literal_dual_update = options->literal_dual_update != 0;
        auto result = std::make_unique<gsnmf_result>(gsnmf_result{dataset->g, gsnmf::run_pipeline(dataset->g, cfg)});
        *out = result.release();
    });
}

void gsnmf_result_free(gsnmf_result* result) { delete result; }

int gsnmf_result_converged(const gsnmf_result* result) {
    return result != nullptr && result->result.solution.converged ? 1 : 0;
}

int gsnmf_result_iterations(const gsnmf_result* result) {
    return result != nullptr ? result->result.solution.iterations : 0;
}

double gsnmf_result_residue(const gsnmf_result* result) {
    return result != nullptr ? result->result.solution.final_residue : 0.0;
}

double gsnmf_result_silhouette(const gsnmf_result* result) {
    return result != nullptr ? result->result.clustering.silhouette : 0.0;
}

int gsnmf_result_line_search_warnings(const gsnmf_result* result) {
    return result != nullptr ? result->result.solution.line_search_warnings : 0;
}

gsnmf_status gsnmf_result_copy_c(const gsnmf_result* result, double* out) {
    return guarded([&] {
        require(result != nullptr && out != nullptr, "gsnmf_result_copy_c: null argument");
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            out, result->result.solution.c.rows(), result->result.solution.c.cols()) = result->result.solution.c;
    });
}

gsnmf_status gsnmf_result_copy_p(const gsnmf_result* result, double* out) {
    return guarded([&] {
        require(result != nullptr && out != nullptr, "gsnmf_result_copy_p: null argument");
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            out, result->result.solution.p.rows(), result->result.solution.p.cols()) = result->result.solution.p;
    });
}

gsnmf_status gsnmf_result_write(const gsnmf_result* result, const char* dir) {
    return guarded([&] {
        require(result != nullptr && dir != nullptr, "gsnmf_result_write: null argument");
        gsnmf::ensure_output_dir(dir);
        write_factors(dir, result->g, result->result);
        write_embedding(in_dir(dir, "embedding.tsv"), result->g.gene_ids(),
                        result->result.clustering.embedding.vectors);
    });
}

void gsnmf_cluster_options_init(gsnmf_cluster_options* options) {
    if (options == nullptr) {
        return;
    }
    options->k = 0;
    options->sigma = 0.2;
    options->seed = 0;
    options->sparsify = "dense";
    options->kmeans_restarts = gsnmf::KMeansOptions{}.restarts;
    options->workers = 1;
}

gsnmf_status gsnmf_cluster(const gsnmf_dataset* dataset, const gsnmf_cluster_options* options,
                           gsnmf_clustering** out) {
    return guarded([&] {
        require(dataset != nullptr && options != nullptr && out != nullptr, "gsnmf_cluster: null argument");
        *out = nullptr;
        require(options->sigma > 0.0, "sigma must be positive");
        gsnmf::KMeansOptions km;
        km.restarts = options->kmeans_restarts;
        km.workers = options->workers;
        auto res = gsnmf::cluster_genes(dataset->g, options->k, options->sigma,
                                        gsnmf::Sparsity::parse(str_or(options->sparsify, "dense")), options->seed, km);
        *out = new gsnmf_clustering{dataset->g.gene_ids(), std::move(res)};
    });
}

void gsnmf_clustering_free(gsnmf_clustering* clustering) { delete clustering; }

double gsnmf_clustering_silhouette(const gsnmf_clustering* clustering) {
    return clustering != nullptr ? clustering->result.silhouette : 0.0;
}

gsnmf_status gsnmf_clustering_copy_labels(const gsnmf_clustering* clustering, int* out) {
    return guarded([&] {
        require(clustering != nullptr && out != nullptr, "gsnmf_clustering_copy_labels: null argument");
        std::copy(clustering->result.clusters.labels.begin(), clustering->result.clusters.labels.end(), out);
    });
}

gsnmf_status gsnmf_clustering_write(const gsnmf_clustering* clustering, const char* dir) {
    return guarded([&] {
        require(clustering != nullptr && dir != nullptr, "gsnmf_clustering_write: null argument");
        gsnmf::ensure_output_dir(dir);
        write_labels(in_dir(dir, "labels.tsv"), "cluster", clustering->gene_ids, clustering->result.clusters.labels);
        write_embedding(in_dir(dir, "embedding.tsv"), clustering->gene_ids, clustering->result.embedding.vectors);
        const gsnmf::Vector& ev = clustering->result.embedding.eigenvalues;
        gsnmf::write_table_tsv(in_dir(dir, "eigenvalues.tsv").string(),
                               gsnmf::LabeledTable{"index", numbered("", ev.size()), {"eigenvalue"}, ev});
    });
}

void gsnmf_synth_options_init(gsnmf_synth_options* options) {
    if (options == nullptr) {
        return;
    }
    options->n_genes = 800;
    options->n_samples = 30;
    options->k = 3;
    options->split = nullptr;
    options->split_len = 0;
    options->ndr = 0.0;
    options->marker_tightness = 0.05;
    options->seed = 0;
    options->clip_negative = 0;
}

gsnmf_status gsnmf_synth(const gsnmf_synth_options* options, gsnmf_truth** out) {
    return guarded([&] {
        require(options != nullptr && out != nullptr, "gsnmf_synth: null argument");
        *out = nullptr;
        gsnmf::BenchConfig shape;
        shape.n_genes = static_cast<Eigen::Index>(options->n_genes);
        shape.pipeline.k = options->k;
        require(options->k >= 1, "k must be positive");
        gsnmf::SyntheticSpec spec;
        spec.n_genes = shape.n_genes;
        spec.n_samples = static_cast<Eigen::Index>(options->n_samples);
        spec.n_types = options->k;
        spec.marker_split = options->split != nullptr ? to_split(options->split, options->split_len) : shape.split();
        spec.ndr = options->ndr;
        spec.marker_tightness = options->marker_tightness;
        spec.seed = options->seed;
        spec.clip_negative = options->clip_negative != 0;
        *out = new gsnmf_truth{gsnmf::generate_synthetic(spec)};
    });
}

void gsnmf_truth_free(gsnmf_truth* truth) { delete truth; }

double gsnmf_truth_achieved_ndr(const gsnmf_truth* truth) {
    return truth != nullptr ? truth->truth.achieved_ndr : 0.0;
}

gsnmf_status gsnmf_truth_dataset(const gsnmf_truth* truth, gsnmf_dataset** out) {
    return guarded([&] {
        require(truth != nullptr && out != nullptr, "gsnmf_truth_dataset: null argument");
        *out = new gsnmf_dataset{truth->truth.g};
    });
}

gsnmf_status gsnmf_truth_write(const gsnmf_truth* truth, const char* dir) {
    return guarded([&] {
        require(truth != nullptr && dir != nullptr, "gsnmf_truth_write: null argument");
        gsnmf::ensure_output_dir(dir);
        const auto& t = truth->truth;
        const auto types = numbered("type_", t.c_true.n_types());
        gsnmf::write_expression_tsv(in_dir(dir, "G.tsv").string(), t.g);
        gsnmf::write_table_tsv(in_dir(dir, "C_true.tsv").string(),
                               gsnmf::LabeledTable{"gene_id", t.g.gene_ids(), types, t.c_true.values()});
        gsnmf::write_table_tsv(in_dir(dir, "P_true.tsv").string(),
                               gsnmf::LabeledTable{"type", types, t.g.sample_ids(), t.p_true.values()});
        write_labels(in_dir(dir, "labels.tsv"), "label", t.g.gene_ids(), t.labels);
    });
}

void gsnmf_bench_options_init(gsnmf_bench_options* options) {
    if (options == nullptr) {
        return;
    }
    static const double default_ndrs[] = {0.071, 0.162, 0.336, 0.599};
    static const uint64_t default_seeds[] = {0};
    const gsnmf::SolverConfig s;
    options->n_genes = 800;
    options->n_samples = 30;
    options->k = 3;
    options->split = nullptr;
    options->split_len = 0;
    options->ndrs = default_ndrs;
    options->n_ndrs = 4;
    options->seeds = default_seeds;
    options->n_seeds = 1;
    options->marker_tightness = 0.05;
    options->sigma = 0.2;
    options->lambda_tilde = 4.0;
    options->rho = s.rho;
    options->gamma = s.gamma;
    options->tol = s.tol_outer;
    options->max_iter = s.max_outer;
    options->markers_per_cluster = 0;
    options->sparsify = "dense";
    options->penalty_graph = "knn:1";
    options->kmeans_restarts = gsnmf::KMeansOptions{}.restarts;
    options->workers = 1;
    options->write_runs = 1;
}

gsnmf_status gsnmf_bench(const gsnmf_bench_options* options, const char* dir, gsnmf_bench_report** out) {
    return guarded([&] {
        require(options != nullptr && out != nullptr && dir != nullptr, "gsnmf_bench: null argument");
        *out = nullptr;
        require(options->ndrs != nullptr && options->n_ndrs > 0, "bench needs at least one NDR");
        require(options->seeds != nullptr && options->n_seeds > 0, "bench needs at least one seed");
        gsnmf::BenchConfig cfg;
        cfg.n_genes = static_cast<Eigen::Index>(options->n_genes);
        cfg.n_samples = static_cast<Eigen::Index>(options->n_samples);
        cfg.marker_split = to_split(options->split, options->split_len);
        cfg.marker_tightness = options->marker_tightness;
        cfg.pipeline.k = options->k;
        cfg.pipeline.sigma = options->sigma;
        cfg.pipeline.sparsity = gsnmf::Sparsity::parse(str_or(options->sparsify, "dense"));
        cfg.pipeline.penalty_sparsity = gsnmf::Sparsity::parse(str_or(options->penalty_graph, "knn:1"));
        cfg.pipeline.kmeans.restarts = options->kmeans_restarts;
        cfg.pipeline.kmeans.workers = options->workers;
        cfg.pipeline.markers_per_cluster = options->markers_per_cluster;
        cfg.pipeline.solver =
            solver_config(options->lambda_tilde, options->rho, options->gamma, options->tol, options->max_iter, 0);
        cfg.pipeline.validate();
        gsnmf::ensure_output_dir(dir);

        auto report = std::make_unique<gsnmf_bench_report>();
        for (size_t a = 0; a < options->n_ndrs; ++a) {
            for (size_t b = 0; b < options->n_seeds; ++b) {
                const double ndr = options->ndrs[a];
                const std::uint64_t seed = options->seeds[b];
                std::optional<gsnmf::BenchArtifacts> art;
                const gsnmf::BenchRun run =
                    gsnmf::run_bench_case(cfg, ndr, seed, options->write_runs ? &art : nullptr);
                report->rows.push_back(gsnmf_bench_row{ndr, seed, run.achieved_ndr, run.metrics.err_c,
                                                       run.metrics.err_p, run.metrics.residue, run.raw_err_c,
                                                       run.raw_err_p, run.iterations, run.converged ? 1 : 0,
                                                       run.marker_precision});
                if (art) {
                    const std::string sub = (std::filesystem::path(dir) / "runs" / run_dir_name(ndr, seed)).string();
                    gsnmf::ensure_output_dir(sub);
                    write_factors(sub.c_str(), art->truth.g, art->result);
                }
            }
        }

        const auto path = in_dir(dir, "runs.tsv");
        std::ofstream runs(path, std::ios::binary | std::ios::trunc);
        runs << "ndr\tseed\tachieved_ndr\terr_c\terr_p\tresidue\traw_err_c\traw_err_p\titerations\tconverged\t"
                "marker_precision\n";
        for (const auto& r : report->rows) {
            runs << gsnmf::format_double(r.ndr) << '\t' << r.seed << '\t' << gsnmf::format_double(r.achieved_ndr)
                 << '\t' << gsnmf::format_double(r.err_c) << '\t' << gsnmf::format_double(r.err_p) << '\t'
                 << gsnmf::format_double(r.residue) << '\t' << gsnmf::format_double(r.raw_err_c) << '\t'
                 << gsnmf::format_double(r.raw_err_p) << '\t' << r.iterations << '\t' << r.converged << '\t'
                 << gsnmf::format_double(r.marker_precision) << '\n';
        }
        if (!runs.flush()) {
            throw gsnmf::IoError("write to '" + path.string() + "' failed");
        }

        const auto table_path = in_dir(dir, "report.tsv");
        std::ofstream table(table_path, std::ios::binary | std::ios::trunc);
        table << "ndr\terr_c\terr_p\tresidue\tn_runs\n";
        for (size_t a = 0; a < options->n_ndrs; ++a) {
            double ec = 0.0, ep = 0.0, res = 0.0;
            const double n = static_cast<double>(options->n_seeds);
            for (size_t b = 0; b < options->n_seeds; ++b) {
                const auto& r = report->rows[a * options->n_seeds + b];
                ec += r.err_c / n;
                ep += r.err_p / n;
                res += r.residue / n;
            }
            table << gsnmf::format_double(options->ndrs[a]) << '\t' << gsnmf::format_double(ec) << '\t'
                  << gsnmf::format_double(ep) << '\t' << gsnmf::format_double(res) << '\t' << options->n_seeds
                  << '\n';
        }
        if (!table.flush()) {
            throw gsnmf::IoError("write to '" + table_path.string() + "' failed");
        }
        *out = report.release();
    });
}

void gsnmf_bench_report_free(gsnmf_bench_report* report) { delete report; }

size_t gsnmf_bench_report_size(const gsnmf_bench_report* report) {
    return report != nullptr ? report->rows.size() : 0;
}

gsnmf_status gsnmf_bench_report_row(const gsnmf_bench_report* report, size_t index, gsnmf_bench_row* out) {
    return guarded([&] {
        require(report != nullptr && out != nullptr, "gsnmf_bench_report_row: null argument");
        require(index < report->rows.size(), "gsnmf_bench_report_row: index out of range");
        *out = report->rows[index];
    });
}

}  // extern "C"
