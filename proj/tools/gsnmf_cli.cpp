// Command-line front end. Talks to the library only through gsnmf.h.

#include "gsnmf/gsnmf.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_numeric = 3 };

struct Failure {
    int code;
};

int exit_code(gsnmf_status s) {
    switch (s) {
        case GSNMF_OK: return exit_ok;
        case GSNMF_ERR_PARAMETER: return exit_usage;
        case GSNMF_ERR_DOMAIN:
        case GSNMF_ERR_PARSE:
        case GSNMF_ERR_CLUSTERING:
        case GSNMF_ERR_IO: return exit_data;
        case GSNMF_ERR_NUMERIC:
        case GSNMF_ERR_INTERNAL: return exit_numeric;
    }
    return exit_numeric;
}

void check(gsnmf_status s, const char* what) {
    if (s != GSNMF_OK) {
        std::cerr << "gsnmf: " << what << ": " << gsnmf_status_name(s) << ": " << gsnmf_last_error() << '\n';
        throw Failure{exit_code(s)};
    }
}

// An unwritable output directory is a usage problem, not a data problem.
void prepare_output(const std::string& dir) {
    if (gsnmf_ensure_output_dir(dir.c_str()) != GSNMF_OK) {
        std::cerr << "gsnmf: " << gsnmf_last_error() << '\n';
        throw Failure{exit_usage};
    }
}

std::string digest(const fs::path& path) {
    char buf[17];
    check(gsnmf_file_digest(path.string().c_str(), buf), "digest");
    return buf;
}

std::string timestamp() {
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Digests of every regular file under dir except the manifest, sorted by relative path.
json output_digests(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().filename() != "manifest.json") {
            files.push_back(fs::relative(e.path(), dir));
        }
    }
    std::sort(files.begin(), files.end());
    json out = json::object();
    for (const auto& f : files) {
        out[f.generic_string()] = digest(dir / f);
    }
    return out;
}

void write_manifest(const fs::path& dir, const std::string& command, json config, json inputs, std::uint64_t seed) {
    json m;
    m["tool"] = "gsnmf";
    m["version"] = gsnmf_version();
    m["command"] = command;
    m["seed"] = seed;
    m["timestamp"] = timestamp();
    m["config"] = std::move(config);
    m["inputs"] = std::move(inputs);
    m["outputs"] = output_digests(dir);
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << m.dump(2) << '\n';
    if (!out.flush()) {
        std::cerr << "gsnmf: cannot write manifest.json\n";
        throw Failure{exit_data};
    }
}

struct Handle {
    gsnmf_dataset* p = nullptr;
    ~Handle() { gsnmf_dataset_free(p); }
};

struct CommonGraph {
    double sigma = 0.2;
    std::string sparsify = "dense";
    int kmeans_restarts = 100;
    int workers = 1;
    std::uint64_t seed = 0;
};

void add_graph_flags(CLI::App* cmd, CommonGraph& g) {
    cmd->add_option("--sigma", g.sigma, "Kernel width of the similarity graph")->capture_default_str();
    cmd->add_option("--sparsify", g.sparsify, "Clustering graph: dense, knn:<m> or threshold:<t>")
        ->capture_default_str();
    cmd->add_option("--kmeans-restarts", g.kmeans_restarts, "k-means++ restarts")->capture_default_str();
    cmd->add_option("--workers", g.workers, "Threads used by k-means restarts")->capture_default_str();
    cmd->add_option("--seed", g.seed, "Seed for k-means and solver initialization")->capture_default_str();
}

struct DeconvolveArgs {
    std::string input, out;
    int k = 0;
    CommonGraph graph;
    double lambda_tilde = 0.6, rho = 1600.0, gamma = 15000.0, tol = 1e-5;
    int max_iter = 2000;
    std::size_t markers_per_cluster = 0;
    std::string penalty_graph = "knn:1";
    std::string marker_strategy = "medoid";
    bool allow_negative = false;
    bool literal_dual = false;
    bool preprocess = false;
    double min_quantile = 0.02, max_quantile = 0.995;
    std::size_t top_genes = 0;
};

int run_deconvolve(const DeconvolveArgs& a) {
    prepare_output(a.out);
    Handle data;
    check(gsnmf_dataset_load(a.input.c_str(), a.allow_negative ? 1 : 0, &data.p), "load");
    if (a.preprocess) {
        gsnmf_preprocess_options po;
        gsnmf_preprocess_options_init(&po);
        po.min_row_norm_quantile = a.min_quantile;
        po.max_row_norm_quantile = a.max_quantile;
        po.target_gene_count = a.top_genes;
        Handle kept;
        check(gsnmf_dataset_preprocess(data.p, &po, &kept.p), "preprocess");
        std::swap(data.p, kept.p);
    }

    gsnmf_deconvolve_options o;
    gsnmf_deconvolve_options_init(&o);
    o.k = a.k;
    o.sigma = a.graph.sigma;
    o.lambda_tilde = a.lambda_tilde;
    o.rho = a.rho;
    o.gamma = a.gamma;
    o.markers_per_cluster = a.markers_per_cluster;
    o.tol = a.tol;
    o.max_iter = a.max_iter;
    o.seed = a.graph.seed;
    o.sparsify = a.graph.sparsify.c_str();
    o.penalty_graph = a.penalty_graph.c_str();
    o.marker_strategy = a.marker_strategy.c_str();
    o.kmeans_restarts = a.graph.kmeans_restarts;
    o.workers = a.graph.workers;
    o.literal_dual_update = a.literal_dual ? 1 : 0;

    gsnmf_result* result = nullptr;
    check(gsnmf_deconvolve(data.p, &o, &result), "deconvolve");
    const gsnmf_status ws = gsnmf_result_write(result, a.out.c_str());
    const int converged = gsnmf_result_converged(result);
    const int iterations = gsnmf_result_iterations(result);
    const double residue = gsnmf_result_residue(result);
    const int warnings = gsnmf_result_line_search_warnings(result);
    gsnmf_result_free(result);
    check(ws, "write results");

    json cfg = {{"k", a.k},
                {"sigma", a.graph.sigma},
                {"lambda_tilde", a.lambda_tilde},
                {"rho", a.rho},
                {"gamma", a.gamma},
                {"markers_per_cluster", a.markers_per_cluster},
                {"tol", a.tol},
                {"max_iter", a.max_iter},
                {"sparsify", a.graph.sparsify},
                {"penalty_graph", a.penalty_graph},
                {"marker_strategy", a.marker_strategy},
                {"kmeans_restarts", a.graph.kmeans_restarts},
                {"workers", a.graph.workers},
                {"literal_dual_update", a.literal_dual},
                {"allow_negative", a.allow_negative},
                {"preprocess", a.preprocess
                                   ? json{{"min_row_norm_quantile", a.min_quantile},
                                          {"max_row_norm_quantile", a.max_quantile},
                                          {"target_gene_count", a.top_genes}}
                                   : json(nullptr)}};
    write_manifest(a.out, "deconvolve", std::move(cfg), json{{a.input, digest(a.input)}}, a.graph.seed);
    std::printf("genes %zu samples %zu iterations %d converged %s residue %.6g\n", gsnmf_dataset_genes(data.p),
                gsnmf_dataset_samples(data.p), iterations, converged ? "yes" : "no", residue);
    if (warnings > 0) {
        std::fprintf(stderr, "gsnmf: %d inner line searches stopped without sufficient decrease\n", warnings);
    }
    return exit_ok;
}

struct SynthArgs {
    std::size_t n_genes = 800, n_samples = 30;
    int k = 3;
    std::vector<std::size_t> split;
    double ndr = 0.0;
    double tightness = 0.05;
    std::uint64_t seed = 0;
    bool keep_negative = false;
    std::string out;
};

int run_synth(const SynthArgs& a) {
    prepare_output(a.out);
    gsnmf_synth_options o;
    gsnmf_synth_options_init(&o);
    o.n_genes = a.n_genes;
    o.n_samples = a.n_samples;
    o.k = a.k;
    o.split = a.split.empty() ? nullptr : a.split.data();
    o.split_len = a.split.size();
    o.ndr = a.ndr;
    o.marker_tightness = a.tightness;
    o.seed = a.seed;
    o.clip_negative = a.keep_negative ? 0 : 1;
    gsnmf_truth* truth = nullptr;
    check(gsnmf_synth(&o, &truth), "synth");
    const gsnmf_status ws = gsnmf_truth_write(truth, a.out.c_str());
    const double achieved = gsnmf_truth_achieved_ndr(truth);
    gsnmf_truth_free(truth);
    check(ws, "write synthetic data");
    json cfg = {{"n_genes", a.n_genes}, {"n_samples", a.n_samples}, {"k", a.k},
                {"split", a.split},     {"ndr", a.ndr},             {"marker_tightness", a.tightness},
                {"clip_negative", !a.keep_negative}, {"achieved_ndr", achieved}};
    write_manifest(a.out, "synth", std::move(cfg), json::object(), a.seed);
    std::printf("achieved ndr %.6g\n", achieved);
    return exit_ok;
}

struct BenchArgs {
    std::size_t n_genes = 800, n_samples = 30;
    int k = 3;
    std::vector<std::size_t> split;
    std::vector<double> ndrs{0.071, 0.162, 0.336, 0.599};
    std::vector<std::uint64_t> seeds{0};
    double tightness = 0.05;
    CommonGraph graph;
    double lambda_tilde = 4.0, rho = 1600.0, gamma = 15000.0, tol = 1e-5;
    int max_iter = 2000;
    std::size_t markers_per_cluster = 0;
    std::string penalty_graph = "knn:1";
    bool no_run_files = false;
    std::string out;
};

int run_bench(const BenchArgs& a) {
    prepare_output(a.out);
    gsnmf_bench_options o;
    gsnmf_bench_options_init(&o);
    o.n_genes = a.n_genes;
    o.n_samples = a.n_samples;
    o.k = a.k;
    o.split = a.split.empty() ? nullptr : a.split.data();
    o.split_len = a.split.size();
    o.ndrs = a.ndrs.data();
    o.n_ndrs = a.ndrs.size();
    o.seeds = a.seeds.data();
    o.n_seeds = a.seeds.size();
    o.marker_tightness = a.tightness;
    o.sigma = a.graph.sigma;
    o.lambda_tilde = a.lambda_tilde;
    o.rho = a.rho;
    o.gamma = a.gamma;
    o.tol = a.tol;
    o.max_iter = a.max_iter;
    o.markers_per_cluster = a.markers_per_cluster;
    o.sparsify = a.graph.sparsify.c_str();
    o.penalty_graph = a.penalty_graph.c_str();
    o.kmeans_restarts = a.graph.kmeans_restarts;
    o.workers = a.graph.workers;
    o.write_runs = a.no_run_files ? 0 : 1;

    gsnmf_bench_report* report = nullptr;
    check(gsnmf_bench(&o, a.out.c_str(), &report), "bench");
    std::printf("%-8s %-6s %-10s %-10s %-10s %-6s\n", "ndr", "seed", "err_c", "err_p", "residue", "iters");
    for (std::size_t i = 0; i < gsnmf_bench_report_size(report); ++i) {
        gsnmf_bench_row r;
        gsnmf_bench_report_row(report, i, &r);
        std::printf("%-8g %-6llu %-10.4f %-10.4f %-10.4f %-6d%s\n", r.ndr, static_cast<unsigned long long>(r.seed),
                    r.err_c, r.err_p, r.residue, r.iterations, r.converged ? "" : " (max-iter)");
    }
    gsnmf_bench_report_free(report);

    json cfg = {{"n_genes", a.n_genes},
                {"n_samples", a.n_samples},
                {"k", a.k},
                {"split", a.split},
                {"ndr_list", a.ndrs},
                {"seeds", a.seeds},
                {"marker_tightness", a.tightness},
                {"sigma", a.graph.sigma},
                {"lambda_tilde", a.lambda_tilde},
                {"rho", a.rho},
                {"gamma", a.gamma},
                {"tol", a.tol},
                {"max_iter", a.max_iter},
                {"markers_per_cluster", a.markers_per_cluster},
                {"sparsify", a.graph.sparsify},
                {"penalty_graph", a.penalty_graph},
                {"kmeans_restarts", a.graph.kmeans_restarts},
                {"workers", a.graph.workers},
                {"run_files", !a.no_run_files}};
    write_manifest(a.out, "bench", std::move(cfg), json::object(), a.seeds.front());
    return exit_ok;
}

struct ClusterArgs {
    std::string input, out;
    int k = 0;
    CommonGraph graph;
    bool allow_negative = false;
};

int run_cluster(const ClusterArgs& a) {
    prepare_output(a.out);
    Handle data;
    check(gsnmf_dataset_load(a.input.c_str(), a.allow_negative ? 1 : 0, &data.p), "load");
    gsnmf_cluster_options o;
    gsnmf_cluster_options_init(&o);
    o.k = a.k;
    o.sigma = a.graph.sigma;
    o.seed = a.graph.seed;
    o.sparsify = a.graph.sparsify.c_str();
    o.kmeans_restarts = a.graph.kmeans_restarts;
    o.workers = a.graph.workers;
    gsnmf_clustering* c = nullptr;
    check(gsnmf_cluster(data.p, &o, &c), "cluster");
    const gsnmf_status ws = gsnmf_clustering_write(c, a.out.c_str());
    const double sil = gsnmf_clustering_silhouette(c);
    gsnmf_clustering_free(c);
    check(ws, "write clustering");
    json cfg = {{"k", a.k},
                {"sigma", a.graph.sigma},
                {"sparsify", a.graph.sparsify},
                {"kmeans_restarts", a.graph.kmeans_restarts},
                {"workers", a.graph.workers},
                {"allow_negative", a.allow_negative},
                {"silhouette", sil}};
    write_manifest(a.out, "cluster", std::move(cfg), json{{a.input, digest(a.input)}}, a.graph.seed);
    std::printf("silhouette %.6f\n", sil);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Marker- and graph-guided NMF deconvolution of bulk expression data"};
    app.set_version_flag("--version", std::string(gsnmf_version()));
    app.require_subcommand(1);

    DeconvolveArgs dec;
    auto* d = app.add_subcommand("deconvolve", "Estimate signatures C and proportions P from an expression TSV");
    d->add_option("--input", dec.input, "Gene x sample TSV")->required();
    d->add_option("--k", dec.k, "Number of cell types")->required()->check(CLI::Range(2, 1 << 20));
    d->add_option("--out", dec.out, "Output directory")->required();
    add_graph_flags(d, dec.graph);
    d->add_option("--lambda-tilde", dec.lambda_tilde, "Penalty weight relative to rho")->capture_default_str();
    d->add_option("--rho", dec.rho)->capture_default_str();
    d->add_option("--gamma", dec.gamma)->capture_default_str();
    d->add_option("--markers-per-cluster", dec.markers_per_cluster, "0 picks N/10 capped at the smallest cluster")
        ->capture_default_str();
    d->add_option("--marker-strategy", dec.marker_strategy)
        ->check(CLI::IsMember({"medoid", "centroid", "max-mean-correlation"}))
        ->capture_default_str();
    d->add_option("--tol", dec.tol, "Relative change tolerance on C and P")->capture_default_str();
    d->add_option("--max-iter", dec.max_iter)->capture_default_str();
    d->add_option("--penalty-graph", dec.penalty_graph, "Graph of the smoothness penalty")->capture_default_str();
    d->add_flag("--allow-negative", dec.allow_negative, "Accept negative entries in the input");
    d->add_flag("--literal-dual-update", dec.literal_dual, "Update duals with the previous iterates");
    auto* pre = d->add_flag("--preprocess", dec.preprocess, "Drop zero rows and rows outside the norm band");
    d->add_option("--min-row-quantile", dec.min_quantile)->needs(pre)->capture_default_str();
    d->add_option("--max-row-quantile", dec.max_quantile)->needs(pre)->capture_default_str();
    d->add_option("--top-genes", dec.top_genes, "Keep this many highest-variance genes")->needs(pre);

    SynthArgs syn;
    auto* s = app.add_subcommand("synth", "Generate a ground-truthed synthetic mixture");
    s->add_option("--n-genes", syn.n_genes)->capture_default_str();
    s->add_option("--n-samples", syn.n_samples)->capture_default_str();
    s->add_option("--k", syn.k)->capture_default_str();
    s->add_option("--split", syn.split, "N1,..,Nk,Nrest")->delimiter(',');
    s->add_option("--ndr", syn.ndr, "Noise-to-data ratio")->required();
    s->add_option("--tightness", syn.tightness, "Off-vertex spread of marker rows")->capture_default_str();
    s->add_option("--seed", syn.seed)->required();
    s->add_flag("--keep-negative", syn.keep_negative, "Do not clip noisy entries at zero");
    s->add_option("--out", syn.out)->required();

    BenchArgs ben;
    auto* b = app.add_subcommand("bench", "Synthetic benchmark over noise levels and seeds");
    b->add_option("--ndr-list", ben.ndrs)->delimiter(',')->capture_default_str();
    b->add_option("--seeds", ben.seeds)->delimiter(',')->capture_default_str();
    b->add_option("--n-genes", ben.n_genes)->capture_default_str();
    b->add_option("--n-samples", ben.n_samples)->capture_default_str();
    b->add_option("--k", ben.k)->capture_default_str();
    b->add_option("--split", ben.split, "N1,..,Nk,Nrest")->delimiter(',');
    b->add_option("--tightness", ben.tightness)->capture_default_str();
    add_graph_flags(b, ben.graph);
    b->add_option("--lambda-tilde", ben.lambda_tilde)->capture_default_str();
    b->add_option("--rho", ben.rho)->capture_default_str();
    b->add_option("--gamma", ben.gamma)->capture_default_str();
    b->add_option("--tol", ben.tol)->capture_default_str();
    b->add_option("--max-iter", ben.max_iter)->capture_default_str();
    b->add_option("--markers-per-cluster", ben.markers_per_cluster)->capture_default_str();
    b->add_option("--penalty-graph", ben.penalty_graph)->capture_default_str();
    b->add_flag("--no-run-files", ben.no_run_files, "Only write the summary tables");
    b->add_option("--out", ben.out)->required();
    // bench seeds are per-run; the shared --seed flag would conflict with them
    b->remove_option(b->get_option("--seed"));

    ClusterArgs clu;
    auto* c = app.add_subcommand("cluster", "Spectral clustering only");
    c->add_option("--input", clu.input)->required();
    c->add_option("--k", clu.k)->required();
    c->add_option("--out", clu.out)->required();
    add_graph_flags(c, clu.graph);
    c->add_flag("--allow-negative", clu.allow_negative);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*d) return run_deconvolve(dec);
        if (*s) return run_synth(syn);
        if (*b) return run_bench(ben);
        if (*c) return run_cluster(clu);
    } catch (const Failure& f) {
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "gsnmf: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_usage;
}
