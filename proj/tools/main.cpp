// Command-line front end: simulate benchmark systems or ingest CSV series,
// run the coupling detectors, and write JSON summaries, CSV metric tables,
// and PGM heatmaps.

#include <CLI11.hpp>

#include <lmpmime/lmpmime.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace lmpmime;

namespace {

std::size_t worker_count() {
    if (const char* env = std::getenv("LMPMIME_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Parallel Monte-Carlo batch over realizations. Results are collected into
/// index-addressed slots and folded in realization order, so the aggregate is
/// byte-identical for any worker count.
BatchSummary run_batch_parallel(const SystemSpec& spec, const MethodConfig& cfg,
                                std::size_t n_realizations, std::size_t workers) {
    if (n_realizations < 1) throw std::invalid_argument("need at least one realization");
    struct Slot {
        Matrix r;
        GroundTruth truth;
    };
    std::vector<Slot> slots(n_realizations);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= n_realizations) return;
            try {
                SystemSpec s = spec;
                s.seed = splitmix64(spec.seed ^ r);
                auto [series, truth] = generate(s);
                slots[r].r = causality_matrix(series, cfg).r;
                slots[r].truth = truth;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n_realizations);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min(workers, n_realizations);
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    BatchSummary out;
    out.realizations = n_realizations;
    out.mean_r = Matrix(slots[0].r.rows, slots[0].r.cols, 0.0);
    out.truth = slots[0].truth;
    for (const auto& slot : slots) {
        for (std::size_t i = 0; i < slot.r.a.size(); ++i) out.mean_r.a[i] += slot.r.a[i];
        ConfusionCounts c = score_matrix(slot.r, slot.truth);
        out.per_realization.push_back(c);
        out.pooled += c;
    }
    for (double& v : out.mean_r.a) v /= static_cast<double>(n_realizations);
    out.pooled_metrics = metrics(out.pooled);
    return out;
}

struct CommonOpts {
    std::vector<std::string> methods{"lm-pmime"};
    int L = 5;
    double A = 0.95;
    int m = 2;
    int k_nn = 5;
    std::uint64_t seed = 1;
    std::string out = ".";
    std::vector<std::string> formats{"json", "csv"};
};

void add_method_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--method", o.methods, "method variant(s): pmime, m-pmime, lm-pmime")
        ->capture_default_str();
    cmd->add_option("--L", o.L, "maximum lag of the candidate set")->capture_default_str();
    cmd->add_option("--A", o.A, "stopping-rule threshold in (0,1)")->capture_default_str();
    cmd->add_option("--m", o.m, "strategy adjustment factor (subset sizes 2..m traversed)")
        ->capture_default_str();
    cmd->add_option("--k-nn", o.k_nn, "nearest-neighbor count of the estimator")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--format", o.formats, "output formats: json, csv, pgm")
        ->capture_default_str();
}

MethodConfig make_config(const CommonOpts& o, const std::string& method) {
    MethodConfig cfg;
    cfg.variant = parse_variant(method);
    cfg.max_lag = o.L;
    cfg.stop_threshold = o.A;
    cfg.strategy_factor = o.m;
    cfg.est.k_nn = o.k_nn;
    cfg.validate();
    return cfg;
}

bool wants(const CommonOpts& o, const std::string& fmt) {
    return std::find(o.formats.begin(), o.formats.end(), fmt) != o.formats.end();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

void run_simulated(const SystemSpec& spec, const CommonOpts& o, std::size_t realizations) {
    fs::create_directories(o.out);
    const std::size_t workers = worker_count();
    std::string csv = metrics_csv_header() + "\n";
    for (const auto& method : o.methods) {
        MethodConfig cfg = make_config(o, method);
        BatchSummary b = run_batch_parallel(spec, cfg, realizations, workers);
        const std::string stem =
            std::string(system_name(spec.kind)) + "_" + variant_name(cfg.variant);
        if (wants(o, "json")) {
            auto j = summary_to_json(b, spec, cfg);
            write_text(fs::path(o.out) / (stem + ".json"), j.dump(2) + "\n");
        }
        if (wants(o, "pgm")) write_pgm_file((fs::path(o.out) / (stem + ".pgm")).string(), b.mean_r);
        csv += metrics_csv_row(spec, cfg, b) + "\n";
        std::cout << stem << ": sensitivity=" << b.pooled_metrics.sensitivity
                  << " specificity=" << b.pooled_metrics.specificity
                  << " f1=" << b.pooled_metrics.f1 << "\n";
    }
    if (wants(o, "csv")) write_text(fs::path(o.out) / "metrics.csv", csv);
}

void analyze_file(const std::string& path, const CommonOpts& o, std::size_t downsample) {
    auto series = standardize(read_csv_file(path, downsample));
    fs::create_directories(o.out);
    const std::string base = fs::path(path).stem().string();
    for (const auto& method : o.methods) {
        MethodConfig cfg = make_config(o, method);
        CausalityResult res = causality_matrix(series, cfg);
        const std::string stem = base + "_" + variant_name(cfg.variant);
        if (wants(o, "json")) {
            auto j = result_to_json(res, cfg);
            write_text(fs::path(o.out) / (stem + ".json"), j.dump(2) + "\n");
        }
        if (wants(o, "pgm")) write_pgm_file((fs::path(o.out) / (stem + ".pgm")).string(), res.r);
        std::cout << stem << ": R matrix written";
        std::cout << " (drivers in rows, targets in columns)\n";
        for (std::size_t i = 0; i < res.r.rows; ++i) {
            for (std::size_t j = 0; j < res.r.cols; ++j)
                std::cout << (j ? " " : "  ") << res.r(i, j);
            std::cout << "\n";
        }
    }
}

struct Preset {
    SystemKind kind;
    std::size_t n;
    int k;
    double coupling;
    int L;
    double A;
    int m;
};

/// Named experiment presets. Defaults are desk scale (20 realizations);
/// --full-scale restores 100.
Preset preset_for(const std::string& name) {
    if (name == "table1") return {SystemKind::var5, 512, 5, 0.0, 6, 0.97, 2};
    if (name == "table2") return {SystemKind::nlvar3, 512, 3, 0.0, 6, 0.97, 3};
    if (name == "table3") return {SystemKind::henon, 1024, 3, 0.1, 5, 0.95, 2};
    if (name == "table4") return {SystemKind::henon, 1024, 3, 0.3, 5, 0.95, 2};
    if (name == "table5") return {SystemKind::lorenz3, 512, 3, 3.0, 5, 0.95, 3};
    if (name == "table6") return {SystemKind::lorenz3, 512, 3, 3.0, 5, 0.95, 3};
    throw std::invalid_argument("unknown experiment preset: " + name +
                                " (expected table1..table6)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"directed-coupling detection via non-uniform embedding"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; flags override file values");

    // run: simulate a benchmark system (or ingest a CSV) and score it
    CommonOpts run_opts;
    std::string run_system, run_csv;
    std::size_t run_n = 512, run_realizations = 20, run_downsample = 1;
    int run_k = 3;
    double run_coupling = 0.3;
    auto* run_cmd = app.add_subcommand("run", "simulate a system and score the detections");
    run_cmd->add_option("--system", run_system, "var5, nlvar3, henon, lorenz3");
    run_cmd->add_option("--csv", run_csv, "CSV input instead of a simulator");
    run_cmd->add_option("--n", run_n, "series length")->capture_default_str();
    run_cmd->add_option("--k", run_k, "variable count (henon)")->capture_default_str();
    run_cmd->add_option("--coupling", run_coupling, "coupling strength C")
        ->capture_default_str();
    run_cmd->add_option("--realizations", run_realizations, "Monte-Carlo realizations")
        ->capture_default_str();
    run_cmd->add_option("--downsample", run_downsample, "keep every q-th CSV row")
        ->capture_default_str();
    add_method_flags(run_cmd, run_opts);

    // analyze: causality matrix for an observed CSV
    CommonOpts an_opts;
    std::string an_csv;
    std::size_t an_downsample = 1;
    auto* an_cmd = app.add_subcommand("analyze", "estimate couplings in a CSV time series");
    an_cmd->add_option("--csv", an_csv, "input CSV (header row optional)")->required();
    an_cmd->add_option("--downsample", an_downsample, "keep every q-th row")
        ->capture_default_str();
    add_method_flags(an_cmd, an_opts);

    // reproduce: named experiment presets at desk scale
    CommonOpts rep_opts;
    std::string rep_name;
    std::size_t rep_realizations = 20, rep_n = 0;
    int rep_k = 0;
    double rep_coupling = -1.0;
    bool rep_full = false;
    auto* rep_cmd =
        app.add_subcommand("reproduce", "run a named benchmark preset (table1..table6)");
    rep_cmd->add_option("preset", rep_name, "table1..table6")->required();
    rep_cmd->add_option("--k", rep_k, "override variable count (henon presets)");
    rep_cmd->add_option("--n", rep_n, "override series length");
    rep_cmd->add_option("--coupling", rep_coupling, "override coupling strength");
    rep_cmd->add_option("--realizations", rep_realizations, "Monte-Carlo realizations")
        ->capture_default_str();
    rep_cmd->add_flag("--full-scale", rep_full, "use 100 realizations");
    rep_cmd->add_option("--seed", rep_opts.seed, "master seed")->capture_default_str();
    rep_cmd->add_option("--out", rep_opts.out, "output directory")->capture_default_str();
    rep_cmd->add_option("--format", rep_opts.formats, "output formats: json, csv, pgm")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            if (!run_csv.empty()) {
                analyze_file(run_csv, run_opts, run_downsample);
            } else {
                if (run_system.empty())
                    throw std::invalid_argument("run needs --system or --csv");
                SystemSpec spec;
                spec.kind = parse_system(run_system);
                spec.n = run_n;
                spec.k = run_k;
                spec.coupling = run_coupling;
                spec.seed = run_opts.seed;
                run_simulated(spec, run_opts, run_realizations);
            }
        } else if (an_cmd->parsed()) {
            analyze_file(an_csv, an_opts, an_downsample);
        } else if (rep_cmd->parsed()) {
            Preset p = preset_for(rep_name);
            SystemSpec spec;
            spec.kind = p.kind;
            spec.n = rep_n ? rep_n : p.n;
            spec.k = rep_k ? rep_k : p.k;
            spec.coupling = rep_coupling >= 0.0 ? rep_coupling : p.coupling;
            spec.seed = rep_opts.seed;
            rep_opts.methods = {"pmime", "m-pmime", "lm-pmime"};
            rep_opts.L = p.L;
            rep_opts.A = p.A;
            rep_opts.m = p.m;
            const std::size_t reals =
                rep_full && !rep_cmd->count("--realizations") ? 100 : rep_realizations;
            run_simulated(spec, rep_opts, reals);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
