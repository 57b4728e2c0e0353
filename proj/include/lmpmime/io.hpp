#ifndef LMPMIME_IO_HPP
#define LMPMIME_IO_HPP

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "embedding.hpp"
#include "evaluation.hpp"
#include "simulators.hpp"

namespace lmpmime {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ordered_json to_json(const MethodConfig& cfg) {
    ordered_json j;
    j["variant"] = variant_name(cfg.variant);
    j["L"] = cfg.max_lag;
    j["A"] = cfg.stop_threshold;
    j["m"] = cfg.strategy_factor;
    j["k_nn"] = cfg.est.k_nn;
    j["horizon"] = cfg.horizon;
    j["tie_jitter_scale"] = cfg.est.tie_jitter_scale;
    j["combination_budget"] = cfg.combination_budget;
    j["max_iterations"] = cfg.max_iterations;
    if (cfg.coeffs) {
        j["coeffs"] = {{"beta", cfg.coeffs->beta},
                       {"gamma", cfg.coeffs->gamma},
                       {"delta", cfg.coeffs->delta}};
    } else {
        j["coeffs"] = "adaptive";
    }
    return j;
}

inline ordered_json to_json(const SystemSpec& spec) {
    ordered_json j;
    j["system"] = system_name(spec.kind);
    j["n"] = spec.n;
    j["K"] = spec.k;
    j["coupling"] = spec.coupling;
    j["seed"] = spec.seed;
    j["burn_in"] = spec.burn_in;
    j["burn_in_time"] = spec.burn_in_time;
    return j;
}

inline ordered_json to_json(const ConfusionCounts& c) {
    return ordered_json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

inline ordered_json to_json(const Metrics& m) {
    return ordered_json{
        {"sensitivity", m.sensitivity}, {"specificity", m.specificity}, {"f1", m.f1}};
}

/// Batch summary with the full resolved configuration in the header block,
/// so every artifact is self-describing and re-runnable.
inline ordered_json summary_to_json(const BatchSummary& b, const SystemSpec& spec,
                                    const MethodConfig& cfg) {
    ordered_json j;
    j["config"]["input"] = to_json(spec);
    j["config"]["method"] = to_json(cfg);
    j["config"]["realizations"] = b.realizations;
    j["mean_R"] = to_json(b.mean_r);
    j["metrics"] = to_json(b.pooled_metrics);
    j["pooled_counts"] = to_json(b.pooled);
    ordered_json per = ordered_json::array();
    for (const auto& c : b.per_realization) per.push_back(to_json(c));
    j["per_realization_counts"] = per;
    ordered_json truth = ordered_json::array();
    for (std::size_t i = 0; i < b.truth.k; ++i)
        for (std::size_t jj = 0; jj < b.truth.k; ++jj)
            if (i != jj && b.truth.at(i, jj))
                truth.push_back(ordered_json::array({i + 1, jj + 1}));
    j["truth_edges"] = truth;
    return j;
}

inline ordered_json result_to_json(const CausalityResult& res, const MethodConfig& cfg) {
    ordered_json j;
    j["config"]["method"] = to_json(cfg);
    j["labels"] = res.labels;
    j["R"] = to_json(res.r);
    ordered_json embs = ordered_json::array();
    for (const auto& e : res.embeddings) {
        ordered_json je;
        ordered_json mem = ordered_json::array();
        for (const auto& m : e.members)
            mem.push_back(ordered_json{{"var", m.var_index}, {"lag", m.lag}});
        je["members"] = mem;
        je["final_joint_mi"] = e.final_joint_mi;
        je["iteration_cap_hit"] = e.iteration_cap_hit;
        ordered_json steps = ordered_json::array();
        for (const auto& s : e.log)
            steps.push_back(ordered_json{{"k", s.iteration},
                                         {"selected", s.selected},
                                         {"criterion", s.criterion_value},
                                         {"i_prev", s.i_prev},
                                         {"i_curr", s.i_curr},
                                         {"stop_ratio", s.stop_ratio},
                                         {"stopped", s.stopped}});
        je["log"] = steps;
        embs.push_back(std::move(je));
    }
    j["embeddings"] = embs;
    return j;
}

/// Grayscale heatmap as plain-text portable graymap, linearly scaled from 0
/// to the matrix maximum.
inline void write_pgm(std::ostream& out, const Matrix& m) {
    double mx = 0.0;
    for (double v : m.a) mx = std::max(mx, v);
    out << "P2\n" << m.cols << " " << m.rows << "\n255\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            int g = mx > 0.0 ? static_cast<int>(255.0 * m(i, j) / mx + 0.5) : 0;
            out << (j ? " " : "") << std::min(255, std::max(0, g));
        }
        out << "\n";
    }
}

inline void write_pgm_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_pgm(out, m);
}

inline std::string metrics_csv_header() {
    return "system,method,n,K,coupling,L,A,m,k_nn,realizations,sensitivity,specificity,f1";
}

inline std::string metrics_csv_row(const SystemSpec& spec, const MethodConfig& cfg,
                                   const BatchSummary& b) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << system_name(spec.kind) << "," << variant_name(cfg.variant) << "," << spec.n << ","
       << spec.k << "," << spec.coupling << "," << cfg.max_lag << "," << cfg.stop_threshold << ","
       << cfg.strategy_factor << "," << cfg.est.k_nn << "," << b.realizations << ","
       << b.pooled_metrics.sensitivity << "," << b.pooled_metrics.specificity << ","
       << b.pooled_metrics.f1;
    return os.str();
}

} // namespace lmpmime

#endif
