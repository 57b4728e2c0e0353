#ifndef LMPMIME_EVALUATION_HPP
#define LMPMIME_EVALUATION_HPP

#include <cstddef>
#include <vector>

#include "core.hpp"
#include "embedding.hpp"
#include "simulators.hpp"

namespace lmpmime {

struct ConfusionCounts {
    long tp = 0, fp = 0, tn = 0, fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    long total() const { return tp + fp + tn + fn; }
};

struct Metrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
};

/// Tally predicted-positive (R > 0) against the ground-truth adjacency over
/// all ordered off-diagonal pairs.
inline ConfusionCounts score_matrix(const Matrix& r, const GroundTruth& truth) {
    if (r.rows != truth.k || r.cols != truth.k)
        throw ShapeMismatchError("causality matrix does not match truth size");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.k; ++i)
        for (std::size_t j = 0; j < truth.k; ++j) {
            if (i == j) continue;
            const bool predicted = r(i, j) > 0.0;
            const bool actual = truth.at(i, j);
            if (predicted && actual) ++c.tp;
            else if (predicted && !actual) ++c.fp;
            else if (!predicted && actual) ++c.fn;
            else ++c.tn;
        }
    return c;
}

/// sensitivity = TP/(TP+FN), specificity = TN/(TN+FP), F1 = 2TP/(2TP+FP+FN).
/// A 0/0 denominator yields 0 rather than NaN.
inline Metrics metrics(const ConfusionCounts& c) {
    Metrics m;
    m.sensitivity = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.specificity = (c.tn + c.fp) > 0 ? static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp) : 0.0;
    const long f1_den = 2 * c.tp + c.fp + c.fn;
    m.f1 = f1_den > 0 ? 2.0 * static_cast<double>(c.tp) / static_cast<double>(f1_den) : 0.0;
    return m;
}

struct BatchSummary {
    Matrix mean_r;                                  // element-wise mean over realizations
    ConfusionCounts pooled;                         // summed counts
    Metrics pooled_metrics;                         // metrics of pooled counts
    std::vector<ConfusionCounts> per_realization;   // kept for comparison
    GroundTruth truth;
    std::size_t realizations = 0;
};

/// Monte-Carlo batch: realization r draws the stream seed XOR r, so results
/// do not depend on execution order. Metrics are computed on pooled counts.
inline BatchSummary run_batch(const SystemSpec& spec, const MethodConfig& cfg,
                              std::size_t n_realizations) {
    if (n_realizations < 1) throw std::invalid_argument("need at least one realization");
    BatchSummary out;
    out.realizations = n_realizations;
    for (std::size_t r = 0; r < n_realizations; ++r) {
        SystemSpec s = spec;
        s.seed = splitmix64(spec.seed ^ r);
        auto [series, truth] = generate(s);
        CausalityResult res = causality_matrix(series, cfg);
        if (out.mean_r.empty()) {
            out.mean_r = Matrix(res.r.rows, res.r.cols, 0.0);
            out.truth = truth;
        }
        for (std::size_t i = 0; i < res.r.a.size(); ++i) out.mean_r.a[i] += res.r.a[i];
        ConfusionCounts c = score_matrix(res.r, truth);
        out.per_realization.push_back(c);
        out.pooled += c;
    }
    for (double& v : out.mean_r.a) v /= static_cast<double>(n_realizations);
    out.pooled_metrics = metrics(out.pooled);
    return out;
}

} // namespace lmpmime

#endif
