#ifndef LMPMIME_EMBEDDING_HPP
#define LMPMIME_EMBEDDING_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "core.hpp"
#include "knn_mi.hpp"
#include "series.hpp"

namespace lmpmime {

enum class Variant { pmime, m_pmime, lm_pmime };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::pmime: return "pmime";
        case Variant::m_pmime: return "m-pmime";
        case Variant::lm_pmime: return "lm-pmime";
    }
    return "?";
}

inline Variant parse_variant(const std::string& s) {
    if (s == "pmime") return Variant::pmime;
    if (s == "m-pmime" || s == "mpmime") return Variant::m_pmime;
    if (s == "lm-pmime" || s == "lmpmime") return Variant::lm_pmime;
    throw std::invalid_argument("unknown method variant: " + s);
}

/// Fixed coefficient override for the parameterized selection criterion.
/// The default (no override) is the adaptive setting beta = gamma = 1/|v|,
/// delta = 1/(|v|(|v|-1)); fixed overrides expose the JMI/MRMR/CIFE-style
/// family.
struct CriterionCoeffs {
    double beta = 1.0;
    double gamma = 1.0;
    double delta = 0.0;
};

struct MethodConfig {
    Variant variant = Variant::lm_pmime;
    int max_lag = 5;               // L
    double stop_threshold = 0.95;  // A, must be in (0,1)
    int strategy_factor = 2;       // m; iterations 1 < k <= m use subset traversal
    EstimatorConfig est;
    std::optional<CriterionCoeffs> coeffs;
    int horizon = 1;
    long long combination_budget = 1'000'000;
    int max_iterations = 20;

    void validate() const {
        if (max_lag < 1) throw std::invalid_argument("L must be >= 1");
        if (!(stop_threshold > 0.0 && stop_threshold < 1.0))
            throw std::invalid_argument("stopping threshold A must be in (0,1)");
        if (strategy_factor < 1) throw std::invalid_argument("m must be >= 1");
        if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
        if (est.k_nn < 1) throw std::invalid_argument("k_nn must be >= 1");
    }
};

struct EmbeddingStep {
    int iteration;
    std::string selected;      // member or combination chosen at this step
    double criterion_value;    // score that drove the selection
    double i_prev;             // raw I(y; v^{k-1})
    double i_curr;             // raw I(y; v^k)
    double stop_ratio;         // clip(i_prev)/clip(i_curr), 0 at k = 1
    bool stopped;              // true on the final, rejected augmentation
};

struct EmbeddingVector {
    std::vector<LaggedVariable> members;
    std::vector<EmbeddingStep> log;
    double final_joint_mi = 0.0;  // stopping-rule estimate of I(y; v) for the returned members
    bool iteration_cap_hit = false;
};

struct CausalityResult {
    Matrix r;  // K x K, row = driver, column = target, zero diagonal
    std::vector<EmbeddingVector> embeddings;
    std::vector<std::string> labels;
};

/// Termination test: stop (and keep the previous vector) when the previous
/// joint MI retains more than fraction A of the augmented one. Estimates are
/// clipped at zero here; a non-positive augmented MI means nothing was gained
/// and always stops.
inline bool stopping_check(double i_prev, double i_curr, double a) {
    const double curr = std::max(i_curr, 0.0);
    if (curr <= 0.0) return true;
    return std::max(i_prev, 0.0) / curr > a;
}

inline long long binomial_capped(long long n, long long k, long long cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long c = 1;
    for (long long i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

/// Per-target working state: the aligned target/candidate columns plus caches
/// of the small MI/CMI terms the low-dimensional criterion reuses heavily.
class EmbeddingContext {
public:
    EmbeddingContext(const MultivariateSeries& series, int target_index, const MethodConfig& cfg)
        : cfg_(cfg), target_index_(target_index) {
        cfg.validate();
        candidates_ = build_candidate_set(static_cast<int>(series.k()), cfg.max_lag);
        aligned_ = align(series, target_index, candidates_, cfg.horizon);
        const std::size_t n = aligned_.n_eff();
        if (n <= static_cast<std::size_t>(cfg.est.k_nn))
            throw TooFewSamplesError("aligned sample too short for k_nn");
        y_ = Matrix(n, 1);
        for (std::size_t t = 0; t < n; ++t) y_(t, 0) = aligned_.target[t];
        labels_ = series.labels;
    }

    const std::vector<LaggedVariable>& candidates() const { return candidates_; }
    const MethodConfig& config() const { return cfg_; }
    int target_index() const { return target_index_; }
    std::size_t n_eff() const { return aligned_.n_eff(); }
    const Matrix& target_block() const { return y_; }

    Matrix column(std::size_t c) const { return subset({c}); }

    Matrix subset(const std::vector<std::size_t>& cs) const {
        Matrix out(aligned_.n_eff(), cs.size());
        for (std::size_t k = 0; k < cs.size(); ++k)
            for (std::size_t t = 0; t < out.rows; ++t) out(t, k) = aligned_.columns(t, cs[k]);
        return out;
    }

    std::string candidate_name(std::size_t c) const { return candidates_[c].name(labels_); }

    /// I(y; w_c), cached.
    double mi_with_target(std::size_t c) const {
        auto it = mi_y_.find(c);
        if (it != mi_y_.end()) return it->second;
        double v = mutual_information(y_, column(c), cfg_.est);
        mi_y_.emplace(c, v);
        return v;
    }

    /// I(w_a; w_b), cached (symmetric).
    double mi_pair(std::size_t a, std::size_t b) const {
        auto key = std::minmax(a, b);
        auto it = mi_ww_.find(key);
        if (it != mi_ww_.end()) return it->second;
        double v = mutual_information(column(key.first), column(key.second), cfg_.est);
        mi_ww_.emplace(key, v);
        return v;
    }

    /// I(w_a; w_b | y), cached (symmetric in a, b).
    double cmi_pair_given_target(std::size_t a, std::size_t b) const {
        auto key = std::minmax(a, b);
        auto it = cmi_wwy_.find(key);
        if (it != cmi_wwy_.end()) return it->second;
        double v = conditional_mutual_information(column(key.first), column(key.second), y_, cfg_.est);
        cmi_wwy_.emplace(key, v);
        return v;
    }

    /// I(w_a; w_b | w_c), cached (symmetric in a, b).
    double cmi_pair_given_member(std::size_t a, std::size_t b, std::size_t c) const {
        auto mm = std::minmax(a, b);
        auto key = std::make_tuple(mm.first, mm.second, c);
        auto it = cmi_www_.find(key);
        if (it != cmi_www_.end()) return it->second;
        double v = conditional_mutual_information(column(mm.first), column(mm.second), column(c), cfg_.est);
        cmi_www_.emplace(key, v);
        return v;
    }

    /// Joint MI I(y; {w_c : c in cs}).
    double joint_mi(const std::vector<std::size_t>& cs) const {
        return mutual_information(y_, subset(cs), cfg_.est);
    }

    /// Full CMI I(y; w_c | {members}).
    double cmi_given_members(std::size_t c, const std::vector<std::size_t>& members) const {
        return conditional_mutual_information(y_, column(c), subset(members), cfg_.est);
    }

private:
    MethodConfig cfg_;
    int target_index_;
    std::vector<LaggedVariable> candidates_;
    AlignedSample aligned_;
    Matrix y_;
    std::vector<std::string> labels_;

    mutable std::map<std::size_t, double> mi_y_;
    mutable std::map<std::pair<std::size_t, std::size_t>, double> mi_ww_;
    mutable std::map<std::pair<std::size_t, std::size_t>, double> cmi_wwy_;
    mutable std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> cmi_www_;
};

/// First component: the candidate with maximal I(y; w). Ties break to the
/// earliest candidate in set order.
inline std::size_t select_first(const EmbeddingContext& ctx,
                                const std::vector<std::size_t>& remaining, double* score = nullptr) {
    if (remaining.empty()) throw std::invalid_argument("candidate set is empty");
    std::size_t best = remaining.front();
    double best_v = ctx.mi_with_target(best);
    for (std::size_t i = 1; i < remaining.size(); ++i) {
        double v = ctx.mi_with_target(remaining[i]);
        if (v > best_v) {
            best_v = v;
            best = remaining[i];
        }
    }
    if (score) *score = best_v;
    return best;
}

/// Greedy augmentation scored by the full conditional mutual information
/// I(y; w | v^{k-1}).
inline std::size_t greedy_step_cmi(const EmbeddingContext& ctx,
                                   const std::vector<std::size_t>& remaining,
                                   const std::vector<std::size_t>& members, double* score = nullptr) {
    if (remaining.empty()) throw std::invalid_argument("no remaining candidates");
    if (members.empty()) throw std::invalid_argument("embedding must be nonempty");
    std::size_t best = remaining.front();
    double best_v = ctx.cmi_given_members(best, members);
    for (std::size_t i = 1; i < remaining.size(); ++i) {
        double v = ctx.cmi_given_members(remaining[i], members);
        if (v > best_v) {
            best_v = v;
            best = remaining[i];
        }
    }
    if (score) *score = best_v;
    return best;
}

/// Low-dimensional criterion for candidate w against the current embedding:
///   I(w;y) - beta*sum I(w;w_i) + gamma*sum I(w;w_i|y) - delta*sum_{i!=j} I(w;w_j|w_i)
/// with adaptive beta = gamma = 1/|v| and delta = 1/(|v|(|v|-1)) unless fixed
/// coefficients are configured. Every term involves at most three scalar
/// blocks.
inline double lowdim_score(const EmbeddingContext& ctx, std::size_t w,
                           const std::vector<std::size_t>& members) {
    double s = ctx.mi_with_target(w);
    const std::size_t v = members.size();
    if (v == 0) return s;

    double beta, gamma, delta;
    if (ctx.config().coeffs) {
        beta = ctx.config().coeffs->beta;
        gamma = ctx.config().coeffs->gamma;
        delta = ctx.config().coeffs->delta;
    } else {
        beta = gamma = 1.0 / static_cast<double>(v);
        delta = v > 1 ? 1.0 / (static_cast<double>(v) * static_cast<double>(v - 1)) : 0.0;
    }

    for (std::size_t i : members) {
        s -= beta * ctx.mi_pair(w, i);
        s += gamma * ctx.cmi_pair_given_target(w, i);
    }
    if (v > 1 && delta != 0.0) {
        for (std::size_t i : members)
            for (std::size_t j : members) {
                if (i == j) continue;
                s -= delta * ctx.cmi_pair_given_member(w, j, i);
            }
    }
    return s;
}

/// Traversal phase of the mixed strategy: discard the current embedding and
/// exhaustively score every k-subset of the full candidate set by its joint
/// MI with the target. Ties break to the lexicographically first subset.
inline std::vector<std::size_t> traversal_step(const EmbeddingContext& ctx, int k,
                                               double* score = nullptr) {
    const long long total = static_cast<long long>(ctx.candidates().size());
    if (k <= 1 || k > total) throw std::invalid_argument("traversal needs 1 < k <= K*L");
    if (binomial_capped(total, k, ctx.config().combination_budget) >
        ctx.config().combination_budget)
        throw CombinationBudgetError("C(K*L, k) exceeds the combination budget");

    std::vector<std::size_t> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    std::vector<std::size_t> best = comb;
    double best_v = ctx.joint_mi(comb);

    auto next_comb = [&]() -> bool {
        int i = k - 1;
        while (i >= 0 &&
               comb[static_cast<std::size_t>(i)] ==
                   static_cast<std::size_t>(total - k + i))
            --i;
        if (i < 0) return false;
        ++comb[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        return true;
    };

    while (next_comb()) {
        double v = ctx.joint_mi(comb);
        if (v > best_v) {
            best_v = v;
            best = comb;
        }
    }
    if (score) *score = best_v;
    return best;
}

namespace detail {
inline std::string subset_name(const EmbeddingContext& ctx, const std::vector<std::size_t>& cs) {
    std::string s;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) s += "+";
        s += ctx.candidate_name(cs[i]);
    }
    return s;
}
} // namespace detail

/// Build the mixed embedding vector for one target under the configured
/// variant. PMIME: greedy full-CMI steps throughout. M-PMIME: exhaustive
/// subset traversal while 1 < k <= m, greedy full-CMI afterwards. LM-PMIME:
/// same traversal phase, then greedy steps ranked by the low-dimensional
/// criterion. The ratio test on successive joint MI values runs after every
/// augmentation and the pre-augmentation vector is returned when it fires.
inline EmbeddingVector build_embedding_ctx(const EmbeddingContext& ctx) {
    const MethodConfig& cfg = ctx.config();
    const std::size_t total = ctx.candidates().size();
    EmbeddingVector out;

    std::vector<std::size_t> members;
    std::vector<std::size_t> remaining(total);
    for (std::size_t i = 0; i < total; ++i) remaining[i] = i;

    double first_score = 0.0;
    std::size_t w1 = select_first(ctx, remaining, &first_score);
    members.push_back(w1);
    remaining.erase(std::find(remaining.begin(), remaining.end(), w1));
    double i_prev = first_score;  // I(y; w1)
    out.log.push_back({1, ctx.candidate_name(w1), first_score, 0.0, i_prev, 0.0, false});

    const int iter_cap = std::min<int>(cfg.max_iterations, static_cast<int>(total));
    int k = 2;
    for (; k <= iter_cap; ++k) {
        const bool traversal =
            cfg.variant != Variant::pmime && k <= cfg.strategy_factor;

        std::vector<std::size_t> next_members;
        std::string selected;
        double criterion = 0.0;
        if (traversal) {
            next_members = traversal_step(ctx, k, &criterion);
            selected = detail::subset_name(ctx, next_members);
        } else {
            if (remaining.empty()) break;
            std::size_t w;
            if (cfg.variant == Variant::lm_pmime) {
                w = remaining.front();
                criterion = lowdim_score(ctx, w, members);
                for (std::size_t i = 1; i < remaining.size(); ++i) {
                    double v = lowdim_score(ctx, remaining[i], members);
                    if (v > criterion) {
                        criterion = v;
                        w = remaining[i];
                    }
                }
            } else {
                w = greedy_step_cmi(ctx, remaining, members, &criterion);
            }
            next_members = members;
            next_members.push_back(w);
            selected = ctx.candidate_name(w);
        }

        // Stopping-rule value I(y; v^k). Traversal subsets and the full-CMI
        // variants re-estimate the joint MI directly. LM-PMIME instead
        // updates it through the chain rule with the low-dimensional
        // criterion as the information gain: the direct estimate shrinks as
        // the embedding dimension grows, which would mask exactly the weak
        // couplings the low-dimensional decomposition is there to recover.
        double i_curr;
        if (traversal) i_curr = criterion;
        else if (cfg.variant == Variant::lm_pmime) i_curr = i_prev + std::max(criterion, 0.0);
        else i_curr = ctx.joint_mi(next_members);
        const double curr_clip = std::max(i_curr, 0.0);
        const double ratio = curr_clip > 0.0 ? std::max(i_prev, 0.0) / curr_clip : 0.0;
        const bool stop =
            traversal ? false : stopping_check(i_prev, i_curr, cfg.stop_threshold);
        out.log.push_back({k, selected, criterion, i_prev, i_curr, ratio, stop});
        if (stop) break;

        members = next_members;
        remaining.clear();
        for (std::size_t i = 0; i < total; ++i)
            if (std::find(members.begin(), members.end(), i) == members.end())
                remaining.push_back(i);
        i_prev = i_curr;
    }
    if (k > iter_cap && iter_cap == cfg.max_iterations) out.iteration_cap_hit = true;

    out.final_joint_mi = i_prev;
    out.members.reserve(members.size());
    for (std::size_t c : members) out.members.push_back(ctx.candidates()[c]);
    return out;
}

inline EmbeddingVector build_embedding(const MultivariateSeries& standardized_series,
                                       int target_index, const MethodConfig& cfg) {
    EmbeddingContext ctx(standardized_series, target_index, cfg);
    return build_embedding_ctx(ctx);
}

/// Causality strength R for one (driver -> target) pair given the target's
/// embedding: the clipped share I(y; v^driver | v^rest) / I(y; v). Exactly
/// zero when no lag of the driver was embedded or when the denominator holds
/// no information.
inline double causality_index(const EmbeddingContext& ctx, const EmbeddingVector& emb,
                              int driver_index) {
    std::vector<std::size_t> driver_cols, other_cols, all_cols;
    const auto& cands = ctx.candidates();
    for (const auto& m : emb.members) {
        auto it = std::find(cands.begin(), cands.end(), m);
        std::size_t c = static_cast<std::size_t>(it - cands.begin());
        all_cols.push_back(c);
        if (m.var_index == driver_index) driver_cols.push_back(c);
        else other_cols.push_back(c);
    }
    if (driver_cols.empty()) return 0.0;

    const double denom = ctx.joint_mi(all_cols);
    if (denom <= 0.0) return 0.0;
    const double numer = conditional_mutual_information(
        ctx.target_block(), ctx.subset(driver_cols), ctx.subset(other_cols), ctx.config().est);
    return std::max(numer, 0.0) / denom;
}

/// One embedding per target, R filled with row = driver, column = target.
/// The series is standardized once up front.
inline CausalityResult causality_matrix(const MultivariateSeries& series, const MethodConfig& cfg) {
    const MultivariateSeries s = standardize(series);
    const std::size_t kvars = s.k();
    CausalityResult out;
    out.r = Matrix(kvars, kvars, 0.0);
    out.embeddings.resize(kvars);
    out.labels = s.labels;
    for (std::size_t target = 0; target < kvars; ++target) {
        EmbeddingContext ctx(s, static_cast<int>(target), cfg);
        out.embeddings[target] = build_embedding_ctx(ctx);
        for (std::size_t driver = 0; driver < kvars; ++driver) {
            if (driver == target) continue;
            out.r(driver, target) =
                causality_index(ctx, out.embeddings[target], static_cast<int>(driver));
        }
    }
    return out;
}

} // namespace lmpmime

#endif
