#ifndef LMPMIME_SERIES_HPP
#define LMPMIME_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace lmpmime {

/// K channels by n samples of real-valued observations.
struct MultivariateSeries {
    Matrix data;                      // n rows (samples) x K columns (variables)
    std::vector<std::string> labels;  // size K

    std::size_t n() const { return data.rows; }
    std::size_t k() const { return data.cols; }

    void validate() const {
        if (data.rows < 2 || data.cols < 2)
            throw std::invalid_argument("series needs n >= 2 and K >= 2");
        for (double v : data.a)
            if (!std::isfinite(v)) throw NonFiniteError("series contains NaN/Inf");
        if (labels.size() != data.cols)
            throw std::invalid_argument("label count does not match column count");
    }
};

inline std::vector<std::string> default_labels(std::size_t k) {
    std::vector<std::string> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) out.push_back("x" + std::to_string(j + 1));
    return out;
}

/// A (variable index, lag) pair, the atoms of the candidate set.
struct LaggedVariable {
    int var_index;  // in [0, K)
    int lag;        // in [1, L]

    friend bool operator==(const LaggedVariable& a, const LaggedVariable& b) {
        return a.var_index == b.var_index && a.lag == b.lag;
    }
    friend bool operator<(const LaggedVariable& a, const LaggedVariable& b) {
        if (a.var_index != b.var_index) return a.var_index < b.var_index;
        return a.lag < b.lag;
    }
    std::string name(const std::vector<std::string>& labels) const {
        return labels[static_cast<std::size_t>(var_index)] + "(t-" + std::to_string(lag) + ")";
    }
};

/// Columns of lagged candidates aligned with the one-step-ahead target.
/// Row t of every column refers to the same physical time: column (j, tau)
/// holds data[t + L - tau][j] and the target holds data[t + L + h - 1][target].
struct AlignedSample {
    std::vector<double> target;            // length n_eff
    std::vector<LaggedVariable> order;     // column identities, candidate order
    Matrix columns;                        // n_eff x |order|

    std::size_t n_eff() const { return target.size(); }
};

/// Column-standardize to zero mean, unit (n-1 denominator) standard deviation.
inline MultivariateSeries standardize(const MultivariateSeries& s) {
    s.validate();
    MultivariateSeries out = s;
    const std::size_t n = s.n(), k = s.k();
    for (std::size_t j = 0; j < k; ++j) {
        double mean = 0.0;
        for (std::size_t t = 0; t < n; ++t) mean += s.data(t, j);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double d = s.data(t, j) - mean;
            ss += d * d;
        }
        double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd == 0.0) throw ConstantColumnError(j);
        for (std::size_t t = 0; t < n; ++t) out.data(t, j) = (s.data(t, j) - mean) / sd;
    }
    return out;
}

/// All K*L strictly-past candidates in deterministic order:
/// (var 0 lag 1), (var 0 lag 2), ..., (var K-1 lag L).
inline std::vector<LaggedVariable> build_candidate_set(int k, int l) {
    if (k < 2 || l < 1) throw std::invalid_argument("build_candidate_set needs K >= 2, L >= 1");
    std::vector<LaggedVariable> out;
    out.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(l));
    for (int j = 0; j < k; ++j)
        for (int tau = 1; tau <= l; ++tau) out.push_back({j, tau});
    return out;
}

inline AlignedSample align(const MultivariateSeries& s, int target_index,
                           const std::vector<LaggedVariable>& candidates, int horizon = 1) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    int l = 0;
    for (const auto& c : candidates) l = std::max(l, c.lag);
    const long n = static_cast<long>(s.n());
    const long n_eff = n - l - (horizon - 1);
    if (n_eff < 1) throw SeriesTooShortError("series too short for max lag " + std::to_string(l));

    AlignedSample out;
    out.order = candidates;
    out.target.resize(static_cast<std::size_t>(n_eff));
    out.columns = Matrix(static_cast<std::size_t>(n_eff), candidates.size());
    const std::size_t ti = static_cast<std::size_t>(target_index);
    for (long t = 0; t < n_eff; ++t)
        out.target[static_cast<std::size_t>(t)] =
            s.data(static_cast<std::size_t>(t + l + horizon - 1), ti);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const std::size_t j = static_cast<std::size_t>(candidates[c].var_index);
        const long tau = candidates[c].lag;
        for (long t = 0; t < n_eff; ++t)
            out.columns(static_cast<std::size_t>(t), c) =
                s.data(static_cast<std::size_t>(t + l - tau), j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion: optional header row with labels, one sample per row,
// comma-separated decimals. Missing values are a hard error.
// ---------------------------------------------------------------------------

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}
inline bool parse_double(const std::string& s, double& out) {
    std::size_t pos = 0;
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return false;
    std::size_t e = s.find_last_not_of(" \t\r");
    std::string trimmed = s.substr(b, e - b + 1);
    try {
        out = std::stod(trimmed, &pos);
    } catch (...) {
        return false;
    }
    return pos == trimmed.size();
}
} // namespace detail

/// Parse a series from CSV text. `downsample` keeps every q-th data row.
inline MultivariateSeries read_csv(std::istream& in, int downsample = 1) {
    if (downsample < 1) throw std::invalid_argument("downsample factor must be >= 1");
    std::string line;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::size_t line_no = 0;
    bool first = true;
    std::size_t width = 0;
    long data_row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (first) {
            first = false;
            width = fields.size();
            double v;
            if (!detail::parse_double(fields[0], v)) {  // header row
                labels.assign(fields.begin(), fields.end());
                continue;
            }
        }
        if (fields.size() != width)
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(width) + " fields, got " +
                                     std::to_string(fields.size()));
        std::vector<double> row(width);
        for (std::size_t j = 0; j < width; ++j) {
            if (!detail::parse_double(fields[j], row[j]))
                throw std::runtime_error("csv line " + std::to_string(line_no) +
                                         ": bad or missing value in field " + std::to_string(j + 1));
        }
        if (data_row % downsample == 0) rows.push_back(std::move(row));
        ++data_row;
    }
    if (rows.empty()) throw std::runtime_error("csv: no data rows");
    MultivariateSeries s;
    s.data = Matrix(rows.size(), width);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t j = 0; j < width; ++j) s.data(t, j) = rows[t][j];
    s.labels = labels.empty() ? default_labels(width) : labels;
    s.validate();
    return s;
}

inline MultivariateSeries read_csv_file(const std::string& path, int downsample = 1) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv(in, downsample);
}

inline void write_csv(std::ostream& out, const MultivariateSeries& s) {
    for (std::size_t j = 0; j < s.k(); ++j) out << (j ? "," : "") << s.labels[j];
    out << "\n";
    out.precision(17);
    for (std::size_t t = 0; t < s.n(); ++t) {
        for (std::size_t j = 0; j < s.k(); ++j) out << (j ? "," : "") << s.data(t, j);
        out << "\n";
    }
}

inline void write_csv_file(const std::string& path, const MultivariateSeries& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(out, s);
}

} // namespace lmpmime

#endif
