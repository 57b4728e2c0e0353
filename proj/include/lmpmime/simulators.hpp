#ifndef LMPMIME_SIMULATORS_HPP
#define LMPMIME_SIMULATORS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "rng.hpp"
#include "series.hpp"

namespace lmpmime {

enum class SystemKind { var5, nlvar3, henon, lorenz3 };

inline const char* system_name(SystemKind k) {
    switch (k) {
        case SystemKind::var5: return "var5";
        case SystemKind::nlvar3: return "nlvar3";
        case SystemKind::henon: return "henon";
        case SystemKind::lorenz3: return "lorenz3";
    }
    return "?";
}

inline SystemKind parse_system(const std::string& s) {
    if (s == "var5") return SystemKind::var5;
    if (s == "nlvar3") return SystemKind::nlvar3;
    if (s == "henon") return SystemKind::henon;
    if (s == "lorenz3" || s == "lorenz") return SystemKind::lorenz3;
    throw std::invalid_argument("unknown system: " + s);
}

/// Directed coupling graph of a generating system: row = driver, col = target.
struct GroundTruth {
    std::size_t k = 0;
    std::vector<std::uint8_t> adj;  // k*k, diagonal unused

    GroundTruth() = default;
    explicit GroundTruth(std::size_t kk) : k(kk), adj(kk * kk, 0) {}

    bool at(std::size_t driver, std::size_t target) const { return adj[driver * k + target] != 0; }
    void set(std::size_t driver, std::size_t target) { adj[driver * k + target] = 1; }
};

struct SystemSpec {
    SystemKind kind = SystemKind::henon;
    std::size_t n = 512;
    int k = 3;            // variable count (henon only)
    double coupling = 0.3;  // C (henon, lorenz3)
    std::uint64_t seed = 1;
    long burn_in = 1000;          // samples discarded (maps / VAR)
    double burn_in_time = 100.0;  // time units discarded (lorenz3)
};

namespace detail {

inline MultivariateSeries rows_to_series(const std::vector<std::vector<double>>& rows,
                                         std::size_t kvars) {
    MultivariateSeries s;
    s.data = Matrix(rows.size(), kvars);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t j = 0; j < kvars; ++j) s.data(t, j) = rows[t][j];
    s.labels = default_labels(kvars);
    return s;
}

} // namespace detail

/// Linear VAR process of order 4 in 5 variables with standard-normal
/// innovations, zero initial history.
inline std::pair<MultivariateSeries, GroundTruth> gen_var5(std::size_t n, std::uint64_t seed,
                                                           long burn_in = 1000) {
    if (n < 64) throw std::invalid_argument("n must be >= 64");
    Rng rng(seed);
    const long total = static_cast<long>(n) + burn_in;
    const long order = 4;
    std::vector<std::array<double, 5>> x(static_cast<std::size_t>(total + order),
                                         {0, 0, 0, 0, 0});
    for (long t = order; t < total + order; ++t) {
        auto& c = x[static_cast<std::size_t>(t)];
        const auto& p1 = x[static_cast<std::size_t>(t - 1)];
        const auto& p2 = x[static_cast<std::size_t>(t - 2)];
        const auto& p3 = x[static_cast<std::size_t>(t - 3)];
        const auto& p4 = x[static_cast<std::size_t>(t - 4)];
        c[0] = 0.4 * p1[0] - 0.5 * p2[0] + 0.4 * p1[4] + rng.normal();
        c[1] = 0.4 * p1[1] - 0.3 * p4[0] + 0.4 * p2[4] + rng.normal();
        c[2] = 0.5 * p1[2] - 0.7 * p2[2] - 0.3 * p3[4] + rng.normal();
        c[3] = 0.8 * p3[3] + 0.4 * p2[0] + 0.3 * p2[1] + rng.normal();
        c[4] = 0.7 * p1[4] - 0.5 * p2[4] - 0.4 * p1[3] + rng.normal();
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (long t = burn_in + order; t < total + order; ++t)
        rows.push_back({x[static_cast<std::size_t>(t)].begin(), x[static_cast<std::size_t>(t)].end()});
    GroundTruth truth(5);
    truth.set(0, 1);
    truth.set(0, 3);
    truth.set(1, 3);
    truth.set(3, 4);
    truth.set(4, 0);
    truth.set(4, 1);
    truth.set(4, 2);
    return {detail::rows_to_series(rows, 5), truth};
}

/// Nonlinear VAR process of order 1 in three variables, noise scaled by 0.4.
inline std::pair<MultivariateSeries, GroundTruth> gen_nlvar3(std::size_t n, std::uint64_t seed,
                                                             long burn_in = 1000) {
    if (n < 64) throw std::invalid_argument("n must be >= 64");
    Rng rng(seed);
    auto f = [](double x) { return 3.4 * x * (1.0 - x * x) * std::exp(-x * x); };
    const long total = static_cast<long>(n) + burn_in;
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (long t = 0; t < total; ++t) {
        const double n1 = f(x1) + 0.4 * rng.normal();
        const double n2 = f(x2) + 0.5 * x1 * x2 + 0.4 * rng.normal();
        const double n3 = f(x3) + 0.3 * x2 + 0.5 * x1 * x1 + 0.4 * rng.normal();
        x1 = n1;
        x2 = n2;
        x3 = n3;
        if (t >= burn_in) rows.push_back({x1, x2, x3});
    }
    GroundTruth truth(3);
    truth.set(0, 1);
    truth.set(0, 2);
    truth.set(1, 2);
    return {detail::rows_to_series(rows, 3), truth};
}

/// K coupled Henon maps in a driver chain: map 1 autonomous, map i >= 2
/// driven through the convex combination C*x_{i-1,t-1} + (1-C)*x_{i,t-1}.
/// Divergent trajectories trigger a bounded re-draw of initial conditions.
inline std::pair<MultivariateSeries, GroundTruth> gen_henon(int kvars, double coupling,
                                                            std::size_t n, std::uint64_t seed,
                                                            long burn_in = 1000) {
    if (kvars < 2) throw std::invalid_argument("henon needs K >= 2");
    if (coupling < 0.0 || coupling > 1.0) throw std::invalid_argument("C must be in [0,1]");
    if (n < 64) throw std::invalid_argument("n must be >= 64");
    Rng rng(seed);
    const std::size_t kk = static_cast<std::size_t>(kvars);
    const long total = static_cast<long>(n) + burn_in;
    const int max_retries = 100;

    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<double> prev1(kk), prev2(kk);
        for (std::size_t j = 0; j < kk; ++j) prev2[j] = rng.uniform(-0.1, 0.1);
        for (std::size_t j = 0; j < kk; ++j) prev1[j] = rng.uniform(-0.1, 0.1);
        std::vector<std::vector<double>> rows;
        rows.reserve(n);
        bool diverged = false;
        std::vector<double> cur(kk);
        for (long t = 0; t < total && !diverged; ++t) {
            cur[0] = 1.4 - prev1[0] * prev1[0] + 0.3 * prev2[0];
            for (std::size_t j = 1; j < kk; ++j) {
                const double drive = coupling * prev1[j - 1] + (1.0 - coupling) * prev1[j];
                cur[j] = 1.4 - drive * drive + 0.3 * prev2[j];
            }
            for (std::size_t j = 0; j < kk; ++j)
                if (!(std::fabs(cur[j]) <= 1e5)) diverged = true;
            if (diverged) break;
            prev2 = prev1;
            prev1 = cur;
            if (t >= burn_in) rows.push_back(cur);
        }
        if (!diverged) {
            GroundTruth truth(kk);
            for (std::size_t j = 1; j < kk; ++j) truth.set(j - 1, j);
            return {detail::rows_to_series(rows, kk), truth};
        }
    }
    throw DivergedError("henon trajectory diverged after max retries");
}

namespace detail {

/// One adaptive Dormand-Prince 5(4) step attempt. Returns the accepted state
/// or adjusts h; used by the Lorenz generator only.
template <std::size_t D, typename F>
void rk45_integrate(F&& deriv, std::array<double, D>& state, double t0, double t1, double rtol,
                    double atol, double& h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    std::array<double, D> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    while (t < t1) {
        if (h < 1e-12) throw IntegrationError("rk45 step size underflow");
        double hs = std::min(h, t1 - t);
        deriv(state, k1);
        for (std::size_t i = 0; i < D; ++i) tmp[i] = state[i] + hs * a21 * k1[i];
        deriv(tmp, k2);
        for (std::size_t i = 0; i < D; ++i)
            tmp[i] = state[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        deriv(tmp, k3);
        for (std::size_t i = 0; i < D; ++i)
            tmp[i] = state[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        deriv(tmp, k4);
        for (std::size_t i = 0; i < D; ++i)
            tmp[i] = state[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        deriv(tmp, k5);
        for (std::size_t i = 0; i < D; ++i)
            tmp[i] = state[i] +
                     hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        deriv(tmp, k6);
        for (std::size_t i = 0; i < D; ++i)
            ynew[i] = state[i] +
                      hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        deriv(ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::fabs(state[i]), std::fabs(ynew[i]));
            const double q = e / sc;
            err += q * q;
        }
        err = std::sqrt(err / static_cast<double>(D));

        if (err <= 1.0) {
            t += hs;
            state = ynew;
        }
        const double fac =
            err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        h = hs * fac;
    }
    (void)c2; (void)c3; (void)c4; (void)c5;
}

} // namespace detail

/// Three coupled identical Lorenz oscillators; only the x-components are
/// observed, sampled every 0.05 time units after the burn-in interval.
/// Coupling C enters the x-equation of oscillators 2 and 3 as C(x_{i-1}-x_i).
inline std::pair<MultivariateSeries, GroundTruth> gen_lorenz3(double coupling, std::size_t n,
                                                              std::uint64_t seed,
                                                              double burn_in_time = 100.0,
                                                              double rtol = 1e-6,
                                                              double atol = 1e-9) {
    if (coupling < 0.0) throw std::invalid_argument("C must be >= 0");
    if (n < 64) throw std::invalid_argument("n must be >= 64");
    Rng rng(seed);
    // state = (x1,y1,z1, x2,y2,z2, x3,y3,z3)
    std::array<double, 9> s;
    for (double& v : s) v = rng.uniform(-10.0, 10.0);

    auto deriv = [coupling](const std::array<double, 9>& u, std::array<double, 9>& du) {
        for (int i = 0; i < 3; ++i) {
            const double x = u[3 * i], y = u[3 * i + 1], z = u[3 * i + 2];
            double dx = -10.0 * x + 10.0 * y;
            if (i > 0) dx += coupling * (u[3 * (i - 1)] - x);
            du[3 * i] = dx;
            du[3 * i + 1] = -x * z + 28.0 * x - y;
            du[3 * i + 2] = x * y - (8.0 / 3.0) * z;
        }
    };

    const double dt = 0.05;
    double h = 1e-3;
    detail::rk45_integrate(deriv, s, 0.0, burn_in_time, rtol, atol, h);

    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    double t = burn_in_time;
    for (std::size_t i = 0; i < n; ++i) {
        rows.push_back({s[0], s[3], s[6]});
        if (i + 1 < n) {
            detail::rk45_integrate(deriv, s, t, t + dt, rtol, atol, h);
            t += dt;
        }
    }
    GroundTruth truth(3);
    truth.set(0, 1);
    truth.set(1, 2);
    return {detail::rows_to_series(rows, 3), truth};
}

/// Dispatch on a SystemSpec; realization streams come from Rng::stream
/// seeding upstream.
inline std::pair<MultivariateSeries, GroundTruth> generate(const SystemSpec& spec) {
    switch (spec.kind) {
        case SystemKind::var5: return gen_var5(spec.n, spec.seed, spec.burn_in);
        case SystemKind::nlvar3: return gen_nlvar3(spec.n, spec.seed, spec.burn_in);
        case SystemKind::henon:
            return gen_henon(spec.k, spec.coupling, spec.n, spec.seed, spec.burn_in);
        case SystemKind::lorenz3:
            return gen_lorenz3(spec.coupling, spec.n, spec.seed, spec.burn_in_time);
    }
    throw std::invalid_argument("bad system kind");
}

} // namespace lmpmime

#endif
