#ifndef LMPMIME_KNN_MI_HPP
#define LMPMIME_KNN_MI_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "core.hpp"
#include "kdtree.hpp"
#include "rng.hpp"

namespace lmpmime {

enum class NeighborSearch { kd_tree, brute_force };

struct EstimatorConfig {
    int k_nn = 5;
    double tie_jitter_scale = 1e-10;
    std::uint64_t jitter_seed = 0x5bd1e995u;
    NeighborSearch search = NeighborSearch::kd_tree;
};

namespace detail {

inline double digamma(double x) {
    double r = 0.0;
    while (x < 6.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    return r + std::log(x) - 0.5 / x -
           f * (1.0 / 12.0 - f * (1.0 / 120.0 - f * (1.0 / 252.0 - f * (1.0 / 240.0 - f / 132.0))));
}

/// Integer digamma table psi(1..n), filled by recurrence psi(m+1)=psi(m)+1/m.
struct DigammaTable {
    std::vector<double> v;
    explicit DigammaTable(std::size_t n) : v(n + 1, 0.0) {
        v[1] = -0.57721566490153286060651209008240243;  // psi(1) = -gamma
        for (std::size_t m = 1; m < n; ++m) v[m + 1] = v[m] + 1.0 / static_cast<double>(m);
    }
    double operator()(std::size_t m) const { return v[m]; }
};

/// Deterministic sub-scale tie-breaking jitter. Depends only on the value's
/// bit pattern, the row index, and the seed, so the same sample gets the same
/// perturbation no matter which argument block it sits in.
inline void apply_jitter(Matrix& m, double scale, std::uint64_t seed) {
    if (scale <= 0.0) return;
    for (std::size_t r = 0; r < m.rows; ++r) {
        const std::uint64_t row_h = splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (r + 1)));
        for (std::size_t c = 0; c < m.cols; ++c) {
            double& v = m(r, c);
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            const double u = static_cast<double>(splitmix64(bits ^ row_h) >> 11) * 0x1.0p-53;
            v += scale * (u - 0.5) * std::max(1.0, std::fabs(v));
        }
    }
}

inline double cheb_dist_row(const Matrix& m, std::size_t i, std::size_t j) {
    double d = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) {
        double v = std::fabs(m(i, c) - m(j, c));
        if (v > d) d = v;
    }
    return d;
}

inline double brute_kth_distance(const Matrix& m, std::size_t self, std::size_t k) {
    std::vector<double> heap;
    heap.reserve(k + 1);
    for (std::size_t j = 0; j < m.rows; ++j) {
        if (j == self) continue;
        double d = cheb_dist_row(m, self, j);
        if (heap.size() < k) {
            heap.push_back(d);
            std::push_heap(heap.begin(), heap.end());
        } else if (d < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = d;
            std::push_heap(heap.begin(), heap.end());
        }
    }
    return heap.front();
}

inline std::size_t brute_count_within(const Matrix& m, std::size_t self, double r) {
    std::size_t cnt = 0;
    for (std::size_t j = 0; j < m.rows; ++j) {
        if (j == self) continue;
        if (cheb_dist_row(m, self, j) < r) ++cnt;
    }
    return cnt;
}

} // namespace detail

/// KSG (variant 1) estimator of I(X;Y|Z) in nats via the four-term digamma
/// form over the joint, XZ, YZ, and Z spaces with strict-inequality counting
/// under the max-norm. With an empty Z this reduces term-by-term to the plain
/// KSG mutual information, so MI(x,y) == CMI(x,y,{}) bit-exactly.
inline double conditional_mutual_information(const Matrix& x, const Matrix& y, const Matrix& z,
                                             const EstimatorConfig& cfg = {}) {
    if (x.empty() || y.empty()) throw std::invalid_argument("x and y blocks must be nonempty");
    if (x.rows != y.rows || (!z.empty() && z.rows != x.rows))
        throw std::invalid_argument("sample blocks must share row count");
    const std::size_t n = x.rows;
    const std::size_t k = static_cast<std::size_t>(cfg.k_nn);
    if (cfg.k_nn < 1 || n <= k) throw TooFewSamplesError("need n > k_nn samples");

    Matrix xj = x, yj = y, zj = z;
    detail::apply_jitter(xj, cfg.tie_jitter_scale, cfg.jitter_seed);
    detail::apply_jitter(yj, cfg.tie_jitter_scale, cfg.jitter_seed);
    detail::apply_jitter(zj, cfg.tie_jitter_scale, cfg.jitter_seed);

    const Matrix joint = hcat({&xj, &yj, &zj});
    const Matrix xz = zj.empty() ? xj : hcat({&xj, &zj});
    const Matrix yz = zj.empty() ? yj : hcat({&yj, &zj});

    const detail::DigammaTable psi(n + 1);
    double acc = 0.0;

    if (cfg.search == NeighborSearch::kd_tree) {
        KdTree t_joint(joint);
        KdTree t_xz(xz);
        KdTree t_yz(yz);
        KdTree t_z(zj.a.data(), zj.empty() ? 0 : zj.rows, zj.cols);
        for (std::size_t i = 0; i < n; ++i) {
            const double eps = t_joint.kth_neighbor_distance(i, k);
            const std::size_t nxz = t_xz.count_within(i, eps);
            const std::size_t nyz = t_yz.count_within(i, eps);
            const std::size_t nz = zj.empty() ? n - 1 : t_z.count_within(i, eps);
            acc += psi(nz + 1) - psi(nxz + 1) - psi(nyz + 1);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double eps = detail::brute_kth_distance(joint, i, k);
            const std::size_t nxz = detail::brute_count_within(xz, i, eps);
            const std::size_t nyz = detail::brute_count_within(yz, i, eps);
            const std::size_t nz = zj.empty() ? n - 1 : detail::brute_count_within(zj, i, eps);
            acc += psi(nz + 1) - psi(nxz + 1) - psi(nyz + 1);
        }
    }
    return psi(k) + acc / static_cast<double>(n);
}

/// KSG mutual information I(X;Y) in nats.
inline double mutual_information(const Matrix& x, const Matrix& y,
                                 const EstimatorConfig& cfg = {}) {
    return conditional_mutual_information(x, y, Matrix(), cfg);
}

} // namespace lmpmime

#endif
