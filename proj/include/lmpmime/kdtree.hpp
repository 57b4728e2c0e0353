#ifndef LMPMIME_KDTREE_HPP
#define LMPMIME_KDTREE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "core.hpp"

namespace lmpmime {

/// kd-tree over an n x d point set under the Chebyshev (max) norm.
/// Supports the two queries the KSG estimator needs: the distance to the
/// k-th nearest neighbor of a member point (self excluded), and the number
/// of points strictly within a radius (self excluded). Exact by construction;
/// tests assert equality with the O(n^2) scan.
class KdTree {
public:
    KdTree(const double* pts, std::size_t n, std::size_t d, std::size_t leaf_size = 16)
        : pts_(pts), n_(n), d_(d), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
        idx_.resize(n_);
        std::iota(idx_.begin(), idx_.end(), std::size_t{0});
        if (n_ > 0) build(0, n_);
    }

    explicit KdTree(const Matrix& m, std::size_t leaf_size = 16)
        : KdTree(m.a.data(), m.rows, m.cols, leaf_size) {}

    /// Chebyshev distance from the i-th data point to its k-th nearest
    /// neighbor (excluding itself).
    double kth_neighbor_distance(std::size_t self, std::size_t k) const {
        std::vector<double> heap;  // max-heap of current best k distances
        heap.reserve(k + 1);
        knn_search(0, self, k, heap);
        return heap.front();
    }

    /// Number of points j != self with max-norm distance strictly below r.
    std::size_t count_within(std::size_t self, double r) const {
        if (r <= 0.0 || n_ <= 1) return 0;
        std::size_t cnt = 0;
        count_search(0, self, r, cnt);
        return cnt - 1;  // self is always strictly within r > 0
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }

private:
    struct Node {
        std::size_t begin, end;  // range into idx_
        int left = -1, right = -1;
    };

    const double* pts_;
    std::size_t n_, d_, leaf_size_;
    std::vector<std::size_t> idx_;
    std::vector<Node> nodes_;
    std::vector<double> boxes_;  // per node: d mins then d maxes

    const double* point(std::size_t i) const { return pts_ + i * d_; }
    const double* bb_min(int node) const { return boxes_.data() + 2 * d_ * static_cast<std::size_t>(node); }
    const double* bb_max(int node) const { return bb_min(node) + d_; }

    double dist(std::size_t i, std::size_t j) const {
        const double *a = point(i), *b = point(j);
        double m = 0.0;
        for (std::size_t c = 0; c < d_; ++c) {
            double v = std::fabs(a[c] - b[c]);
            if (v > m) m = v;
        }
        return m;
    }

    int build(std::size_t begin, std::size_t end) {
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back({begin, end, -1, -1});
        boxes_.resize(boxes_.size() + 2 * d_);
        {
            double* lo = boxes_.data() + 2 * d_ * static_cast<std::size_t>(id);
            double* hi = lo + d_;
            for (std::size_t c = 0; c < d_; ++c) {
                lo[c] = std::numeric_limits<double>::infinity();
                hi[c] = -std::numeric_limits<double>::infinity();
            }
            for (std::size_t i = begin; i < end; ++i) {
                const double* p = point(idx_[i]);
                for (std::size_t c = 0; c < d_; ++c) {
                    lo[c] = std::min(lo[c], p[c]);
                    hi[c] = std::max(hi[c], p[c]);
                }
            }
        }
        if (end - begin <= leaf_size_) return id;

        // split on the widest extent at the median
        std::size_t sd = 0;
        double widest = -1.0;
        for (std::size_t c = 0; c < d_; ++c) {
            double w = bb_max(id)[c] - bb_min(id)[c];
            if (w > widest) {
                widest = w;
                sd = c;
            }
        }
        if (widest <= 0.0) return id;  // all points identical, keep as leaf

        std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(idx_.begin() + static_cast<long>(begin),
                         idx_.begin() + static_cast<long>(mid),
                         idx_.begin() + static_cast<long>(end),
                         [&](std::size_t a, std::size_t b) { return point(a)[sd] < point(b)[sd]; });

        int l = build(begin, mid);
        int r = build(mid, end);
        nodes_[static_cast<std::size_t>(id)].left = l;
        nodes_[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    double box_distance(int node, const double* q) const {
        const double *lo = bb_min(node), *hi = bb_max(node);
        double m = 0.0;
        for (std::size_t c = 0; c < d_; ++c) {
            double v = 0.0;
            if (q[c] < lo[c]) v = lo[c] - q[c];
            else if (q[c] > hi[c]) v = q[c] - hi[c];
            if (v > m) m = v;
        }
        return m;
    }

    double box_far_distance(int node, const double* q) const {
        const double *lo = bb_min(node), *hi = bb_max(node);
        double m = 0.0;
        for (std::size_t c = 0; c < d_; ++c) {
            double v = std::max(std::fabs(q[c] - lo[c]), std::fabs(q[c] - hi[c]));
            if (v > m) m = v;
        }
        return m;
    }

    static void heap_push(std::vector<double>& heap, std::size_t k, double v) {
        if (heap.size() < k) {
            heap.push_back(v);
            std::push_heap(heap.begin(), heap.end());
        } else if (v < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = v;
            std::push_heap(heap.begin(), heap.end());
        }
    }

    void knn_search(int node, std::size_t self, std::size_t k, std::vector<double>& heap) const {
        const Node& nd = nodes_[static_cast<std::size_t>(node)];
        const double* q = point(self);
        if (heap.size() == k && box_distance(node, q) >= heap.front()) return;
        if (nd.left < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i) {
                std::size_t j = idx_[i];
                if (j == self) continue;
                heap_push(heap, k, dist(self, j));
            }
            return;
        }
        double dl = box_distance(nd.left, q), dr = box_distance(nd.right, q);
        if (dl <= dr) {
            knn_search(nd.left, self, k, heap);
            knn_search(nd.right, self, k, heap);
        } else {
            knn_search(nd.right, self, k, heap);
            knn_search(nd.left, self, k, heap);
        }
    }

    void count_search(int node, std::size_t self, double r, std::size_t& cnt) const {
        const Node& nd = nodes_[static_cast<std::size_t>(node)];
        const double* q = point(self);
        if (box_distance(node, q) >= r) return;
        if (box_far_distance(node, q) < r) {  // box entirely inside the open ball
            cnt += nd.end - nd.begin;
            return;
        }
        if (nd.left < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i)
                if (dist(self, idx_[i]) < r) ++cnt;
            return;
        }
        count_search(nd.left, self, r, cnt);
        count_search(nd.right, self, r, cnt);
    }
};

/// O(n^2) reference scan used by tests and as the estimator's fallback path.
inline std::vector<std::size_t> brute_counts_within(const Matrix& pts,
                                                    const std::vector<double>& radii) {
    if (radii.size() != pts.rows)
        throw std::invalid_argument("radii length must equal point count");
    std::vector<std::size_t> out(pts.rows, 0);
    for (std::size_t i = 0; i < pts.rows; ++i) {
        for (std::size_t j = 0; j < pts.rows; ++j) {
            if (i == j) continue;
            double m = 0.0;
            for (std::size_t c = 0; c < pts.cols; ++c) {
                double v = std::fabs(pts(i, c) - pts(j, c));
                if (v > m) m = v;
            }
            if (m < radii[i]) ++out[i];
        }
    }
    return out;
}

/// Neighbor counts strictly within per-point radii (self excluded), kd-tree
/// accelerated.
inline std::vector<std::size_t> neighbor_counts(const Matrix& pts,
                                                const std::vector<double>& radii) {
    if (radii.size() != pts.rows)
        throw std::invalid_argument("radii length must equal point count");
    KdTree tree(pts);
    std::vector<std::size_t> out(pts.rows, 0);
    for (std::size_t i = 0; i < pts.rows; ++i) out[i] = tree.count_within(i, radii[i]);
    return out;
}

} // namespace lmpmime

#endif
