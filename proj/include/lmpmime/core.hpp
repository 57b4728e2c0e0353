#ifndef LMPMIME_CORE_HPP
#define LMPMIME_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmpmime {

/// Dense row-major matrix of doubles. The workhorse container for sample
/// blocks, aligned columns, and causality matrices.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    bool empty() const { return rows == 0 || cols == 0; }
};

/// Concatenate blocks column-wise. Empty blocks are skipped.
inline Matrix hcat(const std::vector<const Matrix*>& blocks) {
    std::size_t rows = 0, cols = 0;
    for (const Matrix* b : blocks) {
        if (!b || b->empty()) continue;
        if (rows == 0) rows = b->rows;
        if (b->rows != rows) throw std::invalid_argument("hcat: row count mismatch");
        cols += b->cols;
    }
    Matrix out(rows, cols);
    std::size_t off = 0;
    for (const Matrix* b : blocks) {
        if (!b || b->empty()) continue;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < b->cols; ++c) out(r, off + c) = (*b)(r, c);
        off += b->cols;
    }
    return out;
}

struct ConstantColumnError : std::runtime_error {
    explicit ConstantColumnError(std::size_t col)
        : std::runtime_error("column " + std::to_string(col) + " has zero variance"), column(col) {}
    std::size_t column;
};

struct NonFiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeriesTooShortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooFewSamplesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CombinationBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lmpmime

#endif
