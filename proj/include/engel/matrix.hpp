#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "engel/errors.hpp"
#include "engel/rational.hpp"

namespace engel {

// Dense matrix of exact rationals.
class RationalMatrix {
public:
    RationalMatrix() : rows_(0), cols_(0) {}
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
        RationalMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Rational& aik = a.at(i, k);
                if (aik.is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    out.at(i, j) += aik * b.at(k, j);
            }
        return out;
    }

    friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("matrix difference: dimension mismatch");
        RationalMatrix out(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] - b.data_[i];
        return out;
    }

    Rational row_sum(std::size_t r) const {
        Rational s;
        for (std::size_t j = 0; j < cols_; ++j) s += at(r, j);
        return s;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Rational> data_;
};

// Exact inverse of I - Q by Gauss-Jordan elimination on rationals. Pivots on
// the largest-magnitude entry in the column, which keeps intermediate
// numerators and denominators from snowballing.
inline RationalMatrix fundamental_matrix(const RationalMatrix& q) {
    if (q.rows() != q.cols()) throw std::invalid_argument("fundamental_matrix: Q must be square");
    const std::size_t n = q.rows();
    RationalMatrix a = RationalMatrix::identity(n) - q;
    RationalMatrix inv = RationalMatrix::identity(n);

    auto swap_rows = [n](RationalMatrix& m, std::size_t r1, std::size_t r2) {
        if (r1 == r2) return;
        for (std::size_t j = 0; j < n; ++j) std::swap(m.at(r1, j), m.at(r2, j));
    };

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        Rational best = a.at(col, col).abs();
        for (std::size_t r = col + 1; r < n; ++r) {
            Rational mag = a.at(r, col).abs();
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best.is_zero())
            throw SingularMatrixError("I - Q is singular: chain is not absorbing");
        swap_rows(a, col, pivot);
        swap_rows(inv, col, pivot);

        const Rational p = a.at(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a.at(col, j) /= p;
            inv.at(col, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const Rational factor = a.at(r, col);
            if (factor.is_zero()) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a.at(r, j) -= factor * a.at(col, j);
                inv.at(r, j) -= factor * inv.at(col, j);
            }
        }
    }
    return inv;
}

// B = N R, exact.
inline RationalMatrix absorption_matrix(const RationalMatrix& n, const RationalMatrix& r) {
    return n * r;
}

}  // namespace engel
