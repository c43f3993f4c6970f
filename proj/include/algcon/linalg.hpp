#ifndef ALGCON_LINALG_HPP
#define ALGCON_LINALG_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/rational.hpp"

namespace algcon {

/// Dense matrix of exact rationals. Only the handful of operations the
/// toolkit needs: arithmetic, exact determinant, solve, inverse, rank.
class RatMatrix {
public:
    RatMatrix() : rows_(0), cols_(0) {}
    RatMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Rat(0)) {}

    static RatMatrix identity(std::size_t n) {
        RatMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool operator==(const RatMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    RatMatrix transposed() const {
        RatMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    RatMatrix operator*(const RatMatrix& o) const {
        if (cols_ != o.rows_) throw Error("matrix product shape mismatch");
        RatMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Rat& a = (*this)(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) {
                    if (o(k, j) == 0) continue;
                    r(i, j) += a * o(k, j);
                }
            }
        return r;
    }

    RatMatrix operator-(const RatMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("matrix shape mismatch");
        RatMatrix r(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
        return r;
    }

    bool is_symmetric() const {
        if (rows_ != cols_) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

private:
    std::size_t rows_, cols_;
    std::vector<Rat> data_;
};

/// Exact determinant by Gaussian elimination with nonzero pivoting.
inline Rat det(RatMatrix m) {
    if (m.rows() != m.cols()) throw Error("det of non-square matrix");
    const std::size_t n = m.rows();
    Rat d(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && m(piv, k) == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) swap(m(k, j), m(piv, j));
            d = -d;
        }
        d *= m(k, k);
        Rat inv_piv = 1 / m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (m(i, k) == 0) continue;
            Rat f = m(i, k) * inv_piv;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return d;
}

inline std::size_t rank(RatMatrix m) {
    const std::size_t r = m.rows(), c = m.cols();
    std::size_t rk = 0;
    for (std::size_t col = 0; col < c && rk < r; ++col) {
        std::size_t piv = rk;
        while (piv < r && m(piv, col) == 0) ++piv;
        if (piv == r) continue;
        if (piv != rk)
            for (std::size_t j = col; j < c; ++j) swap(m(rk, j), m(piv, j));
        Rat inv_piv = 1 / m(rk, col);
        for (std::size_t i = rk + 1; i < r; ++i) {
            if (m(i, col) == 0) continue;
            Rat f = m(i, col) * inv_piv;
            for (std::size_t j = col; j < c; ++j) m(i, j) -= f * m(rk, j);
        }
        ++rk;
    }
    return rk;
}

/// Solves A x = b exactly; empty when A is singular.
inline std::optional<std::vector<Rat>> solve(RatMatrix a, std::vector<Rat> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw Error("solve shape mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && a(piv, k) == 0) ++piv;
        if (piv == n) return std::nullopt;
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) swap(a(k, j), a(piv, j));
            swap(b[k], b[piv]);
        }
        Rat inv_piv = 1 / a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            Rat f = a(i, k) * inv_piv;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<Rat> x(n, Rat(0));
    for (std::size_t ii = n; ii-- > 0;) {
        Rat s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

inline std::optional<RatMatrix> inverse(const RatMatrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw Error("inverse of non-square matrix");
    RatMatrix m = a;
    RatMatrix inv = RatMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && m(piv, k) == 0) ++piv;
        if (piv == n) return std::nullopt;
        if (piv != k)
            for (std::size_t j = 0; j < n; ++j) {
                swap(m(k, j), m(piv, j));
                swap(inv(k, j), inv(piv, j));
            }
        Rat d = m(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            m(k, j) /= d;
            inv(k, j) /= d;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || m(i, k) == 0) continue;
            Rat f = m(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) -= f * m(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

/// Leading principal minors all positive; the exact positive-definiteness
/// test used on covariance and noise matrices.
inline bool is_positive_definite(const RatMatrix& a) {
    if (a.rows() != a.cols()) return false;
    const std::size_t n = a.rows();
    for (std::size_t k = 1; k <= n; ++k) {
        RatMatrix sub(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sub(i, j) = a(i, j);
        if (det(sub) <= 0) return false;
    }
    return true;
}

} // namespace algcon

#endif // ALGCON_LINALG_HPP
