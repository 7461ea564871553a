#pragma once

// Small dense exact linear algebra: integer vectors/matrices for H2 classes
// and the surgery homomorphisms, rationals for cohomology coordinates.
// Ranks are tiny (<= ~10), so everything is written for clarity, not speed.

#include "gwsurgery/rational.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gws {

using IntVec = std::vector<long long>;
using RatVec = std::vector<Rational>;

template <typename T>
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}

    T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
};

using IntMat = Mat<long long>;
using RatMat = Mat<Rational>;
using BigMat = Mat<BigInt>;

inline IntMat int_mat_from_rows(const std::vector<IntVec>& rows) {
    IntMat m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols) throw std::invalid_argument("matrix rows of unequal length");
        for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

template <typename T>
Mat<T> transpose(const Mat<T>& m) {
    Mat<T> t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

inline IntVec mat_apply(const IntMat& m, const IntVec& v) {
    if (v.size() != m.cols) throw std::invalid_argument("matrix/vector size mismatch");
    IntVec out(m.rows, 0);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out[i] += m(i, j) * v[j];
    return out;
}

inline RatVec mat_apply(const RatMat& m, const RatVec& v) {
    if (v.size() != m.cols) throw std::invalid_argument("matrix/vector size mismatch");
    RatVec out(m.rows, Rational(0));
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out[i] += m(i, j) * v[j];
    return out;
}

inline RatMat rat_mat(const IntMat& m) {
    RatMat r(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows * m.cols; ++i) r.a[i] = Rational(m.a[i]);
    return r;
}

inline RatMat mat_mul(const RatMat& x, const RatMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matrix product size mismatch");
    RatMat out(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            if (x(i, k) == 0) continue;
            for (std::size_t j = 0; j < y.cols; ++j) out(i, j) += x(i, k) * y(k, j);
        }
    return out;
}

inline IntVec vec_add(const IntVec& a, const IntVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    IntVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

inline IntVec vec_sub(const IntVec& a, const IntVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    IntVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

inline IntVec vec_neg(const IntVec& a) {
    IntVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = -a[i];
    return c;
}

inline IntVec vec_scale(long long s, const IntVec& a) {
    IntVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = s * a[i];
    return c;
}

inline bool is_zero(const IntVec& a) {
    for (long long x : a)
        if (x != 0) return false;
    return true;
}

inline Rational dot(const RatVec& f, const IntVec& v) {
    if (f.size() != v.size()) throw std::invalid_argument("functional/vector size mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * v[i];
    return s;
}

inline long long dot(const IntVec& f, const IntVec& v) {
    if (f.size() != v.size()) throw std::invalid_argument("functional/vector size mismatch");
    long long s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * v[i];
    return s;
}

// Fraction-free Gaussian elimination (Bareiss). Returns the rank; if the
// matrix is square, `det` receives the exact determinant.
inline std::size_t bareiss(BigMat m, BigInt* det = nullptr) {
    const std::size_t r = m.rows, c = m.cols;
    BigInt prev = 1;
    std::size_t rank = 0;
    long long sign = 1;
    for (std::size_t col = 0; col < c && rank < r; ++col) {
        std::size_t piv = rank;
        while (piv < r && m(piv, col) == 0) ++piv;
        if (piv == r) continue;
        if (piv != rank) {
            for (std::size_t j = 0; j < c; ++j) std::swap(m(piv, j), m(rank, j));
            sign = -sign;
        }
        for (std::size_t i = rank + 1; i < r; ++i) {
            for (std::size_t j = col + 1; j < c; ++j)
                m(i, j) = (m(rank, col) * m(i, j) - m(i, col) * m(rank, j)) / prev;
            m(i, col) = 0;
        }
        prev = m(rank, col);
        ++rank;
    }
    if (det) {
        if (r != c) throw std::invalid_argument("determinant of non-square matrix");
        *det = (rank == r) ? BigInt(sign) * prev : BigInt(0);
    }
    return rank;
}

inline BigMat big_mat(const IntMat& m) {
    BigMat b(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows * m.cols; ++i) b.a[i] = m.a[i];
    return b;
}

inline BigInt int_det(const IntMat& m) {
    BigInt d;
    bareiss(big_mat(m), &d);
    return d;
}

inline std::size_t int_rank(const IntMat& m) { return bareiss(big_mat(m)); }

// Exact Gauss-Jordan inverse; nullopt when singular.
inline std::optional<RatMat> rat_inverse(const RatMat& m) {
    if (m.rows != m.cols) return std::nullopt;
    const std::size_t n = m.rows;
    RatMat a = m, inv = RatMat::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a(piv, col) == 0) ++piv;
        if (piv == n) return std::nullopt;
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        Rational d = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a(i, col) == 0) continue;
            Rational f = a(i, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

// Solves m·x = b over the rationals. Returns one solution or nullopt when the
// system is inconsistent. (Used for expressing classes in named bases and for
// inverting pullbacks; uniqueness is the caller's concern.)
inline std::optional<RatVec> rat_solve(const RatMat& m, const RatVec& b) {
    if (b.size() != m.rows) throw std::invalid_argument("solve: size mismatch");
    const std::size_t r = m.rows, c = m.cols;
    RatMat a(r, c + 1);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) a(i, j) = m(i, j);
        a(i, c) = b[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < c && row < r; ++col) {
        std::size_t piv = row;
        while (piv < r && a(piv, col) == 0) ++piv;
        if (piv == r) continue;
        if (piv != row)
            for (std::size_t j = 0; j <= c; ++j) std::swap(a(piv, j), a(row, j));
        Rational d = a(row, col);
        for (std::size_t j = 0; j <= c; ++j) a(row, j) /= d;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == row || a(i, col) == 0) continue;
            Rational f = a(i, col);
            for (std::size_t j = 0; j <= c; ++j) a(i, j) -= f * a(row, j);
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t i = row; i < r; ++i)
        if (a(i, c) != 0) return std::nullopt;
    RatVec x(c, Rational(0));
    for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = a(i, c);
    return x;
}

// Column-style Hermite reduction to echelon form. H = K·U for unimodular U,
// so H and K generate the same integer column lattice.
inline BigMat hermite_echelon(BigMat h) {
    const std::size_t r = h.rows, c = h.cols;
    std::size_t lead = 0;
    for (std::size_t row = 0; row < r && lead < c; ++row) {
        // Euclid across columns lead..c-1 on this row: pivot on the entry of
        // least absolute value until it divides everything to its right.
        while (true) {
            std::size_t best = c;
            for (std::size_t j = lead; j < c; ++j) {
                if (h(row, j) == 0) continue;
                if (best == c || abs(h(row, j)) < abs(h(row, best))) best = j;
            }
            if (best == c) break;
            if (best != lead)
                for (std::size_t i = 0; i < r; ++i) std::swap(h(i, best), h(i, lead));
            bool reduced = true;
            for (std::size_t j = lead + 1; j < c; ++j) {
                if (h(row, j) == 0) continue;
                BigInt q = h(row, j) / h(row, lead);
                for (std::size_t i = 0; i < r; ++i) h(i, j) -= q * h(i, lead);
                if (h(row, j) != 0) reduced = false;
            }
            if (reduced) break;
        }
        if (h(row, lead) != 0) {
            if (h(row, lead) < 0)
                for (std::size_t i = 0; i < r; ++i) h(i, lead) = -h(i, lead);
            ++lead;
        }
    }
    return h;
}

namespace detail {
inline std::string render_vec(const IntVec& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + "]";
}
}  // namespace detail

// Decides whether d lies in the integer column span of K.
inline bool solves_integrally(const std::vector<IntVec>& columns, const IntVec& d) {
    if (is_zero(d)) return true;
    if (columns.empty()) return false;
    const std::size_t r = d.size();
    BigMat k(r, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != r) throw std::invalid_argument("kernel basis vector of wrong length");
        for (std::size_t i = 0; i < r; ++i) k(i, j) = columns[j][i];
    }
    BigMat h = hermite_echelon(std::move(k));
    std::vector<BigInt> rem(r);
    for (std::size_t i = 0; i < r; ++i) rem[i] = d[i];
    std::size_t col = 0;
    for (std::size_t row = 0; row < r; ++row) {
        if (col < h.cols && h(row, col) != 0) {
            if (rem[row] % h(row, col) != 0) return false;
            BigInt q = rem[row] / h(row, col);
            for (std::size_t i = row; i < r; ++i) rem[i] -= q * h(i, col);
            ++col;
        } else if (rem[row] != 0) {
            return false;
        }
    }
    return true;
}

}  // namespace gws
