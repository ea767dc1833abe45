#pragma once

// Dense complex linear algebra for the tiny matrices that appear here:
// Gram matrices of deficiency vectors, unitary extension labels, and the
// restrictions of projection differences to joint finite spans.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "extlab/errors.hpp"

namespace extlab {

using Complex = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, Complex{}) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (entries_.size() != rows_ * cols_) {
            throw DimensionMismatch("entry count " + std::to_string(entries_.size()) +
                                    " != rows*cols " + std::to_string(rows_ * cols_));
        }
    }
    /// Row-major nested initializer, e.g. {{0, 1}, {1, 0}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        entries_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) throw DimensionMismatch("ragged initializer");
            entries_.insert(entries_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return entries_.empty(); }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    std::span<const Complex> entries() const { return entries_; }

    std::vector<Complex> column(std::size_t j) const {
        std::vector<Complex> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix a(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) a(j, i) = std::conj((*this)(i, j));
        return a;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& e : entries_) m = std::max(m, std::abs(e));
        return m;
    }
    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& e : entries_) s += std::norm(e);
        return std::sqrt(s);
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (auto& e : entries_) e *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_) {
            throw DimensionMismatch("product of " + a.shape() + " and " + b.shape());
        }
        ComplexMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void require_same_shape(const ComplexMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw DimensionMismatch(shape() + " vs " + o.shape());
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

/// max |M - M^H|, the symmetry defect used by the Hermitian routines.
inline double hermitian_defect(const ComplexMatrix& m) {
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
    return d;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    ComplexMatrix h = m + m.adjoint();
    h *= 0.5;
    return h;
}

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column i belongs to values[i]
};

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot entry with a diagonal
/// unitary, then applies the classical real Jacobi rotation, so the
/// accumulated transform stays exactly unitary up to rounding.
inline HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
    if (!m.is_square()) throw DimensionMismatch("hermitian_eigen needs a square matrix, got " + m.shape());
    const double scale = m.max_abs();
    if (hermitian_defect(m) > 1e-10 * scale) {
        throw NotHermitian("symmetry defect " + std::to_string(hermitian_defect(m)) +
                           " exceeds 1e-10 * max|M|");
    }
    const std::size_t n = m.rows();
    ComplexMatrix a = hermitian_part(m);
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double target = 1e-16 * std::max(a.frobenius_norm(), 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= target) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = a(p, q);
                const double r = std::abs(b);
                if (r <= 1e-300) continue;
                const Complex phase = b / r;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * r);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                const Complex gpp = c;
                const Complex gpq = s;
                const Complex gqp = -s * std::conj(phase);
                const Complex gqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {  // A <- A G
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // A <- G^H A
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {  // V <- V G
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
                a(p, q) = a(q, p) = Complex{};
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

/// Singular values in descending order, via the eigenvalues of M^H M.
inline std::vector<double> singular_values(const ComplexMatrix& m) {
    if (m.empty()) return {};
    const auto eig = hermitian_eigen(hermitian_part(m.adjoint() * m));
    std::vector<double> s(eig.values.size());
    std::transform(eig.values.rbegin(), eig.values.rend(), s.begin(),
                   [](double l) { return std::sqrt(std::max(l, 0.0)); });
    return s;
}

/// Largest |eigenvalue| of a Hermitian matrix (its operator norm).
inline double hermitian_norm(const ComplexMatrix& m) {
    if (m.empty()) return 0.0;
    const auto eig = hermitian_eigen(m);
    return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

/// Moore-Penrose pseudo-inverse of a matrix with full row rank, A^H (A A^H)^{-1}.
/// Returns std::nullopt when the row rank (relative cutoff `rank_tol`) is deficient.
inline std::optional<ComplexMatrix> right_pseudo_inverse(const ComplexMatrix& a, double rank_tol = 1e-10) {
    const auto eig = hermitian_eigen(hermitian_part(a * a.adjoint()));
    if (eig.values.empty()) return ComplexMatrix(a.cols(), 0);
    const double top = std::max(eig.values.back(), 0.0);
    const std::size_t n = eig.values.size();
    ComplexMatrix inv(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double l = eig.values[k];
        if (!(l > rank_tol * rank_tol * top) || top == 0.0) return std::nullopt;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                inv(i, j) += eig.vectors(i, k) * std::conj(eig.vectors(j, k)) / l;
    }
    return a.adjoint() * inv;
}

/// Orthonormal basis (columns) of { x : M x = 0 }, using singular directions of
/// M below `tol` times the largest singular value.
inline ComplexMatrix null_space(const ComplexMatrix& m, double tol = 1e-6) {
    const std::size_t n = m.cols();
    if (m.rows() == 0) return ComplexMatrix::identity(n);
    const auto eig = hermitian_eigen(hermitian_part(m.adjoint() * m));
    const double top = std::max(eig.values.empty() ? 0.0 : eig.values.back(), 0.0);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < n; ++k)
        if (eig.values[k] <= tol * tol * top || top == 0.0) keep.push_back(k);
    ComplexMatrix basis(n, keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c)
        for (std::size_t i = 0; i < n; ++i) basis(i, c) = eig.vectors(i, keep[c]);
    return basis;
}

// ---------------------------------------------------------------------------
// Abstract inner-product-space helpers.

template <class V>
concept LinearSpaceVector = requires(const V& a, const V& b, Complex s) {
    { a + b } -> std::convertible_to<V>;
    { a - b } -> std::convertible_to<V>;
    { s * a } -> std::convertible_to<V>;
};

/// G_ij = inner(v_i, v_j), with `inner` anti-linear in its first slot.
template <class V, class Inner>
ComplexMatrix gram(std::span<const V> vectors, Inner&& inner) {
    const std::size_t n = vectors.size();
    ComplexMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        g(i, i) = inner(vectors[i], vectors[i]).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            g(i, j) = inner(vectors[i], vectors[j]);
            g(j, i) = std::conj(g(i, j));
        }
    }
    return g;
}

struct OrthonormalizeOptions {
    double rank_tol = 1e-10;
    /// Norm the rank cutoff is relative to; defaults to the largest input norm.
    std::optional<double> reference_norm;
};

/// Pivoted modified Gram-Schmidt with one re-orthogonalization pass.
///
/// At every step the remaining vector with the largest residual is taken
/// next. Vectors whose residual falls below rank_tol * reference_norm are
/// dropped, which is how rank deficiency is reported.
template <LinearSpaceVector V, class Inner>
std::vector<V> orthonormalize(std::span<const V> vectors, Inner&& inner, OrthonormalizeOptions opts = {}) {
    std::vector<V> work(vectors.begin(), vectors.end());
    auto norm_of = [&](const V& v) { return std::sqrt(std::max(inner(v, v).real(), 0.0)); };

    double reference = 0.0;
    if (opts.reference_norm) {
        reference = *opts.reference_norm;
    } else {
        for (const auto& v : work) reference = std::max(reference, norm_of(v));
    }
    const double cutoff = opts.rank_tol * reference;

    std::vector<V> basis;
    std::vector<bool> used(work.size(), false);
    for (std::size_t step = 0; step < work.size(); ++step) {
        std::size_t best = work.size();
        double best_norm = -1.0;
        for (std::size_t j = 0; j < work.size(); ++j) {
            if (used[j]) continue;
            const double nj = norm_of(work[j]);
            if (nj > best_norm) {
                best_norm = nj;
                best = j;
            }
        }
        if (best == work.size() || best_norm <= cutoff || best_norm == 0.0) break;
        used[best] = true;

        V q = Complex(1.0 / best_norm) * work[best];
        for (const auto& b : basis) q = q - inner(b, q) * b;
        const double renorm = norm_of(q);
        if (renorm == 0.0) break;
        q = Complex(1.0 / renorm) * q;

        for (std::size_t j = 0; j < work.size(); ++j) {
            if (!used[j]) work[j] = work[j] - inner(q, work[j]) * q;
        }
        basis.push_back(std::move(q));
    }
    return basis;
}

template <LinearSpaceVector V, class Inner>
std::vector<V> orthonormalize(const std::vector<V>& vectors, Inner&& inner, OrthonormalizeOptions opts = {}) {
    return orthonormalize(std::span<const V>(vectors), std::forward<Inner>(inner), opts);
}

template <class V, class Inner>
ComplexMatrix gram(const std::vector<V>& vectors, Inner&& inner) {
    return gram(std::span<const V>(vectors), std::forward<Inner>(inner));
}

}  // namespace extlab
