#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cohlab/errors.hpp"

namespace cohlab {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Sized for small problems (d <= 64);
/// everything is kept simple and allocation-friendly rather than clever.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    ComplexMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw InvalidInput("matrix dimensions must be non-negative");
    }

    /// Build from a nested initializer list, e.g. {{1, 0}, {0, 1}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init) {
        rows_ = static_cast<int>(init.size());
        cols_ = rows_ > 0 ? static_cast<int>(init.begin()->size()) : 0;
        data_.reserve(static_cast<size_t>(rows_) * cols_);
        for (const auto& row : init) {
            if (static_cast<int>(row.size()) != cols_)
                throw InvalidInput("ragged initializer list for matrix");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix zero(int rows, int cols) { return ComplexMatrix(rows, cols); }

    static ComplexMatrix identity(int n) {
        ComplexMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// Diagonal matrix from real entries.
    static ComplexMatrix diagonal(const std::vector<double>& d) {
        ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<cplx>& d) {
        ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    ComplexMatrix operator+(const ComplexMatrix& o) const {
        check_same_shape(o, "+");
        ComplexMatrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] + o.data_[k];
        return r;
    }

    ComplexMatrix operator-(const ComplexMatrix& o) const {
        check_same_shape(o, "-");
        ComplexMatrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] - o.data_[k];
        return r;
    }

    ComplexMatrix operator*(const ComplexMatrix& o) const {
        if (cols_ != o.rows_)
            throw DimMismatch("matrix product shape mismatch: " + shape_str() + " * " + o.shape_str());
        ComplexMatrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i) {
            for (int k = 0; k < cols_; ++k) {
                const cplx aik = (*this)(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        }
        return r;
    }

    ComplexMatrix operator*(cplx s) const {
        ComplexMatrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] * s;
        return r;
    }

    ComplexMatrix operator*(double s) const { return (*this) * cplx(s, 0.0); }

    /// Conjugate transpose.
    ComplexMatrix adjoint() const {
        ComplexMatrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    cplx trace() const {
        require_square("trace");
        cplx t = 0.0;
        for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const cplx& v : data_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Largest |this - other| over all entries.
    double max_abs_diff(const ComplexMatrix& o) const {
        check_same_shape(o, "max_abs_diff");
        double m = 0.0;
        for (size_t k = 0; k < data_.size(); ++k) m = std::max(m, std::abs(data_[k] - o.data_[k]));
        return m;
    }

    /// Largest |M - M^dagger| entry; zero for exactly Hermitian input.
    double hermiticity_residual() const {
        require_square("hermiticity_residual");
        double m = 0.0;
        for (int i = 0; i < rows_; ++i)
            for (int j = i; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }

    /// (M + M^dagger)/2; used to clean up round-off on derived Hermitian matrices.
    ComplexMatrix hermitian_part() const {
        require_square("hermitian_part");
        ComplexMatrix r(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                r(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        return r;
    }

    std::vector<cplx> diagonal_entries() const {
        require_square("diagonal_entries");
        std::vector<cplx> d(static_cast<size_t>(rows_));
        for (int i = 0; i < rows_; ++i) d[static_cast<size_t>(i)] = (*this)(i, i);
        return d;
    }

    /// Same matrix with all off-diagonal entries zeroed.
    ComplexMatrix diagonal_part() const {
        require_square("diagonal_part");
        ComplexMatrix r(rows_, cols_);
        for (int i = 0; i < rows_; ++i) r(i, i) = (*this)(i, i);
        return r;
    }

    bool all_finite() const {
        for (const cplx& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    void require_square(const char* what) const {
        if (!square())
            throw NotSquare(std::string(what) + " requires a square matrix, got " + shape_str());
    }

    std::string shape_str() const {
        std::ostringstream os;
        os << rows_ << "x" << cols_;
        return os.str();
    }

  private:
    void check_same_shape(const ComplexMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimMismatch(std::string("shape mismatch for '") + op + "': " + shape_str() +
                              " vs " + o.shape_str());
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

inline ComplexMatrix operator*(cplx s, const ComplexMatrix& m) { return m * s; }
inline ComplexMatrix operator*(double s, const ComplexMatrix& m) { return m * s; }

/// Column vector |v><w| outer product.
inline ComplexMatrix outer(const std::vector<cplx>& v, const std::vector<cplx>& w) {
    ComplexMatrix r(static_cast<int>(v.size()), static_cast<int>(w.size()));
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = 0; j < w.size(); ++j)
            r(static_cast<int>(i), static_cast<int>(j)) = v[i] * std::conj(w[j]);
    return r;
}

/// Block-diagonal concatenation of two matrices.
inline ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.rows() + b.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) r(a.rows() + i, a.cols() + j) = b(i, j);
    return r;
}

inline ComplexMatrix direct_sum(const std::vector<ComplexMatrix>& blocks) {
    ComplexMatrix r(0, 0);
    for (const auto& b : blocks) r = direct_sum(r, b);
    return r;
}

/// Kronecker product, row-major convention: (A (x) B)[i*p+k, j*q+l] = A[i,j] B[k,l].
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

}  // namespace cohlab
