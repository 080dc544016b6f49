#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "msfactor/errors.hpp"

namespace msfactor::linalg {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense row-major complex matrix. Values are immutable in spirit: every
/// operation returns a fresh matrix; in-place mutation is limited to
/// element assignment during construction.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    /// Build from nested row lists, e.g. from_rows({{1,0},{0,1}}).
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
    static ComplexMatrix diagonal(const std::vector<double>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const ComplexVector& data() const { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;

    ComplexVector row(std::size_t i) const;
    ComplexVector column(std::size_t j) const;
    void set_row(std::size_t i, const ComplexVector& v);
    void set_column(std::size_t j, const ComplexVector& v);
    /// Copy `block` into this matrix with upper-left corner at (i0, j0).
    void set_block(std::size_t i0, std::size_t j0, const ComplexMatrix& block);
    ComplexMatrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const;

    double frobenius_norm() const;
    double max_abs() const;
    Complex trace() const;
    bool is_hermitian(double rel_tol = 1e-12) const;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    ComplexVector data_;
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, const ComplexMatrix& a);
ComplexMatrix operator*(double s, const ComplexMatrix& a);
ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x);

double norm(const ComplexVector& v);
Complex dot(const ComplexVector& a, const ComplexVector& b);  // conjugates the first argument
ComplexVector operator-(const ComplexVector& a, const ComplexVector& b);
double distance(const ComplexVector& a, const ComplexVector& b);  // ||a - b||_2

/// Distance from unitarity, ||M M^dag - I||_F.
double unitarity_defect(const ComplexMatrix& m);

struct EigenResult {
    std::vector<double> values;  // sorted descending
    ComplexMatrix vectors;       // column k pairs with values[k]; orthonormal
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Rejects non-square or non-Hermitian input (||M - M^dag|| > 1e-12 ||M||).
/// Eigenvector phases are fixed so the largest-magnitude component of each
/// column is real positive.
EigenResult hermitian_eig(const ComplexMatrix& m);

struct LeastSquaresResult {
    ComplexVector x;
    double residual = 0.0;     // ||A x - b||_2
    std::size_t rank = 0;
    bool rank_deficient = false;
};

/// Minimum-norm least-squares solution of A x = b.
LeastSquaresResult solve_least_squares(const ComplexMatrix& a, const ComplexVector& b);

/// Evolution exponential exp(-i * scale * M), by scaling and squaring of the
/// power series. Unitary (to roundoff) when M is Hermitian.
ComplexMatrix matrix_exp(const ComplexMatrix& m, double scale);

}  // namespace msfactor::linalg
