#include "msfactor/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace msfactor::linalg {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    ComplexMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("from_rows: ragged row lengths");
        std::size_t j = 0;
        for (const auto& v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_ * cols_; ++i) m.data_[i] = std::conj(data_[i]);
    return m;
}

ComplexVector ComplexMatrix::row(std::size_t i) const {
    ComplexVector v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
}

ComplexVector ComplexMatrix::column(std::size_t j) const {
    ComplexVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void ComplexMatrix::set_row(std::size_t i, const ComplexVector& v) {
    if (v.size() != cols_) throw ShapeError("set_row: length mismatch");
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
}

void ComplexMatrix::set_column(std::size_t j, const ComplexVector& v) {
    if (v.size() != rows_) throw ShapeError("set_column: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

void ComplexMatrix::set_block(std::size_t i0, std::size_t j0, const ComplexMatrix& b) {
    if (i0 + b.rows() > rows_ || j0 + b.cols() > cols_)
        throw ShapeError("set_block: block exceeds matrix bounds");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

ComplexMatrix ComplexMatrix::block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
    if (i0 + r > rows_ || j0 + c > cols_) throw ShapeError("block: range exceeds matrix bounds");
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
    return m;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double s = 0.0;
    for (const auto& z : data_) s = std::max(s, std::abs(z));
    return s;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
    if (!is_square()) return false;
    return (*this - adjoint()).frobenius_norm() <= rel_tol * std::max(1e-300, frobenius_norm());
}

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError(std::string(op) + ": shape mismatch");
}

}  // namespace

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "operator+");
    ComplexMatrix m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) + b(i, j);
    return m;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "operator-");
    ComplexMatrix m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) - b(i, j);
    return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("operator*: inner dimensions differ");
    ComplexMatrix m(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
        }
    }
    return m;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
    ComplexMatrix m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = s * a(i, j);
    return m;
}

ComplexMatrix operator*(double s, const ComplexMatrix& a) { return Complex(s) * a; }

ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x) {
    if (a.cols() != x.size()) throw ShapeError("matrix-vector: dimension mismatch");
    ComplexVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double norm(const ComplexVector& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

Complex dot(const ComplexVector& a, const ComplexVector& b) {
    if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

ComplexVector operator-(const ComplexVector& a, const ComplexVector& b) {
    if (a.size() != b.size()) throw ShapeError("vector-: length mismatch");
    ComplexVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

double distance(const ComplexVector& a, const ComplexVector& b) { return norm(a - b); }

double unitarity_defect(const ComplexMatrix& m) {
    return (m * m.adjoint() - ComplexMatrix::identity(m.rows())).frobenius_norm();
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Fix each column's phase: largest-magnitude component becomes real positive.
void fix_column_phases(ComplexMatrix& v) {
    for (std::size_t k = 0; k < v.cols(); ++k) {
        std::size_t imax = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const double a = std::abs(v(i, k));
            if (a > best + 1e-15) {
                best = a;
                imax = i;
            }
        }
        const Complex z = v(imax, k);
        if (std::abs(z) == 0.0) continue;
        const Complex phase = std::conj(z) / std::abs(z);
        for (std::size_t i = 0; i < v.rows(); ++i) v(i, k) *= phase;
    }
}

}  // namespace

EigenResult hermitian_eig(const ComplexMatrix& m) {
    if (!m.is_square()) throw ShapeError("hermitian_eig: matrix not square");
    const std::size_t n = m.rows();
    const double scale = m.frobenius_norm();
    if ((m - m.adjoint()).frobenius_norm() > 1e-12 * std::max(1e-300, scale))
        throw NotHermitianError("hermitian_eig: input is not Hermitian");

    ComplexMatrix a = m;
    ComplexMatrix q = ComplexMatrix::identity(n);

    // Cyclic Jacobi sweeps; each rotation zeroes one off-diagonal pair.
    const double stop = 1e-15 * scale;
    const int max_sweeps = 100;
    int sweep = 0;
    while (off_diagonal_norm(a) > stop) {
        if (++sweep > max_sweeps)
            throw ConvergenceError("hermitian_eig: Jacobi sweeps exhausted", off_diagonal_norm(a));
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t qq = p + 1; qq < n; ++qq) {
                const Complex apq = a(p, qq);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) continue;
                const Complex phase = apq / mag;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(qq, qq).real();
                const double zeta = (app - aqq) / (2.0 * mag);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Right-multiply columns p,q by U = [[c, -s e^{i phi}],[s e^{-i phi}, c]].
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex aip = a(i, p), aiq = a(i, qq);
                    a(i, p) = c * aip + s * std::conj(phase) * aiq;
                    a(i, qq) = -s * phase * aip + c * aiq;
                    const Complex qip = q(i, p), qiq = q(i, qq);
                    q(i, p) = c * qip + s * std::conj(phase) * qiq;
                    q(i, qq) = -s * phase * qip + c * qiq;
                }
                // Left-multiply rows p,q by U^dag.
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex apj = a(p, j), aqj = a(qq, j);
                    a(p, j) = c * apj + s * phase * aqj;
                    a(qq, j) = -s * std::conj(phase) * apj + c * aqj;
                }
                a(p, qq) = 0.0;
                a(qq, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(qq, qq) = a(qq, qq).real();
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EigenResult r;
    r.values.resize(n);
    r.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        r.values[k] = a(order[k], order[k]).real();
        r.vectors.set_column(k, q.column(order[k]));
    }
    fix_column_phases(r.vectors);
    return r;
}

LeastSquaresResult solve_least_squares(const ComplexMatrix& a, const ComplexVector& b) {
    if (a.rows() == 0 || a.cols() == 0) throw ShapeError("solve_least_squares: empty system");
    if (a.rows() != b.size()) throw ShapeError("solve_least_squares: rhs length mismatch");
    const std::size_t n = a.cols();

    // Minimum-norm solution through the spectral decomposition of A^dag A.
    const ComplexMatrix adj = a.adjoint();
    const ComplexMatrix gram = adj * a;
    const ComplexVector rhs = adj * b;
    const EigenResult eig = hermitian_eig(gram);

    const double sigma_max = eig.values.empty() ? 0.0 : std::max(eig.values[0], 0.0);
    const double threshold = sigma_max * static_cast<double>(n) * 1e-14;

    auto project = [&](const ComplexVector& r) {
        ComplexVector x(n, Complex(0.0));
        for (std::size_t k = 0; k < n; ++k) {
            if (eig.values[k] <= threshold || eig.values[k] <= 0.0) continue;
            const ComplexVector vk = eig.vectors.column(k);
            const Complex coeff = dot(vk, r) / eig.values[k];
            for (std::size_t i = 0; i < n; ++i) x[i] += coeff * vk[i];
        }
        return x;
    };

    LeastSquaresResult out;
    out.x = project(rhs);
    // One refinement pass sharpens the residual of consistent systems.
    const ComplexVector r1 = b - a * out.x;
    const ComplexVector corr = project(adj * r1);
    for (std::size_t i = 0; i < n; ++i) out.x[i] += corr[i];

    out.residual = norm(b - a * out.x);
    for (double v : eig.values)
        if (v > threshold) ++out.rank;
    out.rank_deficient = out.rank < std::min(a.rows(), a.cols());
    return out;
}

ComplexMatrix matrix_exp(const ComplexMatrix& m, double scale) {
    if (!m.is_square()) throw ShapeError("matrix_exp: matrix not square");
    const std::size_t n = m.rows();
    ComplexMatrix g = Complex(0.0, -scale) * m;

    const double nrm = g.frobenius_norm();
    int squarings = 0;
    if (nrm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
        g = Complex(std::ldexp(1.0, -squarings)) * g;
    }

    ComplexMatrix sum = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 64; ++k) {
        term = Complex(1.0 / k) * (term * g);
        sum = sum + term;
        if (term.frobenius_norm() <= 1e-20 * sum.frobenius_norm()) break;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

}  // namespace msfactor::linalg
