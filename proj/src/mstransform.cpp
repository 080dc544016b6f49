#include "msfactor/mstransform.hpp"

#include <algorithm>
#include <cmath>

namespace msfactor::mstransform {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

linalg::ComplexVector MSDecomposition::a_vector(std::size_t k) const {
    ComplexVector v = a_matrix.row(null_rows() + k);
    for (auto& z : v) z = std::conj(z);
    return v;
}

linalg::ComplexVector MSDecomposition::b_vector(std::size_t k) const {
    ComplexVector v = b_matrix.row(k);
    for (auto& z : v) z = std::conj(z);
    return v;
}

namespace {

void fix_vector_phase(ComplexVector& v) {
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best + 1e-15) {
            best = a;
            imax = i;
        }
    }
    if (best <= 0.0) return;
    const Complex phase = std::conj(v[imax]) / std::abs(v[imax]);
    for (auto& z : v) z *= phase;
}

// Deterministic orthonormal completion of a set of orthonormal columns,
// grown from the standard basis by twice-iterated Gram-Schmidt.
std::vector<ComplexVector> orthonormal_complement(const std::vector<ComplexVector>& basis,
                                                  std::size_t dim, std::size_t count) {
    std::vector<ComplexVector> all = basis;
    std::vector<ComplexVector> extra;
    for (std::size_t cand = 0; cand < dim && extra.size() < count; ++cand) {
        ComplexVector v(dim, Complex(0.0));
        v[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : all) {
                const Complex c = linalg::dot(u, v);
                for (std::size_t i = 0; i < dim; ++i) v[i] -= c * u[i];
            }
        }
        const double nn = linalg::norm(v);
        if (nn < 1e-7) continue;
        for (auto& z : v) z /= nn;
        fix_vector_phase(v);
        all.push_back(v);
        extra.push_back(v);
    }
    if (extra.size() != count)
        throw ConvergenceError("orthonormal_complement: failed to span the complement");
    return extra;
}

}  // namespace

MSDecomposition decompose(const ComplexMatrix& v) {
    const std::size_t n_a = v.rows();
    const std::size_t n_b = v.cols();
    if (n_a < n_b)
        throw PreconditionError("decompose: requires n_a >= n_b; transpose the roles first");
    if (n_b == 0) throw PreconditionError("decompose: empty coupling matrix");

    const double fro2 = v.frobenius_norm() * v.frobenius_norm();
    const double zero_threshold = 1e-10 * std::max(1.0, fro2);

    const linalg::EigenResult eig = linalg::hermitian_eig(v.adjoint() * v);

    MSDecomposition dec;
    dec.lambdas.resize(n_b);
    dec.b_matrix = eig.vectors.adjoint();  // rows are the excited MS bras

    std::size_t zero_count = 0;
    for (std::size_t k = 0; k < n_b; ++k) {
        const double val = eig.values[k];
        if (val <= zero_threshold) {
            dec.lambdas[k] = 0.0;
            ++zero_count;
        } else {
            dec.lambdas[k] = std::sqrt(val);
        }
    }
    dec.n_dark = (n_a - n_b) + zero_count;

    // Coupled ground vectors come from V itself: a_k = V b_k / lambda_k.
    // This pins the pairing and relative sign that an independent
    // eigendecomposition of V V^dag would leave loose.
    std::vector<ComplexVector> coupled;
    for (std::size_t k = 0; k < n_b; ++k) {
        if (dec.lambdas[k] == 0.0) continue;
        ComplexVector a = v * eig.vectors.column(k);
        for (auto& z : a) z /= dec.lambdas[k];
        coupled.push_back(std::move(a));
    }

    const std::vector<ComplexVector> fill =
        orthonormal_complement(coupled, n_a, n_a - coupled.size());

    dec.a_matrix = ComplexMatrix(n_a, n_a);
    auto set_bra = [&](std::size_t row, const ComplexVector& ket) {
        for (std::size_t j = 0; j < n_a; ++j) dec.a_matrix(row, j) = std::conj(ket[j]);
    };
    const std::size_t nd = n_a - n_b;
    std::size_t fill_idx = 0;
    for (std::size_t r = 0; r < nd; ++r) set_bra(r, fill[fill_idx++]);
    std::size_t coupled_idx = 0;
    for (std::size_t k = 0; k < n_b; ++k) {
        if (dec.lambdas[k] > 0.0)
            set_bra(nd + k, coupled[coupled_idx++]);
        else
            set_bra(nd + k, fill[fill_idx++]);
    }
    return dec;
}

ComplexMatrix coupling_pattern(const MSDecomposition& dec) {
    ComplexMatrix p(dec.n_a(), dec.n_b());
    for (std::size_t k = 0; k < dec.n_b(); ++k) p(dec.null_rows() + k, k) = dec.lambdas[k];
    return p;
}

ComplexMatrix ms_hamiltonian(const MSDecomposition& dec, double delta, double f) {
    const std::size_t n_a = dec.n_a();
    const std::size_t n_b = dec.n_b();
    ComplexMatrix h(n_a + n_b, n_a + n_b);
    for (std::size_t k = 0; k < n_b; ++k) {
        const double c = dec.lambdas[k] * f;
        h(dec.null_rows() + k, n_a + k) = c;
        h(n_a + k, dec.null_rows() + k) = c;
        h(n_a + k, n_a + k) = delta;
    }
    return h;
}

std::pair<ComplexMatrix, ComplexMatrix> gram_matrices(const ComplexMatrix& v) {
    return {v * v.adjoint(), v.adjoint() * v};
}

Nb2ClosedForm nb2_closed_form(const ComplexMatrix& v) {
    if (v.cols() != 2) throw PreconditionError("nb2_closed_form: exactly two columns required");
    const std::size_t n = v.rows();

    double p1 = 0.0, p2 = 0.0;
    Complex c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p1 += std::norm(v(i, 0));
        p2 += std::norm(v(i, 1));
        c += std::conj(v(i, 0)) * v(i, 1);
    }
    const double scale = std::max(p1 + p2, 1e-300);
    if (std::abs(c) <= 1e-14 * scale && std::abs(p2 - p1) <= 1e-14 * scale)
        throw PreconditionError(
            "nb2_closed_form: degenerate mixing angle (tan 2theta = 0/0); use decompose()");

    Nb2ClosedForm out;
    const double two_theta = std::atan2(2.0 * std::abs(c), p2 - p1);  // in (0, pi)
    out.theta = 0.5 * two_theta;
    out.sigma = std::abs(c) > 0.0 ? std::arg(c) : 0.0;

    const double disc = std::hypot(p1 - p2, 2.0 * std::abs(c));
    out.lambda_plus = std::sqrt(0.5 * (p1 + p2 + disc));
    out.lambda_minus = std::sqrt(std::max(0.0, 0.5 * (p1 + p2 - disc)));

    const double st = std::sin(out.theta), ct = std::cos(out.theta);
    const Complex em = std::polar(1.0, -out.sigma);
    out.b0_matrix = ComplexMatrix(2, 2);
    out.b0_matrix(0, 0) = em * st;
    out.b0_matrix(0, 1) = ct;
    out.b0_matrix(1, 0) = em * ct;
    out.b0_matrix(1, 1) = -st;
    return out;
}

MSDecomposition remix_dark_rows(const MSDecomposition& dec, const ComplexMatrix& r) {
    const std::size_t nd = dec.null_rows();
    if (r.rows() != nd || r.cols() != nd)
        throw ShapeError("remix_dark_rows: remix matrix must be null_rows x null_rows");
    MSDecomposition out = dec;
    const ComplexMatrix dark = dec.a_matrix.block(0, 0, nd, dec.n_a());
    out.a_matrix.set_block(0, 0, r * dark);
    return out;
}

}  // namespace msfactor::mstransform
