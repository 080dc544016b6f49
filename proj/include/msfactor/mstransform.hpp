#pragma once

#include <utility>
#include <vector>

#include "msfactor/linalg.hpp"

namespace msfactor::mstransform {

/// Constant unitary factorization of a coupling matrix V (n_a x n_b,
/// n_a >= n_b): A V B^dag has zero entries everywhere except lambdas[k] at
/// position (null_rows + k, k). Rows of a_matrix are ordered with the
/// n_a - n_b decoupled (dark) rows first, then the n_b coupled rows in
/// descending-lambda order.
struct MSDecomposition {
    linalg::ComplexMatrix a_matrix;  // n_a x n_a unitary
    linalg::ComplexMatrix b_matrix;  // n_b x n_b unitary
    std::vector<double> lambdas;     // nonnegative, descending, length n_b
    std::size_t n_dark = 0;          // n_a - n_b plus the number of zero lambdas

    std::size_t n_a() const { return a_matrix.rows(); }
    std::size_t n_b() const { return b_matrix.rows(); }
    std::size_t null_rows() const { return n_a() - n_b(); }

    /// Coupled ground vector paired with lambdas[k] (conjugate of a_matrix
    /// row null_rows()+k).
    linalg::ComplexVector a_vector(std::size_t k) const;
    /// Excited vector paired with lambdas[k] (conjugate of b_matrix row k).
    linalg::ComplexVector b_vector(std::size_t k) const;
};

MSDecomposition decompose(const linalg::ComplexMatrix& v);

/// The patterned n_a x n_b matrix with lambdas[k] at (null_rows + k, k).
linalg::ComplexMatrix coupling_pattern(const MSDecomposition& dec);

/// Transformed Hamiltonian at pulse value f and detuning delta: zero dark
/// block, lambda_k * f pairing couplings, delta on the b diagonal.
linalg::ComplexMatrix ms_hamiltonian(const MSDecomposition& dec, double delta, double f);

/// (V V^dag, V^dag V); the second is the Gram matrix of the coupling columns.
std::pair<linalg::ComplexMatrix, linalg::ComplexMatrix> gram_matrices(const linalg::ComplexMatrix& v);

/// Closed-form two-column factorization data. theta and sigma parameterize
/// the excited-state mixing; b0_matrix is the 2x2 unitary built from them.
struct Nb2ClosedForm {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double theta = 0.0;  // in [0, pi/2]
    double sigma = 0.0;  // in (-pi, pi]
    linalg::ComplexMatrix b0_matrix;
};

/// Requires exactly two columns and a nondegenerate mixing angle
/// (|col0| != |col1| or <col0|col1> != 0); otherwise throws PreconditionError
/// directing the caller to decompose().
Nb2ClosedForm nb2_closed_form(const linalg::ComplexMatrix& v);

/// Left-multiplies the structural dark rows of A by r (null_rows x null_rows
/// unitary). The diabatic propagator must be invariant under this.
MSDecomposition remix_dark_rows(const MSDecomposition& dec, const linalg::ComplexMatrix& r);

}  // namespace msfactor::mstransform
