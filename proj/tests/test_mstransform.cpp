#include <doctest.h>

#include <cmath>

#include "msfactor/mstransform.hpp"
#include "msfactor/rng.hpp"
#include "test_helpers.hpp"

using namespace msfactor;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// The worked three-level example: columns (1,0,0) and (1,1,0)/sqrt(2).
ComplexMatrix example_3x2() {
    return ComplexMatrix::from_rows(
        {{1.0, kInvSqrt2}, {0.0, kInvSqrt2}, {0.0, 0.0}});
}

void check_decomposition(const ComplexMatrix& v, const mstransform::MSDecomposition& dec) {
    const std::size_t n_a = v.rows(), n_b = v.cols();
    CHECK(linalg::unitarity_defect(dec.a_matrix) <= 1e-12);
    CHECK(linalg::unitarity_defect(dec.b_matrix) <= 1e-12);
    // transformed coupling matches the lambda pattern entrywise
    const ComplexMatrix vt = dec.a_matrix * v * dec.b_matrix.adjoint();
    const ComplexMatrix pattern = mstransform::coupling_pattern(dec);
    CHECK((vt - pattern).frobenius_norm() <= 1e-10 * std::max(1.0, v.frobenius_norm()));
    // roundtrip
    const ComplexMatrix back = dec.a_matrix.adjoint() * pattern * dec.b_matrix;
    CHECK((back - v).frobenius_norm() <= 1e-10 * std::max(1.0, v.frobenius_norm()));
    // spectral consistency
    const auto eig = linalg::hermitian_eig(v.adjoint() * v);
    for (std::size_t k = 0; k < n_b; ++k)
        CHECK(std::abs(dec.lambdas[k] * dec.lambdas[k] - std::max(0.0, eig.values[k])) <= 1e-10);
    // dark rows annihilate V
    for (std::size_t r = 0; r < dec.null_rows(); ++r) {
        ComplexVector row(n_b, Complex(0.0));
        for (std::size_t j = 0; j < n_b; ++j)
            for (std::size_t i = 0; i < n_a; ++i) row[j] += dec.a_matrix(r, i) * v(i, j);
        CHECK(linalg::norm(row) <= 1e-10 * std::max(1.0, v.frobenius_norm()));
    }
}

}  // namespace

TEST_CASE("decompose: scalar and orthonormal-column examples") {
    const auto d1 = mstransform::decompose(ComplexMatrix::from_rows({{1.0}}));
    CHECK(d1.lambdas[0] == doctest::Approx(1.0));
    CHECK(d1.n_dark == 0);
    CHECK(std::abs(d1.a_matrix(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(d1.b_matrix(0, 0) - 1.0) < 1e-14);

    const auto v = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}});
    const auto d2 = mstransform::decompose(v);
    CHECK(d2.lambdas[0] == doctest::Approx(1.0));
    CHECK(d2.lambdas[1] == doctest::Approx(1.0));
    CHECK(d2.n_dark == 1);
    // the dark row is e3 (up to phase fixing it is exactly e3)
    CHECK(std::abs(d2.a_matrix(0, 2) - 1.0) < 1e-14);
    CHECK(std::abs(d2.a_matrix(0, 0)) < 1e-14);
    check_decomposition(v, d2);
}

TEST_CASE("decompose: worked 3x2 couplings") {
    const auto dec = mstransform::decompose(example_3x2());
    CHECK(dec.lambdas[0] * dec.lambdas[0] == doctest::Approx(1.0 + kInvSqrt2).epsilon(1e-12));
    CHECK(dec.lambdas[1] * dec.lambdas[1] == doctest::Approx(1.0 - kInvSqrt2).epsilon(1e-12));
    CHECK(dec.n_dark == 1);
    check_decomposition(example_3x2(), dec);
}

TEST_CASE("decompose: rejects n_a < n_b") {
    CHECK_THROWS_AS((void)mstransform::decompose(ComplexMatrix(1, 2)), PreconditionError);
}

TEST_CASE("decompose: random rectangular couplings") {
    Rng rng(21);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n_b = rng.integer(1, 4);
        const std::size_t n_a = n_b + rng.integer(0, 3);
        const ComplexMatrix v = rng.matrix_in_disk(n_a, n_b);
        check_decomposition(v, mstransform::decompose(v));
    }
}

TEST_CASE("decompose: rank-deficient couplings produce zero lambdas") {
    // second column is a multiple of the first
    ComplexMatrix v(3, 2);
    v(0, 0) = Complex(0.6, 0.2);
    v(1, 0) = Complex(-0.3, 0.4);
    v(2, 0) = 0.5;
    for (std::size_t i = 0; i < 3; ++i) v(i, 1) = Complex(0.5, -0.25) * v(i, 0);
    const auto dec = mstransform::decompose(v);
    CHECK(dec.lambdas[1] == 0.0);
    CHECK(dec.n_dark == 2);  // one structural plus one zero-lambda
    check_decomposition(v, dec);
}

TEST_CASE("ms_hamiltonian: pattern and transformed-hamiltonian equality") {
    const auto d1 = mstransform::decompose(ComplexMatrix::from_rows({{1.0}}));
    const auto h1 = mstransform::ms_hamiltonian(d1, 0.0, 1.0);
    CHECK(std::abs(h1(0, 1) - 1.0) < 1e-14);
    CHECK(std::abs(h1(1, 0) - 1.0) < 1e-14);
    CHECK(std::abs(h1(0, 0)) == 0.0);

    const auto v = example_3x2();
    const auto dec = mstransform::decompose(v);
    const double delta = 2.0;
    const auto hms = mstransform::ms_hamiltonian(dec, delta, 1.0);
    CHECK(hms(3, 3) == Complex(delta));
    CHECK(hms(4, 4) == Complex(delta));
    CHECK(std::abs(hms(1, 3) - dec.lambdas[0]) < 1e-14);
    CHECK(std::abs(hms(2, 4) - dec.lambdas[1]) < 1e-14);

    // equals S0 H0 S0^dag built by matrix algebra
    ComplexMatrix h0(5, 5);
    h0.set_block(0, 3, v);
    h0.set_block(3, 0, v.adjoint());
    h0(3, 3) = delta;
    h0(4, 4) = delta;
    ComplexMatrix s0(5, 5);
    s0.set_block(0, 0, dec.a_matrix);
    s0.set_block(3, 3, dec.b_matrix);
    CHECK((s0 * h0 * s0.adjoint() - hms).frobenius_norm() <= 1e-10 * h0.frobenius_norm());

    // f = 0 leaves only the detuning diagonal
    const auto off = mstransform::ms_hamiltonian(dec, delta, 0.0);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            if (i != j) CHECK(std::abs(off(i, j)) == 0.0);
}

TEST_CASE("gram_matrices: examples and trace identity") {
    const auto [vv, vtv] = mstransform::gram_matrices(ComplexMatrix::from_rows({{1.0}, {0.0}}));
    CHECK(std::abs(vv(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(vv(1, 1)) == 0.0);
    CHECK(std::abs(vtv(0, 0) - 1.0) < 1e-15);

    const auto ortho = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}});
    CHECK(testing::matrix_distance(mstransform::gram_matrices(ortho).second,
                                   ComplexMatrix::identity(2)) < 1e-15);

    Rng rng(22);
    const ComplexMatrix v = rng.matrix_in_disk(4, 3);
    const auto [g1, g2] = mstransform::gram_matrices(v);
    const double f2 = v.frobenius_norm() * v.frobenius_norm();
    CHECK(std::abs(g1.trace().real() - f2) <= 1e-12 * std::max(1.0, f2));
    CHECK(std::abs(g2.trace().real() - f2) <= 1e-12 * std::max(1.0, f2));
}

TEST_CASE("nb2_closed_form: orthogonal columns") {
    const auto closed = mstransform::nb2_closed_form(
        ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 2.0}}));
    CHECK(closed.lambda_plus * closed.lambda_plus == doctest::Approx(4.0));
    CHECK(closed.lambda_minus * closed.lambda_minus == doctest::Approx(1.0));
}

TEST_CASE("nb2_closed_form: worked 3x2 example") {
    const auto closed = mstransform::nb2_closed_form(example_3x2());
    CHECK(closed.theta == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    CHECK(closed.sigma == doctest::Approx(0.0));
    CHECK(closed.lambda_plus * closed.lambda_plus ==
          doctest::Approx(1.0 + kInvSqrt2).epsilon(1e-12));
    CHECK(closed.lambda_minus * closed.lambda_minus ==
          doctest::Approx(1.0 - kInvSqrt2).epsilon(1e-12));
    CHECK(linalg::unitarity_defect(closed.b0_matrix) <= 1e-12);
}

TEST_CASE("nb2_closed_form: sigma is the phase of the Gram cross term") {
    const auto v = ComplexMatrix::from_rows({{1.0, Complex(0.0, 1.0)}, {0.0, 1.0}});
    const auto closed = mstransform::nb2_closed_form(v);
    Complex inner = 0.0;
    for (std::size_t i = 0; i < 2; ++i) inner += std::conj(v(i, 0)) * v(i, 1);
    CHECK(closed.sigma == doctest::Approx(std::arg(inner)));
    // (V^dag V) b = lambda^2 b for both rows of B0
    const auto g = (v.adjoint() * v);
    for (int which = 0; which < 2; ++which) {
        ComplexVector b(2);
        for (std::size_t j = 0; j < 2; ++j) b[j] = std::conj(closed.b0_matrix(which, j));
        const double l2 = which == 0 ? closed.lambda_plus * closed.lambda_plus
                                     : closed.lambda_minus * closed.lambda_minus;
        ComplexVector gb = g * b;
        for (std::size_t j = 0; j < 2; ++j) gb[j] -= l2 * b[j];
        CHECK(linalg::norm(gb) <= 1e-12);
    }
}

TEST_CASE("nb2_closed_form: degenerate mixing angle is rejected") {
    CHECK_THROWS_AS((void)mstransform::nb2_closed_form(ComplexMatrix::identity(2)),
                    PreconditionError);
    CHECK_THROWS_AS((void)mstransform::nb2_closed_form(ComplexMatrix(3, 3)), PreconditionError);
}

TEST_CASE("nb2_closed_form agrees with decompose on random couplings") {
    Rng rng(23);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n_a = rng.integer(2, 6);
        const ComplexMatrix v = rng.matrix_in_disk(n_a, 2);
        const auto closed = mstransform::nb2_closed_form(v);
        const auto dec = mstransform::decompose(v);
        CHECK(std::abs(closed.lambda_plus - dec.lambdas[0]) <= 1e-10);
        CHECK(std::abs(closed.lambda_minus - dec.lambdas[1]) <= 1e-10);
        // b rows agree up to phase
        for (std::size_t k = 0; k < 2; ++k) {
            ComplexVector closed_b(2), dec_b(2);
            for (std::size_t j = 0; j < 2; ++j) {
                closed_b[j] = std::conj(closed.b0_matrix(k, j));
                dec_b[j] = std::conj(dec.b_matrix(k, j));
            }
            const Complex overlap = linalg::dot(closed_b, dec_b);
            const Complex phase = overlap / std::abs(overlap);
            for (std::size_t j = 0; j < 2; ++j) closed_b[j] *= phase;
            CHECK(linalg::distance(closed_b, dec_b) <= 1e-9);
        }
    }
}

TEST_CASE("remix_dark_rows keeps A unitary and the pattern intact") {
    Rng rng(24);
    const ComplexMatrix v = rng.matrix_in_disk(5, 2);
    const auto dec = mstransform::decompose(v);
    const auto remixed = mstransform::remix_dark_rows(dec, rng.unitary(dec.null_rows()));
    CHECK(linalg::unitarity_defect(remixed.a_matrix) <= 1e-12);
    check_decomposition(v, remixed);
    CHECK_THROWS_AS((void)mstransform::remix_dark_rows(dec, ComplexMatrix(1, 1)), ShapeError);
}
