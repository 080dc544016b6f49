#include <doctest.h>

#include <cmath>

#include "msfactor/oracle.hpp"
#include "msfactor/rng.hpp"
#include "test_helpers.hpp"

using namespace msfactor;
using linalg::Complex;
using linalg::ComplexMatrix;

TEST_CASE("integrate_full: zero Hamiltonian gives the identity") {
    auto spec = testing::make_spec(ComplexMatrix(2, 1), {model::PulseKind::Constant, 0.0},
                                   {model::DetuningKind::Constant, 0.0, 0.0});
    const auto r = oracle::integrate_full(spec, 0.0, 2.0, 1e-10, false);
    CHECK(testing::matrix_distance(r.propagator.matrix, ComplexMatrix::identity(3)) <= 1e-12);
    CHECK(r.unitarity_defect <= 1e-9);
}

TEST_CASE("integrate_full: constant Hamiltonian matches matrix_exp") {
    auto spec = testing::make_spec(ComplexMatrix::from_rows({{Complex(0.8, 0.3)}, {0.5}}),
                                   {model::PulseKind::Constant, 1.0},
                                   {model::DetuningKind::Constant, 1.2, 0.0});
    const double t = 1.4;
    const auto r = oracle::integrate_full(spec, 0.0, t, 1e-10, false);
    const auto expected = linalg::matrix_exp(model::hamiltonian(spec, 0.0, false), t);
    CHECK(testing::matrix_distance(r.propagator.matrix, expected) <= 1e-9);
    CHECK(r.est_error <= 1e-10);
}

TEST_CASE("integrate_full: resonant pi pulse transfers everything") {
    auto spec = testing::make_spec(ComplexMatrix::from_rows({{M_PI / 2.0}}),
                                   {model::PulseKind::Constant, 1.0},
                                   {model::DetuningKind::Constant, 0.0, 0.0});
    const auto r = oracle::integrate_full(spec, 0.0, 1.0, 1e-10, false);
    CHECK(std::abs(std::abs(r.propagator.matrix(1, 0)) - 1.0) <= 1e-10);
}

TEST_CASE("integrate_full: tolerance preconditions") {
    auto spec = testing::make_spec(ComplexMatrix::from_rows({{1.0}}),
                                   {model::PulseKind::Constant, 1.0},
                                   {model::DetuningKind::Constant, 0.0, 0.0});
    CHECK_THROWS_AS((void)oracle::integrate_full(spec, 0.0, 1.0, 1e-13, false), PreconditionError);
    CHECK_THROWS_AS((void)oracle::integrate_full(spec, 0.0, 1.0, 1e-3, false), PreconditionError);
}

TEST_CASE("integrate_full: tightening the tolerance never drifts away from a fine reference") {
    Rng rng(51);
    auto spec = testing::random_system(rng, 3, 2);
    const auto reference = oracle::integrate_full(spec, -3.0, 3.0, 1e-12, false);
    double prev = 1e9;
    for (double tol : {1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
        const auto r = oracle::integrate_full(spec, -3.0, 3.0, tol, false);
        const double dev =
            testing::matrix_distance(r.propagator.matrix, reference.propagator.matrix);
        CHECK(dev <= prev + 1e-12);
        prev = dev;
    }
}

TEST_CASE("charpoly_eigs: fixed examples and named errors") {
    CHECK(oracle::charpoly_eigs(ComplexMatrix::from_rows({{-4.2}}))[0] == doctest::Approx(-4.2));
    const auto two = oracle::charpoly_eigs(ComplexMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}}));
    CHECK(two[0] == doctest::Approx(3.0));
    CHECK(two[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)oracle::charpoly_eigs(ComplexMatrix::identity(4)), PreconditionError);
    const auto bad = ComplexMatrix::from_rows({{0.0, 1.0}, {2.0, 0.0}});
    CHECK_THROWS_AS((void)oracle::charpoly_eigs(bad), NotHermitianError);
}

TEST_CASE("charpoly_eigs cross-validates hermitian_eig for n <= 3") {
    Rng rng(52);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = rng.integer(1, 3);
        const ComplexMatrix m = rng.hermitian(n);
        const auto a = oracle::charpoly_eigs(m);
        const auto b = linalg::hermitian_eig(m).values;
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-9);
    }
}

TEST_CASE("factorized propagator equals brute force on random systems") {
    Rng rng(53);
    for (int rep = 0; rep < 3; ++rep) {
        auto spec = testing::random_system(rng, 4, 2);
        const auto ms = assemble::propagate_system(spec, -3.0, 3.0, 1e-11);
        const auto direct = oracle::integrate_full(spec, -3.0, 3.0, 1e-9, false);
        CHECK(testing::matrix_distance(ms.diabatic.matrix, direct.propagator.matrix) <= 1e-6);
    }
}
