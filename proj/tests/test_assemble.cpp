#include <doctest.h>

#include <cmath>

#include "msfactor/assemble.hpp"
#include "msfactor/rng.hpp"
#include "test_helpers.hpp"

using namespace msfactor;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

namespace {

twostate::CayleyKlein ck_of(Complex alpha, Complex beta, double phase = 0.0) {
    twostate::CayleyKlein ck;
    ck.alpha = alpha;
    ck.beta = beta;
    ck.delta_phase = phase;
    return ck;
}

std::vector<twostate::CayleyKlein> random_cks(Rng& rng, std::size_t n) {
    std::vector<twostate::CayleyKlein> cks;
    for (std::size_t k = 0; k < n; ++k) {
        const double pop = rng.uniform();
        const Complex a = std::polar(std::sqrt(pop), rng.uniform(-M_PI, M_PI));
        const Complex b = std::polar(std::sqrt(1.0 - pop), rng.uniform(-M_PI, M_PI));
        cks.push_back(ck_of(a, b, rng.uniform(-3.0, 3.0)));
    }
    return cks;
}

}  // namespace

TEST_CASE("ms_propagator: identity and single-pair patterns") {
    const auto dec = mstransform::decompose(ComplexMatrix::from_rows({{1.0}}));
    const auto id = assemble::ms_propagator(dec, {ck_of(1.0, 0.0)});
    CHECK(testing::matrix_distance(id.matrix, ComplexMatrix::identity(2)) == 0.0);
    CHECK(id.basis == assemble::Basis::MS);

    const auto flip = assemble::ms_propagator(dec, {ck_of(0.0, Complex(0.0, -1.0))});
    CHECK(std::abs(flip.matrix(0, 1) - Complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(flip.matrix(1, 0) - Complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(flip.matrix(0, 0)) == 0.0);
}

TEST_CASE("ms_propagator: sparsity pattern and unitarity on random pairs") {
    Rng rng(41);
    const auto dec = mstransform::decompose(rng.matrix_in_disk(3, 2));
    const auto cks = random_cks(rng, 2);
    const auto u = assemble::ms_propagator(dec, cks);
    CHECK(linalg::unitarity_defect(u.matrix) <= 1e-12);
    const std::size_t nd = dec.null_rows();
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            const bool dark_identity = i < nd && j < nd && i == j;
            const bool pair_block =
                (i >= nd && j >= nd) &&
                ((i < 3 ? i - nd : i - 3) == (j < 3 ? j - nd : j - 3));
            if (!dark_identity && !pair_block) CHECK(std::abs(u.matrix(i, j)) == 0.0);
        }
    CHECK_THROWS_AS((void)assemble::ms_propagator(dec, {}), ShapeError);
}

TEST_CASE("diabatic_propagator: completeness gives the identity") {
    Rng rng(42);
    const auto dec = mstransform::decompose(rng.matrix_in_disk(4, 2));
    const auto u = assemble::diabatic_propagator(dec, {ck_of(1.0, 0.0), ck_of(1.0, 0.0)});
    CHECK(testing::matrix_distance(u.matrix, ComplexMatrix::identity(6)) <= 1e-12);
}

TEST_CASE("diabatic_propagator: worked two-level example") {
    const auto dec = mstransform::decompose(ComplexMatrix::from_rows({{1.0}, {0.0}}));
    const auto u = assemble::diabatic_propagator(dec, {ck_of(0.0, Complex(0.0, -1.0))});
    CHECK(std::abs(u.matrix(0, 0)) < 1e-14);          // driven ground state emptied
    CHECK(std::abs(u.matrix(1, 1) - 1.0) < 1e-14);    // dark state untouched
    CHECK(std::abs(u.matrix(2, 0) - Complex(0.0, -1.0)) < 1e-14);  // excited amplitude
}

TEST_CASE("diabatic_propagator equals the S^dag U S construction") {
    Rng rng(43);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n_b = rng.integer(1, 3);
        const std::size_t n_a = n_b + rng.integer(0, 3);
        const auto dec = mstransform::decompose(rng.matrix_in_disk(n_a, n_b));
        const auto cks = random_cks(rng, n_b);
        const auto direct = assemble::diabatic_propagator(dec, cks);
        const auto via_s = assemble::diabatic_from_ms(dec, assemble::ms_propagator(dec, cks));
        CHECK(testing::matrix_distance(direct.matrix, via_s.matrix) <= 1e-12);
        CHECK(linalg::unitarity_defect(direct.matrix) <= 1e-9);
        // probability conservation per column
        for (std::size_t j = 0; j < direct.matrix.cols(); ++j)
            CHECK(linalg::norm(direct.matrix.column(j)) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("dark-state choice never reaches the diabatic propagator") {
    Rng rng(44);
    for (int rep = 0; rep < 8; ++rep) {
        const std::size_t n_b = rng.integer(1, 2);
        const std::size_t n_a = n_b + 2;  // at least two dark states
        const auto dec = mstransform::decompose(rng.matrix_in_disk(n_a, n_b));
        const auto remixed = mstransform::remix_dark_rows(dec, rng.unitary(dec.null_rows()));
        const auto cks = random_cks(rng, n_b);
        const auto u1 = assemble::diabatic_from_ms(dec, assemble::ms_propagator(dec, cks));
        const auto u2 = assemble::diabatic_from_ms(remixed, assemble::ms_propagator(remixed, cks));
        CHECK(testing::matrix_distance(u1.matrix, u2.matrix) <= 1e-9);
        // the projector route is exactly blind to the remix
        const auto p1 = assemble::diabatic_propagator(dec, cks);
        const auto p2 = assemble::diabatic_propagator(remixed, cks);
        CHECK(testing::matrix_distance(p1.matrix, p2.matrix) == 0.0);
    }
}

TEST_CASE("no darks and diagonal couplings reduce to independent 2x2 blocks") {
    ComplexMatrix v(2, 2);
    v(0, 0) = 2.0;
    v(1, 1) = 1.0;
    const auto dec = mstransform::decompose(v);
    const auto cks = std::vector<twostate::CayleyKlein>{
        ck_of(Complex(0.6, 0.0), Complex(0.0, 0.8), 0.7), ck_of(Complex(0.0, 1.0), 0.0, -0.2)};
    const auto u = assemble::diabatic_propagator(dec, cks).matrix;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto u2 = cks[k].to_matrix();
        CHECK(std::abs(u(k, k) - u2(0, 0)) < 1e-12);
        CHECK(std::abs(u(k, 2 + k) - u2(0, 1)) < 1e-12);
        CHECK(std::abs(u(2 + k, k) - u2(1, 0)) < 1e-12);
        CHECK(std::abs(u(2 + k, 2 + k) - u2(1, 1)) < 1e-12);
    }
    CHECK(std::abs(u(0, 1)) == 0.0);
    CHECK(std::abs(u(0, 3)) == 0.0);
}

TEST_CASE("apply: basis tags and norm preservation") {
    Rng rng(45);
    const auto dec = mstransform::decompose(rng.matrix_in_disk(3, 2));
    const auto cks = random_cks(rng, 2);
    const auto u = assemble::diabatic_propagator(dec, cks);

    assemble::StateVector c;
    c.basis = assemble::Basis::Diabatic;
    c.amplitudes.resize(5);
    for (auto& z : c.amplitudes) z = rng.complex_in_disk();
    const double n0 = linalg::norm(c.amplitudes);
    const auto out = assemble::apply(u, c);
    CHECK(linalg::norm(out.amplitudes) == doctest::Approx(n0).epsilon(1e-10));

    assemble::StateVector wrong = c;
    wrong.basis = assemble::Basis::MS;
    CHECK_THROWS_AS((void)assemble::apply(u, wrong), BasisMismatchError);
}

TEST_CASE("pi pulse through the full pipeline empties the ground state") {
    auto spec = testing::make_spec(ComplexMatrix::from_rows({{M_PI / 2.0}}),
                                   {model::PulseKind::Constant, 1.0},
                                   {model::DetuningKind::Constant, 0.0, 0.0});
    const auto run = assemble::propagate_system(spec, 0.0, 1.0);
    assemble::StateVector c{{1.0, 0.0}, assemble::Basis::Diabatic};
    const auto out = assemble::apply(run.diabatic, c);
    CHECK(std::norm(out.amplitudes[0]) < 1e-12);
    CHECK(std::norm(out.amplitudes[1]) == doctest::Approx(1.0).epsilon(1e-10));
}
