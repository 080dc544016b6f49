#include "msfactor/assemble.hpp"

#include <cmath>

namespace msfactor::assemble {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

linalg::ComplexMatrix s_matrix(const mstransform::MSDecomposition& dec) {
    const std::size_t n_a = dec.n_a(), n_b = dec.n_b();
    ComplexMatrix s(n_a + n_b, n_a + n_b);
    s.set_block(0, 0, dec.a_matrix);
    s.set_block(n_a, n_a, dec.b_matrix);
    return s;
}

namespace {

void require_ck_count(const mstransform::MSDecomposition& dec,
                      const std::vector<twostate::CayleyKlein>& cks) {
    if (cks.size() != dec.n_b())
        throw ShapeError("propagator assembly: need one Cayley-Klein pair per lambda");
}

}  // namespace

PropagatorMatrix ms_propagator(const mstransform::MSDecomposition& dec,
                               const std::vector<twostate::CayleyKlein>& cks) {
    require_ck_count(dec, cks);
    const std::size_t n_a = dec.n_a(), n_b = dec.n_b(), nd = dec.null_rows();

    PropagatorMatrix p;
    p.basis = Basis::MS;
    p.matrix = ComplexMatrix::identity(n_a + n_b);
    for (std::size_t k = 0; k < n_b; ++k) {
        const auto& ck = cks[k];
        const Complex ph = std::polar(1.0, -ck.delta_phase);
        p.matrix(nd + k, nd + k) = ck.alpha;
        p.matrix(nd + k, n_a + k) = -std::conj(ck.beta) * ph;
        p.matrix(n_a + k, nd + k) = ck.beta;
        p.matrix(n_a + k, n_a + k) = std::conj(ck.alpha) * ph;
    }
    if (!cks.empty()) {
        p.t_i = cks.front().t_i;
        p.t_f = cks.front().t_f;
    }
    return p;
}

PropagatorMatrix diabatic_propagator(const mstransform::MSDecomposition& dec,
                                     const std::vector<twostate::CayleyKlein>& cks) {
    require_ck_count(dec, cks);
    const std::size_t n_a = dec.n_a(), n_b = dec.n_b();

    PropagatorMatrix p;
    p.basis = Basis::Diabatic;
    p.matrix = ComplexMatrix(n_a + n_b, n_a + n_b);
    for (std::size_t i = 0; i < n_a; ++i) p.matrix(i, i) = 1.0;

    for (std::size_t k = 0; k < n_b; ++k) {
        const auto& ck = cks[k];
        const Complex ph = std::polar(1.0, -ck.delta_phase);
        const ComplexVector a = dec.a_vector(k);
        const ComplexVector b = dec.b_vector(k);
        const Complex am1 = ck.alpha - 1.0;
        const Complex mbs = -std::conj(ck.beta) * ph;
        const Complex as = std::conj(ck.alpha) * ph;
        for (std::size_t i = 0; i < n_a; ++i) {
            for (std::size_t j = 0; j < n_a; ++j) p.matrix(i, j) += am1 * a[i] * std::conj(a[j]);
            for (std::size_t j = 0; j < n_b; ++j) p.matrix(i, n_a + j) += mbs * a[i] * std::conj(b[j]);
        }
        for (std::size_t i = 0; i < n_b; ++i) {
            for (std::size_t j = 0; j < n_a; ++j) p.matrix(n_a + i, j) += ck.beta * b[i] * std::conj(a[j]);
            for (std::size_t j = 0; j < n_b; ++j) p.matrix(n_a + i, n_a + j) += as * b[i] * std::conj(b[j]);
        }
    }
    if (!cks.empty()) {
        p.t_i = cks.front().t_i;
        p.t_f = cks.front().t_f;
    }
    return p;
}

PropagatorMatrix diabatic_from_ms(const mstransform::MSDecomposition& dec,
                                  const PropagatorMatrix& ms) {
    if (ms.basis != Basis::MS) throw BasisMismatchError("diabatic_from_ms: expected an MS-basis propagator");
    const ComplexMatrix s = s_matrix(dec);
    PropagatorMatrix p;
    p.matrix = s.adjoint() * ms.matrix * s;
    p.basis = Basis::Diabatic;
    p.t_i = ms.t_i;
    p.t_f = ms.t_f;
    return p;
}

StateVector apply(const PropagatorMatrix& p, const StateVector& c) {
    if (p.basis != c.basis) throw BasisMismatchError("apply: propagator and state bases differ");
    if (p.matrix.cols() != c.amplitudes.size())
        throw ShapeError("apply: dimension mismatch");
    return {p.matrix * c.amplitudes, c.basis};
}

MsPropagation propagate_system(const model::SystemSpec& spec, double t_i, double t_f, double tol,
                               const twostate::ShiftedDetuning* shifted) {
    spec.validate();
    MsPropagation out;
    out.dec = mstransform::decompose(spec.chi);

    twostate::ShiftedDetuning sd;
    if (shifted)
        sd = *shifted;
    else
        sd.base = spec.delta;

    out.cks.reserve(out.dec.n_b());
    for (std::size_t k = 0; k < out.dec.n_b(); ++k)
        out.cks.push_back(
            twostate::propagate_shifted(out.dec.lambdas[k], sd, spec.pulse, t_i, t_f, tol));
    out.diabatic = diabatic_propagator(out.dec, out.cks);
    return out;
}

}  // namespace msfactor::assemble
