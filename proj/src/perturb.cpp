#include "msfactor/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msfactor/twostate.hpp"

namespace msfactor::perturb {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

PatternProjector::PatternProjector(std::size_t n_a, std::size_t n_b) : n_a_(n_a), n_b_(n_b) {
    if (n_a < n_b) throw PreconditionError("PatternProjector: requires n_a >= n_b");
}

bool PatternProjector::is_on(std::size_t i, std::size_t j) const {
    const std::size_t nd = n_a_ - n_b_;
    if (i >= n_a_ && j >= n_a_) return i == j;                  // per-pair b diagonal
    if (i >= n_a_ && j >= nd && j < n_a_) return i - n_a_ == j - nd;  // coupling, lower
    if (j >= n_a_ && i >= nd && i < n_a_) return j - n_a_ == i - nd;  // coupling, upper
    return false;
}

linalg::ComplexMatrix PatternProjector::on_pattern(const ComplexMatrix& m) const {
    if (m.rows() != dim() || m.cols() != dim()) throw ShapeError("PatternProjector: wrong dimension");
    ComplexMatrix out(dim(), dim());
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j)
            if (is_on(i, j)) out(i, j) = m(i, j);
    return out;
}

linalg::ComplexMatrix PatternProjector::off_pattern(const ComplexMatrix& m) const {
    if (m.rows() != dim() || m.cols() != dim()) throw ShapeError("PatternProjector: wrong dimension");
    ComplexMatrix out = m;
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j)
            if (is_on(i, j)) out(i, j) = 0.0;
    return out;
}

double PatternProjector::off_pattern_norm(const ComplexMatrix& m) const {
    return off_pattern(m).frobenius_norm();
}

namespace {

ComplexMatrix reconstruct_coupling(const mstransform::MSDecomposition& dec) {
    return dec.a_matrix.adjoint() * mstransform::coupling_pattern(dec) * dec.b_matrix;
}

ComplexMatrix reference_hamiltonian(const mstransform::MSDecomposition& dec, double delta_ref) {
    const std::size_t n_a = dec.n_a(), n_b = dec.n_b();
    const ComplexMatrix v = reconstruct_coupling(dec);
    ComplexMatrix h(n_a + n_b, n_a + n_b);
    h.set_block(0, n_a, v);
    h.set_block(n_a, 0, v.adjoint());
    for (std::size_t k = 0; k < n_b; ++k) h(n_a + k, n_a + k) = delta_ref;
    return h;
}

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), a.cols(), b);
    return m;
}

ComplexMatrix perturbation_matrix(std::size_t n_a, const std::vector<double>& d_diag) {
    ComplexMatrix d(n_a + d_diag.size(), n_a + d_diag.size());
    for (std::size_t k = 0; k < d_diag.size(); ++k) d(n_a + k, n_a + k) = d_diag[k];
    return d;
}

void require_traceless(const std::vector<double>& d) {
    double sum = 0.0, scale = 0.0;
    for (double x : d) {
        sum += x;
        scale = std::max(scale, std::abs(x));
    }
    if (std::abs(sum) > 1e-10 * std::max(1.0, scale))
        throw PreconditionError("solve_s1: d_diag must be traceless (absorb the mean upstream)");
}

// --- vectorized solve in the transformed frame ------------------------------
//
// Unknowns are P = A1 A0^dag and Q = B1 B0^dag (a norm-preserving change of
// variables), packed as [Re P, Im P, Re Q, Im Q]. In these variables the
// first-order bracket acts as
//   ab block: P Vp + Vp Q^dag      bb block: delta_ref (Q + Q^dag)
// with Vp the lambda pattern, and the first-order unitarity defect is
// diag(P + P^dag, Q + Q^dag).

struct FrameLayout {
    std::size_t n_a, n_b, nd;
    std::size_t unknowns() const { return 2 * (n_a * n_a + n_b * n_b); }
};

struct PqBlocks {
    ComplexMatrix p, q;
};

PqBlocks unpack(const FrameLayout& lay, const ComplexVector& u) {
    PqBlocks out{ComplexMatrix(lay.n_a, lay.n_a), ComplexMatrix(lay.n_b, lay.n_b)};
    const std::size_t na2 = lay.n_a * lay.n_a, nb2 = lay.n_b * lay.n_b;
    for (std::size_t k = 0; k < na2; ++k)
        out.p(k / lay.n_a, k % lay.n_a) = Complex(u[k].real(), u[na2 + k].real());
    for (std::size_t k = 0; k < nb2; ++k)
        out.q(k / lay.n_b, k % lay.n_b) = Complex(u[2 * na2 + k].real(), u[2 * na2 + nb2 + k].real());
    return out;
}

ComplexVector basis_vector(std::size_t n, std::size_t at) {
    ComplexVector u(n, Complex(0.0));
    u[at] = 1.0;
    return u;
}

// The bracket's linear response to (P, Q) at the idealized pattern.
ComplexMatrix pattern_bracket(const FrameLayout& lay, const std::vector<double>& lambdas,
                              double delta_ref, const PqBlocks& pq) {
    const std::size_t n_a = lay.n_a, n_b = lay.n_b;
    ComplexMatrix vp(n_a, n_b);
    for (std::size_t k = 0; k < n_b; ++k) vp(lay.nd + k, k) = lambdas[k];
    const ComplexMatrix ab = pq.p * vp + vp * pq.q.adjoint();
    const ComplexMatrix qh = pq.q + pq.q.adjoint();
    ComplexMatrix t(n_a + n_b, n_a + n_b);
    t.set_block(0, n_a, ab);
    t.set_block(n_a, 0, ab.adjoint());
    t.set_block(n_a, n_a, Complex(delta_ref) * qh);
    return t;
}

std::vector<std::pair<std::size_t, std::size_t>> off_pattern_rows(const FrameLayout& lay) {
    const PatternProjector proj(lay.n_a, lay.n_b);
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    const std::size_t n = lay.n_a + lay.n_b;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (proj.is_on(i, j)) continue;
            if (i < lay.n_a && j < lay.n_a) continue;  // aa block is structurally zero
            rows.emplace_back(i, j);
        }
    return rows;
}

ComplexVector stack_entries(const ComplexMatrix& m,
                            const std::vector<std::pair<std::size_t, std::size_t>>& where) {
    ComplexVector v;
    v.reserve(2 * where.size());
    for (auto [i, j] : where) {
        v.push_back(m(i, j).real());
        v.push_back(m(i, j).imag());
    }
    return v;
}

// Unitarity-defect map diag(P + P^dag, Q + Q^dag) flattened to reals.
ComplexVector stack_defect(const FrameLayout& lay, const PqBlocks& pq) {
    ComplexVector v;
    v.reserve(lay.unknowns());
    const ComplexMatrix pa = pq.p + pq.p.adjoint();
    const ComplexMatrix qb = pq.q + pq.q.adjoint();
    for (std::size_t i = 0; i < lay.n_a; ++i)
        for (std::size_t j = 0; j < lay.n_a; ++j) {
            v.push_back(pa(i, j).real());
            v.push_back(pa(i, j).imag());
        }
    for (std::size_t i = 0; i < lay.n_b; ++i)
        for (std::size_t j = 0; j < lay.n_b; ++j) {
            v.push_back(qb(i, j).real());
            v.push_back(qb(i, j).imag());
        }
    return v;
}

ComplexMatrix matrix_from_columns(const std::vector<ComplexVector>& cols) {
    ComplexMatrix m(cols.front().size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) m.set_column(j, cols[j]);
    return m;
}

struct FrameSolution {
    BlockPair s;  // mapped back to (A, B) blocks
    bool rank_deficient = false;
    std::size_t rank = 0;
};

// Hierarchical least squares: exact minimization of the off-pattern rows,
// then minimum unitarity defect (relative to `defect_target`) over the null
// space of the primary system.
FrameSolution solve_frame(const mstransform::MSDecomposition& dec, double delta_ref,
                          const ComplexMatrix& constant_term, const ComplexMatrix& defect_target_a,
                          const ComplexMatrix& defect_target_b) {
    const FrameLayout lay{dec.n_a(), dec.n_b(), dec.null_rows()};
    const auto rows = off_pattern_rows(lay);
    const std::size_t nu = lay.unknowns();

    std::vector<ComplexVector> m0_cols, m1_cols;
    m0_cols.reserve(nu);
    m1_cols.reserve(nu);
    for (std::size_t k = 0; k < nu; ++k) {
        const PqBlocks pq = unpack(lay, basis_vector(nu, k));
        m0_cols.push_back(stack_entries(pattern_bracket(lay, dec.lambdas, delta_ref, pq), rows));
        m1_cols.push_back(stack_defect(lay, pq));
    }
    const ComplexMatrix m0 = matrix_from_columns(m0_cols);
    const ComplexMatrix m1 = matrix_from_columns(m1_cols);

    ComplexVector c0 = stack_entries(constant_term, rows);
    for (auto& z : c0) z = -z;

    const linalg::LeastSquaresResult primary = linalg::solve_least_squares(m0, c0);
    ComplexVector u = primary.x;

    // Null-space basis of the primary system.
    const linalg::EigenResult gram = linalg::hermitian_eig(m0.adjoint() * m0);
    std::vector<ComplexVector> null_cols;
    const double null_threshold = std::max(gram.values.front(), 0.0) * 1e-10;
    for (std::size_t k = 0; k < nu; ++k)
        if (gram.values[k] <= null_threshold) null_cols.push_back(gram.vectors.column(k));

    if (!null_cols.empty()) {
        ComplexVector target;
        target.reserve(nu);
        for (std::size_t i = 0; i < lay.n_a; ++i)
            for (std::size_t j = 0; j < lay.n_a; ++j) {
                target.push_back(defect_target_a(i, j).real());
                target.push_back(defect_target_a(i, j).imag());
            }
        for (std::size_t i = 0; i < lay.n_b; ++i)
            for (std::size_t j = 0; j < lay.n_b; ++j) {
                target.push_back(defect_target_b(i, j).real());
                target.push_back(defect_target_b(i, j).imag());
            }
        const ComplexVector base = m1 * u;
        ComplexVector rhs(target.size());
        for (std::size_t i = 0; i < target.size(); ++i) rhs[i] = target[i] - base[i];

        const ComplexMatrix m1n = m1 * matrix_from_columns(null_cols);
        const linalg::LeastSquaresResult secondary = linalg::solve_least_squares(m1n, rhs);

        ComplexVector corrected = u;
        for (std::size_t k = 0; k < null_cols.size(); ++k)
            for (std::size_t i = 0; i < nu; ++i) corrected[i] += secondary.x[k] * null_cols[k][i];
        // The correction lives in the numerical null space; guard against it
        // degrading the primary residual.
        const double before = linalg::distance(m0 * u, c0);
        const double after = linalg::distance(m0 * corrected, c0);
        if (after <= before + 1e-12 * std::max(1.0, linalg::norm(c0))) u = corrected;
    }

    for (auto& z : u) z = z.real();
    const PqBlocks pq = unpack(lay, u);
    FrameSolution out;
    out.s.a = pq.p * dec.a_matrix;
    out.s.b = pq.q * dec.b_matrix;
    out.rank = primary.rank;
    out.rank_deficient = primary.rank_deficient;
    return out;
}

}  // namespace

ComplexMatrix first_order_term(const mstransform::MSDecomposition& dec,
                               const std::vector<double>& d_diag, const BlockPair& s1,
                               double delta_ref) {
    if (d_diag.size() != dec.n_b()) throw ShapeError("first_order_term: d_diag length mismatch");
    const ComplexMatrix h0 = reference_hamiltonian(dec, delta_ref);
    const ComplexMatrix s0 = block_diag(dec.a_matrix, dec.b_matrix);
    const ComplexMatrix s1m = block_diag(s1.a, s1.b);
    const ComplexMatrix d = perturbation_matrix(dec.n_a(), d_diag);
    return s1m * h0 * s0.adjoint() + s0 * h0 * s1m.adjoint() + s0 * d * s0.adjoint();
}

S1Result solve_s1(const mstransform::MSDecomposition& dec, const std::vector<double>& d_diag,
                  double delta_ref) {
    if (d_diag.size() != dec.n_b()) throw ShapeError("solve_s1: d_diag length mismatch");
    require_traceless(d_diag);

    // Constant part of the bracket in the transformed frame: diag(0, B0 D B0^dag).
    const ComplexMatrix d_b = ComplexMatrix::diagonal(d_diag);
    const ComplexMatrix d_tilde = dec.b_matrix * d_b * dec.b_matrix.adjoint();
    const ComplexMatrix constant =
        block_diag(ComplexMatrix(dec.n_a(), dec.n_a()), d_tilde);

    const ComplexMatrix zero_a(dec.n_a(), dec.n_a());
    const ComplexMatrix zero_b(dec.n_b(), dec.n_b());
    FrameSolution sol = solve_frame(dec, delta_ref, constant, zero_a, zero_b);

    S1Result out;
    out.s1 = std::move(sol.s);
    out.rank = sol.rank;
    out.rank_deficient = sol.rank_deficient;

    const PatternProjector proj(dec.n_a(), dec.n_b());
    const ComplexMatrix t = first_order_term(dec, d_diag, out.s1, delta_ref);
    out.residual = proj.off_pattern_norm(t);
    out.delta_shifts.resize(dec.n_b());
    out.coupling_shifts.resize(dec.n_b());
    for (std::size_t k = 0; k < dec.n_b(); ++k) {
        out.delta_shifts[k] = t(dec.n_a() + k, dec.n_a() + k).real();
        out.coupling_shifts[k] = t(dec.null_rows() + k, dec.n_a() + k);
    }
    const ComplexMatrix va = dec.a_matrix * out.s1.a.adjoint() + out.s1.a * dec.a_matrix.adjoint();
    const ComplexMatrix vb = dec.b_matrix * out.s1.b.adjoint() + out.s1.b * dec.b_matrix.adjoint();
    out.unitarity_violation = std::hypot(va.frobenius_norm(), vb.frobenius_norm());
    return out;
}

ComplexMatrix second_order_term(const mstransform::MSDecomposition& dec,
                                const std::vector<double>& d_diag, const BlockPair& s1,
                                const BlockPair& s2, double delta_ref) {
    if (d_diag.size() != dec.n_b()) throw ShapeError("second_order_term: d_diag length mismatch");
    const ComplexMatrix h0 = reference_hamiltonian(dec, delta_ref);
    const ComplexMatrix s0 = block_diag(dec.a_matrix, dec.b_matrix);
    const ComplexMatrix s1m = block_diag(s1.a, s1.b);
    const ComplexMatrix s2m = block_diag(s2.a, s2.b);
    const ComplexMatrix d = perturbation_matrix(dec.n_a(), d_diag);
    return s0 * d * s1m.adjoint() + s1m * d * s0.adjoint() + s0 * h0 * s2m.adjoint() +
           s1m * h0 * s1m.adjoint() + s2m * h0 * s0.adjoint() + s2m * h0 * s2m.adjoint();
}

S2Result solve_s2(const mstransform::MSDecomposition& dec, const std::vector<double>& d_diag,
                  const S1Result& s1, double delta_ref) {
    if (d_diag.size() != dec.n_b()) throw ShapeError("solve_s2: d_diag length mismatch");

    const ComplexMatrix h0 = reference_hamiltonian(dec, delta_ref);
    const ComplexMatrix s0 = block_diag(dec.a_matrix, dec.b_matrix);
    const ComplexMatrix s1m = block_diag(s1.s1.a, s1.s1.b);
    const ComplexMatrix d = perturbation_matrix(dec.n_a(), d_diag);
    const ComplexMatrix constant =
        s0 * d * s1m.adjoint() + s1m * d * s0.adjoint() + s1m * h0 * s1m.adjoint();

    // Second-order unitarity wants S0 S2^dag + S2 S0^dag = -S1 S1^dag.
    const ComplexMatrix ta = Complex(-1.0) * (s1.s1.a * s1.s1.a.adjoint());
    const ComplexMatrix tb = Complex(-1.0) * (s1.s1.b * s1.s1.b.adjoint());
    FrameSolution sol = solve_frame(dec, delta_ref, constant, ta, tb);

    S2Result out;
    out.s2 = std::move(sol.s);
    out.rank_deficient = sol.rank_deficient;

    const PatternProjector proj(dec.n_a(), dec.n_b());
    out.residual =
        proj.off_pattern_norm(second_order_bracket(dec, d_diag, s1.s1, out.s2, delta_ref));
    const ComplexMatrix s2m = block_diag(out.s2.a, out.s2.b);
    out.unitarity_violation =
        (s0 * s2m.adjoint() + s2m * s0.adjoint() + s1m * s1m.adjoint()).frobenius_norm();
    return out;
}

PerturbationSeries build_series(const mstransform::MSDecomposition& dec,
                                const std::vector<double>& d_diag, double delta_ref, int order) {
    if (order < 1 || order > 2) throw PreconditionError("build_series: order must be 1 or 2");
    PerturbationSeries out;
    out.s0 = {dec.a_matrix, dec.b_matrix};
    out.s1 = solve_s1(dec, d_diag, delta_ref);
    if (order >= 2) out.s2 = solve_s2(dec, d_diag, out.s1, delta_ref);
    return out;
}

double s1_gram_condition_residual(const mstransform::MSDecomposition& dec,
                                  const std::vector<double>& d_diag, const BlockPair& s1,
                                  double delta_ref) {
    if (delta_ref == 0.0)
        throw PreconditionError(
            "s1_gram_condition_residual: the Delta^{-1} form is undefined at delta_ref = 0");
    if (d_diag.size() != dec.n_b()) throw ShapeError("s1_gram_condition_residual: d_diag length");
    const ComplexMatrix lhs =
        dec.b_matrix.adjoint() * s1.b + s1.b.adjoint() * dec.b_matrix;
    ComplexMatrix rhs(dec.n_b(), dec.n_b());
    for (std::size_t k = 0; k < dec.n_b(); ++k) rhs(k, k) = -d_diag[k] / delta_ref;
    return (lhs - rhs).frobenius_norm();
}

assemble::PropagatorMatrix dyson_first_order(const mstransform::MSDecomposition& dec,
                                             const model::SystemSpec& spec, double t_i, double t_f,
                                             std::size_t grid) {
    if (grid < 64) throw PreconditionError("dyson_first_order: grid must be at least 64");
    if (grid % 2 == 1) ++grid;  // Simpson needs an even interval count
    spec.validate();

    const model::TracelessSplit split = model::split_traceless(spec.d_diag);
    const twostate::ShiftedDetuning shifted{spec.delta, spec.epsilon * split.mean, spec.d_shape};

    // Zeroth order: single-shot factorized propagator with the uniform shift
    // absorbed into the detuning (exact, not perturbative).
    std::vector<twostate::CayleyKlein> cks;
    for (std::size_t k = 0; k < dec.n_b(); ++k)
        cks.push_back(twostate::propagate_shifted(dec.lambdas[k], shifted, spec.pulse, t_i, t_f,
                                                  1e-12));
    const ComplexMatrix u0 = assemble::diabatic_propagator(dec, cks).matrix;

    double residual_scale = 0.0;
    for (double x : split.residual) residual_scale = std::max(residual_scale, std::abs(x));

    const std::size_t n = spec.dim();
    ComplexMatrix integral(n, n);
    if (spec.epsilon != 0.0 && residual_scale > 0.0) {
        // Cumulative propagators on the Simpson grid.
        const double h = (t_f - t_i) / static_cast<double>(grid);
        std::vector<ComplexMatrix> cum;
        cum.reserve(grid + 1);
        cum.push_back(ComplexMatrix::identity(n));
        for (std::size_t k = 0; k < grid; ++k) {
            const double a = t_i + static_cast<double>(k) * h;
            std::vector<twostate::CayleyKlein> step;
            for (std::size_t j = 0; j < dec.n_b(); ++j)
                step.push_back(
                    twostate::propagate_shifted(dec.lambdas[j], shifted, spec.pulse, a, a + h, 1e-10));
            cum.push_back(assemble::diabatic_propagator(dec, step).matrix * cum.back());
        }
        const ComplexMatrix& u_total = cum.back();

        for (std::size_t k = 0; k <= grid; ++k) {
            const double t = t_i + static_cast<double>(k) * h;
            const double g = spec.d_shape.value(t);
            if (g == 0.0) continue;
            std::vector<double> dres(n, 0.0);
            for (std::size_t j = 0; j < spec.n_b; ++j) dres[spec.n_a + j] = g * split.residual[j];
            // U0(t_f, s) D(s) U0(s, t_i) with U0(t_f, s) = U_total U0(s, t_i)^dag
            ComplexMatrix mid = cum[k];
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) mid(r, c) *= dres[r];
            const ComplexMatrix term = u_total * (cum[k].adjoint() * mid);
            const double w = (k == 0 || k == grid) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            integral = integral + Complex(w * h / 3.0) * term;
        }
    }

    assemble::PropagatorMatrix out;
    out.matrix = u0 + Complex(0.0, -spec.epsilon) * integral;
    out.basis = assemble::Basis::Diabatic;
    out.t_i = t_i;
    out.t_f = t_f;
    return out;
}

namespace {

ComplexMatrix b1_ansatz(double theta1, double sigma1) {
    const double st = std::sin(theta1), ct = std::cos(theta1);
    const Complex em = std::polar(1.0, -sigma1);
    ComplexMatrix b(2, 2);
    b(0, 0) = em * st;
    b(0, 1) = ct;
    b(1, 0) = em * ct;
    b(1, 1) = -st;
    return b;
}

}  // namespace

Nb2B1Result nb2_b1(const mstransform::Nb2ClosedForm& closed,
                   const mstransform::MSDecomposition& dec, const std::vector<double>& d_diag,
                   double delta_ref) {
    if (dec.n_b() != 2 || d_diag.size() != 2)
        throw PreconditionError("nb2_b1: requires a two-column decomposition");
    if (closed.lambda_minus <= 0.0)
        throw PreconditionError("nb2_b1: requires both couplings nonzero");

    Nb2B1Result out;
    out.unconstrained_residual = solve_s1(dec, d_diag, delta_ref).residual;

    double scale = 0.0;
    for (double x : d_diag) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return out;  // canonical (0, 0) with zero residual

    const ComplexMatrix d_b = ComplexMatrix::diagonal(d_diag);
    const ComplexMatrix d_tilde = closed.b0_matrix * d_b * closed.b0_matrix.adjoint();
    const ComplexMatrix b0_adj = closed.b0_matrix.adjoint();

    // With both couplings nonzero the A1 block cancels the off-pattern ab
    // rows exactly, so the objective reduces to the off-diagonal of the
    // transformed b block.
    auto objective = [&](double theta1, double sigma1) {
        const ComplexMatrix q = b1_ansatz(theta1, sigma1) * b0_adj;
        const Complex entry =
            Complex(delta_ref) * (q(0, 1) + std::conj(q(1, 0))) + d_tilde(0, 1);
        return std::sqrt(2.0) * std::abs(entry);
    };

    const double two_pi = 2.0 * M_PI;
    double best = std::numeric_limits<double>::infinity();
    double bt = 0.0, bs = 0.0;
    const int coarse = 96;
    for (int i = 0; i < coarse; ++i) {
        for (int j = 0; j < coarse; ++j) {
            const double th = two_pi * i / coarse;
            const double sg = -M_PI + two_pi * j / coarse;
            const double val = objective(th, sg);
            if (val < best) {
                best = val;
                bt = th;
                bs = sg;
            }
        }
    }
    double span = two_pi / coarse;
    for (int round = 0; round < 6; ++round) {
        for (int i = -8; i <= 8; ++i) {
            for (int j = -8; j <= 8; ++j) {
                const double th = bt + span * i / 8.0;
                const double sg = bs + span * j / 8.0;
                const double val = objective(th, sg);
                if (val < best) {
                    best = val;
                    bt = th;
                    bs = sg;
                }
            }
        }
        span /= 4.0;
    }
    if (!std::isfinite(best))
        throw ConvergenceError("nb2_b1: search failed to produce a finite residual", best);

    out.theta1 = bt;
    out.sigma1 = bs;
    out.residual = best;
    return out;
}

}  // namespace msfactor::perturb
