#include "msfactor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace msfactor::oracle {

using linalg::Complex;
using linalg::ComplexMatrix;

namespace {

// One fixed-step RK4 pass on the matrix equation i dU/dt = H(t) U.
ComplexMatrix rk4_pass(const std::function<ComplexMatrix(double)>& h, std::size_t dim,
                       double t_i, double t_f, std::size_t steps) {
    const double dt = (t_f - t_i) / static_cast<double>(steps);
    const Complex mi(0.0, -1.0);
    ComplexMatrix u = ComplexMatrix::identity(dim);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t_i + static_cast<double>(k) * dt;
        const ComplexMatrix h0 = h(t);
        const ComplexMatrix hm = h(t + 0.5 * dt);
        const ComplexMatrix h1 = h(t + dt);
        const ComplexMatrix k1 = mi * (h0 * u);
        const ComplexMatrix k2 = mi * (hm * (u + Complex(0.5 * dt) * k1));
        const ComplexMatrix k3 = mi * (hm * (u + Complex(0.5 * dt) * k2));
        const ComplexMatrix k4 = mi * (h1 * (u + Complex(dt) * k3));
        u = u + Complex(dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

}  // namespace

IntegrationReport integrate_hamiltonian(const std::function<ComplexMatrix(double)>& h,
                                        std::size_t dim, double t_i, double t_f, double tol) {
    if (t_f < t_i) throw PreconditionError("integrate: t_f must be >= t_i");

    auto make_report = [&](ComplexMatrix u, std::size_t steps, double est) {
        IntegrationReport r;
        r.propagator = {std::move(u), assemble::Basis::Diabatic, t_i, t_f};
        r.steps = steps;
        r.est_error = est;
        r.unitarity_defect = linalg::unitarity_defect(r.propagator.matrix);
        return r;
    };

    if (t_f == t_i) return make_report(ComplexMatrix::identity(dim), 0, 0.0);

    const std::size_t cap = 1u << 22;
    std::size_t steps = 128;
    ComplexMatrix coarse = rk4_pass(h, dim, t_i, t_f, steps);
    double est = 0.0;
    while (2 * steps <= cap) {
        const ComplexMatrix fine = rk4_pass(h, dim, t_i, t_f, 2 * steps);
        est = (fine - coarse).frobenius_norm() / 15.0;
        if (est <= tol) return make_report(fine, 2 * steps, est);
        coarse = fine;
        steps *= 2;
    }
    throw IntegrationError("integrate: step cap reached before tolerance",
                           make_report(coarse, steps, est));
}

IntegrationReport integrate_full(const model::SystemSpec& spec, double t_i, double t_f, double tol,
                                 bool include_perturbation) {
    if (tol < 1e-12 || tol > 1e-4)
        throw PreconditionError("integrate_full: tol must lie in [1e-12, 1e-4]");
    spec.validate();
    return integrate_hamiltonian(
        [&](double t) { return model::hamiltonian(spec, t, include_perturbation); }, spec.dim(),
        t_i, t_f, tol);
}

std::vector<double> charpoly_eigs(const ComplexMatrix& m) {
    if (!m.is_square()) throw ShapeError("charpoly_eigs: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0 || n > 3) throw PreconditionError("charpoly_eigs: dimension must be 1, 2 or 3");
    if (!m.is_hermitian()) throw NotHermitianError("charpoly_eigs: input is not Hermitian");

    std::vector<double> out;
    if (n == 1) {
        out = {m(0, 0).real()};
    } else if (n == 2) {
        const double a = m(0, 0).real(), d = m(1, 1).real();
        const double det = a * d - std::norm(m(0, 1));
        const double tr = a + d;
        const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
        out = {0.5 * tr + disc, 0.5 * tr - disc};
    } else {
        // Real-rooted cubic via the trigonometric method.
        const double a = m(0, 0).real(), e = m(1, 1).real(), i = m(2, 2).real();
        const double nb = std::norm(m(0, 1)), nc = std::norm(m(0, 2)), nf = std::norm(m(1, 2));
        const double tr = a + e + i;
        const double minors = (a * e - nb) + (a * i - nc) + (e * i - nf);
        const Complex detc = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        const double det = detc.real();

        // lambda^3 - tr lambda^2 + minors lambda - det = 0; depress with
        // lambda = x + tr/3.
        const double p = minors - tr * tr / 3.0;
        const double q = -det + tr * minors / 3.0 - 2.0 * tr * tr * tr / 27.0;
        const double scale = std::max({std::abs(a), std::abs(e), std::abs(i), std::sqrt(nb),
                                       std::sqrt(nc), std::sqrt(nf), 1e-300});
        if (-p < 1e-28 * scale * scale) {
            const double x = std::cbrt(-q);
            out = {x + tr / 3.0, x + tr / 3.0, x + tr / 3.0};
        } else {
            const double r = std::sqrt(-p / 3.0);
            double arg = 1.5 * q / (p * r);
            arg = std::clamp(arg, -1.0, 1.0);
            const double phi = std::acos(arg) / 3.0;
            out.resize(3);
            for (int k = 0; k < 3; ++k)
                out[static_cast<std::size_t>(k)] =
                    2.0 * r * std::cos(phi - 2.0 * M_PI * k / 3.0) + tr / 3.0;
        }
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace msfactor::oracle
