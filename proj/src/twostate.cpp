#include "msfactor/twostate.hpp"

#include <cmath>

namespace msfactor::twostate {

using linalg::Complex;
using linalg::ComplexMatrix;

linalg::ComplexMatrix CayleyKlein::to_matrix() const {
    const Complex ph = std::polar(1.0, -delta_phase);
    ComplexMatrix u(2, 2);
    u(0, 0) = alpha;
    u(0, 1) = -std::conj(beta) * ph;
    u(1, 0) = beta;
    u(1, 1) = std::conj(alpha) * ph;
    return u;
}

linalg::ComplexMatrix two_state_hamiltonian(double lambda, double delta_value, double f_value) {
    ComplexMatrix h(2, 2);
    h(0, 1) = lambda * f_value;
    h(1, 0) = lambda * f_value;
    h(1, 1) = delta_value;
    return h;
}

namespace {

struct Amplitudes {
    Complex a, b;
};

// One RK4 pass over [t_i, t_f] for psi(t_i) = (1, 0).
Amplitudes rk4_pass(double lambda, const ShiftedDetuning& delta, const model::PulseShape& pulse,
                    double t_i, double t_f, std::size_t steps) {
    const double h = (t_f - t_i) / static_cast<double>(steps);
    const Complex mi(0.0, -1.0);
    Complex a = 1.0, b = 0.0;
    auto deriv = [&](double t, Complex pa, Complex pb, Complex& da, Complex& db) {
        const double v = lambda * pulse.value(t);
        da = mi * (v * pb);
        db = mi * (v * pa + delta.at(t) * pb);
    };
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t_i + static_cast<double>(k) * h;
        Complex k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        deriv(t, a, b, k1a, k1b);
        deriv(t + 0.5 * h, a + 0.5 * h * k1a, b + 0.5 * h * k1b, k2a, k2b);
        deriv(t + 0.5 * h, a + 0.5 * h * k2a, b + 0.5 * h * k2b, k3a, k3b);
        deriv(t + h, a + h * k3a, b + h * k3b, k4a, k4b);
        a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    }
    return {a, b};
}

CayleyKlein finish(Complex a, Complex b, const ShiftedDetuning& delta, double t_i, double t_f) {
    const double nn = std::sqrt(std::norm(a) + std::norm(b));
    if (std::abs(nn - 1.0) > 1e-8)
        throw ConvergenceError("two-state integration: unitarity drift beyond 1e-8",
                               std::abs(nn - 1.0));
    CayleyKlein ck;
    ck.alpha = a / nn;
    ck.beta = b / nn;
    ck.delta_phase = delta.integral(t_i, t_f);
    ck.t_i = t_i;
    ck.t_f = t_f;
    return ck;
}

CayleyKlein numeric(double lambda, const ShiftedDetuning& delta, const model::PulseShape& pulse,
                    double t_i, double t_f, double tol) {
    if (t_f < t_i) throw PreconditionError("propagate_two_state: t_f must be >= t_i");
    if (t_f == t_i) return finish(1.0, 0.0, delta, t_i, t_f);

    std::size_t steps = 64;
    Amplitudes coarse = rk4_pass(lambda, delta, pulse, t_i, t_f, steps);
    double est = 0.0;
    while (steps <= (1u << 20)) {
        const Amplitudes fine = rk4_pass(lambda, delta, pulse, t_i, t_f, 2 * steps);
        est = std::sqrt(std::norm(fine.a - coarse.a) + std::norm(fine.b - coarse.b)) / 15.0;
        if (est <= tol) return finish(fine.a, fine.b, delta, t_i, t_f);
        coarse = fine;
        steps *= 2;
    }
    throw ConvergenceError("two-state integration: step cap reached before tolerance", est);
}

}  // namespace

CayleyKlein propagate_two_state(double lambda, const model::DetuningProfile& delta,
                                const model::PulseShape& pulse, double t_i, double t_f,
                                Method method, double tol) {
    if (t_f < t_i) throw PreconditionError("propagate_two_state: t_f must be >= t_i");
    const ShiftedDetuning sd{delta, 0.0, {}};

    switch (method) {
        case Method::AnalyticResonant: {
            if (!delta.is_zero())
                throw PreconditionError("analytic-resonant: requires Delta identically zero");
            const double area = lambda * pulse.integral(t_i, t_f);
            CayleyKlein ck;
            ck.alpha = std::cos(area);
            ck.beta = Complex(0.0, -1.0) * std::sin(area);
            ck.delta_phase = 0.0;
            ck.t_i = t_i;
            ck.t_f = t_f;
            return ck;
        }
        case Method::AnalyticConstant: {
            if (delta.kind != model::DetuningKind::Constant ||
                pulse.kind != model::PulseKind::Constant)
                throw PreconditionError(
                    "analytic-constant: requires constant detuning and constant pulse");
            const double omega = lambda * pulse.amplitude;
            const double d = delta.value;
            const double t = t_f - t_i;
            const double w = std::hypot(omega, 0.5 * d);  // half the Rabi splitting
            CayleyKlein ck;
            const Complex half_phase = std::polar(1.0, -0.5 * d * t);
            if (w == 0.0) {
                ck.alpha = 1.0;
                ck.beta = 0.0;
            } else {
                const double cwt = std::cos(w * t), swt = std::sin(w * t);
                ck.alpha = half_phase * Complex(cwt, 0.5 * d / w * swt);
                ck.beta = half_phase * Complex(0.0, -omega / w * swt);
            }
            ck.delta_phase = d * t;
            ck.t_i = t_i;
            ck.t_f = t_f;
            return ck;
        }
        case Method::Numeric:
            return numeric(lambda, sd, pulse, t_i, t_f, tol);
    }
    throw PreconditionError("propagate_two_state: unknown method");
}

CayleyKlein propagate_shifted(double lambda, const ShiftedDetuning& delta,
                              const model::PulseShape& pulse, double t_i, double t_f, double tol) {
    return numeric(lambda, delta, pulse, t_i, t_f, tol);
}

CayleyKlein propagate_fixed_steps(double lambda, const ShiftedDetuning& delta,
                                  const model::PulseShape& pulse, double t_i, double t_f,
                                  std::size_t steps) {
    if (t_f < t_i) throw PreconditionError("propagate_fixed_steps: t_f must be >= t_i");
    const Amplitudes r = rk4_pass(lambda, delta, pulse, t_i, t_f, steps);
    return finish(r.a, r.b, delta, t_i, t_f);
}

}  // namespace msfactor::twostate
