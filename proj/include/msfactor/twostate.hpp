#pragma once

#include "msfactor/linalg.hpp"
#include "msfactor/model.hpp"

namespace msfactor::twostate {

/// Cayley-Klein parameters of one reduced two-state propagator over
/// [t_i, t_f]: alpha and beta are the first column of the propagator of
/// [[0, lambda f(t)], [lambda f(t), Delta(t)]] and satisfy
/// |alpha|^2 + |beta|^2 = 1. The excited state additionally accumulates the
/// detuning phase exp(-i * delta_phase) with delta_phase = int Delta dt,
/// which multiplies the second column of the matrix form. On resonance the
/// matrix reduces to [[alpha, -conj(beta)], [beta, conj(alpha)]].
struct CayleyKlein {
    linalg::Complex alpha{1.0, 0.0};
    linalg::Complex beta{0.0, 0.0};
    double delta_phase = 0.0;
    double t_i = 0.0;
    double t_f = 0.0;

    linalg::ComplexMatrix to_matrix() const;
};

enum class Method { AnalyticResonant, AnalyticConstant, Numeric };

/// [[0, lambda f], [lambda f, delta]].
linalg::ComplexMatrix two_state_hamiltonian(double lambda, double delta_value, double f_value);

/// Detuning with an optional separable extra term: Delta(t) + shift * shape(t).
struct ShiftedDetuning {
    model::DetuningProfile base;
    double shift = 0.0;
    model::PulseShape shape;

    double at(double t) const { return base.at(t) + shift * shape.value(t); }
    double integral(double t0, double t1) const {
        return base.integral(t0, t1) + shift * shape.integral(t0, t1);
    }
    bool is_zero() const { return base.is_zero() && shift == 0.0; }
};

CayleyKlein propagate_two_state(double lambda, const model::DetuningProfile& delta,
                                const model::PulseShape& pulse, double t_i, double t_f,
                                Method method, double tol = 1e-10);

/// Same, with a shifted detuning; numeric path only.
CayleyKlein propagate_shifted(double lambda, const ShiftedDetuning& delta,
                              const model::PulseShape& pulse, double t_i, double t_f,
                              double tol = 1e-10);

/// Single fixed-step RK4 pass without error control; exposed for
/// integrator-order studies.
CayleyKlein propagate_fixed_steps(double lambda, const ShiftedDetuning& delta,
                                  const model::PulseShape& pulse, double t_i, double t_f,
                                  std::size_t steps);

}  // namespace msfactor::twostate
