#include "msfactor/model.hpp"

#include <cmath>

namespace msfactor::model {

double PulseShape::value(double t) const {
    switch (kind) {
        case PulseKind::Constant:
            return amplitude;
        case PulseKind::Gaussian: {
            const double u = (t - center) / width;
            return amplitude * std::exp(-u * u);
        }
        case PulseKind::Sech:
            return amplitude / std::cosh((t - center) / width);
    }
    return 0.0;
}

double PulseShape::integral(double t0, double t1) const {
    switch (kind) {
        case PulseKind::Constant:
            return amplitude * (t1 - t0);
        case PulseKind::Gaussian: {
            const double sqrt_pi_2 = 0.88622692545275801;  // sqrt(pi)/2
            return amplitude * width * sqrt_pi_2 *
                   (std::erf((t1 - center) / width) - std::erf((t0 - center) / width));
        }
        case PulseKind::Sech:
            // antiderivative of sech is atan(sinh); saturates cleanly at +-pi/2
            return amplitude * width *
                   (std::atan(std::sinh((t1 - center) / width)) -
                    std::atan(std::sinh((t0 - center) / width)));
    }
    return 0.0;
}

void SystemSpec::validate() const {
    if (n_b < 1) throw PreconditionError("system.n_b: must be at least 1");
    if (n_a < n_b) throw PreconditionError("system.n_a: must satisfy n_a >= n_b");
    if (chi.rows() != n_a || chi.cols() != n_b)
        throw PreconditionError("system.chi: shape must be n_a x n_b");
    if (d_diag.size() != n_b) throw PreconditionError("system.d_diag: length must equal n_b");
    if (epsilon < 0.0) throw PreconditionError("system.epsilon: must be nonnegative");
    if (pulse.kind != PulseKind::Constant && pulse.width <= 0.0)
        throw PreconditionError("system.pulse.width: must be positive");
    if (d_shape.kind != PulseKind::Constant && d_shape.width <= 0.0)
        throw PreconditionError("system.d_shape.width: must be positive");
}

linalg::ComplexMatrix coupling_matrix(const SystemSpec& spec, double t) {
    const double f = spec.pulse.value(t);
    linalg::ComplexMatrix v(spec.n_a, spec.n_b);
    for (std::size_t i = 0; i < spec.n_a; ++i)
        for (std::size_t j = 0; j < spec.n_b; ++j) v(i, j) = spec.chi(i, j) * f;
    return v;
}

linalg::ComplexMatrix hamiltonian(const SystemSpec& spec, double t, bool include_perturbation) {
    const std::size_t n = spec.dim();
    linalg::ComplexMatrix h(n, n);
    const linalg::ComplexMatrix v = coupling_matrix(spec, t);
    for (std::size_t i = 0; i < spec.n_a; ++i) {
        for (std::size_t j = 0; j < spec.n_b; ++j) {
            h(i, spec.n_a + j) = v(i, j);
            h(spec.n_a + j, i) = std::conj(v(i, j));
        }
    }
    const double delta = spec.delta.at(t);
    const double g = include_perturbation ? spec.epsilon * spec.d_shape.value(t) : 0.0;
    for (std::size_t j = 0; j < spec.n_b; ++j)
        h(spec.n_a + j, spec.n_a + j) = delta + (include_perturbation ? g * spec.d_diag[j] : 0.0);
    return h;
}

TracelessSplit split_traceless(const std::vector<double>& d) {
    TracelessSplit out;
    if (d.empty()) return out;
    double sum = 0.0;
    for (double x : d) sum += x;
    out.mean = sum / static_cast<double>(d.size());
    out.residual.reserve(d.size());
    for (double x : d) out.residual.push_back(x - out.mean);
    return out;
}

}  // namespace msfactor::model
