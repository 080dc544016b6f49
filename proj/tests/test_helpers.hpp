#pragma once

#include <vector>

#include "msfactor/linalg.hpp"
#include "msfactor/model.hpp"
#include "msfactor/rng.hpp"

namespace msfactor::testing {

inline model::SystemSpec make_spec(linalg::ComplexMatrix chi, model::PulseShape pulse,
                                   model::DetuningProfile delta, std::vector<double> d_diag = {},
                                   double epsilon = 0.0,
                                   model::PulseShape d_shape = {model::PulseKind::Constant, 1.0}) {
    model::SystemSpec spec;
    spec.n_a = chi.rows();
    spec.n_b = chi.cols();
    spec.chi = std::move(chi);
    spec.pulse = pulse;
    spec.delta = delta;
    spec.d_diag = d_diag.empty() ? std::vector<double>(spec.n_b, 0.0) : std::move(d_diag);
    spec.d_shape = d_shape;
    spec.epsilon = epsilon;
    return spec;
}

inline model::SystemSpec random_system(Rng& rng, std::size_t n_a, std::size_t n_b) {
    model::PulseShape pulse{model::PulseKind::Gaussian, rng.uniform(0.5, 1.5), 0.0,
                            rng.uniform(0.8, 1.2)};
    model::DetuningProfile delta{model::DetuningKind::Constant,
                                 (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.2, 1.0), 0.0};
    return make_spec(rng.matrix_in_disk(n_a, n_b), pulse, delta);
}

inline double matrix_distance(const linalg::ComplexMatrix& a, const linalg::ComplexMatrix& b) {
    return (a - b).frobenius_norm();
}

}  // namespace msfactor::testing
