#pragma once

#include <string>
#include <vector>

#include "msfactor/linalg.hpp"

namespace msfactor::model {

enum class PulseKind { Constant, Gaussian, Sech };

/// Shared scalar time profile of all couplings (and of the diagonal
/// perturbation). Real-valued and finite for finite t.
struct PulseShape {
    PulseKind kind = PulseKind::Constant;
    double amplitude = 1.0;
    double center = 0.0;
    double width = 1.0;  // ignored for Constant

    double value(double t) const;
    /// Closed-form integral of value() over [t0, t1].
    double integral(double t0, double t1) const;
};

enum class DetuningKind { Constant, LinearChirp };

/// Common detuning of all b states from single-photon resonance.
struct DetuningProfile {
    DetuningKind kind = DetuningKind::Constant;
    double value = 0.0;
    double slope = 0.0;  // LinearChirp only

    double at(double t) const { return value + (kind == DetuningKind::LinearChirp ? slope * t : 0.0); }
    double integral(double t0, double t1) const {
        double s = value * (t1 - t0);
        if (kind == DetuningKind::LinearChirp) s += 0.5 * slope * (t1 * t1 - t0 * t0);
        return s;
    }
    bool is_zero() const { return value == 0.0 && (kind == DetuningKind::Constant || slope == 0.0); }
};

/// Full problem definition: a ground set of n_a states coupled to an excited
/// set of n_b states (n_a >= n_b) through amplitudes chi shared by one pulse
/// shape, plus a diagonal b-block perturbation epsilon * d_shape(t) * diag(d_diag).
struct SystemSpec {
    std::size_t n_a = 1;
    std::size_t n_b = 1;
    linalg::ComplexMatrix chi;  // n_a x n_b, angular frequency (hbar = 1)
    PulseShape pulse;
    DetuningProfile delta;
    std::vector<double> d_diag;  // length n_b
    PulseShape d_shape;
    double epsilon = 0.0;

    std::size_t dim() const { return n_a + n_b; }
    /// Throws PreconditionError naming the offending member.
    void validate() const;
};

/// V(t) = chi * f(t).
linalg::ComplexMatrix coupling_matrix(const SystemSpec& spec, double t);

/// Block Hamiltonian: zero a-block, V(t) off-diagonal blocks, and
/// Delta(t) I (+ perturbation when requested) on the b-block. Hermitian by
/// construction, exactly.
linalg::ComplexMatrix hamiltonian(const SystemSpec& spec, double t, bool include_perturbation);

struct TracelessSplit {
    double mean = 0.0;
    std::vector<double> residual;
};

/// Split a diagonal perturbation into its mean and traceless part. A uniform
/// shift of the b level is an exact detuning change, never a perturbation.
TracelessSplit split_traceless(const std::vector<double>& d);

}  // namespace msfactor::model
