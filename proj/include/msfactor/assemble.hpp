#pragma once

#include <vector>

#include "msfactor/linalg.hpp"
#include "msfactor/model.hpp"
#include "msfactor/mstransform.hpp"
#include "msfactor/twostate.hpp"

namespace msfactor::assemble {

enum class Basis { Diabatic, MS };

struct PropagatorMatrix {
    linalg::ComplexMatrix matrix;
    Basis basis = Basis::Diabatic;
    double t_i = 0.0;
    double t_f = 0.0;
};

struct StateVector {
    linalg::ComplexVector amplitudes;
    Basis basis = Basis::Diabatic;
};

/// Block-diagonal transformation S = diag(A, B).
linalg::ComplexMatrix s_matrix(const mstransform::MSDecomposition& dec);

/// Full propagator in the MS basis: identity on the dark block, the
/// two-state Cayley-Klein entries on each coupled pair. cks must have one
/// entry per lambda, ordered by lambda index.
PropagatorMatrix ms_propagator(const mstransform::MSDecomposition& dec,
                               const std::vector<twostate::CayleyKlein>& cks);

/// Propagator in the original (diabatic) basis, built from the spectral
/// projectors of the coupled pairs; never references the dark vectors.
PropagatorMatrix diabatic_propagator(const mstransform::MSDecomposition& dec,
                                     const std::vector<twostate::CayleyKlein>& cks);

/// S^dag U_ms S; algebraic cross-check path for diabatic_propagator.
PropagatorMatrix diabatic_from_ms(const mstransform::MSDecomposition& dec,
                                  const PropagatorMatrix& ms);

StateVector apply(const PropagatorMatrix& p, const StateVector& c);

/// Result of solving one SystemSpec over a window via the factorized route.
struct MsPropagation {
    mstransform::MSDecomposition dec;
    std::vector<twostate::CayleyKlein> cks;
    PropagatorMatrix diabatic;
};

/// Decomposes spec.chi, solves the n_b reduced two-state systems over
/// [t_i, t_f] (numeric, tolerance tol per pair), and assembles the diabatic
/// propagator. An optional extra detuning term shift * shape(t) is applied
/// to every pair (used to absorb uniform diagonal perturbations).
MsPropagation propagate_system(const model::SystemSpec& spec, double t_i, double t_f,
                               double tol = 1e-11,
                               const twostate::ShiftedDetuning* shifted = nullptr);

}  // namespace msfactor::assemble
