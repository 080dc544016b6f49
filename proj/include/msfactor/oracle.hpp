#pragma once

#include <functional>
#include <vector>

#include "msfactor/assemble.hpp"
#include "msfactor/linalg.hpp"
#include "msfactor/model.hpp"

namespace msfactor::oracle {

struct IntegrationReport {
    assemble::PropagatorMatrix propagator;
    std::size_t steps = 0;
    double est_error = 0.0;
    double unitarity_defect = 0.0;
};

/// Step cap hit before reaching the requested tolerance; carries the best
/// propagator obtained so far.
struct IntegrationError : ConvergenceError {
    IntegrationError(const std::string& what, IntegrationReport partial_report)
        : ConvergenceError(what, partial_report.est_error), partial(std::move(partial_report)) {}
    IntegrationReport partial;
};

/// Direct time-ordered integration of i dU/dt = H(t) U over [t_i, t_f],
/// column by column from the identity, with classical fixed-step RK4 and
/// Richardson step-halving until the step-halving estimate meets tol.
IntegrationReport integrate_full(const model::SystemSpec& spec, double t_i, double t_f, double tol,
                                 bool include_perturbation);

/// Same brute-force integration for an arbitrary Hamiltonian function.
IntegrationReport integrate_hamiltonian(const std::function<linalg::ComplexMatrix(double)>& h,
                                        std::size_t dim, double t_i, double t_f, double tol);

/// Closed-form eigenvalues (quadratic/trigonometric-cubic formulas) of a
/// Hermitian matrix with n <= 3, sorted descending. Independent of
/// hermitian_eig by construction.
std::vector<double> charpoly_eigs(const linalg::ComplexMatrix& m);

}  // namespace msfactor::oracle
