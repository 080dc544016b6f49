#pragma once

#include <optional>
#include <vector>

#include "msfactor/assemble.hpp"
#include "msfactor/linalg.hpp"
#include "msfactor/model.hpp"
#include "msfactor/mstransform.hpp"

namespace msfactor::perturb {

/// One block-diagonal term of the transformation series: diag(a, b).
struct BlockPair {
    linalg::ComplexMatrix a;  // n_a x n_a
    linalg::ComplexMatrix b;  // n_b x n_b
};

/// Bookkeeping for the factorized sparsity pattern: pair couplings at
/// (null + k, n_a + k) and its mirror, plus arbitrary per-pair diagonal
/// entries on the b block. Projections are idempotent and preserve
/// Hermiticity.
class PatternProjector {
public:
    PatternProjector(std::size_t n_a, std::size_t n_b);

    std::size_t dim() const { return n_a_ + n_b_; }
    bool is_on(std::size_t i, std::size_t j) const;
    linalg::ComplexMatrix on_pattern(const linalg::ComplexMatrix& m) const;
    linalg::ComplexMatrix off_pattern(const linalg::ComplexMatrix& m) const;
    double off_pattern_norm(const linalg::ComplexMatrix& m) const;

private:
    std::size_t n_a_, n_b_;
};

/// First-order bracket S1 H0 S0^dag + S0 H0 S1^dag + S0 D S0^dag, evaluated
/// at unit pulse value and detuning delta_ref, with D = diag(0_a, d_diag).
/// Hermitian for any candidate blocks.
linalg::ComplexMatrix first_order_term(const mstransform::MSDecomposition& dec,
                                       const std::vector<double>& d_diag, const BlockPair& s1,
                                       double delta_ref);

struct S1Result {
    BlockPair s1;
    double residual = 0.0;                  // off-pattern norm of the solved bracket
    std::vector<double> delta_shifts;       // per-pair first-order detuning corrections
    linalg::ComplexVector coupling_shifts;  // per-pair coupling-slot remainders
    double unitarity_violation = 0.0;       // ||S0 S1^dag + S1 S0^dag||_F
    bool rank_deficient = false;
    std::size_t rank = 0;
};

/// Least-squares choice of S1 cancelling the off-pattern part of the
/// first-order bracket. d_diag must be traceless (uniform shifts are exact
/// detuning changes and are absorbed upstream). The solve is hierarchical:
/// the off-pattern equations are minimized exactly first, then the
/// first-order unitarity defect is minimized over the remaining freedom, so
/// the secondary objective can never contaminate the primary residual.
S1Result solve_s1(const mstransform::MSDecomposition& dec, const std::vector<double>& d_diag,
                  double delta_ref);

/// Full second-order bracket S0 D S1^dag + S1 D S0^dag + S0 H0 S2^dag +
/// S1 H0 S1^dag + S2 H0 S0^dag + S2 H0 S2^dag at the reference configuration.
linalg::ComplexMatrix second_order_term(const mstransform::MSDecomposition& dec,
                                        const std::vector<double>& d_diag, const BlockPair& s1,
                                        const BlockPair& s2, double delta_ref);

struct S2Result {
    BlockPair s2;
    double residual = 0.0;  // off-pattern norm of the full second-order bracket
    double unitarity_violation = 0.0;
    bool rank_deficient = false;
};

/// Second-order correction; the term quadratic in S2 is dropped from the
/// linear solve but included in the reported residual.
S2Result solve_s2(const mstransform::MSDecomposition& dec, const std::vector<double>& d_diag,
                  const S1Result& s1, double delta_ref);

struct PerturbationSeries {
    BlockPair s0;
    S1Result s1;
    std::optional<S2Result> s2;
};

PerturbationSeries build_series(const mstransform::MSDecomposition& dec,
                                const std::vector<double>& d_diag, double delta_ref, int order);

/// Residual of the literal Gram-form condition
/// B0^dag B1 + B1^dag B0 = -D / delta_ref. Diagnostic only; requires
/// delta_ref != 0.
double s1_gram_condition_residual(const mstransform::MSDecomposition& dec,
                                  const std::vector<double>& d_diag, const BlockPair& s1,
                                  double delta_ref);

/// First-order time-dependent perturbative propagator in the diabatic basis:
/// U0 - i eps int U0(t_f,s) D_res(s) U0(s,t_i) ds, with the uniform part of
/// d_diag absorbed into the detuning of the zeroth-order propagator. The
/// deviation from the exact propagator of H0 + eps D is O(eps^2).
assemble::PropagatorMatrix dyson_first_order(const mstransform::MSDecomposition& dec,
                                             const model::SystemSpec& spec, double t_i, double t_f,
                                             std::size_t grid);

struct Nb2B1Result {
    double theta1 = 0.0;
    double sigma1 = 0.0;
    double residual = 0.0;
    double unconstrained_residual = 0.0;
};

/// Grid-plus-refinement search for the (theta1, sigma1) unitary ansatz for
/// B1, minimizing the projected first-order residual with the A1 block
/// eliminated optimally; also reports the unconstrained solve_s1 residual.
Nb2B1Result nb2_b1(const mstransform::Nb2ClosedForm& closed,
                   const mstransform::MSDecomposition& dec, const std::vector<double>& d_diag,
                   double delta_ref);

}  // namespace msfactor::perturb
