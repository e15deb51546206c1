// krylov.hpp — application of the many-body disentangler W-hat = exp(i H_W),
// H_W = sum_kl b_k^dag h_kl b_l, by a Lanczos chain with full
// reorthogonalization.
#pragma once

#include "rtrg/fock.hpp"
#include "rtrg/types.hpp"

namespace rtrg {

struct KrylovConfig {
    int max_budget = 16;          // applications of H_W per state
    double hop_threshold = 1e-5;  // stop when alpha_k^2 falls below
    double lindep_threshold = 1e-4; // stop when the reorthogonalized norm^2 falls below
    double conv_threshold = 1e-3; // stop when |Psi^M - Psi^{M+1}|^2 falls below
};

struct KrylovStats {
    int steps = 0;              // chain length actually built
    double last_diff_sq = 0.0;  // |Psi^M - Psi^{M-1}|^2 at exit
    std::vector<double> alpha;  // hops (>= 0)
    std::vector<double> beta;   // diagonals (real for Hermitian H_W)
};

// H_W = sum_kl b_k^dag h_kl b_l as a sparse operator; h is (n_modes x n_modes)
SpMat quadratic_generator(const FockBasis& basis, const MatXc& h);

// |out> = exp(i H_W) |state>.  The input norm is restored on output (the tape
// normalization differs from 1).  Throws if the budget is exhausted before
// any stopping criterion fires.
VecXc apply_bogoliubov(const SpMat& h_w, const VecXc& state, const KrylovConfig& cfg,
                       KrylovStats* stats = nullptr);

// convenience: builds H_W internally
VecXc apply_bogoliubov(const FockBasis& basis, const MatXc& h, const VecXc& state,
                       const KrylovConfig& cfg, KrylovStats* stats = nullptr);

// W rho W^dag, applied columnwise in two passes sharing H_W; re-Hermitized.
MatXc apply_bogoliubov_dm(const FockBasis& basis, const MatXc& h, const MatXc& rho,
                          const KrylovConfig& cfg);

} // namespace rtrg
