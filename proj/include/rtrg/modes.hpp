// modes.hpp — fastest-decoupling basis of the future-coupling matrix K(p)
// and the inductive stream of incoming/relevant/outgoing modes with their
// disentangler frame changes W_p.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtrg/correlation.hpp"
#include "rtrg/memory_kernel.hpp"
#include "rtrg/types.hpp"

namespace rtrg {

// K(p)_{r'r} = sum_{p'=p}^inf conj(M((p'-r')dt)) M((p'-r)dt), 0 <= r,r' < p,
// truncated through the certified correlation sums.
struct FutureCouplingMatrix {
    long p = 0;
    MatXc k;            // p x p Hermitian PSD
    long horizon = 0;   // numeric samples behind the correlation sums
    double tail_bound = 0.0; // certified absolute truncation bound per entry
};

FutureCouplingMatrix build_K(const MemoryKernel& kernel, const CorrelationTable& table, long p);
FutureCouplingMatrix build_K(const MemoryKernel& kernel, long p,
                             const CorrelationOptions& opts = {});

struct EigenBasis {
    VecXd lambdas; // descending
    MatXc vectors; // columns, orthonormal, phase-fixed
};

// Full Hermitian eigendecomposition, eigenvalues descending.  Deterministic:
// each vector's largest-magnitude component is made real positive and exact
// ties in the eigenvalues are ordered lexicographically by components.
EigenBasis fastest_decoupling_basis(const FutureCouplingMatrix& K);

// Top block of the spectrum of K(p) without forming it: K = Toeplitz(C) -
// L^dag L with L the strictly-lower Toeplitz of kernel rows, applied through
// FFTs inside a randomized subspace iteration.  Deterministic for fixed seed.
EigenBasis top_k_spectrum(const MemoryKernel& kernel, const CorrelationTable& table, long p,
                          int n_eigs, std::uint64_t seed = 0x5eed);

struct StreamStep {
    VecXc couplings;       // M_i(p), i = 1..min(p, m): frame couplings in H_st(tau_p)
    MatXc w;               // W_p, (m+1)x(m+1); rows are the new modes (empty while p < m)
    MatXc generator;       // h(p) with W-hat = exp(i b^dag h b)
    VecXd lambdas;         // eigenvalues of the projected K(p+1), descending
    double discarded_sq = 0.0; // sum_i |M_out,i(p)|^2 (diagnostic, not enforced)
};

struct ModeStream {
    int m = 0;
    double dt = 0.0;
    long steps = 0;        // propagation steps covered: p = 0 .. steps-1
    std::string kernel_tag;
    double k_ii = 0.0;
    double cert_abs_err = 0.0;
    std::vector<StreamStep> step;
    MatXc final_modes;     // steps x m, relevant modes at p = steps over cells

    const StreamStep& at(long p) const { return step.at(static_cast<std::size_t>(p)); }
};

struct StreamOptions {
    CorrelationOptions corr;
    double branch_tol = 1e-8; // W_p eigenvalue distance to -1 treated as a branch ambiguity
};

ModeStream build_stream(const MemoryKernel& kernel, int m, long steps,
                        const StreamOptions& opts = {});

// One inductive extension: requires p == stream.steps; returns the stream
// advanced through step p (resumes from final_modes).
ModeStream extend_stream(ModeStream stream, const MemoryKernel& kernel, long p,
                         const StreamOptions& opts = {});

// phi_k(p) resolved onto the original cells (unit norm); 1 <= k <= m, m <= p <= steps.
VecXc mode_shape(const ModeStream& stream, long p, int k);

void save_stream(const ModeStream& stream, const std::string& path);
ModeStream load_stream(const std::string& path);

// deterministic eigenvector conventions, shared with the tests
void fix_eigenvector_phase(Eigen::Ref<VecXc> v);

} // namespace rtrg
