// correlation.hpp — stationary future-coupling correlation sums
//   C(d) = sum_{k>=1} conj(M(k dt)) M((k+d) dt)
// evaluated to a certified absolute accuracy: an FFT autocorrelation over a
// finite horizon plus an analytic tail integral (midpoint Euler-Maclaurin of
// the closed-form product, oscillation-aware panels with epsilon-algorithm
// acceleration).  Every entry of the future-coupling matrix K(p) is a linear
// combination of these sums and short prefix corrections.
#pragma once

#include <vector>

#include "rtrg/memory_kernel.hpp"
#include "rtrg/types.hpp"

namespace rtrg {

struct CorrelationOptions {
    long max_samples = 1l << 22;  // cap on the numeric horizon
    long min_samples = 1l << 16;
    double tail_rel_tol = 1e-10;  // target accuracy relative to C(0)
    bool tail_correction = true;  // add the analytic tail integral
};

struct CorrelationTable {
    double dt = 0.0;
    long max_lag = 0;
    std::vector<cplx> c;     // c[d], d = 0..max_lag
    double abs_err = 0.0;    // certified absolute error bound (uniform in d)
    long horizon = 0;        // numeric samples summed
    double k_ii() const { return c.empty() ? 0.0 : c[0].real(); }
};

CorrelationTable build_correlation(const MemoryKernel& kernel, long max_lag,
                                   const CorrelationOptions& opts = {});

// Int_T^inf conj(M(t)) M(t+tau) dt for a physical kernel; err_out receives an
// error estimate.  Exposed for the oracle tests.
cplx tail_correlation_integral(const MemoryKernel& kernel, double T, double tau,
                               double abs_tol, double* err_out = nullptr);

} // namespace rtrg
