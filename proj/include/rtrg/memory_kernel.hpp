// memory_kernel.hpp — memory function M(t) of a spectral density, its cached
// discretization M_lr = M((l-r)dt), and certified tail bounds used to
// truncate the future-coupling sums.
#pragma once

#include <functional>
#include <vector>

#include "rtrg/spectral_density.hpp"
#include "rtrg/types.hpp"

namespace rtrg {

// One memory channel of the large-time expansion
//   M(t) = sum_c exp(-i omega_c t) A_c(t),  t >= t0,
// with A_c smooth and |A_c(t)| ~ t^-decay_exp.  Every discontinuity of J
// contributes one channel.
struct TailChannel {
    double omega = 0.0;
    double decay_exp = 1.0;
    std::function<cplx(double)> amplitude;
};

// Closed-form M(t) = (1/pi) Int_0^inf J(w) exp(-i w t) dw for the given
// density.  Stateless; valid for any finite t (M(-t) = conj M(t)).
cplx eval_memory(const SpectralDensity& density, double t);

// Same via direct numerical Fourier quadrature of J; the independent oracle
// for eval_memory.  n_points is the total node budget.  If the internal
// error estimate (coarse-vs-fine panel difference) exceeds 1e-8 a warning is
// printed to stderr and *err_estimate (if given) carries the estimate.
cplx quadrature_memory(const SpectralDensity& density, double t, long n_points,
                       double* err_estimate = nullptr);

class MemoryKernel {
public:
    // Rows M(r*dt) are cached for r = 0..row_count-1 where row_count covers
    // t_horizon plus a small margin.  The certified cache horizon
    // P_max = (t_end + T_tail)/dt with the analytic tail bound on the
    // discarded sum-square weight below `tail_rel_tol` of the total is
    // reported by certified_horizon(); rows beyond the materialized cache
    // are served by the closed form through eval().
    MemoryKernel(SpectralDensity density, double dt, double t_horizon,
                 double tail_rel_tol = 1e-12);

    const SpectralDensity& density() const { return density_; }
    double dt() const { return dt_; }

    cplx eval(double t) const; // closed form; throws on non-finite t
    double m0() const { return m0_; }

    // cached row value M(r*dt); r beyond the cache is evaluated on the fly
    cplx row(long r) const;
    long cached_rows() const { return static_cast<long>(rows_.size()); }

    // M_lr = M((l-r)dt) for r in [r_begin, r_end); requires l >= r >= 0.
    std::vector<cplx> matrix_row(long l, long r_begin, long r_end) const;

    // |M(t)| <= tail_amplitude * t^(-tail_exponent) for t >= tail_t0
    double tail_amplitude() const { return tail_amp_; }
    double tail_exponent() const { return tail_exp_; }
    double tail_t0() const { return tail_t0_; }

    // upper bound on sum_{k: k*dt > T} |M(k dt)|^2
    double tail_sum_sq_beyond(double T) const;

    // sum_{k>=1} |M(k dt)|^2 (numeric part + midpoint tail estimate); this is
    // the p-independent diagonal constant K_ii of the future-coupling matrix.
    double sum_sq_total() const { return sum_sq_total_; }

    // smallest sample count P with tail_sum_sq_beyond(P*dt) <= rel*sum_sq_total
    long horizon_for_rel(double rel) const;
    long certified_horizon() const { return certified_horizon_; }

    // channel decomposition of M(t), valid for t >= tail_channels_t0()
    std::vector<TailChannel> tail_channels() const;
    double tail_channels_t0() const;

private:
    SpectralDensity density_;
    double dt_;
    double m0_;
    std::vector<cplx> rows_;
    double tail_amp_ = 0.0;
    double tail_exp_ = 2.0;
    double tail_t0_ = 1.0;
    double sum_sq_total_ = 0.0;
    long certified_horizon_ = 0;
};

} // namespace rtrg
