#include "rtrg/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rtrg/numerics.hpp"

namespace rtrg {

namespace {

// dominant beat frequency of conj(M(t)) M(t+tau): differences of the tail
// carrier frequencies of M
double beat_frequency(const SpectralDensity& d) {
    const auto freqs = d.tail_frequencies();
    double beat = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i)
        for (std::size_t j = 0; j < freqs.size(); ++j)
            beat = std::max(beat, std::abs(freqs[i] - freqs[j]));
    return beat;
}

} // namespace

namespace {

// Int_Tc^inf h(t) dt for a smooth non-oscillatory power-law product decaying
// at least like t^-2: geometric panels with an envelope remainder bound.
cplx geometric_tail(const std::function<cplx(double)>& h, double Tc, double tol, double& err) {
    cplx acc(0.0);
    double a = Tc;
    double width = std::max(Tc / 8.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        acc += gl_panel(h, a, a + width, 24);
        a += width;
        width *= 1.5;
        const double rem = 2.0 * std::abs(h(a)) * a;
        if (rem < tol) {
            err += rem;
            return acc;
        }
    }
    err += 2.0 * std::abs(h(a)) * a;
    return acc;
}

// Int_Tc^inf h(t) e^{i Omega t} dt for smooth decaying h: half-period panels
// give a sign-alternating series which the epsilon algorithm extrapolates.
cplx oscillatory_tail(const std::function<cplx(double)>& h, double omega, double Tc, double tol,
                      double& err) {
    const double panel = pi / std::abs(omega);
    const int max_panels = 320;
    std::vector<cplx> partial;
    partial.reserve(max_panels);
    cplx acc(0.0);
    AcceleratedSum best;
    for (int k = 0; k < max_panels; ++k) {
        const double a = Tc + k * panel;
        acc += gl_panel([&](double t) { return h(t) * std::exp(cplx(0.0, omega * t)); }, a,
                        a + panel, 12);
        partial.push_back(acc);
        if (partial.size() >= 16 && partial.size() % 8 == 0) {
            best = wynn_epsilon(partial, tol);
            if (best.converged) {
                err += best.err_estimate;
                return best.value;
            }
        }
    }
    best = wynn_epsilon(partial, tol);
    err += std::max(best.err_estimate, tol);
    return best.value;
}

} // namespace

cplx tail_correlation_integral(const MemoryKernel& kernel, double T, double tau,
                               double abs_tol, double* err_out) {
    const SpectralDensity& d = kernel.density();
    if (!d.is_physical()) {
        if (err_out) *err_out = 0.0;
        return cplx(0.0);
    }
    const auto channels = kernel.tail_channels();
    const double t0 = kernel.tail_channels_t0();
    double err = 0.0;
    cplx acc(0.0);

    // bridge [T, t0] where the channel expansion is not yet accurate:
    // direct composite quadrature resolving the fastest carrier
    const double Tc = std::max(T, t0);
    if (T < Tc) {
        double wmax = 0.0;
        for (const auto& c : channels) wmax = std::max(wmax, std::abs(c.omega));
        const double width = std::min(0.25 * 2.0 * pi / (2.0 * wmax + 1e-12), (Tc - T));
        const long panels = static_cast<long>(std::ceil((Tc - T) / width));
        for (long k = 0; k < panels; ++k) {
            const double a = T + (Tc - T) * static_cast<double>(k) / panels;
            const double b = T + (Tc - T) * static_cast<double>(k + 1) / panels;
            acc += gl_panel(
                [&](double t) { return std::conj(kernel.eval(t)) * kernel.eval(t + tau); }, a, b, 16);
        }
    }

    // asymptotic-truncation error of the channel expansion itself, integrated
    // with the kernel envelope (the mismatch decays faster than the product)
    {
        cplx recon(0.0);
        for (const auto& c : channels)
            recon += std::exp(cplx(0.0, -c.omega * Tc)) * c.amplitude(Tc);
        const double mismatch = std::abs(kernel.eval(Tc) - recon);
        const double env = kernel.tail_amplitude() * std::pow(Tc, -kernel.tail_exponent());
        err += 2.0 * mismatch * env * Tc;
    }

    const double tol_each = abs_tol / (4.0 * static_cast<double>(channels.size() * channels.size()));
    for (const auto& c : channels) {
        for (const auto& cp : channels) {
            const double beat = c.omega - cp.omega;
            const cplx phase = std::exp(cplx(0.0, -cp.omega * tau));
            auto h = [&](double t) { return std::conj(c.amplitude(t)) * cp.amplitude(t + tau) * phase; };
            if (std::abs(beat) < 1e-12) {
                acc += geometric_tail(h, Tc, tol_each, err);
            } else {
                acc += oscillatory_tail(h, beat, Tc, tol_each, err);
            }
        }
    }
    if (err_out) *err_out = err;
    return acc;
}

CorrelationTable build_correlation(const MemoryKernel& kernel, long max_lag,
                                   const CorrelationOptions& opts) {
    if (max_lag < 0) throw std::invalid_argument("build_correlation: max_lag >= 0 required");
    CorrelationTable table;
    table.dt = kernel.dt();
    table.max_lag = max_lag;
    table.c.assign(static_cast<std::size_t>(max_lag) + 1, cplx(0.0));

    if (kernel.density().kind == DensityKind::Flat) {
        // M has a single nonzero sample at lag 0, which the sum k>=1 excludes
        table.abs_err = 0.0;
        table.horizon = 1;
        return table;
    }

    const double dt = kernel.dt();
    long horizon = std::clamp(kernel.horizon_for_rel(opts.tail_rel_tol),
                              opts.min_samples, opts.max_samples);
    horizon = std::max<long>(horizon, 2 * max_lag);
    table.horizon = horizon;

    // samples M(k dt) for k = 0..horizon+max_lag
    const long total = horizon + max_lag + 1;
    std::vector<cplx> m(static_cast<std::size_t>(total));
    for (long k = 0; k < total; ++k) m[static_cast<std::size_t>(k)] = kernel.row(k);

    // linear autocorrelation via zero-padded FFT:
    //   c_num(d) = sum_{k=1}^{horizon} conj(m[k]) m[k+d]
    const std::size_t n = next_pow2(static_cast<std::size_t>(total + horizon + 1));
    std::vector<cplx> a(n, cplx(0.0)), b(n, cplx(0.0));
    for (long k = 1; k <= horizon; ++k) a[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(k)];
    for (long k = 1; k < total; ++k) b[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(k)];
    fft_forward(a);
    fft_forward(b);
    // correlation with positive lags: IFFT(conj(FFT(m)) * FFT(m))[d] = sum_k conj(m[k]) m[k+d]
    for (std::size_t i = 0; i < n; ++i) a[i] = std::conj(a[i]) * b[i];
    fft_inverse(a);
    for (long dl = 0; dl <= max_lag; ++dl) table.c[static_cast<std::size_t>(dl)] = a[static_cast<std::size_t>(dl)];

    // FFT roundoff: ~ eps log2(n) * sum |m|^2
    double sum_sq = 0.0;
    for (const auto& v : m) sum_sq += std::norm(v);
    double err = 1.1e-16 * std::log2(static_cast<double>(n)) * sum_sq;

    const double T = (horizon + 0.5) * dt;
    if (opts.tail_correction) {
        // midpoint Euler-Maclaurin: sum_{k>horizon} f(k) ~ (1/dt) Int_{(horizon+1/2)dt} g
        const double tol = std::max(opts.tail_rel_tol * std::abs(table.c[0]), 1e-300);
        double worst = 0.0;
        for (long dl = 0; dl <= max_lag; ++dl) {
            double e = 0.0;
            table.c[static_cast<std::size_t>(dl)] +=
                tail_correlation_integral(kernel, T, dl * dt, tol * dt, &e) / dt;
            worst = std::max(worst, e / dt);
        }
        // midpoint-rule discretization error ~ dt^2/24 * |g'(T)|, with
        // g' bounded by (beat + 2*gamma/T) * envelope
        const double env = kernel.tail_amplitude() * kernel.tail_amplitude() *
                           std::pow(T, -2.0 * kernel.tail_exponent());
        const double gp = (beat_frequency(kernel.density()) + 2.0 * kernel.tail_exponent() / T) * env;
        err += worst + dt * dt / 24.0 * gp / dt;
    } else {
        err += kernel.tail_sum_sq_beyond(T);
    }
    table.abs_err = err;
    return table;
}

} // namespace rtrg
