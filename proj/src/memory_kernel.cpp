#include "rtrg/memory_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "rtrg/numerics.hpp"

namespace rtrg {

namespace {

// J1(x) for x >= 0; std implementation below the asymptotic switch, Hankel
// expansion beyond (the cached kernel rows need millions of evaluations).
double bessel_j1(double x) {
    if (x < 40.0) return std::cyl_bessel_j(1.0, x);
    const double ix = 1.0 / x;
    const double ix2 = ix * ix;
    // Hankel expansion, mu = 4: P ~ 1 + 15/(128 x^2) - 4725/(32768 x^4),
    // Q ~ 3/(8x) - 105/(1024 x^3)
    const double p = 1.0 + ix2 * (15.0 / 128.0 - ix2 * (4725.0 / 32768.0));
    const double q = ix * (3.0 / 8.0 - ix2 * (105.0 / 1024.0));
    const double chi = x - 0.75 * pi;
    return std::sqrt(2.0 / (pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Upper incomplete Gamma(a, z) by the Legendre continued fraction (modified
// Lentz).  Used on the imaginary axis for moderate |z| where neither the
// power series (cancellation ~ e^|z| eps) nor the asymptotic expansion is
// accurate.
cplx upper_gamma_cf(double a, cplx z) {
    const double tiny = 1e-290;
    cplx b = z + 1.0 - a;
    cplx c = cplx(1.0 / tiny);
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 4000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const cplx delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-z) * std::pow(z, a) * h;
}

// Kummer 1F1(1, b, z) on the imaginary axis: power series for small |z|,
// incomplete-gamma continued fraction in the mid range, asymptotic expansion
// for large |z| (the switch points are validated against the quadrature
// oracle in the tests).
cplx kummer_1f1_1b(double b, cplx z) {
    const double az = std::abs(z);
    if (az <= 12.0) {
        cplx term(1.0, 0.0);
        cplx sum = term;
        for (int n = 1; n < 400; ++n) {
            term *= z / (b + static_cast<double>(n - 1));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum) && n > az) break;
        }
        return sum;
    }
    if (az <= 60.0) {
        // 1F1(1,b,z) = (b-1) z^{1-b} e^z gamma_lower(b-1, z)
        const double a = b - 1.0;
        const cplx lower = std::tgamma(a) - upper_gamma_cf(a, z);
        return a * std::pow(z, -a) * std::exp(z) * lower;
    }
    // 1F1(1,b,z) ~ Gamma(b) e^z z^{1-b} - ((b-1)/z) sum_k (2-b)_k (-z)^{-k}
    const cplx lead = std::tgamma(b) * std::exp(z) * std::pow(z, 1.0 - b);
    cplx term(1.0, 0.0);
    cplx sum = term;
    double prev = std::abs(term);
    for (int k = 1; k < 60; ++k) {
        term *= (2.0 - b + static_cast<double>(k - 1)) / (-z);
        const double mag = std::abs(term);
        if (mag > prev) break; // asymptotic series: stop at the smallest term
        sum += term;
        prev = mag;
        if (mag < 1e-18) break;
    }
    return lead - (b - 1.0) / z * sum;
}

int oscillation_panels(double phase_span, int min_panels, long budget, int order) {
    const double half_cycles = std::abs(phase_span) / pi;
    long p = static_cast<long>(std::ceil(half_cycles * 2.0)) + min_panels;
    p = std::min<long>(p, std::max<long>(budget / order, min_panels));
    return static_cast<int>(std::max<long>(p, min_panels));
}

} // namespace

cplx eval_memory(const SpectralDensity& d, double t) {
    if (!std::isfinite(t)) throw std::domain_error("eval_memory: non-finite time");
    switch (d.kind) {
        case DensityKind::PowerExp: {
            const double g = std::tgamma(d.s + 1.0);
            const cplx den = std::pow(cplx(1.0, t * d.omega_c), d.s + 1.0);
            return d.alpha * d.omega_c * d.omega_c * g / (2.0 * pi) / den;
        }
        case DensityKind::Waveguide: {
            const double x = 2.0 * d.h * std::abs(t);
            double env;
            if (x < 1e-8) {
                env = 1.0 - x * x / 8.0; // J1(x)/(x/2) -> 1
            } else {
                env = bessel_j1(x) / (d.h * std::abs(t));
            }
            return std::exp(cplx(0.0, -d.eps * t)) * env;
        }
        case DensityKind::PowerSharp: {
            const double b = d.s + 2.0;
            const cplx z(0.0, d.omega_c * t);
            const cplx f = kummer_1f1_1b(b, z);
            const double pre = 2.0 * d.alpha * d.omega_c * d.omega_c / (d.s + 1.0);
            return pre * std::exp(-z) * f;
        }
        case DensityKind::Flat:
            throw std::logic_error("eval_memory: flat kernel is defined on the time grid only; use MemoryKernel");
    }
    return cplx(0.0);
}

cplx quadrature_memory(const SpectralDensity& d, double t, long n_points, double* err_estimate) {
    if (!d.is_physical())
        throw std::logic_error("quadrature_memory: flat kernel has no spectral density");
    if (n_points < 2) throw std::invalid_argument("quadrature_memory: n_points >= 2 required");
    const int order = 16;

    auto integrate = [&](int panel_scale) -> cplx {
        switch (d.kind) {
            case DensityKind::Waveguide: {
                // w = eps + 2h sin(theta): (1/pi) Int J exp(-iwt) dw = (2/pi) e^{-i eps t} Int cos^2(theta) e^{-i 2ht sin(theta)} dtheta
                const int panels = oscillation_panels(4.0 * d.h * std::abs(t), 4, n_points, order) * panel_scale;
                cplx acc(0.0);
                const double lo = -0.5 * pi, hi = 0.5 * pi;
                const double w = (hi - lo) / panels;
                for (int k = 0; k < panels; ++k) {
                    acc += gl_panel(
                        [&](double th) {
                            const double c = std::cos(th);
                            return c * c * std::exp(cplx(0.0, -2.0 * d.h * t * std::sin(th)));
                        },
                        lo + k * w, lo + (k + 1) * w, order);
                }
                return 2.0 / pi * std::exp(cplx(0.0, -d.eps * t)) * acc;
            }
            case DensityKind::PowerExp:
            case DensityKind::PowerSharp: {
                double lo, hi;
                d.support(lo, hi, 1e-16);
                // head [0, w_head]: substitution w = w_head u^kappa regularizes
                // the w^s endpoint (kappa(s+1)-1 >= 5) while the phase w t stays
                // below one cycle and varies smoothly in u
                const double w_head =
                    std::min({hi, 0.5 * d.omega_c, pi / std::max(std::abs(t), pi / hi)});
                auto dens = [&](double w) { return d.j(w) / pi; };
                cplx acc(0.0);
                const double kappa = std::max(2.0, std::ceil(6.0 / (d.s + 1.0)));
                const int head_panels = 6 * panel_scale;
                for (int k = 0; k < head_panels; ++k) {
                    const double a = static_cast<double>(k) / head_panels;
                    const double b = static_cast<double>(k + 1) / head_panels;
                    acc += gl_panel(
                        [&](double u) {
                            const double w = w_head * std::pow(u, kappa);
                            const double jac = w_head * kappa * std::pow(u, kappa - 1.0);
                            return dens(w) * jac * std::exp(cplx(0.0, -w * t));
                        },
                        a, b, order);
                }
                if (w_head < hi) {
                    const double range = hi - w_head;
                    // resolve both the oscillation e^{-iwt} and the decay scale
                    const long need = static_cast<long>(std::ceil(range * std::abs(t) / pi * 1.4)) +
                                      static_cast<long>(std::ceil(range / d.omega_c * 3.0)) + 8;
                    const long cap = std::max<long>(n_points / order, 16);
                    const int panels = static_cast<int>(std::min(need, cap)) * panel_scale;
                    const double w = range / panels;
                    for (int k = 0; k < panels; ++k) {
                        acc += gl_panel(
                            [&](double om) { return dens(om) * std::exp(cplx(0.0, -om * t)); },
                            w_head + k * w, w_head + (k + 1) * w, order);
                    }
                }
                return acc;
            }
            default:
                return cplx(0.0);
        }
    };

    const cplx coarse = integrate(1);
    const cplx fine = integrate(2);
    const double err = std::abs(fine - coarse);
    if (err_estimate) *err_estimate = err;
    if (err > 1e-8) {
        std::cerr << "[rtrg] warning: quadrature_memory error estimate " << err << " exceeds 1e-8 for "
                  << d.describe() << " at t=" << t << "\n";
    }
    return fine;
}

MemoryKernel::MemoryKernel(SpectralDensity density, double dt, double t_horizon, double tail_rel_tol)
    : density_(std::move(density)), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("MemoryKernel: dt must be positive");
    if (!(t_horizon >= 0.0)) throw std::invalid_argument("MemoryKernel: horizon must be non-negative");
    density_.validate();

    const bool flat = density_.kind == DensityKind::Flat;
    m0_ = flat ? density_.gamma / dt_ : eval_memory(density_, 0.0).real();

    const long rows = std::min<long>(static_cast<long>(std::ceil(t_horizon / dt_)) + 4, 1l << 26);
    rows_.resize(static_cast<std::size_t>(rows));
    for (long r = 0; r < rows; ++r) rows_[static_cast<std::size_t>(r)] = eval(r * dt_);

    // tail envelope |M(t)| <= A t^-gamma for t >= t0
    switch (density_.kind) {
        case DensityKind::PowerExp: {
            tail_exp_ = density_.s + 1.0;
            const double a0 = density_.alpha * density_.omega_c * density_.omega_c *
                              std::tgamma(density_.s + 1.0) / (2.0 * pi);
            tail_amp_ = a0 * std::pow(density_.omega_c, -tail_exp_);
            tail_t0_ = dt_;
            break;
        }
        case DensityKind::Waveguide: {
            // |J1(x)| <= 0.84/sqrt(x) for x >= 1 (sup of sqrt(x)|J1| is ~0.825 near x~2.2)
            tail_exp_ = 1.5;
            tail_amp_ = 0.84 / (std::sqrt(2.0) * std::pow(density_.h, 1.5));
            tail_t0_ = 1.0 / (2.0 * density_.h);
            break;
        }
        case DensityKind::PowerSharp: {
            // hard band edge at omega_c dominates: |M| ~ 1/t; calibrate the
            // amplitude by scanning the closed form over a log grid
            tail_exp_ = 1.0;
            tail_t0_ = std::max(5.0, 3.0 * (density_.s + 2.0)) / density_.omega_c;
            double peak = 0.0;
            for (int k = 0; k < 3000; ++k) {
                const double t = tail_t0_ * std::pow(1e6 / tail_t0_, k / 2999.0);
                peak = std::max(peak, std::abs(eval(t)) * t);
            }
            tail_amp_ = 1.3 * peak;
            break;
        }
        case DensityKind::Flat:
            tail_exp_ = 2.0;
            tail_amp_ = 0.0;
            tail_t0_ = dt_;
            break;
    }

    // sum of |M(k dt)|^2 over k >= 1: numeric head + midpoint tail estimate
    if (flat) {
        sum_sq_total_ = 0.0;
        certified_horizon_ = 1;
    } else {
        const long head = std::min<long>(std::max<long>(static_cast<long>(30.0 * tail_t0_ / dt_),
                                                        static_cast<long>(200.0 / dt_)),
                                         1l << 21);
        double acc = 0.0;
        for (long k = 1; k <= head; ++k) {
            const double a = std::abs(k < rows ? rows_[static_cast<std::size_t>(k)] : eval(k * dt_));
            acc += a * a;
        }
        const double T = head * dt_;
        const double g2 = 2.0 * tail_exp_ - 1.0;
        acc += tail_amp_ * tail_amp_ * std::pow(T, -g2) / (dt_ * g2);
        sum_sq_total_ = acc;
        certified_horizon_ = horizon_for_rel(tail_rel_tol);
    }
}

cplx MemoryKernel::eval(double t) const {
    if (!std::isfinite(t)) throw std::domain_error("MemoryKernel::eval: non-finite time");
    if (density_.kind == DensityKind::Flat)
        return std::abs(t) < 0.5 * dt_ ? cplx(density_.gamma / dt_, 0.0) : cplx(0.0);
    return eval_memory(density_, t);
}

cplx MemoryKernel::row(long r) const {
    if (r < 0) throw std::out_of_range("MemoryKernel::row: negative index");
    if (r < static_cast<long>(rows_.size())) return rows_[static_cast<std::size_t>(r)];
    return eval(r * dt_);
}

std::vector<cplx> MemoryKernel::matrix_row(long l, long r_begin, long r_end) const {
    if (r_begin < 0 || r_end < r_begin || l < r_end - 1)
        throw std::out_of_range("MemoryKernel::matrix_row: need l >= r >= 0");
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(r_end - r_begin));
    for (long r = r_begin; r < r_end; ++r) out.push_back(row(l - r));
    return out;
}

double MemoryKernel::tail_sum_sq_beyond(double T) const {
    if (tail_amp_ == 0.0) return 0.0;
    double extra = 0.0;
    if (T < tail_t0_) {
        extra = (tail_t0_ - T) / dt_ * m0_ * m0_;
        T = tail_t0_;
    }
    const double g2 = 2.0 * tail_exp_ - 1.0;
    const double a2 = tail_amp_ * tail_amp_;
    return extra + a2 * std::pow(T, -g2) / (dt_ * g2) + a2 * std::pow(T, -g2 - 1.0);
}

long MemoryKernel::horizon_for_rel(double rel) const {
    if (!(rel > 0.0)) throw std::invalid_argument("horizon_for_rel: rel must be positive");
    if (tail_amp_ == 0.0) return 1;
    const double target = rel * sum_sq_total_;
    double lo = tail_t0_ + dt_, hi = 1e18;
    if (tail_sum_sq_beyond(lo) <= target) return static_cast<long>(std::ceil(lo / dt_));
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (tail_sum_sq_beyond(mid) > target)
            lo = mid;
        else
            hi = mid;
        if (hi / lo < 1.0001) break;
    }
    const double samples = std::min(hi / dt_, 4.0e18);
    return static_cast<long>(std::ceil(samples));
}

} // namespace rtrg

namespace rtrg {

namespace {

// Hankel P, Q factors for J1: J1(x) = sqrt(1/(2 pi x)) [V(x) e^{i(x-3pi/4)} + conj(V(x)) e^{-i(x-3pi/4)}]
// with V = P + iQ.
cplx hankel_v1(double x) {
    const double ix2 = 1.0 / (x * x);
    const double p = 1.0 + ix2 * (15.0 / 128.0 - ix2 * (14175.0 / 98304.0 - ix2 * (127702575.0 / 188743680.0)));
    const double q = (1.0 / x) * (3.0 / 8.0 - ix2 * (315.0 / 3072.0 - ix2 * (1091475.0 / 3932160.0)));
    return cplx(p, q);
}

// truncated-at-smallest-term asymptotic series sum_k (2-b)_k (-z)^{-k}
cplx sharp_edge_series(double b, cplx z) {
    cplx term(1.0, 0.0);
    cplx sum = term;
    double prev = std::abs(term);
    for (int k = 1; k < 60; ++k) {
        term *= (2.0 - b + static_cast<double>(k - 1)) / (-z);
        const double mag = std::abs(term);
        if (mag > prev) break;
        sum += term;
        prev = mag;
        if (mag < 1e-18) break;
    }
    return sum;
}

} // namespace

std::vector<TailChannel> MemoryKernel::tail_channels() const {
    std::vector<TailChannel> out;
    const SpectralDensity d = density_;
    switch (d.kind) {
        case DensityKind::PowerExp:
            out.push_back({0.0, d.s + 1.0, [d](double t) { return eval_memory(d, t); }});
            break;
        case DensityKind::Waveguide: {
            auto amp = [d](double t, double sign) {
                const double x = 2.0 * d.h * t;
                const cplx v = sign > 0 ? std::conj(hankel_v1(x)) : hankel_v1(x);
                const cplx ph = std::exp(cplx(0.0, sign * 0.75 * pi));
                return v * ph / (d.h * t * std::sqrt(2.0 * pi * x));
            };
            out.push_back({d.eps - 2.0 * d.h, 1.5, [amp](double t) { return amp(t, -1.0); }});
            out.push_back({d.eps + 2.0 * d.h, 1.5, [amp](double t) { return amp(t, +1.0); }});
            break;
        }
        case DensityKind::PowerSharp: {
            const double b = d.s + 2.0;
            const double pre = 2.0 * d.alpha * d.omega_c * d.omega_c / (d.s + 1.0);
            out.push_back({0.0, d.s + 1.0, [d, b, pre](double t) {
                               return pre * std::tgamma(b) * std::pow(cplx(0.0, d.omega_c * t), 1.0 - b);
                           }});
            out.push_back({d.omega_c, 1.0, [d, b, pre](double t) {
                               const cplx z(0.0, d.omega_c * t);
                               return -pre * (b - 1.0) / z * sharp_edge_series(b, z);
                           }});
            break;
        }
        case DensityKind::Flat:
            break;
    }
    return out;
}

double MemoryKernel::tail_channels_t0() const {
    switch (density_.kind) {
        case DensityKind::PowerExp:
            return 1e-3 / density_.omega_c;
        case DensityKind::Waveguide:
            return 10.0 / density_.h;
        case DensityKind::PowerSharp:
            return 60.0 / density_.omega_c;
        case DensityKind::Flat:
            return 0.0;
    }
    return 0.0;
}

} // namespace rtrg
