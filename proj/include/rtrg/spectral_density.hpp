// spectral_density.hpp — bath spectral densities J(w) and their parameters.
#pragma once

#include <string>

#include "rtrg/types.hpp"

namespace rtrg {

enum class DensityKind {
    PowerExp,   // J(w) = (alpha*wc/2) (w/wc)^s exp(-w/wc)
    Waveguide,  // tight-binding band [eps-2h, eps+2h], J(w) = sqrt(1-((w-eps)/2h)^2)/h
    PowerSharp, // J(w) = 2*pi*alpha * wc^(1-s) * w^s on [0, wc]
    Flat,       // synthetic broadband kernel M_rs = Gamma * delta_rs / dt (non-physical,
                // provided for the Markovian-limit check only)
};

struct SpectralDensity {
    DensityKind kind = DensityKind::PowerExp;
    double alpha = 1.0;   // PowerExp / PowerSharp coupling
    double s = 1.0;       // PowerExp / PowerSharp exponent, s >= 0
    double omega_c = 1.0; // PowerExp / PowerSharp cutoff
    double eps = 1.0;     // Waveguide onsite energy
    double h = 0.05;      // Waveguide hopping
    double gamma = 1.0;   // Flat rate

    static SpectralDensity power_exp(double alpha, double s, double omega_c);
    static SpectralDensity waveguide(double eps, double h);
    static SpectralDensity power_sharp(double alpha, double s, double omega_c);
    static SpectralDensity flat(double gamma);

    // J(w); zero outside the support. Flat has no sensible J and throws.
    double j(double omega) const;

    // support of J as [lo, hi]; hi is an effective cutoff for PowerExp chosen
    // so the neglected spectral weight is below `weight_tol` of the total.
    void support(double& lo, double& hi, double weight_tol = 1e-12) const;

    // integral of J over the support (exact where closed form exists)
    double total_weight() const;

    bool is_physical() const { return kind != DensityKind::Flat; }

    // carrier frequencies of the power-law tails of M(t) ("memory channels"):
    // discontinuities of J create tails ~ exp(-i w_k t) t^(-p_k-1)
    std::vector<double> tail_frequencies() const;

    std::string describe() const;

    void validate() const; // throws std::invalid_argument on bad parameters
};

} // namespace rtrg
