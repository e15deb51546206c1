#include "rtrg/spectral_density.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rtrg {

SpectralDensity SpectralDensity::power_exp(double alpha, double s, double omega_c) {
    SpectralDensity d;
    d.kind = DensityKind::PowerExp;
    d.alpha = alpha;
    d.s = s;
    d.omega_c = omega_c;
    d.validate();
    return d;
}

SpectralDensity SpectralDensity::waveguide(double eps, double h) {
    SpectralDensity d;
    d.kind = DensityKind::Waveguide;
    d.eps = eps;
    d.h = h;
    d.validate();
    return d;
}

SpectralDensity SpectralDensity::power_sharp(double alpha, double s, double omega_c) {
    SpectralDensity d;
    d.kind = DensityKind::PowerSharp;
    d.alpha = alpha;
    d.s = s;
    d.omega_c = omega_c;
    d.validate();
    return d;
}

SpectralDensity SpectralDensity::flat(double gamma) {
    SpectralDensity d;
    d.kind = DensityKind::Flat;
    d.gamma = gamma;
    d.validate();
    return d;
}

void SpectralDensity::validate() const {
    switch (kind) {
        case DensityKind::PowerExp:
        case DensityKind::PowerSharp:
            if (!(alpha > 0.0) || !(omega_c > 0.0) || !(s >= 0.0))
                throw std::invalid_argument("spectral density: need alpha > 0, omega_c > 0, s >= 0");
            break;
        case DensityKind::Waveguide:
            if (!(eps > 0.0) || !(h > 0.0))
                throw std::invalid_argument("spectral density: need eps > 0, h > 0");
            if (eps - 2.0 * h < 0.0)
                throw std::invalid_argument("spectral density: waveguide band extends below zero frequency");
            break;
        case DensityKind::Flat:
            if (!(gamma >= 0.0)) throw std::invalid_argument("spectral density: need gamma >= 0");
            break;
    }
}

double SpectralDensity::j(double omega) const {
    if (omega < 0.0) return 0.0;
    switch (kind) {
        case DensityKind::PowerExp:
            return 0.5 * alpha * omega_c * std::pow(omega / omega_c, s) * std::exp(-omega / omega_c);
        case DensityKind::Waveguide: {
            const double u = (omega - eps) / (2.0 * h);
            if (u <= -1.0 || u >= 1.0) return 0.0;
            return std::sqrt(1.0 - u * u) / h;
        }
        case DensityKind::PowerSharp:
            if (omega > omega_c) return 0.0;
            return 2.0 * pi * alpha * std::pow(omega_c, 1.0 - s) * std::pow(omega, s);
        case DensityKind::Flat:
            throw std::logic_error("flat kernel has no spectral density (synthetic, time-domain only)");
    }
    return 0.0;
}

void SpectralDensity::support(double& lo, double& hi, double weight_tol) const {
    switch (kind) {
        case DensityKind::PowerExp: {
            lo = 0.0;
            // choose x with Gamma(s+1,x)/Gamma(s+1) <= weight_tol via the
            // crude bound Q(a,x) <= x^a exp(-x) * 2 / Gamma(a+... ); scan up
            double x = 5.0 + 3.0 * s;
            const double ga = std::tgamma(s + 1.0);
            auto upper = [&](double xx) { return std::pow(xx, s) * std::exp(-xx) * (1.0 + (s + 1.0) / xx) / ga; };
            while (upper(x) > weight_tol && x < 5000.0) x *= 1.25;
            hi = omega_c * x;
            break;
        }
        case DensityKind::Waveguide:
            lo = eps - 2.0 * h;
            hi = eps + 2.0 * h;
            break;
        case DensityKind::PowerSharp:
            lo = 0.0;
            hi = omega_c;
            break;
        case DensityKind::Flat:
            throw std::logic_error("flat kernel has no spectral density support");
    }
}

double SpectralDensity::total_weight() const {
    switch (kind) {
        case DensityKind::PowerExp:
            return 0.5 * alpha * omega_c * omega_c * std::tgamma(s + 1.0);
        case DensityKind::Waveguide:
            return pi; // (1/h) * Int sqrt(1-u^2) * 2h du = pi
        case DensityKind::PowerSharp:
            return 2.0 * pi * alpha * omega_c * omega_c / (s + 1.0);
        case DensityKind::Flat:
            throw std::logic_error("flat kernel has no spectral density weight");
    }
    return 0.0;
}

std::vector<double> SpectralDensity::tail_frequencies() const {
    switch (kind) {
        case DensityKind::PowerExp:
            return {0.0};
        case DensityKind::Waveguide:
            return {eps - 2.0 * h, eps + 2.0 * h};
        case DensityKind::PowerSharp:
            return {0.0, omega_c};
        case DensityKind::Flat:
            return {};
    }
    return {};
}

std::string SpectralDensity::describe() const {
    std::ostringstream os;
    switch (kind) {
        case DensityKind::PowerExp:
            os << "power_exp(alpha=" << alpha << ",s=" << s << ",omega_c=" << omega_c << ")";
            break;
        case DensityKind::Waveguide:
            os << "waveguide(eps=" << eps << ",h=" << h << ")";
            break;
        case DensityKind::PowerSharp:
            os << "power_sharp(alpha=" << alpha << ",s=" << s << ",omega_c=" << omega_c << ")";
            break;
        case DensityKind::Flat:
            os << "flat(gamma=" << gamma << ")";
            break;
    }
    return os.str();
}

} // namespace rtrg
