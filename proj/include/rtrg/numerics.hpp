// numerics.hpp — small numeric utilities: Gauss-Legendre rules, Wynn epsilon
// series acceleration, FFT wrappers and least-squares slope fits.
#pragma once

#include <span>
#include <vector>

#include "rtrg/types.hpp"

namespace rtrg {

struct QuadratureRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule of order n, computed once and cached.
const QuadratureRule& gauss_legendre(int n);

// Integrate f over [a, b] with a single Gauss-Legendre panel.
template <typename F>
auto gl_panel(F&& f, double a, double b, int order) {
    const QuadratureRule& q = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    using R = decltype(f(mid));
    R acc{};
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        acc += q.weights[i] * f(mid + half * q.nodes[i]);
    return acc * half;
}

struct AcceleratedSum {
    cplx value{};
    double err_estimate = 0.0;
    bool converged = false;
    int terms_used = 0;
};

// Wynn epsilon acceleration of a sequence of partial sums.  Returns the last
// stable diagonal entry together with a (heuristic) error estimate from the
// difference of the final diagonals.
AcceleratedSum wynn_epsilon(std::span<const cplx> partial_sums, double abs_tol);

// In-place complex FFT (wraps FFTW); n need not be a power of two.
void fft_forward(std::vector<cplx>& data);
void fft_inverse(std::vector<cplx>& data); // normalized by 1/n

std::size_t next_pow2(std::size_t n);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

} // namespace rtrg
