#include "rtrg/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace rtrg {

namespace {

QuadratureRule compute_gauss_legendre(int n) {
    // Newton iteration on Legendre polynomials, nodes symmetric about 0.
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

std::mutex g_rule_mutex;
std::map<int, QuadratureRule> g_rules;

std::mutex g_fftw_mutex;

} // namespace

const QuadratureRule& gauss_legendre(int n) {
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    auto it = g_rules.find(n);
    if (it == g_rules.end()) it = g_rules.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

AcceleratedSum wynn_epsilon(std::span<const cplx> s, double abs_tol) {
    AcceleratedSum out;
    const int n = static_cast<int>(s.size());
    if (n == 0) return out;
    if (n == 1) {
        out.value = s[0];
        out.err_estimate = std::abs(s[0]);
        out.terms_used = 1;
        return out;
    }
    std::vector<cplx> prev(s.begin(), s.end()); // epsilon_{k-1}
    std::vector<cplx> prev2(n + 1, cplx(0.0));  // epsilon_{k-2} (k=-1 row is zero)
    cplx best = s[n - 1];
    double best_err = std::abs(n >= 2 ? s[n - 1] - s[n - 2] : s[n - 1]);
    for (int k = 1; k < n; ++k) {
        std::vector<cplx> cur(n - k);
        bool degenerate = false;
        for (int j = 0; j < n - k; ++j) {
            const cplx diff = prev[j + 1] - prev[j];
            if (std::abs(diff) < 1e-300) {
                degenerate = true;
                break;
            }
            cur[j] = prev2[j + 1] + 1.0 / diff;
        }
        if (degenerate) break;
        if (k % 2 == 0) { // even columns approximate the limit
            const cplx cand = cur.back();
            const double err = std::abs(cand - best);
            if (err < best_err) {
                best_err = err;
                best = cand;
            }
        }
        prev2 = std::move(prev);
        prev = std::move(cur);
        if (best_err < abs_tol) break;
    }
    out.value = best;
    out.err_estimate = best_err;
    out.converged = best_err < abs_tol;
    out.terms_used = n;
    return out;
}

void fft_forward(std::vector<cplx>& data) {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(data.size()),
                                      reinterpret_cast<fftw_complex*>(data.data()),
                                      reinterpret_cast<fftw_complex*>(data.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

void fft_inverse(std::vector<cplx>& data) {
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(data.size()),
                                          reinterpret_cast<fftw_complex*>(data.data()),
                                          reinterpret_cast<fftw_complex*>(data.data()),
                                          FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    const double inv = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= inv;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need matching sizes >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace rtrg
