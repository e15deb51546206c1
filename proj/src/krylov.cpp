#include "rtrg/krylov.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace rtrg {

SpMat quadratic_generator(const FockBasis& basis, const MatXc& h) {
    const int nm = basis.n_modes();
    if (h.rows() != nm || h.cols() != nm)
        throw std::invalid_argument("quadratic_generator: h must be n_modes x n_modes");
    std::vector<Eigen::Triplet<cplx>> trip;
    const long n = basis.dim();
    for (long s = 0; s < n; ++s) {
        const auto& occ = basis.occupations(s);
        for (int l = 1; l <= nm; ++l) {
            const int nl = occ[static_cast<std::size_t>(l - 1)];
            if (nl == 0) continue;
            for (int k = 1; k <= nm; ++k) {
                const cplx hkl = h(k - 1, l - 1);
                if (hkl == cplx(0.0)) continue;
                // b_k^dag b_l |s>
                if (k == l) {
                    trip.emplace_back(s, s, hkl * static_cast<double>(nl));
                } else {
                    const long mid = basis.shifted_index(s, l, -1);
                    const long target = basis.shifted_index(mid, k, +1);
                    if (target < 0) continue; // number conserving: never triggers
                    const int nk = basis.occupations(s)[static_cast<std::size_t>(k - 1)];
                    const double amp = std::sqrt(static_cast<double>(nl)) *
                                       std::sqrt(static_cast<double>(nk + 1));
                    trip.emplace_back(target, s, hkl * amp);
                }
            }
        }
    }
    SpMat out(n, n);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

VecXc apply_bogoliubov(const SpMat& h_w, const VecXc& state, const KrylovConfig& cfg,
                       KrylovStats* stats) {
    const double norm0 = state.norm();
    if (norm0 == 0.0) return state;
    if (h_w.nonZeros() == 0) return state; // exp(0) is the exact identity
    if (cfg.max_budget < 1) throw std::invalid_argument("apply_bogoliubov: budget >= 1 required");

    std::vector<VecXc> chain;
    chain.reserve(static_cast<std::size_t>(cfg.max_budget) + 1);
    chain.push_back(state / norm0);
    std::vector<double> alpha, beta;

    auto chain_result = [&](int len) {
        // diagonalize the tridiagonal chain Hamiltonian and exponentiate
        MatXd hch = MatXd::Zero(len, len);
        for (int i = 0; i < len; ++i) hch(i, i) = beta[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < len; ++i) {
            hch(i, i + 1) = alpha[static_cast<std::size_t>(i)];
            hch(i + 1, i) = alpha[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<MatXd> es(hch);
        VecXc coeff = VecXc::Zero(len);
        // <Phi_l' | Psi> = norm0 delta_{l',0}
        for (int k = 0; k < len; ++k) {
            const cplx phase = std::exp(cplx(0.0, es.eigenvalues()[k]));
            coeff += phase * es.eigenvectors().col(k).cast<cplx>() * es.eigenvectors()(0, k);
        }
        VecXc out = VecXc::Zero(state.size());
        for (int l = 0; l < len; ++l) out += coeff[l] * chain[static_cast<std::size_t>(l)];
        return VecXc(out * norm0);
    };

    VecXc prev;
    double last_diff_sq = 0.0;
    for (int k = 0; k < cfg.max_budget; ++k) {
        VecXc y = h_w * chain[static_cast<std::size_t>(k)];
        const cplx bk = chain[static_cast<std::size_t>(k)].dot(y);
        beta.push_back(bk.real());
        y -= bk.real() * chain[static_cast<std::size_t>(k)];
        if (k > 0) y -= alpha[static_cast<std::size_t>(k - 1)] * chain[static_cast<std::size_t>(k - 1)];
        const double a_raw = y.norm();
        // full reorthogonalization against the whole chain
        for (const auto& phi : chain) y -= phi.dot(y) * phi;
        const double a_perp = y.norm();
        alpha.push_back(a_perp);

        VecXc cur = chain_result(k + 1);
        if (k > 0) {
            last_diff_sq = (cur - prev).squaredNorm();
            if (last_diff_sq < cfg.conv_threshold * norm0 * norm0) {
                if (stats) *stats = {k + 1, last_diff_sq, alpha, beta};
                return cur;
            }
        }
        prev = std::move(cur);

        if (a_raw * a_raw < cfg.hop_threshold || a_perp * a_perp < cfg.lindep_threshold * a_raw * a_raw ||
            a_perp == 0.0) {
            // chain decoupled or Krylov space exhausted: the result is exact
            // for the subspace reached
            if (stats) *stats = {k + 1, last_diff_sq, alpha, beta};
            return prev;
        }
        chain.push_back(y / a_perp);
    }
    if (stats) *stats = {cfg.max_budget, last_diff_sq, alpha, beta};
    throw std::runtime_error("apply_bogoliubov: budget exhausted without convergence, |dPsi|^2 = " +
                             std::to_string(last_diff_sq));
}

VecXc apply_bogoliubov(const FockBasis& basis, const MatXc& h, const VecXc& state,
                       const KrylovConfig& cfg, KrylovStats* stats) {
    return apply_bogoliubov(quadratic_generator(basis, h), state, cfg, stats);
}

MatXc apply_bogoliubov_dm(const FockBasis& basis, const MatXc& h, const MatXc& rho,
                          const KrylovConfig& cfg) {
    const SpMat h_w = quadratic_generator(basis, h);
    MatXc a(rho.rows(), rho.cols());
    for (Eigen::Index j = 0; j < rho.cols(); ++j) a.col(j) = apply_bogoliubov(h_w, VecXc(rho.col(j)), cfg);
    MatXc at = a.adjoint();
    MatXc r(rho.rows(), rho.cols());
    for (Eigen::Index j = 0; j < at.cols(); ++j) r.col(j) = apply_bogoliubov(h_w, VecXc(at.col(j)), cfg);
    return 0.5 * (r + r.adjoint());
}

} // namespace rtrg
