#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rtrg/krylov.hpp"
#include "rtrg/rng.hpp"

using namespace rtrg;

namespace {

MatXc random_hermitian(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    MatXc h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) = rng.next_complex_gaussian();
    return 0.5 * (h + h.adjoint()).eval();
}

VecXc random_state(long n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    VecXc v(n);
    for (long i = 0; i < n; ++i) v[i] = rng.next_complex_gaussian();
    return v;
}

// dense oracle: exp(i H_W) psi through a full Hermitian eigendecomposition
VecXc dense_expm_apply(const SpMat& h_w, const VecXc& psi) {
    MatXc dense = MatXc(h_w);
    Eigen::SelfAdjointEigenSolver<MatXc> es(dense);
    VecXc phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases[i] = std::exp(cplx(0.0, es.eigenvalues()[i]));
    return es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * psi));
}

KrylovConfig tight_cfg() {
    KrylovConfig cfg;
    cfg.max_budget = 64;
    cfg.hop_threshold = 1e-24;
    cfg.lindep_threshold = 1e-20;
    cfg.conv_threshold = 1e-26;
    return cfg;
}

} // namespace

TEST_CASE("h = 0 reproduces the input exactly") {
    FockBasis b(2, 3, 2);
    MatXc h = MatXc::Zero(3, 3);
    VecXc psi = random_state(b.dim(), 11);
    VecXc out = apply_bogoliubov(b, h, psi, KrylovConfig{});
    CHECK((out - psi).norm() == 0.0);
}

TEST_CASE("krylov matches the dense matrix exponential to 1e-8") {
    FockBasis b(2, 4, 3); // dim 70
    REQUIRE(b.dim() <= 200);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        MatXc h = random_hermitian(4, seed);
        const SpMat h_w = quadratic_generator(b, h);
        VecXc psi = random_state(b.dim(), 100 + seed);
        KrylovStats stats;
        VecXc fast = apply_bogoliubov(h_w, psi, tight_cfg(), &stats);
        VecXc ref = dense_expm_apply(h_w, psi);
        CHECK((fast - ref).norm() <= 1e-8 * psi.norm());
        // norm preservation (W unitary)
        CHECK(std::abs(fast.norm() - psi.norm()) <= 1e-10 * psi.norm());
        // Lanczos coefficients: alpha >= 0 by construction, beta real recorded
        for (double a : stats.alpha) CHECK(a >= 0.0);
    }
}

TEST_CASE("beta coefficients are real for a Hermitian generator") {
    FockBasis b(1, 3, 3);
    MatXc h = random_hermitian(3, 17);
    const SpMat h_w = quadratic_generator(b, h);
    VecXc psi = random_state(b.dim(), 5);
    // direct check of <phi|H_W|phi> on the normalized start vector
    VecXc phi = psi / psi.norm();
    const cplx diag = phi.dot(VecXc(h_w * phi));
    CHECK(std::abs(diag.imag()) <= 1e-10 * std::abs(diag.real()) + 1e-12);
}

TEST_CASE("number conservation: occupation histogram invariant") {
    FockBasis b(2, 3, 3);
    MatXc h = random_hermitian(3, 23);
    VecXc psi = random_state(b.dim(), 7);
    VecXc out = apply_bogoliubov(b, h, psi, tight_cfg());
    for (int n = 0; n <= b.n_max(); ++n) {
        double win = 0.0, wout = 0.0;
        for (long k = 0; k < b.dim(); ++k) {
            if (total_occupation(b, k) == n) {
                win += std::norm(psi[k]);
                wout += std::norm(out[k]);
            }
        }
        CHECK(win == doctest::Approx(wout).epsilon(1e-10));
    }
}

TEST_CASE("single-quantum sector transforms with U-dagger") {
    // convention anchor: with h = i ln U (as the stream records it), the
    // many-body W-hat acts on single-quantum amplitudes as U^dagger
    FockBasis b(1, 3, 1);
    MatXc a = random_hermitian(3, 31);
    Eigen::SelfAdjointEigenSolver<MatXc> es(a);
    MatXc u = es.eigenvectors(); // some unitary
    // h = i ln u via its Schur (u normal)
    Eigen::ComplexSchur<MatXc> schur(u);
    VecXd theta(3);
    for (int i = 0; i < 3; ++i) theta[i] = std::arg(schur.matrixT()(i, i));
    MatXc h = schur.matrixU() * (-theta).asDiagonal() * schur.matrixU().adjoint();
    h = 0.5 * (h + h.adjoint()).eval();

    VecXc amps(3);
    amps << cplx(0.3, 0.2), cplx(-0.5, 0.1), cplx(0.0, 0.77);
    VecXc psi = VecXc::Zero(b.dim());
    for (int m = 1; m <= 3; ++m) {
        long k = b.index_of(0, {static_cast<std::uint8_t>(m == 1), static_cast<std::uint8_t>(m == 2),
                                static_cast<std::uint8_t>(m == 3)});
        psi[k] = amps[m - 1];
    }
    VecXc out = apply_bogoliubov(b, h, psi, tight_cfg());
    VecXc expect = u.adjoint() * amps;
    for (int m = 1; m <= 3; ++m) {
        long k = b.index_of(0, {static_cast<std::uint8_t>(m == 1), static_cast<std::uint8_t>(m == 2),
                                static_cast<std::uint8_t>(m == 3)});
        CHECK(std::abs(out[k] - expect[m - 1]) < 1e-10);
    }
}

TEST_CASE("density-matrix transform: identity, purity, trace") {
    FockBasis b(2, 2, 2);
    VecXc psi = random_state(b.dim(), 3);
    MatXc rho = psi * psi.adjoint();
    rho /= rho.trace().real();

    MatXc same = apply_bogoliubov_dm(b, MatXc::Zero(2, 2), rho, KrylovConfig{});
    CHECK((same - rho).cwiseAbs().maxCoeff() == 0.0);

    MatXc h = random_hermitian(2, 77);
    MatXc moved = apply_bogoliubov_dm(b, h, rho, tight_cfg());
    CHECK(std::abs(moved.trace() - rho.trace()) <= 1e-10);
    const double purity0 = (rho * rho).trace().real();
    const double purity1 = (moved * moved).trace().real();
    CHECK(purity1 == doctest::Approx(purity0).epsilon(1e-9));
    CHECK((moved - moved.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("budget exhaustion raises with the last difference") {
    FockBasis b(1, 2, 4);
    MatXc h = 40.0 * random_hermitian(2, 9); // large generator, tiny budget
    KrylovConfig cfg;
    cfg.max_budget = 3;
    cfg.hop_threshold = 1e-30;
    cfg.lindep_threshold = 1e-30;
    cfg.conv_threshold = 1e-30;
    VecXc psi = random_state(b.dim(), 13);
    CHECK_THROWS_WITH_AS((void)apply_bogoliubov(b, h, psi, cfg),
                         doctest::Contains("budget exhausted"), std::runtime_error);
}
