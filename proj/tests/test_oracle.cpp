#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rtrg/fock.hpp"
#include "rtrg/oracle.hpp"

using namespace rtrg;

namespace {

SystemModel free_qubit() {
    SystemModel m;
    m.name = "free";
    m.h0 = 0.9 * pauli_x();
    m.drive_op = MatXc::Zero(2, 2);
    m.s_op = MatXc::Zero(2, 2);
    m.psi0 = VecXc::Zero(2);
    m.psi0[0] = 1.0;
    m.validate();
    return m;
}

MatXc propagate_dense(const MatXc& h, const VecXc& psi0, double t) {
    Eigen::SelfAdjointEigenSolver<MatXc> es(h);
    VecXc ph(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::exp(cplx(0.0, -es.eigenvalues()[i] * t));
    const VecXc psi = es.eigenvectors() * (ph.asDiagonal() * (es.eigenvectors().adjoint() * psi0));
    return psi * psi.adjoint();
}

} // namespace

TEST_CASE("waveguide oracle: zero coupling gives free Rabi dynamics") {
    auto model = free_qubit();
    auto res = exact_waveguide(model, 1.0, 0.05, 3, 1, 0.002, 1.5, 50);
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        const MatXc expect = propagate_dense(model.h0, model.psi0, res.t[i]).topLeftCorner(2, 2);
        CHECK((res.rho_s[i] - expect).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("waveguide oracle: L=2, n=1 matches dense diagonalization") {
    auto model = decay_qubit();
    const double eps = 1.0, h = 0.3;
    // dense reference on the same truncated space
    FockBasis basis(2, 2, 1);
    MatXc dense = MatXc(embed_system(basis, model.h0));
    const SpMat a1 = annihilator(basis, 1);
    dense += MatXc(embed_system(basis, model.s_op.adjoint()) * a1);
    dense += MatXc(embed_system(basis, model.s_op) * SpMat(a1.adjoint()));
    dense += eps * MatXc(number_op(basis, 1)) + eps * MatXc(number_op(basis, 2));
    const SpMat hop = SpMat(creator(basis, 2) * annihilator(basis, 1));
    dense += h * MatXc(hop) + h * MatXc(hop).adjoint();

    VecXc psi0 = VecXc::Zero(basis.dim());
    psi0.head(2) = model.psi0;
    const double t_end = 0.5;
    auto res = exact_waveguide(model, eps, h, 2, 1, 2.5e-6, t_end, 200000, 1e-13);
    const MatXc full = propagate_dense(dense, psi0, t_end);
    MatXc expect = MatXc::Zero(2, 2);
    for (long k = 0; k < basis.dim(); k += 2) expect += full.block(k, k, 2, 2);
    CHECK((res.rho_s.back() - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("star oracle: decoupled limit is free evolution") {
    auto model = free_qubit();
    auto density = SpectralDensity::power_sharp(0.1, 0.5, 1.0);
    auto res = exact_star(model, density, 8, 0.125, 1, 0.002, 1.5, 50);
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        const MatXc expect = propagate_dense(model.h0, model.psi0, res.t[i]).topLeftCorner(2, 2);
        CHECK((res.rho_s[i] - expect).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("star oracle: doubling the mode count is converged at short time") {
    auto model = subohmic_nonrwa();
    auto density = SpectralDensity::power_sharp(0.1, 0.5, 1.0);
    const double t_end = 8.0, dt = 0.01;
    auto coarse = exact_star(model, density, 16, 1.0 / 16.0, 2, dt, t_end, 100);
    auto fine = exact_star(model, density, 32, 1.0 / 32.0, 2, dt, t_end, 100);
    const MatXc sz = pauli_z();
    for (std::size_t i = 0; i < coarse.t.size(); ++i) {
        const double a = (sz * coarse.rho_s[i]).trace().real();
        const double b = (sz * fine.rho_s[i]).trace().real();
        CHECK(std::abs(a - b) < 2e-3);
    }
}

TEST_CASE("lindblad oracle") {
    auto model = decay_qubit();
    MatXc rho0 = MatXc::Zero(2, 2);
    rho0(0, 0) = 1.0;
    SUBCASE("pure decay follows exp(-Gamma t)") {
        const double gamma = 0.8;
        auto res = lindblad(model, sigma_minus(), gamma, 1e-3, 3.0, rho0, 100);
        const MatXc num = sigma_plus() * sigma_minus();
        for (std::size_t i = 0; i < res.t.size(); ++i) {
            CHECK(std::abs((num * res.rho_s[i]).trace().real() - std::exp(-gamma * res.t[i])) < 1e-5);
        }
    }
    SUBCASE("gamma = 0 is unitary; trace preserved") {
        auto res = lindblad(model, sigma_minus(), 0.0, 1e-3, 2.0, rho0, 100);
        for (std::size_t i = 0; i < res.t.size(); ++i) {
            CHECK(std::abs(res.rho_s[i].trace().real() - 1.0) < 1e-12);
            const double purity = (res.rho_s[i] * res.rho_s[i]).trace().real();
            CHECK(purity == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("trace preserved under dissipation") {
        auto res = lindblad(model, sigma_minus(), 1.3, 1e-3, 2.0, rho0, 100);
        CHECK(std::abs(res.rho_s.back().trace().real() - 1.0) < 1e-10);
    }
}

TEST_CASE("waveguide oracle: finite-size self-convergence at short time") {
    auto model = driven_qubit_waveguide();
    const double dt = 0.02, t_end = 8.0;
    auto small = exact_waveguide(model, 1.0, 0.05, 4, 3, dt, t_end, 100);
    auto large = exact_waveguide(model, 1.0, 0.05, 6, 3, dt, t_end, 100);
    const MatXc num = sigma_plus() * sigma_minus();
    for (std::size_t i = 0; i < small.t.size(); ++i) {
        const double a = (num * small.rho_s[i]).trace().real();
        const double b = (num * large.rho_s[i]).trace().real();
        CHECK(std::abs(a - b) < 1e-3);
    }
}
