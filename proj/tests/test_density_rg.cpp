#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rtrg/density_rg.hpp"
#include "rtrg/oracle.hpp"
#include "rtrg/rng.hpp"

using namespace rtrg;

namespace {

MatXc expm_herm(const MatXc& h, double t) {
    Eigen::SelfAdjointEigenSolver<MatXc> es(h);
    VecXc ph(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::exp(cplx(0.0, -es.eigenvalues()[i] * t));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

SystemModel decoupled_model() {
    SystemModel m;
    m.name = "decoupled";
    m.h0 = 0.7 * pauli_x() + 0.2 * pauli_z();
    m.drive_op = MatXc::Zero(2, 2);
    m.s_op = MatXc::Zero(2, 2);
    m.psi0 = VecXc::Zero(2);
    m.psi0[0] = 1.0;
    m.validate();
    return m;
}

KrylovConfig tight_krylov() {
    KrylovConfig k;
    k.max_budget = 48;
    k.hop_threshold = 1e-22;
    k.lindep_threshold = 1e-18;
    k.conv_threshold = 1e-24;
    return k;
}

} // namespace

TEST_CASE("decoupled system evolves unitarily, modes untouched") {
    auto model = decoupled_model();
    MemoryKernel kernel(SpectralDensity::power_exp(1.0, 1.0, 1.0), 0.01, 3.0);
    auto stream = build_stream(kernel, 1, 200);
    RgConfig cfg;
    cfg.m = 1;
    cfg.n_max = 1;
    cfg.dt = 0.01;
    cfg.t_end = 2.0;
    DensityRg rg(model, kernel, stream, cfg);
    for (long p = 0; p < cfg.steps(); ++p) rg.step();
    const MatXc u = expm_herm(model.h0, 2.0);
    const MatXc expect = u * model.psi0 * (u * model.psi0).adjoint();
    CHECK((rg.reduced_system_dm() - expect).cwiseAbs().maxCoeff() < 5e-5); // O(dt^2)
    CHECK(std::abs(rg.raw_system_trace() - 1.0) < 1e-12);
    // modes stayed in vacuum: total occupation zero
    double occ = 0.0;
    for (long k = 0; k < rg.basis().dim(); ++k)
        occ += rg.rho()(k, k).real() * total_occupation(rg.basis(), k);
    CHECK(std::abs(occ) < 1e-14);
}

TEST_CASE("one entangling step: amplitude O(dt), occupation O(dt^2)") {
    auto model = decay_qubit();
    auto run_one = [&](double dt) {
        MemoryKernel kernel(SpectralDensity::power_exp(1.0, 1.0, 1.0), dt, 1.0);
        auto stream = build_stream(kernel, 1, 4);
        RgConfig cfg;
        cfg.m = 1;
        cfg.n_max = 2;
        cfg.dt = dt;
        cfg.t_end = 4 * dt;
        DensityRg rg(model, kernel, stream, cfg);
        rg.entangle_step();
        // coherence between |up, vac> and |down, 1_in>; incoming slot is 0 at p=0
        const long k_up = 0;
        const long k_down_1 = rg.basis().index_of(1, {1, 0});
        const double amp = std::abs(rg.rho()(k_down_1, k_up));
        const double occ = rg.rho()(k_down_1, k_down_1).real();
        return std::make_pair(amp, occ);
    };
    auto [amp1, occ1] = run_one(0.01);
    auto [amp2, occ2] = run_one(0.005);
    CHECK(amp1 / amp2 == doctest::Approx(2.0).epsilon(0.02));  // O(dt)
    CHECK(occ1 / occ2 == doctest::Approx(4.0).epsilon(0.04));  // O(dt^2)
}

TEST_CASE("pairing update is a no-op on a vacuum incoming mode") {
    auto model = decoupled_model();
    MemoryKernel kernel(SpectralDensity::power_exp(1.0, 1.0, 1.0), 0.01, 1.0);
    auto stream = build_stream(kernel, 1, 4);
    RgConfig cfg;
    cfg.m = 1;
    cfg.n_max = 2;
    cfg.dt = 0.01;
    cfg.t_end = 0.04;
    DensityRg rg(model, kernel, stream, cfg);
    rg.entangle_step(); // s = 0: stays in vacuum
    const MatXc before = rg.rho();
    rg.pairing_update();
    CHECK((rg.rho() - before).cwiseAbs().maxCoeff() < 1e-15);
    rg.disentangle_step();
    const FluxRecord flux = rg.oblivion_step();
    CHECK(flux.j_out == 0.0);
    CHECK((rg.rho() - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pairing update is Hermitian and reproduces the Markovian jump") {
    const double gamma = 0.8;
    const double dt = 2e-4;
    auto model = decay_qubit();
    // mixed, off-diagonal initial state
    MatXc rho_s(2, 2);
    rho_s << 0.7, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.3;
    SystemModel m = model;
    // start from a superposition to populate coherences
    m.psi0 = VecXc(2);
    m.psi0 << std::sqrt(0.7), std::sqrt(0.3);
    MemoryKernel kernel(SpectralDensity::flat(gamma), dt, 1.0);
    auto stream = build_stream(kernel, 0, 4);
    RgConfig cfg;
    cfg.m = 0;
    cfg.n_max = 2;
    cfg.dt = dt;
    cfg.t_end = 4 * dt;
    DensityRg rg(m, kernel, stream, cfg);
    rg.entangle_step();
    rg.pairing_update();
    CHECK((rg.rho() - rg.rho().adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    rg.disentangle_step();
    rg.oblivion_step();
    const MatXc got = system_block(rg.basis(), rg.rho());
    const MatXc rho0 = m.psi0 * m.psi0.adjoint();
    const MatXc sm = sigma_minus();
    MatXc lind = rho0 - iu * dt * (m.h0 * rho0 - rho0 * m.h0);
    lind += gamma * dt * (sm * rho0 * sm.adjoint() -
                          0.5 * (sm.adjoint() * sm * rho0 + rho0 * sm.adjoint() * sm));
    CHECK((got - lind).cwiseAbs().maxCoeff() < 20.0 * dt * dt + 1e-10);
}

TEST_CASE("trace distance") {
    MatXc up = MatXc::Zero(2, 2), down = MatXc::Zero(2, 2);
    up(0, 0) = 1.0;
    down(1, 1) = 1.0;
    CHECK(trace_distance(up, up) == 0.0);
    CHECK(trace_distance(up, down) == doctest::Approx(1.0).epsilon(1e-12));
    SplitMix64 rng(4);
    MatXc a(2, 2), b(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            a(i, j) = rng.next_complex_gaussian();
            b(i, j) = rng.next_complex_gaussian();
        }
    a = 0.5 * (a + a.adjoint()).eval();
    b = 0.5 * (b + b.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatXc> es(MatXc(a - b));
    CHECK(trace_distance(a, b) ==
          doctest::Approx(0.5 * es.eigenvalues().cwiseAbs().sum()).epsilon(1e-12));
    CHECK_THROWS((void)trace_distance(a, MatXc::Identity(3, 3)));
}

TEST_CASE("midpoint order: Richardson ratio about 4") {
    auto model = driven_qubit_waveguide();
    auto density = SpectralDensity::waveguide(1.0, 0.05);
    auto observable_at = [&](double dt) {
        MemoryKernel kernel(density, dt, 3.0);
        const long steps = static_cast<long>(std::llround(2.0 / dt));
        auto stream = build_stream(kernel, 2, steps);
        RgConfig cfg;
        cfg.m = 2; // at m=1 the frame-selection jitter in dt masks the clean order
        cfg.n_max = 2;
        cfg.dt = dt;
        cfg.t_end = 2.0;
        cfg.midpoint_tol = 1e-13;
        cfg.krylov = tight_krylov();
        DensityRg rg(model, kernel, stream, cfg);
        for (long p = 0; p < steps; ++p) rg.step();
        return rg.system_expectation(sigma_plus() * sigma_minus()).real();
    };
    const double ref = observable_at(0.0025); // dt/8 reference
    const double e1 = std::abs(observable_at(0.02) - ref);
    const double e2 = std::abs(observable_at(0.01) - ref);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.13)); // 4 +- 0.5
}

TEST_CASE("markovian bridge smoke test: flat kernel reproduces the decay law") {
    const double gamma = 1.0;
    const double dt = 5e-4;
    auto model = decay_qubit();
    MemoryKernel kernel(SpectralDensity::flat(gamma), dt, 2.0);
    const long steps = static_cast<long>(std::llround(1.0 / dt));
    auto stream = build_stream(kernel, 0, steps);
    RgConfig cfg;
    cfg.m = 0;
    cfg.n_max = 2;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    DensityRg rg(model, kernel, stream, cfg);
    const MatXc num = sigma_plus() * sigma_minus();
    for (long p = 0; p < steps; ++p) {
        rg.step();
        const double expect = std::exp(-gamma * rg.t());
        CHECK(std::abs(rg.system_expectation(num).real() - expect) < 2e-3);
    }
}

TEST_CASE("waveguide benchmark smoke: m-convergence and oracle agreement at short time") {
    auto model = driven_qubit_waveguide();
    auto density = SpectralDensity::waveguide(1.0, 0.05);
    const double dt = 0.02;
    const double t_end = 6.0;
    const long steps = static_cast<long>(std::llround(t_end / dt));
    MemoryKernel kernel(density, dt, t_end + 1.0);
    const MatXc num = sigma_plus() * sigma_minus();

    auto run_m = [&](int m, int n_max) {
        auto stream = build_stream(kernel, m, steps);
        RgConfig cfg;
        cfg.m = m;
        cfg.n_max = n_max;
        cfg.dt = dt;
        cfg.t_end = t_end;
        return run_density_rg(model, kernel, stream, cfg, 25);
    };
    auto r2 = run_m(2, 2);
    auto r3 = run_m(3, 2);
    auto oracle = exact_waveguide(model, 1.0, 0.05, 6, 3, dt, t_end, 25);
    REQUIRE(r2.t.size() == r3.t.size());
    REQUIRE(r2.t.size() == oracle.t.size());
    for (std::size_t i = 0; i < r2.t.size(); ++i) {
        const double a = (num * r2.rho_s[i]).trace().real();
        const double b = (num * r3.rho_s[i]).trace().real();
        const double c = (num * oracle.rho_s[i]).trace().real();
        CHECK(std::abs(a - b) < 2e-2);
        CHECK(std::abs(b - c) < 2e-2);
        // physicality of the reduced state
        Eigen::SelfAdjointEigenSolver<MatXc> es(r3.rho_s[i]);
        CHECK(es.eigenvalues().minCoeff() > -1e-8);
        CHECK(std::abs(r3.raw_trace[i] - 1.0) < 2e-2);
    }
    // fluxes: during growth no outgoing current, afterwards j_out follows
    for (long p = 0; p < 3; ++p) CHECK(r3.flux[static_cast<std::size_t>(p)].j_out == 0.0);
    for (const auto& f : r3.flux) CHECK(f.n_tot >= -1e-12);
}
