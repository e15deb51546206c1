#include "rtrg/oracle.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace rtrg {

namespace {

// implicit midpoint for psi' = psi - i dt H(tau) (psi + psi')/2 with a
// caller-supplied applier; fixed-point iteration
VecXc midpoint_step(const std::function<VecXc(const VecXc&, double)>& apply_h, const VecXc& psi,
                    double tau, double dt, double tol, int max_iters = 200) {
    VecXc next = psi;
    const cplx half_idt(0.0, 0.5 * dt);
    double residual = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        VecXc mid = psi + next;
        VecXc cand = psi - half_idt * apply_h(mid, tau);
        residual = (cand - next).norm();
        next.swap(cand);
        if (residual <= tol * std::max(1.0, psi.norm())) return next;
    }
    throw std::runtime_error("oracle: midpoint iteration stalled, residual = " + std::to_string(residual));
}

MatXc outer(const VecXc& psi) { return psi * psi.adjoint(); }

} // namespace

MatXc partial_trace_system(const FockBasis& basis, const VecXc& psi) {
    const int d = basis.d_sys();
    MatXc rho = MatXc::Zero(d, d);
    for (long k = 0; k < basis.dim(); k += d)
        rho += outer(psi.segment(k, d));
    return rho;
}

OracleResult exact_waveguide(const SystemModel& model, double eps, double h, int l_sites,
                             int n_max, double dt, double t_end, long stride, double tol,
                             long max_dim) {
    if (l_sites < 2) throw std::invalid_argument("exact_waveguide: l_sites >= 2 required");
    SystemModel m = model;
    m.validate();
    FockBasis basis(m.dim(), l_sites, n_max, max_dim);
    SpMat h_static = embed_system(basis, m.h0);
    {
        const SpMat a1 = annihilator(basis, 1);
        h_static = h_static + SpMat(embed_system(basis, m.s_op.adjoint()) * a1) +
                   SpMat(embed_system(basis, m.s_op) * SpMat(a1.adjoint()));
        for (int j = 1; j <= l_sites; ++j) h_static = h_static + eps * number_op(basis, j);
        for (int j = 1; j + 1 <= l_sites; ++j) {
            const SpMat hop = SpMat(creator(basis, j + 1) * annihilator(basis, j));
            h_static = h_static + h * hop + h * SpMat(hop.adjoint());
        }
    }
    const SpMat drive = m.drive_amp != 0.0 ? embed_system(basis, m.drive_op) : SpMat(basis.dim(), basis.dim());

    auto apply_h = [&](const VecXc& v, double tau) {
        VecXc out = h_static * v;
        if (m.drive_amp != 0.0) out += m.drive_amp * std::cos(m.drive_omega * tau) * (drive * v);
        return out;
    };

    VecXc psi = VecXc::Zero(basis.dim());
    psi.head(m.dim()) = m.psi0; // all sites in vacuum
    OracleResult res;
    const long steps = static_cast<long>(std::llround(t_end / dt));
    res.t.push_back(0.0);
    res.rho_s.push_back(partial_trace_system(basis, psi));
    for (long p = 0; p < steps; ++p) {
        psi = midpoint_step(apply_h, psi, (p + 0.5) * dt, dt, tol);
        if ((p + 1) % stride == 0 || p + 1 == steps) {
            res.t.push_back((p + 1) * dt);
            res.rho_s.push_back(partial_trace_system(basis, psi));
        }
    }
    return res;
}

OracleResult exact_star(const SystemModel& model, const SpectralDensity& density, int n_omega,
                        double delta_omega, int n_max, double dt, double t_end, long stride,
                        double tol, long max_dim) {
    if (n_omega < 1) throw std::invalid_argument("exact_star: n_omega >= 1 required");
    SystemModel m = model;
    m.validate();
    FockBasis basis(m.dim(), n_omega, n_max, max_dim);
    std::vector<double> omega(static_cast<std::size_t>(n_omega));
    std::vector<double> g(static_cast<std::size_t>(n_omega));
    for (int k = 0; k < n_omega; ++k) {
        omega[static_cast<std::size_t>(k)] = (k + 0.5) * delta_omega;
        g[static_cast<std::size_t>(k)] =
            std::sqrt(delta_omega * density.j(omega[static_cast<std::size_t>(k)]) / pi);
    }
    const SpMat h0 = embed_system(basis, m.h0);
    const SpMat drive = m.drive_amp != 0.0 ? embed_system(basis, m.drive_op) : SpMat(basis.dim(), basis.dim());
    const SpMat sd = embed_system(basis, m.s_op.adjoint());
    const SpMat s = embed_system(basis, m.s_op);
    std::vector<SpMat> lower; // s^dag a_k
    lower.reserve(static_cast<std::size_t>(n_omega));
    for (int k = 1; k <= n_omega; ++k) lower.push_back(SpMat(sd * annihilator(basis, k)));

    auto apply_h = [&](const VecXc& v, double tau) {
        VecXc out = h0 * v;
        if (m.drive_amp != 0.0) out += m.drive_amp * std::cos(m.drive_omega * tau) * (drive * v);
        for (int k = 0; k < n_omega; ++k) {
            const cplx phase = std::exp(cplx(0.0, -omega[static_cast<std::size_t>(k)] * tau));
            const VecXc down = lower[static_cast<std::size_t>(k)] * v;
            out += g[static_cast<std::size_t>(k)] * phase * down;
            out += g[static_cast<std::size_t>(k)] * std::conj(phase) *
                   (lower[static_cast<std::size_t>(k)].adjoint() * v);
        }
        return out;
    };

    VecXc psi = VecXc::Zero(basis.dim());
    psi.head(m.dim()) = m.psi0;
    OracleResult res;
    const long steps = static_cast<long>(std::llround(t_end / dt));
    res.t.push_back(0.0);
    res.rho_s.push_back(partial_trace_system(basis, psi));
    for (long p = 0; p < steps; ++p) {
        psi = midpoint_step(apply_h, psi, (p + 0.5) * dt, dt, tol);
        if ((p + 1) % stride == 0 || p + 1 == steps) {
            res.t.push_back((p + 1) * dt);
            res.rho_s.push_back(partial_trace_system(basis, psi));
        }
    }
    return res;
}

OracleResult lindblad(const SystemModel& model, const MatXc& l_op, double gamma, double dt,
                      double t_end, const MatXc& rho0, long stride, double tol) {
    if (gamma < 0.0) throw std::invalid_argument("lindblad: gamma >= 0 required");
    SystemModel m = model;
    const MatXc ld = l_op.adjoint();
    const MatXc ldl = ld * l_op;
    auto rhs = [&](const MatXc& rho, double tau) {
        MatXc out = -iu * (m.h_s(tau) * rho - rho * m.h_s(tau));
        out += gamma * (l_op * rho * ld - 0.5 * (ldl * rho + rho * ldl));
        return out;
    };
    MatXc rho = rho0;
    OracleResult res;
    const long steps = static_cast<long>(std::llround(t_end / dt));
    res.t.push_back(0.0);
    res.rho_s.push_back(rho);
    for (long p = 0; p < steps; ++p) {
        const double tau = (p + 0.5) * dt;
        MatXc next = rho;
        for (int it = 0; it < 200; ++it) {
            MatXc mid = 0.5 * (rho + next);
            MatXc cand = rho + dt * rhs(mid, tau);
            const double residual = (cand - next).cwiseAbs().maxCoeff();
            next.swap(cand);
            if (residual <= tol) break;
            if (it == 199) throw std::runtime_error("lindblad: midpoint iteration stalled");
        }
        rho = next;
        if ((p + 1) % stride == 0 || p + 1 == steps) {
            res.t.push_back((p + 1) * dt);
            res.rho_s.push_back(rho);
        }
    }
    return res;
}

} // namespace rtrg
