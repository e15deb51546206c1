#include "rtrg/density_rg.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rtrg {

DensityRg::DensityRg(const SystemModel& model, const MemoryKernel& kernel, const ModeStream& stream,
                     const RgConfig& cfg)
    : model_(model), kernel_(kernel), stream_(stream), cfg_(cfg) {
    model_.validate();
    if (stream_.m != cfg_.m) throw std::invalid_argument("density rg: stream built for different m");
    if (std::abs(stream_.dt - cfg_.dt) > 1e-15) throw std::invalid_argument("density rg: stream dt mismatch");
    if (stream_.steps < cfg_.steps()) throw std::invalid_argument("density rg: stream too short for t_end");
    const int n_modes = cfg_.m + 1;
    basis_ = std::make_shared<FockBasis>(model_.dim(), n_modes, cfg_.n_max);
    for (int i = 1; i <= n_modes; ++i) {
        ann_.push_back(annihilator(*basis_, i));
        VecXd occ(basis_->dim());
        for (long k = 0; k < basis_->dim(); ++k) occ[k] = basis_->occupations(k)[static_cast<std::size_t>(i - 1)];
        occ_.push_back(std::move(occ));
    }
    occ_total_ = VecXd::Zero(basis_->dim());
    for (const auto& o : occ_) occ_total_ += o;
    s_emb_ = embed_system(*basis_, model_.s_op);
    sd_emb_ = embed_system(*basis_, MatXc(model_.s_op.adjoint()));
    h0_emb_ = embed_system(*basis_, model_.h0);
    drive_emb_ = model_.drive_amp != 0.0 ? embed_system(*basis_, model_.drive_op) : SpMat(basis_->dim(), basis_->dim());
    rho_ = MatXc::Zero(basis_->dim(), basis_->dim());
    const VecXc psi0 = model_.psi0;
    for (int q = 0; q < model_.dim(); ++q)
        for (int qp = 0; qp < model_.dim(); ++qp) rho_(qp, q) = psi0[qp] * std::conj(psi0[q]);
}

SpMat DensityRg::hamiltonian(double tau) const {
    const int slot = incoming_slot();
    const auto& rec = stream_.at(p_);
    SpMat ann_combo = kernel_.m0() * ann_[static_cast<std::size_t>(slot)];
    for (int i = 0; i < rec.couplings.size(); ++i)
        ann_combo = ann_combo + rec.couplings[i] * ann_[static_cast<std::size_t>(i)];
    SpMat h = h0_emb_;
    if (model_.drive_amp != 0.0)
        h = h + cplx(model_.drive_amp * std::cos(model_.drive_omega * tau), 0.0) * drive_emb_;
    h = h + SpMat(s_emb_ * SpMat(ann_[static_cast<std::size_t>(slot)].adjoint()));
    h = h + SpMat(sd_emb_ * ann_combo);
    return h;
}

void DensityRg::entangle_step() {
    if (stage_ != Stage::Fresh) throw std::logic_error("density rg: entangle called out of order");
    if (p_ >= cfg_.steps()) throw std::logic_error("density rg: past t_end");
    const double tau = (p_ + 0.5) * cfg_.dt;
    const SpMat h = hamiltonian(tau);
    const SpMat hd = SpMat(h.adjoint());
    const cplx idt(0.0, cfg_.dt);

    MatXc next = rho_;
    double residual = 0.0;
    bool converged = false;
    for (int iter = 0; iter < cfg_.midpoint_max_iters; ++iter) {
        MatXc mid = 0.5 * (rho_ + next);
        MatXc cand = rho_ - idt * (h * mid - mid * hd);
        residual = (cand - next).cwiseAbs().maxCoeff();
        next.swap(cand);
        if (residual <= cfg_.midpoint_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("density rg: midpoint iteration stalled, residual = " +
                                 std::to_string(residual));
    rho_ = std::move(next);

    const int slot = incoming_slot();
    pending_.t = (p_ + 1) * cfg_.dt;
    pending_.j_in = (rho_.diagonal().real().array() * occ_[static_cast<std::size_t>(slot)].array()).sum() / cfg_.dt;
    pending_.n_tot = (rho_.diagonal().real().array() * occ_total_.array()).sum();
    pending_.j_out = 0.0;
    stage_ = Stage::Entangled;
}

void DensityRg::pairing_update() {
    if (stage_ != Stage::Entangled) throw std::logic_error("density rg: pairing called out of order");
    const int slot = incoming_slot();
    const auto& rec = stream_.at(p_);
    const SpMat& a_in = ann_[static_cast<std::size_t>(slot)];
    SpMat l_rel(basis_->dim(), basis_->dim());
    for (int i = 0; i < rec.couplings.size(); ++i)
        l_rel = l_rel + rec.couplings[i] * ann_[static_cast<std::size_t>(i)];
    const SpMat l_full = kernel_.m0() * a_in + l_rel;
    const SpMat a_in_d = SpMat(a_in.adjoint());
    const SpMat l_rel_d = SpMat(l_rel.adjoint());

    auto pairing = [&](const MatXc& r) { return MatXc(l_full * r * a_in_d + a_in * r * l_rel_d); };
    const MatXc rho1 = pairing(rho_);
    const MatXc rho2 = pairing(rho1);
    rho_ += rho1 + 0.5 * rho2;
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
    stage_ = Stage::Paired;
}

void DensityRg::disentangle_step() {
    if (stage_ != Stage::Paired) throw std::logic_error("density rg: disentangle called out of order");
    if (p_ >= cfg_.m) {
        rho_ = apply_bogoliubov_dm(*basis_, stream_.at(p_).generator, rho_, cfg_.krylov);
    }
    stage_ = Stage::Disentangled;
}

FluxRecord DensityRg::oblivion_step() {
    if (stage_ != Stage::Disentangled) throw std::logic_error("density rg: oblivion called out of order");
    const int slot = incoming_slot();
    if (p_ >= cfg_.m) {
        pending_.j_out =
            (rho_.diagonal().real().array() * occ_[static_cast<std::size_t>(slot)].array()).sum() / cfg_.dt;
        vacuum_project(*basis_, slot + 1, rho_);
    }
    ++p_;
    stage_ = Stage::Fresh;
    return pending_;
}

FluxRecord DensityRg::step() {
    entangle_step();
    pairing_update();
    disentangle_step();
    return oblivion_step();
}

MatXc DensityRg::reduced_system_dm() const {
    MatXc blk = system_block(*basis_, rho_);
    const double tr = blk.trace().real();
    if (std::abs(tr) < 1e-300) throw std::runtime_error("density rg: vacuum block trace vanished");
    return blk / tr;
}

double DensityRg::raw_system_trace() const { return system_block(*basis_, rho_).trace().real(); }

cplx DensityRg::system_expectation(const MatXc& op_sys) const {
    const MatXc rho_s = reduced_system_dm();
    return (op_sys * rho_s).trace();
}

double trace_distance(const MatXc& rho1, const MatXc& rho2) {
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    MatXc diff = rho1 - rho2;
    diff = 0.5 * (diff + diff.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatXc> es(diff);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityRunResult run_density_rg(const SystemModel& model, const MemoryKernel& kernel,
                                const ModeStream& stream, const RgConfig& cfg, long stride) {
    DensityRg rg(model, kernel, stream, cfg);
    DensityRunResult out;
    const long steps = cfg.steps();
    out.t.push_back(0.0);
    out.raw_trace.push_back(rg.raw_system_trace());
    out.rho_s.push_back(rg.reduced_system_dm());
    for (long p = 0; p < steps; ++p) {
        out.flux.push_back(rg.step());
        if ((p + 1) % stride == 0 || p + 1 == steps) {
            out.t.push_back((p + 1) * cfg.dt);
            out.raw_trace.push_back(rg.raw_system_trace());
            out.rho_s.push_back(rg.reduced_system_dm());
        }
    }
    return out;
}

} // namespace rtrg
