#include "rtrg/model.hpp"

#include <stdexcept>

namespace rtrg {

MatXc pauli_x() {
    MatXc m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

MatXc pauli_y() {
    MatXc m(2, 2);
    m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return m;
}

MatXc pauli_z() {
    MatXc m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

MatXc sigma_plus() {
    MatXc m = MatXc::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

MatXc sigma_minus() {
    MatXc m = MatXc::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

void SystemModel::validate() const {
    const auto d = h0.rows();
    if (d < 1 || h0.cols() != d) throw std::invalid_argument("model: H_s must be square");
    if (s_op.rows() != d || s_op.cols() != d) throw std::invalid_argument("model: s_op dimension mismatch");
    if (psi0.size() != d) throw std::invalid_argument("model: psi0 dimension mismatch");
    if (drive_amp != 0.0 && (drive_op.rows() != d || drive_op.cols() != d))
        throw std::invalid_argument("model: drive_op dimension mismatch");
    if (std::abs(psi0.norm() - 1.0) > 1e-12) throw std::invalid_argument("model: psi0 must be normalized");
}

SystemModel driven_qubit_waveguide(double drive_amp) {
    SystemModel m;
    m.name = "driven_qubit_waveguide";
    m.h0 = sigma_plus() * sigma_minus();
    m.drive_op = pauli_x(); // sp + sm
    m.drive_amp = drive_amp;
    m.drive_omega = 1.0;
    m.s_op = sigma_minus();
    m.psi0 = VecXc::Zero(2);
    m.psi0[0] = 1.0; // excited
    m.validate();
    return m;
}

SystemModel subohmic_nonrwa(double delta, double f, double omega) {
    SystemModel m;
    m.name = "subohmic_nonrwa";
    m.h0 = -0.5 * delta * pauli_x();
    m.drive_op = pauli_z();
    m.drive_amp = f;
    m.drive_omega = omega;
    m.s_op = pauli_z();
    m.psi0 = VecXc::Zero(2);
    m.psi0[0] = 1.0; // sigma_z = +1
    m.validate();
    return m;
}

SystemModel decay_qubit() {
    SystemModel m;
    m.name = "decay_qubit";
    m.h0 = sigma_plus() * sigma_minus();
    m.drive_op = MatXc::Zero(2, 2);
    m.s_op = sigma_minus();
    m.psi0 = VecXc::Zero(2);
    m.psi0[0] = 1.0;
    m.validate();
    return m;
}

} // namespace rtrg
