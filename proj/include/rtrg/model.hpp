// model.hpp — open-system presets: system Hamiltonian (with optional cosine
// drive), coupling operator, and initial state.
#pragma once

#include <string>

#include "rtrg/types.hpp"

namespace rtrg {

MatXc pauli_x();
MatXc pauli_y();
MatXc pauli_z();
MatXc sigma_plus();  // |up><down|
MatXc sigma_minus(); // |down><up|

struct SystemModel {
    std::string name;
    MatXc h0;       // static part of H_s
    MatXc drive_op; // H_s(t) = h0 + drive_amp cos(drive_omega t) drive_op
    double drive_amp = 0.0;
    double drive_omega = 0.0;
    MatXc s_op;     // couples as s^dag b + s b^dag
    VecXc psi0;

    int dim() const { return static_cast<int>(h0.rows()); }
    MatXc h_s(double t) const {
        if (drive_amp == 0.0) return h0;
        return h0 + drive_amp * std::cos(drive_omega * t) * drive_op;
    }
    void validate() const;
};

// driven qubit in the waveguide: H_s = sp sm + 0.1 cos(t) (sp + sm), s = sm
SystemModel driven_qubit_waveguide(double drive_amp = 0.1);

// non-RWA driven qubit in a sharply cut subohmic bath:
// H_s = -(Delta/2) sx + f cos(w t) sz, s = sz
SystemModel subohmic_nonrwa(double delta = 1.0, double f = 0.1, double omega = 1.0);

// bare qubit with decay coupling, used by the Markovian bridge
SystemModel decay_qubit();

} // namespace rtrg
