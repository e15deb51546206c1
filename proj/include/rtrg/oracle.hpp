// oracle.hpp — independent exact solvers used by the acceptance suite:
// truncated Schrodinger evolution of the waveguide chain and of a star
// discretization of the bath, plus a direct Lindblad integrator.
#pragma once

#include <vector>

#include "rtrg/fock.hpp"
#include "rtrg/model.hpp"
#include "rtrg/spectral_density.hpp"

namespace rtrg {

struct OracleResult {
    std::vector<double> t;
    std::vector<MatXc> rho_s; // reduced system state (literal partial trace)
};

// Schrodinger evolution of system (x) first l_sites of the tight-binding
// chain, total occupation <= n_max, implicit midpoint at step dt.
OracleResult exact_waveguide(const SystemModel& model, double eps, double h, int l_sites,
                             int n_max, double dt, double t_end, long stride = 10,
                             double tol = 1e-12, long max_dim = 4'000'000);

// Schrodinger evolution of system (x) discrete modes at w_k = (k+1/2) dw,
// k = 0..n_omega-1, couplings g_k = sqrt(dw J(w_k)/pi), in the interaction
// picture of the bath (explicit e^{-i w t} phases).
OracleResult exact_star(const SystemModel& model, const SpectralDensity& density, int n_omega,
                        double delta_omega, int n_max, double dt, double t_end, long stride = 10,
                        double tol = 1e-12, long max_dim = 4'000'000);

// d rho = -i[H_s(t), rho] dt + Gamma (L rho L^dag - 1/2 {L^dag L, rho}) dt
OracleResult lindblad(const SystemModel& model, const MatXc& l_op, double gamma, double dt,
                      double t_end, const MatXc& rho0, long stride = 10, double tol = 1e-13);

// literal partial trace over the modes of a pure joint state
MatXc partial_trace_system(const FockBasis& basis, const VecXc& psi);

} // namespace rtrg
