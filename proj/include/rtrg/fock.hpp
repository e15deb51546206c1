// fock.hpp — truncated total-occupation Fock basis of system x (m+1) modes
// and sparse operators on it.
#pragma once

#include <cstdint>
#include <vector>

#include "rtrg/types.hpp"

namespace rtrg {

// Basis labels (q, n_1..n_modes) with sum_i n_i <= n_max, enumerated in
// lexicographic order of the occupation tuple; the system index varies
// fastest.  Index maps are exact bijections.
class FockBasis {
public:
    FockBasis(int d_sys, int n_modes, int n_max, long max_dim = 4'000'000);

    int d_sys() const { return d_sys_; }
    int n_modes() const { return n_modes_; }
    int n_max() const { return n_max_; }
    long dim() const { return static_cast<long>(occ_.size()) * d_sys_; }

    // occupation tuple of basis state k (shared by the d_sys system labels)
    const std::vector<std::uint8_t>& occupations(long k) const { return occ_[static_cast<std::size_t>(k / d_sys_)]; }
    int system_index(long k) const { return static_cast<int>(k % d_sys_); }

    // index of (q, tuple); -1 if the tuple leaves the truncated space
    long index_of(int q, const std::vector<std::uint8_t>& occ) const;

    // index reached from state k by changing mode i by delta quanta (-1 if outside)
    long shifted_index(long k, int mode, int delta) const;

private:
    int d_sys_, n_modes_, n_max_;
    std::vector<std::vector<std::uint8_t>> occ_;
    std::vector<std::vector<long>> simplex_count_; // [r][k]: tuples of k entries, sum <= r
    long tuple_rank(const std::vector<std::uint8_t>& occ) const;
};

// a_i with a_i |.. n_i ..> = sqrt(n_i) |.. n_i-1 ..>; mode index 1-based
SpMat annihilator(const FockBasis& basis, int mode);
// adjoint of a_i; amplitudes leaving the occupation simplex are dropped
SpMat creator(const FockBasis& basis, int mode);
// a_i^dag a_i (diagonal)
SpMat number_op(const FockBasis& basis, int mode);
// op_sys (x) identity on the modes
SpMat embed_system(const FockBasis& basis, const MatXc& op_sys);

// total occupation of state k
inline int total_occupation(const FockBasis& b, long k) {
    int n = 0;
    for (auto v : b.occupations(k)) n += v;
    return n;
}

// zero every component with n_mode != 0 (mode 1-based); the projected state
// lives on the same basis with that slot empty
void vacuum_project(const FockBasis& basis, int mode, VecXc& state);
void vacuum_project(const FockBasis& basis, int mode, MatXc& rho); // rows and columns

// <0_modes| rho |0_modes>: the d_sys x d_sys block with all modes empty
MatXc system_block(const FockBasis& basis, const MatXc& rho);
VecXc system_block(const FockBasis& basis, const VecXc& state);

} // namespace rtrg
