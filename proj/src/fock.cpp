#include "rtrg/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rtrg {

namespace {

void enumerate_tuples(int n_modes, int n_max, int mode, int used,
                      std::vector<std::uint8_t>& cur, std::vector<std::vector<std::uint8_t>>& out) {
    if (mode == n_modes) {
        out.push_back(cur);
        return;
    }
    for (int n = 0; n <= n_max - used; ++n) {
        cur[static_cast<std::size_t>(mode)] = static_cast<std::uint8_t>(n);
        enumerate_tuples(n_modes, n_max, mode + 1, used + n, cur, out);
    }
    cur[static_cast<std::size_t>(mode)] = 0;
}

} // namespace

FockBasis::FockBasis(int d_sys, int n_modes, int n_max, long max_dim)
    : d_sys_(d_sys), n_modes_(n_modes), n_max_(n_max) {
    if (d_sys < 1 || n_modes < 1 || n_max < 0)
        throw std::invalid_argument("FockBasis: need d_sys >= 1, n_modes >= 1, n_max >= 0");
    // N = d_sys * C(n_modes + n_max, n_modes)
    double dim_est = d_sys;
    for (int i = 1; i <= n_modes; ++i) dim_est *= static_cast<double>(n_max + i) / i;
    if (dim_est > static_cast<double>(max_dim))
        throw std::runtime_error("FockBasis: dimension " + std::to_string(static_cast<long long>(dim_est)) +
                                 " exceeds the configured budget " + std::to_string(max_dim));
    std::vector<std::uint8_t> cur(static_cast<std::size_t>(n_modes), 0);
    enumerate_tuples(n_modes, n_max, 0, 0, cur, occ_);
    // simplex_count_[r][k] = number of k-entry tuples with sum <= r = C(r + k, k)
    simplex_count_.assign(static_cast<std::size_t>(n_max) + 1,
                          std::vector<long>(static_cast<std::size_t>(n_modes) + 1, 1));
    for (int r = 0; r <= n_max; ++r)
        for (int k = 1; k <= n_modes; ++k)
            simplex_count_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] =
                (r == 0) ? 1
                         : simplex_count_[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(k)] +
                               simplex_count_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k - 1)];
}

// lexicographic rank by counting completions below each digit
long FockBasis::tuple_rank(const std::vector<std::uint8_t>& occ) const {
    long rank = 0;
    int prefix = 0;
    for (int i = 0; i < n_modes_; ++i) {
        const int v = occ[static_cast<std::size_t>(i)];
        for (int w = 0; w < v; ++w)
            rank += simplex_count_[static_cast<std::size_t>(n_max_ - prefix - w)]
                                  [static_cast<std::size_t>(n_modes_ - i - 1)];
        prefix += v;
    }
    return rank;
}

long FockBasis::index_of(int q, const std::vector<std::uint8_t>& occ) const {
    if (q < 0 || q >= d_sys_) throw std::out_of_range("FockBasis::index_of: bad system index");
    int total = 0;
    for (auto v : occ) total += v;
    if (total > n_max_) return -1;
    return tuple_rank(occ) * d_sys_ + q;
}

long FockBasis::shifted_index(long k, int mode, int delta) const {
    const auto& occ = occupations(k);
    const int cur = occ[static_cast<std::size_t>(mode - 1)];
    if (cur + delta < 0) return -1;
    std::vector<std::uint8_t> next = occ;
    next[static_cast<std::size_t>(mode - 1)] = static_cast<std::uint8_t>(cur + delta);
    return index_of(system_index(k), next);
}

SpMat annihilator(const FockBasis& basis, int mode) {
    if (mode < 1 || mode > basis.n_modes()) throw std::out_of_range("annihilator: bad mode index");
    std::vector<Eigen::Triplet<cplx>> trip;
    const long n = basis.dim();
    trip.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
        const int nk = basis.occupations(k)[static_cast<std::size_t>(mode - 1)];
        if (nk == 0) continue;
        const long target = basis.shifted_index(k, mode, -1);
        trip.emplace_back(target, k, cplx(std::sqrt(static_cast<double>(nk)), 0.0));
    }
    SpMat a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

SpMat creator(const FockBasis& basis, int mode) { return SpMat(annihilator(basis, mode).adjoint()); }

SpMat number_op(const FockBasis& basis, int mode) {
    if (mode < 1 || mode > basis.n_modes()) throw std::out_of_range("number_op: bad mode index");
    std::vector<Eigen::Triplet<cplx>> trip;
    const long n = basis.dim();
    for (long k = 0; k < n; ++k) {
        const int nk = basis.occupations(k)[static_cast<std::size_t>(mode - 1)];
        if (nk > 0) trip.emplace_back(k, k, cplx(nk, 0.0));
    }
    SpMat a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

SpMat embed_system(const FockBasis& basis, const MatXc& op_sys) {
    if (op_sys.rows() != basis.d_sys() || op_sys.cols() != basis.d_sys())
        throw std::invalid_argument("embed_system: dimension mismatch");
    std::vector<Eigen::Triplet<cplx>> trip;
    const long n = basis.dim();
    const int d = basis.d_sys();
    for (long k = 0; k < n; ++k) {
        const long block = k - basis.system_index(k);
        const int q = basis.system_index(k);
        for (int qp = 0; qp < d; ++qp) {
            const cplx v = op_sys(qp, q);
            if (v != cplx(0.0)) trip.emplace_back(block + qp, k, v);
        }
    }
    SpMat a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

void vacuum_project(const FockBasis& basis, int mode, VecXc& state) {
    for (long k = 0; k < basis.dim(); ++k)
        if (basis.occupations(k)[static_cast<std::size_t>(mode - 1)] != 0) state[k] = cplx(0.0);
}

void vacuum_project(const FockBasis& basis, int mode, MatXc& rho) {
    for (long k = 0; k < basis.dim(); ++k) {
        if (basis.occupations(k)[static_cast<std::size_t>(mode - 1)] != 0) {
            rho.row(k).setZero();
            rho.col(k).setZero();
        }
    }
}

MatXc system_block(const FockBasis& basis, const MatXc& rho) {
    const int d = basis.d_sys();
    // the all-vacuum tuple is the first in lexicographic order
    return rho.topLeftCorner(d, d);
}

VecXc system_block(const FockBasis& basis, const VecXc& state) {
    return state.head(basis.d_sys());
}

} // namespace rtrg
