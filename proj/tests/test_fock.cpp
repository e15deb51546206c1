#include <doctest.h>

#include <cmath>

#include "rtrg/fock.hpp"

using namespace rtrg;

namespace {

// independent enumeration oracle: count tuples with sum <= n_max by brute force
long brute_count(int n_modes, int n_max) {
    long count = 0;
    std::vector<int> occ(static_cast<std::size_t>(n_modes), 0);
    while (true) {
        int total = 0;
        for (int v : occ) total += v;
        if (total <= n_max) ++count;
        int i = n_modes - 1;
        while (i >= 0 && occ[static_cast<std::size_t>(i)] == n_max) occ[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++occ[static_cast<std::size_t>(i)];
    }
    return count;
}

} // namespace

TEST_CASE("basis sizes from the stars-and-bars oracle") {
    FockBasis b(2, 3, 2);
    CHECK(b.dim() == 2 * brute_count(3, 2));
    CHECK(b.dim() == 20); // 2 * (1 + 3 + 6)
    FockBasis vac(1, 1, 0);
    CHECK(vac.dim() == 1);
    FockBasis big(2, 5, 4);
    CHECK(big.dim() == 2 * brute_count(5, 4));
    CHECK_THROWS((void)FockBasis(2, 14, 7, 1000)); // budget guard names the dimension
}

TEST_CASE("index maps are bijections") {
    FockBasis b(2, 3, 2);
    for (long k = 0; k < b.dim(); ++k) {
        CHECK(b.index_of(b.system_index(k), b.occupations(k)) == k);
    }
}

TEST_CASE("ladder operators") {
    FockBasis b(2, 2, 3);
    const SpMat a1 = annihilator(b, 1);
    const SpMat c1 = creator(b, 1);

    SUBCASE("a kills the vacuum") {
        VecXc vac = VecXc::Zero(b.dim());
        vac[0] = 1.0;
        CHECK((a1 * vac).norm() == 0.0);
    }
    SUBCASE("matrix element <2| a^dag |1> = sqrt(2)") {
        VecXc one = VecXc::Zero(b.dim());
        long k1 = b.index_of(0, {1, 0});
        long k2 = b.index_of(0, {2, 0});
        one[k1] = 1.0;
        VecXc up = c1 * one;
        CHECK(std::abs(up[k2] - cplx(std::sqrt(2.0), 0.0)) < 1e-15);
    }
    SUBCASE("[a, a^dag] = 1 below the cutoff surface") {
        MatXc comm = MatXc(a1 * c1 - c1 * a1);
        for (long k = 0; k < b.dim(); ++k) {
            if (total_occupation(b, k) <= b.n_max() - 1) {
                CHECK(std::abs(comm(k, k) - cplx(1.0, 0.0)) < 1e-14);
            }
        }
    }
    SUBCASE("different modes commute exactly on the sub-cutoff subspace") {
        const SpMat a2 = annihilator(b, 2);
        const SpMat c2 = creator(b, 2);
        MatXc comm = MatXc(a1 * c2 - c2 * a1);
        for (long col = 0; col < b.dim(); ++col) {
            if (total_occupation(b, col) <= b.n_max() - 1)
                CHECK(comm.col(col).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("number operator spectrum is {0..n_max}") {
        MatXc nop = MatXc(number_op(b, 1));
        CHECK((MatXc(c1 * a1) - nop).cwiseAbs().maxCoeff() < 1e-14);
        std::vector<bool> seen(static_cast<std::size_t>(b.n_max()) + 1, false);
        for (long k = 0; k < b.dim(); ++k) {
            const double v = nop(k, k).real();
            CHECK(v >= 0.0);
            CHECK(v <= b.n_max());
            seen[static_cast<std::size_t>(std::lround(v))] = true;
        }
        for (bool s : seen) CHECK(s);
    }
}

TEST_CASE("embed_system") {
    FockBasis b(2, 2, 2);
    MatXc id2 = MatXc::Identity(2, 2);
    CHECK((MatXc(embed_system(b, id2)) - MatXc::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff() ==
          0.0);
    MatXc sz(2, 2);
    sz << 1, 0, 0, -1;
    const SpMat esz = embed_system(b, sz);
    CHECK((MatXc(esz * esz) - MatXc::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff() < 1e-15);
    MatXc a(2, 2);
    a << cplx(0.3, 0.1), cplx(0.0, -2.0), cplx(1.5, 0.0), cplx(-0.7, 0.4);
    const cplx tr = MatXc(embed_system(b, a)).trace();
    CHECK(std::abs(tr - a.trace() * (static_cast<double>(b.dim()) / 2.0)) < 1e-12);
    CHECK_THROWS((void)embed_system(b, MatXc::Identity(3, 3)));
}

TEST_CASE("vacuum projection") {
    FockBasis b(2, 2, 2);
    VecXc vac = VecXc::Zero(b.dim());
    vac[1] = cplx(0.0, 1.0);
    VecXc copy = vac;
    vacuum_project(b, 1, copy);
    CHECK((copy - vac).norm() == 0.0); // vacuum state unchanged

    VecXc one = creator(b, 1) * vac;
    vacuum_project(b, 1, one);
    CHECK(one.norm() == 0.0); // a^dag|vac> projected away

    // idempotence on a random state
    VecXc r = VecXc::Random(b.dim());
    VecXc r1 = r;
    vacuum_project(b, 2, r1);
    VecXc r2 = r1;
    vacuum_project(b, 2, r2);
    CHECK((r1 - r2).norm() == 0.0);
}

TEST_CASE("sparse and dense agree on random vectors") {
    FockBasis b(2, 3, 3); // dim 40
    const SpMat op = annihilator(b, 2);
    const MatXc dense = MatXc(op);
    for (int trial = 0; trial < 5; ++trial) {
        VecXc x = VecXc::Random(b.dim());
        CHECK((op * x - dense * x).norm() < 1e-13 * x.norm());
    }
}

TEST_CASE("system block extraction") {
    FockBasis b(2, 2, 1);
    MatXc rho = MatXc::Random(b.dim(), b.dim());
    MatXc blk = system_block(b, rho);
    // the all-vacuum tuple is first, system index fastest
    CHECK(blk(0, 0) == rho(0, 0));
    CHECK(blk(1, 0) == rho(1, 0));
    CHECK(blk.rows() == 2);
}
