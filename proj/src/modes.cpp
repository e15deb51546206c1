#include "rtrg/modes.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rtrg/numerics.hpp"
#include "rtrg/rng.hpp"

namespace rtrg {

namespace {

bool lex_less(const VecXc& a, const VecXc& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

// sort a Hermitian eigendecomposition descending with deterministic phases
// and a lexicographic rule inside degenerate clusters
EigenBasis sorted_basis(const VecXd& vals, const MatXc& vecs, double phase_angle = 0.0) {
    const Eigen::Index n = vals.size();
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    MatXc fixed = vecs;
    for (Eigen::Index j = 0; j < n; ++j) {
        VecXc col = fixed.col(j);
        fix_eigenvector_phase(col);
        if (phase_angle != 0.0) col *= std::exp(cplx(0.0, phase_angle));
        fixed.col(j) = col;
    }
    const double tie_tol = 1e-12 * std::max(std::abs(vals.maxCoeff()), std::abs(vals.minCoeff()));
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (std::abs(vals[a] - vals[b]) > tie_tol) return vals[a] > vals[b];
        return lex_less(fixed.col(a), fixed.col(b));
    });
    EigenBasis out;
    out.lambdas.resize(n);
    out.vectors.resize(fixed.rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.lambdas[j] = vals[idx[static_cast<std::size_t>(j)]];
        out.vectors.col(j) = fixed.col(idx[static_cast<std::size_t>(j)]);
    }
    return out;
}

EigenBasis hermitian_eigs_desc(const MatXc& k, double phase_angle = 0.0) {
    Eigen::SelfAdjointEigenSolver<MatXc> es(k);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian eigensolver failed to converge");
    return sorted_basis(es.eigenvalues(), es.eigenvectors(), phase_angle);
}

// FFT-based application of K(p) = Toeplitz(C) - L^dag L
class ImplicitK {
public:
    ImplicitK(const MemoryKernel& kernel, const CorrelationTable& table, long p)
        : p_(p), n_(next_pow2(static_cast<std::size_t>(2 * p + 2))) {
        if (table.max_lag < p - 1) throw std::invalid_argument("ImplicitK: correlation table too short");
        std::vector<cplx> c(n_, cplx(0.0));
        for (long j = 0; j < p; ++j) c[static_cast<std::size_t>(j)] = table.c[static_cast<std::size_t>(j)];
        for (long j = 1; j < p; ++j) c[n_ - static_cast<std::size_t>(j)] = std::conj(table.c[static_cast<std::size_t>(j)]);
        fft_forward(c);
        c_hat_ = std::move(c);
        std::vector<cplx> l(n_, cplx(0.0));
        for (long j = 1; j < p; ++j) l[static_cast<std::size_t>(j)] = kernel.row(j);
        fft_forward(l);
        l_hat_ = std::move(l);
    }

    VecXc apply(const VecXc& x) const {
        std::vector<cplx> xp(n_, cplx(0.0));
        for (long j = 0; j < p_; ++j) xp[static_cast<std::size_t>(j)] = x[j];
        fft_forward(xp);
        // Toeplitz part
        std::vector<cplx> t(n_);
        for (std::size_t i = 0; i < n_; ++i) t[i] = c_hat_[i] * xp[i];
        fft_inverse(t);
        // w = L x (lower-triangular Toeplitz convolution)
        std::vector<cplx> w(n_);
        for (std::size_t i = 0; i < n_; ++i) w[i] = l_hat_[i] * xp[i];
        fft_inverse(w);
        for (std::size_t i = static_cast<std::size_t>(p_); i < n_; ++i) w[i] = cplx(0.0);
        fft_forward(w);
        for (std::size_t i = 0; i < n_; ++i) w[i] = std::conj(l_hat_[i]) * w[i];
        fft_inverse(w);
        VecXc y(p_);
        for (long j = 0; j < p_; ++j)
            y[j] = t[static_cast<std::size_t>(j)] - w[static_cast<std::size_t>(j)];
        return y;
    }

    MatXc apply(const MatXc& x) const {
        MatXc y(x.rows(), x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j) y.col(j) = apply(VecXc(x.col(j)));
        return y;
    }

private:
    long p_;
    std::size_t n_;
    std::vector<cplx> c_hat_, l_hat_;
};

} // namespace

void fix_eigenvector_phase(Eigen::Ref<VecXc> v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v[i]);
        if (m > best + 1e-15) {
            best = m;
            imax = i;
        }
    }
    if (best <= 0.0) return;
    v *= std::conj(v[imax]) / best;
}

FutureCouplingMatrix build_K(const MemoryKernel& kernel, const CorrelationTable& table, long p) {
    if (p < 1) throw std::invalid_argument("build_K: p >= 1 required");
    if (table.max_lag < p - 1) {
        throw std::invalid_argument(
            "build_K: correlation table max_lag " + std::to_string(table.max_lag) +
            " insufficient, need P_max >= " + std::to_string(p - 1));
    }
    FutureCouplingMatrix out;
    out.p = p;
    out.horizon = table.horizon;
    out.tail_bound = table.abs_err;
    out.k.resize(p, p);
    // walk the diagonals: K_{r+d, r} = C(d) - sum_{k=1}^{p-r-d-1} conj(M(k)) M(k+d)
    for (long d = 0; d < p; ++d) {
        const cplx cd = table.c[static_cast<std::size_t>(d)];
        // prefix[j] = sum_{k=1}^{j} conj(M(k)) M(k+d); entries need j = p-r'-1
        cplx prefix(0.0);
        std::vector<cplx> vals(static_cast<std::size_t>(p - d));
        for (long j = 0; j < p - d; ++j) {
            vals[static_cast<std::size_t>(j)] = cd - prefix; // j = p - r' - 1 = 0 first
            prefix += std::conj(kernel.row(j + 1)) * kernel.row(j + 1 + d);
        }
        // j = p - r' - 1 -> r' = p - 1 - j, r = r' - d
        for (long j = 0; j < p - d; ++j) {
            const long rp = p - 1 - j;
            const long r = rp - d;
            out.k(rp, r) = vals[static_cast<std::size_t>(j)];
            out.k(r, rp) = std::conj(vals[static_cast<std::size_t>(j)]);
        }
    }
    out.k = 0.5 * (out.k + out.k.adjoint()).eval(); // enforce exact Hermiticity
    return out;
}

FutureCouplingMatrix build_K(const MemoryKernel& kernel, long p, const CorrelationOptions& opts) {
    auto table = build_correlation(kernel, std::max<long>(p - 1, 0), opts);
    return build_K(kernel, table, p);
}

EigenBasis fastest_decoupling_basis(const FutureCouplingMatrix& K) {
    return hermitian_eigs_desc(K.k);
}

EigenBasis top_k_spectrum(const MemoryKernel& kernel, const CorrelationTable& table, long p,
                          int n_eigs, std::uint64_t seed) {
    if (n_eigs < 1 || n_eigs > p) throw std::invalid_argument("top_k_spectrum: bad n_eigs");
    const ImplicitK op(kernel, table, p);
    const int block = std::min<long>(p, n_eigs + 16);
    SplitMix64 rng(seed);
    MatXc omega(p, block);
    for (long i = 0; i < p; ++i)
        for (int j = 0; j < block; ++j) omega(i, j) = rng.next_complex_gaussian();
    MatXc q = op.apply(omega);
    for (int iter = 0; iter < 3; ++iter) {
        Eigen::HouseholderQR<MatXc> qr(q);
        q = qr.householderQ() * MatXc::Identity(p, block);
        if (iter < 2) q = op.apply(q);
    }
    const MatXc kq = op.apply(q);
    MatXc small = q.adjoint() * kq;
    small = 0.5 * (small + small.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatXc> es(small);
    EigenBasis all = sorted_basis(es.eigenvalues(), MatXc(q * es.eigenvectors()));
    EigenBasis out;
    out.lambdas = all.lambdas.head(n_eigs);
    out.vectors = all.vectors.leftCols(n_eigs);
    return out;
}

namespace {

// incremental state of the inductive construction
class StreamBuilder {
public:
    StreamBuilder(const MemoryKernel& kernel, int m, long steps, const StreamOptions& opts)
        : kernel_(kernel), opts_(opts), m_(m), steps_(steps) {
        if (m < 0) throw std::invalid_argument("stream: m >= 0 required");
        if (steps < 1) throw std::invalid_argument("stream: steps >= 1 required");
        table_ = build_correlation(kernel, std::max<long>(steps, 1), opts.corr);
        stream_.m = m;
        stream_.dt = kernel.dt();
        stream_.steps = 0;
        stream_.kernel_tag = kernel.density().describe();
        stream_.k_ii = table_.k_ii();
        stream_.cert_abs_err = table_.abs_err;
        stream_.step.reserve(static_cast<std::size_t>(steps));
        modes_.resize(steps + 1, m);
        modes_.setZero();
        prefix_sq_ = 0.0;
        p_ = 0;
    }

    // resume from an existing stream (final_modes must be present)
    StreamBuilder(const MemoryKernel& kernel, const ModeStream& stream, long steps,
                  const StreamOptions& opts)
        : StreamBuilder(kernel, stream.m, std::max(steps, stream.steps), opts) {
        if (stream.final_modes.rows() != stream.steps)
            throw std::invalid_argument("stream resume: final_modes missing");
        stream_.step = stream.step;
        stream_.steps = stream.steps;
        p_ = stream.steps;
        modes_.topRows(stream.steps).leftCols(m_) = stream.final_modes;
        for (long k = 1; k < p_; ++k) prefix_sq_ += std::norm(kernel_.row(k));
        if (m_ > 0 && p_ > m_) {
            // rebuild the projected K block from the last recorded step
            const StreamStep& last = stream_.step.back();
            const VecXc mc = frame_couplings(p_);
            k_rr_ = MatXc::Zero(m_, m_);
            for (int i = 0; i < m_; ++i) k_rr_(i, i) = last.lambdas[i];
            k_rr_ -= (mc.conjugate()) * mc.transpose();
        }
    }

    void advance() {
        if (p_ >= steps_) throw std::logic_error("stream: advancing past allocated steps");
        const long p = p_;
        if (p >= 1) prefix_sq_ += std::norm(kernel_.row(p)); // now sum_{k=1}^p |M(k dt)|^2
        StreamStep rec;
        rec.couplings = frame_couplings(p);
        if (p >= m_) {
            rec.discarded_sq = std::max(0.0, prefix_sq_ - rec.couplings.squaredNorm());
            if (m_ > 0 && p == m_) k_rr_ = initial_k_rr();
            cycle_step(p, rec);
        } else {
            rec.discarded_sq = 0.0;
            modes_(p, p) = cplx(1.0, 0.0); // the incoming cell becomes relevant
        }
        stream_.step.push_back(std::move(rec));
        ++p_;
        stream_.steps = p_;
    }

    ModeStream finish() {
        stream_.final_modes = modes_.topRows(p_).leftCols(m_);
        return std::move(stream_);
    }

private:
    // couplings of the current frame to the cell row p: M_i(p) = sum_r M((p-r)dt) phi_i(p)_r
    VecXc frame_couplings(long p) const {
        const int nm = static_cast<int>(std::min<long>(p, m_));
        VecXc out(nm);
        for (int i = 0; i < nm; ++i) {
            cplx acc(0.0);
            for (long r = 0; r < p; ++r) acc += kernel_.row(p - r) * modes_(r, i);
            out[i] = acc;
        }
        return out;
    }

    // direct projected K(m+1) on the growth-phase frame phi_i = e_{i-1}
    MatXc initial_k_rr() const {
        MatXc k(m_, m_);
        for (int rp = 0; rp < m_; ++rp) {
            for (int r = rp; r < m_; ++r) {
                // G(a,b), a = m+1-r', b = m+1-r  (b >= a when r <= r')
                const long d = r - rp;
                cplx val = table_.c[static_cast<std::size_t>(d)];
                for (long k2 = 1; k2 < m_ + 1 - r; ++k2)
                    val -= std::conj(kernel_.row(k2)) * kernel_.row(k2 + d);
                k(r, rp) = val;
                k(rp, r) = std::conj(val);
            }
        }
        return 0.5 * (k + k.adjoint()).eval();
    }

    void cycle_step(long p, StreamStep& rec) {
        const int n = m_ + 1;
        MatXc kt(n, n);
        if (m_ > 0) kt.topLeftCorner(m_, m_) = k_rr_;
        // K_ri[q] = sum_r C(p-r) phi_q(p)_r
        for (int q = 0; q < m_; ++q) {
            cplx acc(0.0);
            for (long r = 0; r < p; ++r)
                acc += table_.c[static_cast<std::size_t>(p - r)] * modes_(r, q);
            kt(m_, q) = acc;
            kt(q, m_) = std::conj(acc);
        }
        kt(m_, m_) = table_.c[0];
        kt = 0.5 * (kt + kt.adjoint()).eval();

        EigenBasis basis = hermitian_eigs_desc(kt);
        MatXc u = basis.vectors;
        MatXc gen = generator_from(u, /*retry=*/true);

        rec.w = u.transpose();
        rec.generator = std::move(gen);
        rec.lambdas = basis.lambdas;

        // rotate the frame: phi_k(p+1) = sum_l U_{lk} oldmode_l, over cells 0..p
        MatXc next(p + 1, m_);
        if (m_ > 0) {
            next.topRows(p) = modes_.topRows(p).leftCols(m_) * u.topLeftCorner(m_, m_);
            next.row(p) = u.row(m_).head(m_);
            modes_.block(0, 0, p + 1, m_) = next;
        }

        // projected K(p+2) on the new frame: diag(lambda) - conj(Mk) Mj
        if (m_ > 0) {
            const VecXc mc = frame_couplings(p + 1);
            k_rr_ = MatXc::Zero(m_, m_);
            for (int i = 0; i < m_; ++i) k_rr_(i, i) = rec.lambdas[i];
            k_rr_ -= mc.conjugate() * mc.transpose();
        }
    }

    // h with W-hat = exp(i b^dag h b): h = i ln(U), principal branch via Schur
    MatXc generator_from(MatXc& u, bool retry) {
        Eigen::ComplexSchur<MatXc> schur(u);
        if (schur.info() != Eigen::Success) throw std::runtime_error("stream: Schur of W failed");
        const MatXc& t = schur.matrixT();
        const MatXc& qm = schur.matrixU();
        double offdiag = 0.0;
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            for (Eigen::Index j = i + 1; j < t.cols(); ++j) offdiag = std::max(offdiag, std::abs(t(i, j)));
        if (offdiag > 1e-10)
            throw std::runtime_error("stream: W_p deviates from normality, |offdiag| = " +
                                     std::to_string(offdiag));
        double closest = 2.0;
        VecXd theta(t.rows());
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
            closest = std::min(closest, std::abs(t(i, i) + 1.0));
            theta[i] = std::arg(t(i, i));
        }
        if (closest < opts_.branch_tol) {
            if (retry) {
                // perturb the phase convention of the eigenbasis and try once more
                MatXc u2 = u;
                for (Eigen::Index j = 0; j < u2.cols(); ++j)
                    u2.col(j) *= std::exp(cplx(0.0, 0.25 * pi));
                MatXc gen = generator_from(u2, /*retry=*/false);
                u = u2;
                return gen;
            }
            throw std::runtime_error(
                "stream: W_p eigenvalue within branch tolerance of -1; matrix log ambiguous");
        }
        MatXc h = qm * (-theta).asDiagonal() * qm.adjoint();
        return 0.5 * (h + h.adjoint()).eval();
    }

    const MemoryKernel& kernel_;
    StreamOptions opts_;
    int m_;
    long steps_;
    CorrelationTable table_;
    ModeStream stream_;
    MatXc modes_; // (steps+1) x m, rows = cells
    MatXc k_rr_;
    double prefix_sq_ = 0.0;
    long p_ = 0;
};

} // namespace

ModeStream build_stream(const MemoryKernel& kernel, int m, long steps, const StreamOptions& opts) {
    StreamBuilder builder(kernel, m, steps, opts);
    for (long p = 0; p < steps; ++p) builder.advance();
    return builder.finish();
}

ModeStream extend_stream(ModeStream stream, const MemoryKernel& kernel, long p,
                         const StreamOptions& opts) {
    if (p != stream.steps)
        throw std::invalid_argument("extend_stream: stream valid through step " +
                                    std::to_string(stream.steps) + ", cannot jump to " +
                                    std::to_string(p));
    StreamBuilder builder(kernel, stream, p + 1, opts);
    builder.advance();
    return builder.finish();
}

VecXc mode_shape(const ModeStream& stream, long p, int k) {
    if (k < 1 || k > stream.m) throw std::out_of_range("mode_shape: mode index out of range");
    if (p > stream.steps || p < std::min<long>(stream.m, stream.steps))
        throw std::out_of_range("mode_shape: step out of range");
    if (p == stream.steps && stream.final_modes.rows() == stream.steps)
        return stream.final_modes.col(k - 1);
    // replay the recorded frame changes up to p
    const long growth = std::min<long>(stream.m, p);
    MatXc modes = MatXc::Zero(growth, stream.m);
    for (long q = 0; q < growth; ++q) modes(q, q) = cplx(1.0, 0.0);
    for (long q = stream.m; q < p; ++q) {
        const MatXc u = stream.at(q).w.transpose();
        MatXc next(q + 1, stream.m);
        next.topRows(q) = modes * u.topLeftCorner(stream.m, stream.m);
        next.row(q) = u.row(stream.m).head(stream.m);
        modes = std::move(next);
    }
    return modes.col(k - 1);
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_mat(std::ostream& os, const MatXc& m) {
    put_u64(os, static_cast<std::uint64_t>(m.rows()));
    put_u64(os, static_cast<std::uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(cplx) * m.size()));
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
MatXc get_mat(std::istream& is) {
    const auto rows = static_cast<Eigen::Index>(get_u64(is));
    const auto cols = static_cast<Eigen::Index>(get_u64(is));
    MatXc m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(cplx) * m.size()));
    return m;
}

constexpr char kStreamMagic[8] = {'R', 'T', 'R', 'G', 'S', 'T', 'R', '1'};

} // namespace

void save_stream(const ModeStream& stream, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_stream: cannot open " + path);
    os.write(kStreamMagic, 8);
    put_u64(os, static_cast<std::uint64_t>(stream.m));
    put_f64(os, stream.dt);
    put_u64(os, static_cast<std::uint64_t>(stream.steps));
    put_u64(os, stream.kernel_tag.size());
    os.write(stream.kernel_tag.data(), static_cast<std::streamsize>(stream.kernel_tag.size()));
    put_f64(os, stream.k_ii);
    put_f64(os, stream.cert_abs_err);
    for (const auto& st : stream.step) {
        put_mat(os, st.couplings);
        put_mat(os, st.w);
        put_mat(os, st.generator);
        put_mat(os, st.lambdas.cast<cplx>());
        put_f64(os, st.discarded_sq);
    }
    put_mat(os, stream.final_modes);
    if (!os) throw std::runtime_error("save_stream: write failed for " + path);
}

ModeStream load_stream(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_stream: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || !std::equal(magic, magic + 8, kStreamMagic))
        throw std::runtime_error("load_stream: bad magic/version in " + path);
    ModeStream stream;
    stream.m = static_cast<int>(get_u64(is));
    stream.dt = get_f64(is);
    stream.steps = static_cast<long>(get_u64(is));
    std::string tag(get_u64(is), '\0');
    is.read(tag.data(), static_cast<std::streamsize>(tag.size()));
    stream.kernel_tag = tag;
    stream.k_ii = get_f64(is);
    stream.cert_abs_err = get_f64(is);
    stream.step.resize(static_cast<std::size_t>(stream.steps));
    for (auto& st : stream.step) {
        st.couplings = get_mat(is);
        st.w = get_mat(is);
        st.generator = get_mat(is);
        st.lambdas = get_mat(is).real();
        st.discarded_sq = get_f64(is);
    }
    stream.final_modes = get_mat(is);
    if (!is) throw std::runtime_error("load_stream: truncated file " + path);
    return stream;
}

} // namespace rtrg
