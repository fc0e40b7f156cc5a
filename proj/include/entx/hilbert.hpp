#pragma once

// Dense linear algebra over truncated multipartite Hilbert spaces: pure and
// mixed states, Kronecker products, partial trace / partial transpose, and
// the elementary bosonic operators (annihilation, beam splitter).
//
// Conventions used throughout: subsystems are indexed left-to-right, the
// leftmost factor being the most significant in the flattened index; Fock
// levels ascend 0..n_max. All values are immutable after construction and
// all operations are pure functions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entx/errors.hpp"

namespace entx {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
inline constexpr double herm = 1e-10;     // max |M - M†| entrywise
inline constexpr double trace = 1e-8;     // |Tr(rho) - target|
inline constexpr double psd = 1e-8;       // allowed negative eigenvalue magnitude
inline constexpr double norm = 1e-9;      // pure-state norm slack
inline constexpr double unitary = 1e-10;  // |U U† - I| entrywise
}  // namespace tol

/// Ordered list of subsystem dimensions defining a composite space.
class HilbertSpec {
public:
    explicit HilbertSpec(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw argument_error("HilbertSpec: dims must be non-empty");
        total_ = 1;
        for (int d : dims_) {
            if (d < 2) throw argument_error("HilbertSpec: every subsystem dimension must be >= 2");
            total_ *= d;
        }
    }

    const std::vector<int>& dims() const { return dims_; }
    int dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
    int num_subsystems() const { return static_cast<int>(dims_.size()); }
    long total_dim() const { return total_; }

    /// Stride of each subsystem in the flattened index (leftmost slowest).
    std::vector<long> strides() const {
        std::vector<long> s(dims_.size());
        long acc = 1;
        for (int i = num_subsystems() - 1; i >= 0; --i) {
            s[static_cast<std::size_t>(i)] = acc;
            acc *= dims_[static_cast<std::size_t>(i)];
        }
        return s;
    }

    HilbertSpec restricted_to(const std::vector<int>& keep) const {
        std::vector<int> d;
        d.reserve(keep.size());
        for (int i : keep) d.push_back(dim(i));
        return HilbertSpec(std::move(d));
    }

    bool operator==(const HilbertSpec& other) const { return dims_ == other.dims_; }

private:
    std::vector<int> dims_;
    long total_;
};

namespace detail {

/// max |M - M†| entrywise, traversed in cache-sized tiles.
inline double hermiticity_deviation(const Matrix& m) {
    const long n = m.rows();
    const long bs = 64;
    double worst = 0.0;
    for (long jb = 0; jb < n; jb += bs) {
        for (long ib = jb; ib < n; ib += bs) {
            const long iend = std::min(ib + bs, n), jend = std::min(jb + bs, n);
            for (long j = jb; j < jend; ++j)
                for (long i = std::max(ib, j); i < iend; ++i) {
                    const double dev = std::abs(m(i, j) - std::conj(m(j, i)));
                    if (dev > worst) worst = dev;
                }
        }
    }
    return worst;
}

inline void check_subsystems(const HilbertSpec& spec, const std::vector<int>& idx,
                             const char* who) {
    if (idx.empty()) throw argument_error(std::string(who) + ": empty subsystem list");
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw argument_error(std::string(who) + ": duplicate subsystem index");
    if (sorted.front() < 0 || sorted.back() >= spec.num_subsystems())
        throw argument_error(std::string(who) + ": subsystem index out of range");
}

/// Flattened offsets of a subsystem subset (in the listed order) and of its
/// complement (in original order). full_index = comp[c] + sub[s] enumerates
/// the whole space.
struct SubsystemOffsets {
    std::vector<long> sub;
    std::vector<long> comp;
    long sub_dim = 1;
    long comp_dim = 1;
};

inline SubsystemOffsets subsystem_offsets(const HilbertSpec& spec, const std::vector<int>& idx) {
    const auto strides = spec.strides();
    SubsystemOffsets out;
    for (int i : idx) out.sub_dim *= spec.dim(i);

    std::vector<bool> in_sub(static_cast<std::size_t>(spec.num_subsystems()), false);
    for (int i : idx) in_sub[static_cast<std::size_t>(i)] = true;
    std::vector<int> comp_idx;
    for (int i = 0; i < spec.num_subsystems(); ++i)
        if (!in_sub[static_cast<std::size_t>(i)]) comp_idx.push_back(i);
    for (int i : comp_idx) out.comp_dim *= spec.dim(i);

    out.sub.assign(static_cast<std::size_t>(out.sub_dim), 0);
    for (long s = 0; s < out.sub_dim; ++s) {
        long rem = s, offset = 0;
        for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
            const int d = spec.dim(idx[static_cast<std::size_t>(j)]);
            offset += (rem % d) * strides[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
            rem /= d;
        }
        out.sub[static_cast<std::size_t>(s)] = offset;
    }
    out.comp.assign(static_cast<std::size_t>(out.comp_dim), 0);
    for (long c = 0; c < out.comp_dim; ++c) {
        long rem = c, offset = 0;
        for (int j = static_cast<int>(comp_idx.size()) - 1; j >= 0; --j) {
            const int d = spec.dim(comp_idx[static_cast<std::size_t>(j)]);
            offset += (rem % d) * strides[static_cast<std::size_t>(comp_idx[static_cast<std::size_t>(j)])];
            rem /= d;
        }
        out.comp[static_cast<std::size_t>(c)] = offset;
    }
    return out;
}

}  // namespace detail

/// Normalised state vector over a HilbertSpec. Truncation may shave the norm,
/// so the accepted band [1 - tol_norm, 1] is configurable per instance.
class PureState {
public:
    PureState(HilbertSpec spec, Vector amplitudes, double tol_norm = tol::norm)
        : spec_(std::move(spec)), amps_(std::move(amplitudes)) {
        if (amps_.size() != spec_.total_dim())
            throw argument_error("PureState: amplitude length does not match spec total_dim");
        const double n = amps_.norm();
        if (n > 1.0 + tol::norm || n < 1.0 - tol_norm)
            throw validation_error("PureState: norm " + std::to_string(n) +
                                   " outside [1 - " + std::to_string(tol_norm) + ", 1]");
    }

    /// Basis ket |occ[0], occ[1], ...>.
    static PureState basis_ket(HilbertSpec spec, const std::vector<int>& occupation) {
        if (static_cast<int>(occupation.size()) != spec.num_subsystems())
            throw argument_error("basis_ket: occupation length mismatch");
        const auto strides = spec.strides();
        long index = 0;
        for (std::size_t i = 0; i < occupation.size(); ++i) {
            if (occupation[i] < 0 || occupation[i] >= spec.dim(static_cast<int>(i)))
                throw argument_error("basis_ket: occupation out of range");
            index += occupation[i] * strides[i];
        }
        Vector v = Vector::Zero(spec.total_dim());
        v[index] = 1.0;
        return PureState(std::move(spec), std::move(v));
    }

    const HilbertSpec& spec() const { return spec_; }
    const Vector& amplitudes() const { return amps_; }
    double squared_norm() const { return amps_.squaredNorm(); }

private:
    HilbertSpec spec_;
    Vector amps_;
};

/// Mixed state: Hermitian, unit-trace (within tolerance of a stated target),
/// positive semidefinite matrix over a HilbertSpec.
///
/// Hermiticity and trace are always verified. The eigenvalue-based PSD check
/// costs O(N^3) and is run only for total_dim <= psd_check_dim_limit; above
/// that, constructors rely on the producing operation (unitary conjugation,
/// partial trace of a PSD state) and only the diagonal is screened. Tests
/// exercise min_eigenvalue() explicitly on large representatives.
class DensityOperator {
public:
    static constexpr long psd_check_dim_limit = 512;

    DensityOperator(HilbertSpec spec, Matrix matrix, double trace_target = 1.0)
        : spec_(std::move(spec)), mat_(std::move(matrix)) {
        if (mat_.rows() != spec_.total_dim() || mat_.cols() != spec_.total_dim())
            throw argument_error("DensityOperator: matrix shape does not match spec total_dim");
        const double herm_dev = detail::hermiticity_deviation(mat_);
        if (herm_dev > tol::herm)
            throw validation_error("DensityOperator: hermiticity deviation " +
                                   std::to_string(herm_dev));
        const double tr_dev = std::abs(mat_.trace().real() - trace_target) +
                              std::abs(mat_.trace().imag());
        if (tr_dev > tol::trace)
            throw validation_error("DensityOperator: trace deviates from " +
                                   std::to_string(trace_target) + " by " + std::to_string(tr_dev));
        for (long i = 0; i < mat_.rows(); ++i)
            if (mat_(i, i).real() < -tol::psd)
                throw validation_error("DensityOperator: negative diagonal entry");
        if (spec_.total_dim() <= psd_check_dim_limit) {
            const double mu = min_eigenvalue();
            if (mu < -tol::psd)
                throw validation_error("DensityOperator: negative eigenvalue " +
                                       std::to_string(mu));
        }
    }

    const HilbertSpec& spec() const { return spec_; }
    const Matrix& matrix() const { return mat_; }
    double trace() const { return mat_.trace().real(); }
    double purity() const { return (mat_ * mat_).trace().real(); }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

private:
    HilbertSpec spec_;
    Matrix mat_;
};

inline HilbertSpec concat(const HilbertSpec& a, const HilbertSpec& b) {
    std::vector<int> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return HilbertSpec(std::move(dims));
}

/// Kronecker product in row-major subsystem order.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline PureState tensor(const PureState& x, const PureState& y) {
    Vector out(x.spec().total_dim() * y.spec().total_dim());
    for (long i = 0; i < x.spec().total_dim(); ++i)
        out.segment(i * y.spec().total_dim(), y.spec().total_dim()) =
            x.amplitudes()[i] * y.amplitudes();
    // norm multiplies, so allow the combined truncation slack
    const double slack = std::max(1.0 - x.squared_norm(), 0.0) +
                         std::max(1.0 - y.squared_norm(), 0.0) + tol::norm;
    return PureState(concat(x.spec(), y.spec()), std::move(out), slack);
}

inline DensityOperator tensor(const DensityOperator& x, const DensityOperator& y) {
    return DensityOperator(concat(x.spec(), y.spec()), kron(x.matrix(), y.matrix()),
                           x.trace() * y.trace());
}

/// Trace out everything except `keep` (indices in original order).
inline DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep) {
    detail::check_subsystems(rho.spec(), keep, "partial_trace");
    std::sort(keep.begin(), keep.end());
    const auto off = detail::subsystem_offsets(rho.spec(), keep);
    const Matrix& m = rho.matrix();
    Matrix out = Matrix::Zero(off.sub_dim, off.sub_dim);
    for (long z = 0; z < off.comp_dim; ++z) {
        const long base = off.comp[static_cast<std::size_t>(z)];
        for (long y = 0; y < off.sub_dim; ++y) {
            const long col = base + off.sub[static_cast<std::size_t>(y)];
            for (long x = 0; x < off.sub_dim; ++x)
                out(x, y) += m(base + off.sub[static_cast<std::size_t>(x)], col);
        }
    }
    return DensityOperator(rho.spec().restricted_to(keep), std::move(out), rho.trace());
}

/// Partial trace of a pure state, computed without forming |psi><psi|.
inline DensityOperator partial_trace(const PureState& psi, std::vector<int> keep) {
    detail::check_subsystems(psi.spec(), keep, "partial_trace");
    std::sort(keep.begin(), keep.end());
    const auto off = detail::subsystem_offsets(psi.spec(), keep);
    // W(z, x) = psi[comp[z] + sub[x]]; rho = W^T conj(W)
    Matrix w(off.comp_dim, off.sub_dim);
    for (long x = 0; x < off.sub_dim; ++x)
        for (long z = 0; z < off.comp_dim; ++z)
            w(z, x) = psi.amplitudes()[off.comp[static_cast<std::size_t>(z)] +
                                       off.sub[static_cast<std::size_t>(x)]];
    Matrix out = w.transpose() * w.conjugate();
    out = (out + out.adjoint()) / 2.0;  // scrub rounding asymmetry
    return DensityOperator(psi.spec().restricted_to(keep), std::move(out), psi.squared_norm());
}

/// Transpose the stated subsystem only. Result is Hermitian and trace-1 but
/// not necessarily PSD, so it is returned as a bare matrix.
inline Matrix partial_transpose(const DensityOperator& rho, int subsystem) {
    detail::check_subsystems(rho.spec(), {subsystem}, "partial_transpose");
    const auto strides = rho.spec().strides();
    const long stride = strides[static_cast<std::size_t>(subsystem)];
    const long d = rho.spec().dim(subsystem);
    const long n = rho.spec().total_dim();
    std::vector<long> digit(static_cast<std::size_t>(n)), base(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        digit[static_cast<std::size_t>(i)] = (i / stride) % d;
        base[static_cast<std::size_t>(i)] = i - digit[static_cast<std::size_t>(i)] * stride;
    }
    const Matrix& m = rho.matrix();
    Matrix out(n, n);
    for (long j = 0; j < n; ++j)
        for (long i = 0; i < n; ++i)
            out(base[static_cast<std::size_t>(i)] + digit[static_cast<std::size_t>(j)] * stride,
                base[static_cast<std::size_t>(j)] + digit[static_cast<std::size_t>(i)] * stride) =
                m(i, j);
    return out;
}

/// <n-1| a |n> = sqrt(n) on a single truncated mode.
inline Matrix annihilation(int n_max) {
    if (n_max < 1) throw argument_error("annihilation: n_max must be >= 1");
    Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

/// B(theta) = exp[theta (A a† - A† a)] on cavity ⊗ external mode, both
/// truncated at n_max. The generator conserves total photon number, so the
/// exponential is taken exactly within each total-excitation sector.
inline Matrix beam_splitter(double theta, int n_max) {
    if (n_max < 1) throw argument_error("beam_splitter: n_max must be >= 1");
    const int d = n_max + 1;
    Matrix u = Matrix::Zero(d * d, d * d);
    for (int total = 0; total <= 2 * n_max; ++total) {
        const int k_min = std::max(0, total - n_max);
        const int k_max = std::min(n_max, total);
        const int m = k_max - k_min + 1;
        // generator restricted to the sector, in the basis |k_min + j>_cavity
        Matrix h = Matrix::Zero(m, m);  // i * K, Hermitian
        for (int j = 1; j < m; ++j) {
            const int k = k_min + j;
            const double g = std::sqrt(static_cast<double>(k)) *
                             std::sqrt(static_cast<double>(total - k + 1));
            h(j - 1, j) = Complex(0, 1) * g;   // <k-1| iK |k>
            h(j, j - 1) = Complex(0, -1) * g;  // antisymmetry of K
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        Matrix sector = es.eigenvectors() *
                        (Complex(0, -theta) * es.eigenvalues().array().cast<Complex>())
                            .exp()
                            .matrix()
                            .asDiagonal() *
                        es.eigenvectors().adjoint();
        for (int jc = 0; jc < m; ++jc) {
            const int kc = k_min + jc;
            const long col = static_cast<long>(kc) * d + (total - kc);
            for (int jr = 0; jr < m; ++jr) {
                const int kr = k_min + jr;
                u(static_cast<long>(kr) * d + (total - kr), col) = sector(jr, jc);
            }
        }
    }
    return u;
}

/// U rho U† with U acting on the full space.
inline DensityOperator evolve(const DensityOperator& rho, const Matrix& u) {
    if (u.rows() != rho.spec().total_dim() || u.cols() != rho.spec().total_dim())
        throw argument_error("evolve: unitary dimension mismatch");
    Matrix out = u * rho.matrix() * u.adjoint();
    return DensityOperator(rho.spec(), std::move(out), rho.trace());
}

/// Apply a unitary acting on the listed subsystems (tensor factors in the
/// listed order) to a pure state, leaving the rest untouched.
inline PureState apply_unitary(const PureState& psi, const Matrix& u,
                               const std::vector<int>& subsystems) {
    detail::check_subsystems(psi.spec(), subsystems, "apply_unitary");
    const auto off = detail::subsystem_offsets(psi.spec(), subsystems);
    if (u.rows() != off.sub_dim || u.cols() != off.sub_dim)
        throw argument_error("apply_unitary: unitary dimension mismatch");
    // gather fibers into a sub_dim x comp_dim panel, one GEMM, scatter back
    Matrix panel(off.sub_dim, off.comp_dim);
    for (long c = 0; c < off.comp_dim; ++c)
        for (long s = 0; s < off.sub_dim; ++s)
            panel(s, c) = psi.amplitudes()[off.comp[static_cast<std::size_t>(c)] +
                                           off.sub[static_cast<std::size_t>(s)]];
    panel = u * panel;
    Vector out(psi.spec().total_dim());
    for (long c = 0; c < off.comp_dim; ++c)
        for (long s = 0; s < off.sub_dim; ++s)
            out[off.comp[static_cast<std::size_t>(c)] + off.sub[static_cast<std::size_t>(s)]] =
                panel(s, c);
    const double slack = std::max(1.0 - psi.squared_norm(), 0.0) + tol::norm;
    return PureState(psi.spec(), std::move(out), slack);
}

namespace detail {

/// In-place U (...) U† on a raw matrix over the given spec; shared by the
/// validated wrapper and the evolution code that chains several unitaries
/// before re-validating.
inline void conjugate_by_subsystem_unitary(Matrix& m, const HilbertSpec& spec, const Matrix& u,
                                           const std::vector<int>& subsystems) {
    check_subsystems(spec, subsystems, "apply_unitary");
    const auto off = subsystem_offsets(spec, subsystems);
    if (u.rows() != off.sub_dim || u.cols() != off.sub_dim)
        throw argument_error("apply_unitary: unitary dimension mismatch");
    const long n = spec.total_dim();
    const long d = off.sub_dim;

    // left pass: rows in each fiber mix through U; one sweep per column so
    // the gather stays inside the cached column
    Matrix fibers(d, off.comp_dim), mixed(d, off.comp_dim);
    for (long j = 0; j < n; ++j) {
        Complex* col = m.data() + j * n;
        for (long c = 0; c < off.comp_dim; ++c) {
            const long base = off.comp[static_cast<std::size_t>(c)];
            Complex* dst = fibers.data() + c * d;
            for (long s = 0; s < d; ++s) dst[s] = col[base + off.sub[static_cast<std::size_t>(s)]];
        }
        mixed.noalias() = u * fibers;
        for (long c = 0; c < off.comp_dim; ++c) {
            const long base = off.comp[static_cast<std::size_t>(c)];
            const Complex* src = mixed.data() + c * d;
            for (long s = 0; s < d; ++s) col[base + off.sub[static_cast<std::size_t>(s)]] = src[s];
        }
    }

    // right pass: columns mix through U†
    Matrix cpanel(n, d), cmixed(n, d);
    for (long c = 0; c < off.comp_dim; ++c) {
        const long base = off.comp[static_cast<std::size_t>(c)];
        for (long s = 0; s < d; ++s)
            cpanel.col(s) = m.col(base + off.sub[static_cast<std::size_t>(s)]);
        cmixed.noalias() = cpanel * u.adjoint();
        for (long s = 0; s < d; ++s)
            m.col(base + off.sub[static_cast<std::size_t>(s)]) = cmixed.col(s);
    }
}

}  // namespace detail

/// Same, conjugating a density operator: (U ⊗ I) rho (U ⊗ I)†.
inline DensityOperator apply_unitary(const DensityOperator& rho, const Matrix& u,
                                     const std::vector<int>& subsystems) {
    Matrix m = rho.matrix();
    detail::conjugate_by_subsystem_unitary(m, rho.spec(), u, subsystems);
    return DensityOperator(rho.spec(), std::move(m), rho.trace());
}

}  // namespace entx
