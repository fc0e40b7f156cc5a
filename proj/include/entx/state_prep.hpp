#pragma once

// Preparation of the two-mode squeezed source and of the quantum-correlated
// two-cavity state it feeds through the leaky mirrors, by two routes that
// must agree entrywise: an exact unitary oracle (beam splitters on the
// four-mode space, then tracing the external modes) and the closed-form
// coefficient sum. Both routes truncate the source identically and the
// resulting cavity state is renormalised to unit trace, so the lost
// truncation weight never leaks into downstream comparisons.

#include <cmath>
#include <vector>

#include "entx/hilbert.hpp"

namespace entx {

/// Trace retained by the source |S> when truncated at n_max photons:
/// sum_{n=0}^{n_max} tanh(r)^{2n} / cosh(r)^2.
inline double truncated_source_weight(double r, int n_max) {
    const double t2 = std::tanh(r) * std::tanh(r);
    double term = 1.0 / (std::cosh(r) * std::cosh(r));
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        sum += term;
        term *= t2;
    }
    return sum;
}

/// Smallest n_max whose truncated source weight reaches 1 - tol, capped.
inline int n_max_for_weight(double r, double tol, int cap = 200) {
    for (int n = 1; n <= cap; ++n)
        if (truncated_source_weight(r, n) >= 1.0 - tol) return n;
    return cap;
}

struct SqueezeParams {
    double r;
    double theta;
    int n_max;
    double tol_trunc;

    SqueezeParams(double r_, double theta_, int n_max_, double tol_trunc_ = 1e-6)
        : r(r_), theta(theta_), n_max(n_max_), tol_trunc(tol_trunc_) {
        if (!(r >= 0.0) || !std::isfinite(r))
            throw argument_error("SqueezeParams: r must be finite and >= 0");
        if (!(theta >= 0.0) || !(theta <= M_PI / 2.0 + 1e-12))
            throw argument_error("SqueezeParams: theta must lie in [0, pi/2]");
        if (n_max < 1) throw argument_error("SqueezeParams: n_max must be >= 1");
        if (!(tol_trunc > 0.0)) throw argument_error("SqueezeParams: tol_trunc must be > 0");
        const double w = truncated_source_weight(r, n_max);
        if (w < 1.0 - tol_trunc)
            throw truncation_error("SqueezeParams: truncation weight " + std::to_string(w) +
                                       " below 1 - " + std::to_string(tol_trunc) +
                                       " at r = " + std::to_string(r) +
                                       ", n_max = " + std::to_string(n_max),
                                   w, 1.0 - tol_trunc);
    }

    double truncation_weight() const { return truncated_source_weight(r, n_max); }
};

/// |S>_ab = cosh(r)^-1 sum_n tanh(r)^n |n,n>, truncated at n_max.
/// Deliberately not renormalised: the squared norm equals the truncation
/// weight and downstream code accounts for it explicitly.
inline PureState two_mode_squeezed(double r, int n_max, double tol_trunc = 1e-6) {
    if (!(r >= 0.0) || !std::isfinite(r))
        throw argument_error("two_mode_squeezed: r must be finite and >= 0");
    if (n_max < 1) throw argument_error("two_mode_squeezed: n_max must be >= 1");
    const double w = truncated_source_weight(r, n_max);
    if (w < 1.0 - tol_trunc)
        throw truncation_error("two_mode_squeezed: truncation weight " + std::to_string(w) +
                                   " below 1 - " + std::to_string(tol_trunc),
                               w, 1.0 - tol_trunc);
    const int d = n_max + 1;
    const double t = std::tanh(r);
    Vector amps = Vector::Zero(static_cast<long>(d) * d);
    double c = 1.0 / std::cosh(r);
    for (int n = 0; n <= n_max; ++n) {
        amps[static_cast<long>(n) * d + n] = c;
        c *= t;
    }
    return PureState(HilbertSpec({d, d}), std::move(amps), tol_trunc);
}

namespace detail {

/// sqrt-binomial table sc(n, k) = sqrt(C(n, k)), n <= n_top.
inline std::vector<std::vector<double>> sqrt_binomials(int n_top) {
    std::vector<std::vector<double>> sc(static_cast<std::size_t>(n_top) + 1);
    std::vector<double> row{1.0};
    for (int n = 0; n <= n_top; ++n) {
        sc[static_cast<std::size_t>(n)].resize(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k)
            sc[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
                std::sqrt(row[static_cast<std::size_t>(k)]);
        std::vector<double> next(static_cast<std::size_t>(n) + 2, 0.0);
        for (int k = 0; k <= n; ++k) {
            next[static_cast<std::size_t>(k)] += row[static_cast<std::size_t>(k)];
            next[static_cast<std::size_t>(k) + 1] += row[static_cast<std::size_t>(k)];
        }
        row = std::move(next);
    }
    return sc;
}

}  // namespace detail

/// Tabulated pieces of the Eq.-style coefficients
///   A^{nm}_{kl} = chi(n,m) f(n,m,k) f(n,m,l),
///   chi(n,m)    = tanh^{n+m}(r) / cosh^2(r),
///   f(n,m,k)    = sqrt(C(n,k) C(m,k)) cos^{2k}(theta) sin^{n+m-2k}(theta).
/// Assembling sum A^{nm}_{kl} |n-k><m-k| ⊗ |n-l><m-l| over n,m <= n_max
/// reproduces the beam-splitter oracle entrywise.
class CavityAmplitudes {
public:
    CavityAmplitudes(double r, double theta, int n_max)
        : n_max_(n_max),
          sc_(detail::sqrt_binomials(n_max)),
          cosh2_(std::cosh(r) * std::cosh(r)),
          tanh_(std::tanh(r)) {
        const double c = std::cos(theta), s = std::sin(theta);
        cpow_.resize(2 * static_cast<std::size_t>(n_max) + 3);
        spow_.resize(2 * static_cast<std::size_t>(n_max) + 3);
        cpow_[0] = spow_[0] = 1.0;
        for (std::size_t i = 1; i < cpow_.size(); ++i) {
            cpow_[i] = cpow_[i - 1] * c;
            spow_[i] = spow_[i - 1] * s;
        }
        tpow_.resize(2 * static_cast<std::size_t>(n_max) + 3);
        tpow_[0] = 1.0;
        for (std::size_t i = 1; i < tpow_.size(); ++i) tpow_[i] = tpow_[i - 1] * tanh_;
    }

    int n_max() const { return n_max_; }
    double chi(int n, int m) const { return tpow_[static_cast<std::size_t>(n + m)] / cosh2_; }
    double f(int n, int m, int k) const {
        return sc_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] *
               sc_[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] *
               cpow_[static_cast<std::size_t>(2 * k)] *
               spow_[static_cast<std::size_t>(n + m - 2 * k)];
    }
    double coefficient(int n, int m, int k, int l) const {
        return chi(n, m) * f(n, m, k) * f(n, m, l);
    }

private:
    int n_max_;
    std::vector<std::vector<double>> sc_;
    double cosh2_, tanh_;
    std::vector<double> cpow_, spow_, tpow_;
};

/// A^{nm}_{kl}, standalone evaluation (log-domain binomials).
inline double cavity_coefficient(double r, double theta, int n, int m, int k, int l) {
    if (n < 0 || m < 0) throw argument_error("cavity_coefficient: n, m must be >= 0");
    if (k < 0 || l < 0 || k > std::min(n, m) || l > std::min(n, m))
        throw argument_error("cavity_coefficient: need 0 <= k,l <= min(n,m)");
    auto lchoose = [](int a, int b) {
        return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
    };
    const double chi = std::pow(std::tanh(r), n + m) / (std::cosh(r) * std::cosh(r));
    const double root = std::exp(0.5 * (lchoose(n, k) + lchoose(m, k) +
                                        lchoose(n, l) + lchoose(m, l)));
    const double c = std::cos(theta), s = std::sin(theta);
    // 0^0 = 1 by convention (pow follows IEEE here)
    const double powers = std::pow(c, 2 * (k + l)) * std::pow(s, 2 * (n + m) - 2 * (k + l));
    return chi * root * powers;
}

/// Oracle route: |S>_ab ⊗ |0,0>_AB, beam splitters on (A,a) and (B,b),
/// trace out the external modes, renormalise to unit trace.
inline DensityOperator prepare_cavity_state_oracle(const SqueezeParams& p) {
    const int d = p.n_max + 1;
    auto source = two_mode_squeezed(p.r, p.n_max, p.tol_trunc);
    auto cavities = PureState::basis_ket(HilbertSpec({d, d}), {0, 0});
    auto full = tensor(source, cavities);  // ordering [a, b, A, B]
    const Matrix bs = beam_splitter(p.theta, p.n_max);
    full = apply_unitary(full, bs, {2, 0});  // (A, a)
    full = apply_unitary(full, bs, {3, 1});  // (B, b)
    auto rho = partial_trace(full, {2, 3});
    Matrix m = rho.matrix() / rho.trace();
    return DensityOperator(rho.spec(), std::move(m));
}

/// Closed-form route: direct coefficient sum, truncated identically to the
/// oracle (source levels n, m <= n_max), then the same renormalisation.
inline DensityOperator assemble_cavity_state_closed_form(const SqueezeParams& p) {
    const int d = p.n_max + 1;
    const CavityAmplitudes amp(p.r, p.theta, p.n_max);
    Matrix m = Matrix::Zero(static_cast<long>(d) * d, static_cast<long>(d) * d);
    for (int n = 0; n <= p.n_max; ++n) {
        for (int mm = 0; mm <= p.n_max; ++mm) {
            const double chi = amp.chi(n, mm);
            if (chi == 0.0 && n + mm > 0) continue;
            const int kl_max = std::min(n, mm);
            for (int k = 0; k <= kl_max; ++k) {
                const double fk = amp.f(n, mm, k);
                if (fk == 0.0) continue;
                const long row_a = n - k, col_a = mm - k;
                for (int l = 0; l <= kl_max; ++l) {
                    const double w = chi * fk * amp.f(n, mm, l);
                    m(row_a * d + (n - l), col_a * d + (mm - l)) += w;
                }
            }
        }
    }
    m /= m.trace().real();
    return DensityOperator(HilbertSpec({d, d}), std::move(m));
}

}  // namespace entx
