#pragma once

// Entanglement and mixedness functionals: NPT negativity, linear entropy,
// the MEMS/Werner boundary in the entanglement-purity plane, covariance
// matrices of two-mode field states, and the Simon-type uncertainty
// function (Delta, Delta_NS) that witnesses field inseparability.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "entx/errors.hpp"
#include "entx/hilbert.hpp"
#include "entx/qubit_pair.hpp"

namespace entx {

/// -2 min(0, lambda_min) of the partial transpose with respect to qubit 2.
/// 0 iff separable for a two-qubit state; 1 for a maximally entangled one.
inline double negativity(const QubitPairMatrix& rho) {
    // PT on qubit 2 in the paper basis transposes each 2x2 block
    Eigen::Matrix4cd pt = rho.matrix();
    for (int bi = 0; bi < 2; ++bi)
        for (int bj = 0; bj < 2; ++bj)
            pt.block<2, 2>(2 * bi, 2 * bj) =
                rho.matrix().block<2, 2>(2 * bi, 2 * bj).transpose().eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt, Eigen::EigenvaluesOnly);
    const double mu = es.eigenvalues().minCoeff();
    return std::max(0.0, -2.0 * mu);
}

/// lambda^- = (B + C - sqrt(4 D^2 + (B - C)^2)) / 2 for an X-state.
inline double lambda_minus_closed_form(double b, double c, double d) {
    if (b < -1e-12 || c < -1e-12)
        throw argument_error("lambda_minus_closed_form: populations must be >= 0");
    return 0.5 * (b + c - std::sqrt(4.0 * d * d + (b - c) * (b - c)));
}

/// S_L = (4/3) [1 - Tr(rho^2)]: 0 for pure states, 1 for I/4.
inline double linear_entropy(const QubitPairMatrix& rho) {
    const double purity = rho.matrix().squaredNorm();  // Tr(rho^2) for Hermitian rho
    return std::max(0.0, (4.0 / 3.0) * (1.0 - purity));
}

/// One-parameter maximally-entangled-mixed-state family, paper basis.
inline QubitPairMatrix mems_state(double p) {
    if (p < 0.0 || p > 1.0) throw argument_error("mems_state: p outside [0, 1]");
    const double g = std::sqrt(1.0 + 3.0 * p * p);
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = m(3, 3) = (1.0 + g) / 6.0;
    m(1, 1) = (2.0 - g) / 3.0;
    m(0, 3) = m(3, 0) = p / 2.0;
    return QubitPairMatrix(m, true);
}

/// Werner family p |phi+><phi+| + (1 - p) I/4 (identity normalised so the
/// result is a density matrix).
inline QubitPairMatrix werner_state(double p) {
    if (p < 0.0 || p > 1.0) throw argument_error("werner_state: p outside [0, 1]");
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity() * ((1.0 - p) / 4.0);
    // |phi+> = (|11> + |00>)/sqrt(2) occupies the outer corners in this basis
    m(0, 0) += p / 2.0;
    m(3, 3) += p / 2.0;
    m(0, 3) += p / 2.0;
    m(3, 0) += p / 2.0;
    return QubitPairMatrix(m, true);
}

struct BoundaryPoint {
    double p;
    double s_l;
    double eps;
};

struct BoundaryCurves {
    std::vector<BoundaryPoint> werner;
    std::vector<BoundaryPoint> mems;
};

/// (S_L, eps) pairs of both boundary families, evaluated by running the
/// measures on the constructed states. The two families trace the same
/// curve in the plane.
inline BoundaryCurves boundary_curve(const std::vector<double>& p_grid) {
    BoundaryCurves out;
    out.werner.reserve(p_grid.size());
    out.mems.reserve(p_grid.size());
    for (double p : p_grid) {
        auto w = werner_state(p);
        out.werner.push_back({p, linear_entropy(w), negativity(w)});
        auto m = mems_state(p);
        out.mems.push_back({p, linear_entropy(m), negativity(m)});
    }
    return out;
}

/// Boundary value eps(S_L) via the Werner parameterisation: p = sqrt(1-S_L),
/// eps = max(0, (3p - 1)/2). Matches both families pointwise.
inline double boundary_negativity(double s_l) {
    if (s_l < -1e-12 || s_l > 1.0 + 1e-12)
        throw argument_error("boundary_negativity: S_L outside [0, 1]");
    const double p = std::sqrt(std::max(0.0, 1.0 - s_l));
    return std::max(0.0, (3.0 * p - 1.0) / 2.0);
}

/// 4x4 covariance matrix of the quadratures (q1, p1, q2, p2) with the
/// q = (A + A†)/sqrt(2) normalisation, so vacuum gives V = I/2. Physicality
/// (V + (i/2) Omega >= 0) is validated on construction.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(const Eigen::Matrix4d& v) : v_(v) {
        const double sym_dev = (v_ - v_.transpose()).cwiseAbs().maxCoeff();
        if (sym_dev > 1e-10)
            throw validation_error("CovarianceMatrix: asymmetry " + std::to_string(sym_dev));
        Eigen::Matrix4cd m = v_.cast<Complex>() + Complex(0, 0.5) * omega().cast<Complex>();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol::psd)
            throw validation_error("CovarianceMatrix: uncertainty relation violated, min eig " +
                                   std::to_string(es.eigenvalues().minCoeff()));
    }

    static Eigen::Matrix4d omega() {
        Eigen::Matrix4d o = Eigen::Matrix4d::Zero();
        o(0, 1) = 1;
        o(1, 0) = -1;
        o(2, 3) = 1;
        o(3, 2) = -1;
        return o;
    }

    const Eigen::Matrix4d& matrix() const { return v_; }
    Eigen::Matrix2d a() const { return v_.block<2, 2>(0, 0); }
    Eigen::Matrix2d b() const { return v_.block<2, 2>(2, 2); }
    Eigen::Matrix2d c() const { return v_.block<2, 2>(0, 2); }

private:
    Eigen::Matrix4d v_;
};

/// Second moments of a two-mode field state, via ladder-operator
/// contractions on the Fock-basis density matrix. Uses the canonical
/// a a† = a†a + 1, which presumes negligible population at the truncation
/// boundary (true for every state this artifact produces).
inline CovarianceMatrix covariance_matrix(const DensityOperator& rho) {
    if (rho.spec().num_subsystems() != 2)
        throw argument_error("covariance_matrix: expected a two-mode state");
    const int da = rho.spec().dim(0), db = rho.spec().dim(1);
    const Matrix& m = rho.matrix();
    auto idx = [db](int a, int b) { return static_cast<long>(a) * db + b; };

    Complex ea{}, ea2{}, eb{}, eb2{}, eab{}, eabdag{};
    double enaa = 0.0, enbb = 0.0;
    for (int a = 0; a < da; ++a) {
        for (int b = 0; b < db; ++b) {
            const long i = idx(a, b);
            enaa += a * m(i, i).real();
            enbb += b * m(i, i).real();
            if (a >= 1) ea += m(i, idx(a - 1, b)) * std::sqrt(static_cast<double>(a));
            if (a >= 2)
                ea2 += m(i, idx(a - 2, b)) * std::sqrt(static_cast<double>(a) * (a - 1));
            if (b >= 1) eb += m(i, idx(a, b - 1)) * std::sqrt(static_cast<double>(b));
            if (b >= 2)
                eb2 += m(i, idx(a, b - 2)) * std::sqrt(static_cast<double>(b) * (b - 1));
            if (a >= 1 && b >= 1)
                eab += m(i, idx(a - 1, b - 1)) *
                       std::sqrt(static_cast<double>(a) * static_cast<double>(b));
            if (a >= 1 && b + 1 < db)
                eabdag += m(i, idx(a - 1, b + 1)) *
                          std::sqrt(static_cast<double>(a) * (b + 1));
        }
    }

    const double mq1 = std::sqrt(2.0) * ea.real(), mp1 = std::sqrt(2.0) * ea.imag();
    const double mq2 = std::sqrt(2.0) * eb.real(), mp2 = std::sqrt(2.0) * eb.imag();

    Eigen::Matrix4d v;
    v(0, 0) = ea2.real() + enaa + 0.5;
    v(1, 1) = -ea2.real() + enaa + 0.5;
    v(0, 1) = v(1, 0) = ea2.imag();
    v(2, 2) = eb2.real() + enbb + 0.5;
    v(3, 3) = -eb2.real() + enbb + 0.5;
    v(2, 3) = v(3, 2) = eb2.imag();
    v(0, 2) = v(2, 0) = (eab + eabdag).real();
    v(0, 3) = v(3, 0) = eab.imag() - eabdag.imag();
    v(1, 2) = v(2, 1) = eab.imag() + eabdag.imag();
    v(1, 3) = v(3, 1) = eabdag.real() - eab.real();

    Eigen::Vector4d mean(mq1, mp1, mq2, mp2);
    v -= mean * mean.transpose();
    return CovarianceMatrix(v);
}

/// Simon-type uncertainty function in the V_vac = I/2 convention:
///   Delta = detA detB + (1/4 - detC)^2 - Tr(A~ C~ B~ C~^T) - (detA + detB)/4
/// with X~ = X J. Physical states satisfy Delta >= 0. With
/// partial_transposed set, detC is replaced by |detC| (the mirror
/// reflection p2 -> -p2 flips its sign), turning the bound into the
/// separability test: Delta_NS < 0 certifies entanglement, and for
/// Gaussian states Delta_NS < 0 iff entangled.
inline double simon_delta(const CovarianceMatrix& v, bool partial_transposed) {
    Eigen::Matrix2d j;
    j << 0, 1, -1, 0;
    const Eigen::Matrix2d a = v.a(), b = v.b(), c = v.c();
    const double det_a = a.determinant(), det_b = b.determinant();
    double det_c = c.determinant();
    if (partial_transposed) det_c = std::abs(det_c);
    const Eigen::Matrix2d at = a * j, bt = b * j, ct = c * j;
    const double tr_term = (at * ct * bt * ct.transpose()).trace();
    return det_a * det_b + (0.25 - det_c) * (0.25 - det_c) - tr_term -
           (det_a + det_b) / 4.0;
}

}  // namespace entx
