#pragma once

// Resonant Jaynes-Cummings evolution of qubit pairs coupled bi-locally to
// the two cavity modes, in the rescaled time tau = Omega t. Two routes to
// the reduced pair state exist and must agree: the full-Hilbert-space
// unitary (interact_pair + reduced_qubit_state, operating on the joint
// q1 ⊗ q2 ⊗ A ⊗ B density operator) and the truncated closed-form series
// (closed_form_elements). Sweep-oriented helpers (sequential_pair and the
// channel_* functions) contract the same unitaries leg-by-leg instead of
// materialising the joint state; they are cross-checked against the joint
// route in the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "entx/hilbert.hpp"
#include "entx/measures.hpp"
#include "entx/qubit_pair.hpp"
#include "entx/state_prep.hpp"

namespace entx {

struct InteractionSchedule {
    double tau1 = 0.0;
    std::optional<double> tau2;
    double delta_tau = 0.0;
    double kappa_tbar = 0.0;

    void validate() const {
        auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
        if (!ok(tau1) || !ok(delta_tau) || !ok(kappa_tbar) || (tau2 && !ok(*tau2)))
            throw argument_error("InteractionSchedule: fields must be finite and >= 0");
    }
};

/// exp(-i H tau / hbar Omega) on qubit ⊗ mode for the resonant JC coupling
/// H = hbar Omega (A |1><0| + A† |0><1|). Block-diagonal on
/// {|0,n>, |1,n-1>} with Rabi frequency sqrt(n); |0,0> is stationary and
/// the partnerless top state |1,n_max> is frozen (its population is
/// monitored by the callers that could excite it).
inline Matrix jc_unitary(double tau, int n_max) {
    if (n_max < 1) throw argument_error("jc_unitary: n_max must be >= 1");
    const int d = n_max + 1;
    Matrix u = Matrix::Identity(2 * d, 2 * d);
    for (int n = 1; n <= n_max; ++n) {
        const double phase = tau * std::sqrt(static_cast<double>(n));
        const long i0 = n;          // |0, n>
        const long i1 = d + n - 1;  // |1, n-1>
        u(i0, i0) = std::cos(phase);
        u(i1, i1) = std::cos(phase);
        u(i0, i1) = Complex(0, -std::sin(phase));
        u(i1, i0) = Complex(0, -std::sin(phase));
    }
    return u;
}

namespace detail {

inline void check_two_mode(const DensityOperator& rho, const char* who) {
    if (rho.spec().num_subsystems() != 2)
        throw argument_error(std::string(who) + ": expected a two-mode field state");
}

/// Transfer operators of one JC interaction on a qubit prepared in |0>:
/// t[s](p, q) = <s, p| U(tau) |0, q>. t[0] is diagonal cos(tau sqrt(q)),
/// t[1] is the subdiagonal -i sin(tau sqrt(q)).
inline std::array<Matrix, 2> transfer_operators(double tau, int n_max) {
    const Matrix u = jc_unitary(tau, n_max);
    const int d = n_max + 1;
    return {u.block(0, 0, d, d), u.block(d, 0, d, d)};
}

/// Apply m to the A leg (first mode) of the row index of x. The transfer
/// operators are diagonal or one-off-diagonal, so iterate nonzero entries
/// as row-block updates.
inline Matrix apply_leg_a(const Matrix& m, const Matrix& x, int da, int db) {
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (int a = 0; a < da; ++a)
        for (int ap = 0; ap < da; ++ap) {
            const Complex w = m(a, ap);
            if (w == Complex(0, 0)) continue;
            out.middleRows(static_cast<long>(a) * db, db) +=
                w * x.middleRows(static_cast<long>(ap) * db, db);
        }
    return out;
}

/// Apply m to the B leg (second mode) of the row index of x. The b index is
/// memory-fastest, so the whole matrix reshapes into one db x (da * cols)
/// panel and a single GEMM applies the leg.
inline Matrix apply_leg_b(const Matrix& m, const Matrix& x, int da, int db) {
    Matrix out(x.rows(), x.cols());
    Eigen::Map<const Matrix> view(x.data(), db, static_cast<long>(da) * x.cols());
    Eigen::Map<Matrix> out_view(out.data(), db, static_cast<long>(da) * x.cols());
    out_view = m * view;
    return out;
}

}  // namespace detail

/// Joint state after the bi-local interaction: U_A1(tau) ⊗ U_B2(tau)
/// applied to |00><00|_12 ⊗ rho_field, ordered q1 ⊗ q2 ⊗ A ⊗ B.
inline DensityOperator interact_pair(const DensityOperator& rho_field, double tau) {
    detail::check_two_mode(rho_field, "interact_pair");
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw argument_error("interact_pair: tau must be finite and >= 0");
    const int da = rho_field.spec().dim(0), db = rho_field.spec().dim(1);
    const long nf = rho_field.spec().total_dim();

    // |00><00|_12 ⊗ rho_field occupies the leading block
    HilbertSpec spec({2, 2, da, db});
    Matrix m = Matrix::Zero(4 * nf, 4 * nf);
    m.topLeftCorner(nf, nf) = rho_field.matrix();
    detail::conjugate_by_subsystem_unitary(m, spec, jc_unitary(tau, da - 1), {0, 2});
    detail::conjugate_by_subsystem_unitary(m, spec, jc_unitary(tau, db - 1), {1, 3});
    return DensityOperator(spec, std::move(m), rho_field.trace());
}

namespace detail {

/// Population of the frozen truncation-boundary states |1, n_max> in the
/// joint state; nonzero population would mean silent leakage.
inline double truncation_boundary_population(const DensityOperator& joint) {
    const int da = joint.spec().dim(2), db = joint.spec().dim(3);
    const auto strides = joint.spec().strides();
    double pop = 0.0;
    // qubit 1 excited with cavity A full
    for (long s2 = 0; s2 < 2; ++s2)
        for (long b = 0; b < db; ++b) {
            const long i = strides[0] + s2 * strides[1] + (da - 1) * strides[2] + b;
            pop += joint.matrix()(i, i).real();
        }
    for (long s1 = 0; s1 < 2; ++s1)
        for (long a = 0; a < da; ++a) {
            const long i = s1 * strides[0] + strides[1] + a * strides[2] + (db - 1);
            pop += joint.matrix()(i, i).real();
        }
    return pop;
}

}  // namespace detail

/// Reduced pair state of the joint, re-expressed in the paper basis
/// {|11>, |10>, |01>, |00>}; the X-pattern of the evolution is enforced.
inline QubitPairMatrix reduced_qubit_state(const DensityOperator& joint) {
    if (joint.spec().num_subsystems() != 4)
        throw argument_error("reduced_qubit_state: expected q1 ⊗ q2 ⊗ A ⊗ B");
    const double leak = detail::truncation_boundary_population(joint);
    if (leak > 1e-8)
        throw validation_error("reduced_qubit_state: truncation-boundary population " +
                               std::to_string(leak));
    auto nat = partial_trace(joint, {0, 1});
    Eigen::Matrix4cd paper;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) paper(i, j) = nat.matrix()(3 - i, 3 - j);
    return QubitPairMatrix(paper, true);
}

struct ClosedFormElements {
    double a, b, c, d, f;

    QubitPairMatrix as_pair() const { return QubitPairMatrix::from_x_elements(a, b, c, d); }
};

/// Truncated series for the reduced-pair elements, renormalised by the
/// retained source weight so that F = 1 - A - B - C holds exactly and the
/// values match the unitary route at the same n_max.
inline ClosedFormElements closed_form_elements(double r, double theta, double tau1, int n_max) {
    if (n_max < 1) throw argument_error("closed_form_elements: n_max must be >= 1");
    const CavityAmplitudes amp(r, theta, n_max);

    std::vector<double> sn(static_cast<std::size_t>(n_max) + 2),
        cs(static_cast<std::size_t>(n_max) + 2);
    for (int j = 0; j <= n_max + 1; ++j) {
        const double phase = tau1 * std::sqrt(static_cast<double>(j));
        sn[static_cast<std::size_t>(j)] = std::sin(phase);
        cs[static_cast<std::size_t>(j)] = std::cos(phase);
    }

    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        double sum_sin = 0.0, sum_cos = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double f = amp.f(n, n, k);
            const double s2 = sn[static_cast<std::size_t>(n - k)] * sn[static_cast<std::size_t>(n - k)];
            sum_sin += f * s2;
            sum_cos += f * (1.0 - s2);
        }
        const double chi = amp.chi(n, n);
        a += chi * sum_sin * sum_sin;
        b += chi * sum_sin * sum_cos;
        c += chi * sum_cos * sum_sin;
    }
    for (int n = 0; n + 1 <= n_max; ++n) {
        double sum = 0.0;
        for (int k = 0; k <= n; ++k)
            sum += amp.f(n, n + 1, k) * sn[static_cast<std::size_t>(n - k + 1)] *
                   cs[static_cast<std::size_t>(n - k)];
        d += amp.chi(n, n + 1) * sum * sum;
    }

    const double weight = truncated_source_weight(r, n_max);
    a /= weight;
    b /= weight;
    c /= weight;
    d /= weight;
    return {a, b, c, d, 1.0 - a - b - c};
}

/// Field state left in the cavities after the interaction.
inline DensityOperator residual_field_state(const DensityOperator& joint) {
    if (joint.spec().num_subsystems() != 4)
        throw argument_error("residual_field_state: expected q1 ⊗ q2 ⊗ A ⊗ B");
    return partial_trace(joint, {2, 3});
}

/// Conditional no-jump decay over the inter-pair gap: Fock-basis element
/// <pA pB| rho |qA qB> is damped by exp[-kappa_tbar (pA+pB+qA+qB)], then
/// the state is renormalised to unit trace.
inline DensityOperator apply_cavity_decay(const DensityOperator& rho_field, double kappa_tbar) {
    detail::check_two_mode(rho_field, "apply_cavity_decay");
    if (!(kappa_tbar >= 0.0) || !std::isfinite(kappa_tbar))
        throw argument_error("apply_cavity_decay: kappa_tbar must be finite and >= 0");
    if (kappa_tbar == 0.0) return rho_field;
    const int da = rho_field.spec().dim(0), db = rho_field.spec().dim(1);
    Vector damp(static_cast<long>(da) * db);
    for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b)
            damp[static_cast<long>(a) * db + b] = std::exp(-kappa_tbar * (a + b));
    Matrix m = damp.asDiagonal() * rho_field.matrix() * damp.asDiagonal();
    m /= m.trace().real();
    return DensityOperator(rho_field.spec(), std::move(m));
}

namespace detail {

inline Matrix apply_legs(const Matrix& ma, const Matrix& mb, const Matrix& x, int da, int db) {
    return apply_leg_b(mb, apply_leg_a(ma, x, da, db), da, db);
}

}  // namespace detail

/// Reduced pair state computed by contracting the JC transfer operators
/// against the field state, without materialising the joint. Allows a
/// different interaction time per side (used for mismatched injection).
inline QubitPairMatrix channel_qubit_state(const DensityOperator& rho_field, double tau_a,
                                           double tau_b) {
    detail::check_two_mode(rho_field, "channel_qubit_state");
    const int da = rho_field.spec().dim(0), db = rho_field.spec().dim(1);
    const auto ta = detail::transfer_operators(tau_a, da - 1);
    const auto tb = detail::transfer_operators(tau_b, db - 1);

    // G[s1][s2] = (T_{s1} ⊗ T_{s2}) rho
    Matrix g[2][2];
    for (int s1 = 0; s1 < 2; ++s1) {
        const Matrix ga = detail::apply_leg_a(ta[static_cast<std::size_t>(s1)],
                                              rho_field.matrix(), da, db);
        for (int s2 = 0; s2 < 2; ++s2)
            g[s1][s2] = detail::apply_leg_b(tb[static_cast<std::size_t>(s2)], ga, da, db);
    }

    // element (s1 s2),(p1 p2) = Tr[G (T_{p1} ⊗ T_{p2})†]
    //                        = sum_{a a' b b'} G[(a b),(a' b')] Ta*(a,a') Tb*(b,b')
    // contracted in two stages through tmp(a, a') = sum_{b b'} G conj(Tb)
    Eigen::Matrix4cd nat;
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
            for (int p2 = 0; p2 < 2; ++p2) {
                const Matrix& gm = g[s1][s2];
                const Matrix& tbm = tb[static_cast<std::size_t>(p2)];
                Matrix tmp = Matrix::Zero(da, da);
                for (int ap = 0; ap < da; ++ap)
                    for (int a = 0; a < da; ++a) {
                        Complex acc{};
                        for (int bp = 0; bp < db; ++bp)
                            for (int b = 0; b < db; ++b)
                                acc += gm(static_cast<long>(a) * db + b,
                                          static_cast<long>(ap) * db + bp) *
                                       std::conj(tbm(b, bp));
                        tmp(a, ap) = acc;
                    }
                for (int p1 = 0; p1 < 2; ++p1) {
                    const Matrix& tam = ta[static_cast<std::size_t>(p1)];
                    Complex acc{};
                    for (int ap = 0; ap < da; ++ap)
                        for (int a = 0; a < da; ++a) acc += tmp(a, ap) * std::conj(tam(a, ap));
                    nat(s1 * 2 + s2, p1 * 2 + p2) = acc;
                }
            }

    Eigen::Matrix4cd paper;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) paper(i, j) = nat(3 - i, 3 - j);
    paper = (paper + paper.adjoint()).eval() / 2.0;
    return QubitPairMatrix(paper, true);
}

/// Residual field by the same contraction: sum over the qubit outcomes of
/// K rho K† with K = T_{s1} ⊗ T_{s2}. Uses K rho K† = K (K rho)† for
/// Hermitian rho, so only ket-side leg applications are needed.
inline DensityOperator channel_residual_field(const DensityOperator& rho_field, double tau) {
    detail::check_two_mode(rho_field, "channel_residual_field");
    const int da = rho_field.spec().dim(0), db = rho_field.spec().dim(1);
    const auto ta = detail::transfer_operators(tau, da - 1);
    const auto tb = detail::transfer_operators(tau, db - 1);
    Matrix out = Matrix::Zero(rho_field.matrix().rows(), rho_field.matrix().cols());
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) {
            const Matrix& ma = ta[static_cast<std::size_t>(s1)];
            const Matrix& mb = tb[static_cast<std::size_t>(s2)];
            const Matrix g = detail::apply_legs(ma, mb, rho_field.matrix(), da, db);
            out += detail::apply_legs(ma, mb, g.adjoint(), da, db);
        }
    out = (out + out.adjoint()).eval() / 2.0;
    return DensityOperator(rho_field.spec(), std::move(out), rho_field.trace());
}

/// Second pair of qubits (3, 4), fresh in |00>, interacting with the
/// residual (optionally decayed) field for tau2.
inline QubitPairMatrix sequential_pair(const DensityOperator& rho_field_after, double tau2) {
    if (!(tau2 >= 0.0) || !std::isfinite(tau2))
        throw argument_error("sequential_pair: tau2 must be finite and >= 0");
    return channel_qubit_state(rho_field_after, tau2, tau2);
}

/// Grid argmax of the second-pair negativity; ties break toward the
/// smallest tau2.
inline std::pair<double, double> max_over_tau2(const DensityOperator& rho_field_after,
                                               const std::vector<double>& tau2_grid) {
    if (tau2_grid.empty()) throw argument_error("max_over_tau2: empty grid");
    double best_tau = tau2_grid.front(), best_eps = -1.0;
    for (double tau2 : tau2_grid) {
        const double eps = negativity(sequential_pair(rho_field_after, tau2));
        if (eps > best_eps) {
            best_eps = eps;
            best_tau = tau2;
        }
    }
    return {best_tau, best_eps};
}

/// Mismatched injection: qubit 1 interacts for tau, qubit 2 idles for
/// delta_tau and interacts for the remaining tau - delta_tau. Runs through
/// the joint-state route so that delta_tau = 0 reproduces
/// interact_pair + reduced_qubit_state bit for bit.
inline QubitPairMatrix staggered_interaction(const DensityOperator& rho_field, double tau,
                                             double delta_tau) {
    detail::check_two_mode(rho_field, "staggered_interaction");
    if (!(delta_tau >= 0.0) || delta_tau > tau)
        throw argument_error("staggered_interaction: need 0 <= delta_tau <= tau");
    const int da = rho_field.spec().dim(0), db = rho_field.spec().dim(1);
    Matrix ground = Matrix::Zero(4, 4);
    ground(0, 0) = 1.0;
    auto joint = tensor(DensityOperator(HilbertSpec({2, 2}), ground), rho_field);
    joint = apply_unitary(joint, jc_unitary(tau, da - 1), {0, 2});
    joint = apply_unitary(joint, jc_unitary(tau - delta_tau, db - 1), {1, 3});
    return reduced_qubit_state(joint);
}

}  // namespace entx
