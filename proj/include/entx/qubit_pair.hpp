#pragma once

// Two-qubit density matrix in the reporting basis {|11>, |10>, |01>, |00>}.
// This ordering (reversed relative to the natural subsystem flattening) is
// the boundary between the evolution code and the entanglement measures;
// everything qubit-pair-shaped passes through here.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "entx/errors.hpp"
#include "entx/hilbert.hpp"

namespace entx {

class QubitPairMatrix {
public:
    /// Validates hermiticity, unit trace and positivity. When require_x is
    /// set, any entry off the diagonal/antidiagonal above 1e-8 is an error
    /// (the evolution from |00> with the prepared field never creates one).
    explicit QubitPairMatrix(const Eigen::Matrix4cd& paper_matrix, bool require_x = false)
        : m_(paper_matrix) {
        const double herm_dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (herm_dev > tol::herm)
            throw validation_error("QubitPairMatrix: hermiticity deviation " +
                                   std::to_string(herm_dev));
        const double tr_dev = std::abs(m_.trace() - Complex(1, 0));
        if (tr_dev > tol::trace)
            throw validation_error("QubitPairMatrix: trace deviation " + std::to_string(tr_dev));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol::psd)
            throw validation_error("QubitPairMatrix: negative eigenvalue " +
                                   std::to_string(es.eigenvalues().minCoeff()));
        if (require_x) {
            // diagonal plus the |11><00| corners; the inner coherences
            // <10|rho|01> never arise from the bi-local evolution
            double worst = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    if (i != j && !((i == 0 && j == 3) || (i == 3 && j == 0)))
                        worst = std::max(worst, std::abs(m_(i, j)));
            if (worst > 1e-8)
                throw validation_error("QubitPairMatrix: X-pattern violated by " +
                                       std::to_string(worst));
        }
    }

    /// X-state from the named elements; F = 1 - A - B - C.
    static QubitPairMatrix from_x_elements(double a, double b, double c, double d) {
        Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
        m(0, 0) = a;
        m(1, 1) = b;
        m(2, 2) = c;
        m(3, 3) = 1.0 - a - b - c;
        m(0, 3) = m(3, 0) = -d;
        return QubitPairMatrix(m, true);
    }

    const Eigen::Matrix4cd& matrix() const { return m_; }

    double a() const { return m_(0, 0).real(); }  // <11|rho|11>
    double b() const { return m_(1, 1).real(); }  // <10|rho|10>
    double c() const { return m_(2, 2).real(); }  // <01|rho|01>
    double f() const { return m_(3, 3).real(); }  // <00|rho|00>
    double d() const { return -m_(0, 3).real(); }  // -<11|rho|00>

private:
    Eigen::Matrix4cd m_;
};

}  // namespace entx
