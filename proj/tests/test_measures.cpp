#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "entx/measures.hpp"
#include "entx/state_prep.hpp"

using namespace entx;
using Catch::Approx;

namespace {

QubitPairMatrix random_x_state(std::mt19937& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    // Dirichlet-ish populations, coherence bounded by sqrt(A F)
    double w[4] = {-std::log(uni(rng)), -std::log(uni(rng)), -std::log(uni(rng)),
                   -std::log(uni(rng))};
    const double z = w[0] + w[1] + w[2] + w[3];
    const double a = w[0] / z, b = w[1] / z, c = w[2] / z, f = w[3] / z;
    const double d = (2.0 * uni(rng) - 1.0) * std::sqrt(a * f);
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    m(3, 3) = f;
    m(0, 3) = m(3, 0) = -d;
    return QubitPairMatrix(m, true);
}

DensityOperator random_density(const HilbertSpec& spec, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const long n = spec.total_dim();
    Matrix g(n, n);
    for (long j = 0; j < n; ++j)
        for (long i = 0; i < n; ++i) g(i, j) = Complex(gauss(rng), gauss(rng));
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityOperator(spec, std::move(rho));
}

DensityOperator truncated_tms_density(double r, int n_max) {
    auto s = two_mode_squeezed(r, n_max, 1e-3);
    Matrix m = s.amplitudes() * s.amplitudes().adjoint();
    m /= m.trace().real();
    return DensityOperator(s.spec(), std::move(m));
}

// hyperbolic covariance blocks of the ideal two-mode squeezed state
Eigen::Matrix4d tms_covariance(double r) {
    Eigen::Matrix4d v = Eigen::Matrix4d::Identity() * (std::cosh(2 * r) / 2.0);
    const double x = std::sinh(2 * r) / 2.0;
    v(0, 2) = v(2, 0) = x;
    v(1, 3) = v(3, 1) = -x;
    return v;
}

}  // namespace

TEST_CASE("negativity") {
    SECTION("maximally entangled state gives 1") {
        CHECK(negativity(werner_state(1.0)) == Approx(1.0).margin(1e-12));
    }
    SECTION("product states give 0") {
        // |10><10| is a product state and an X-state
        CHECK(negativity(QubitPairMatrix::from_x_elements(0.0, 1.0, 0.0, 0.0)) == 0.0);
        CHECK(negativity(QubitPairMatrix::from_x_elements(0.0, 0.0, 0.0, 0.0)) == 0.0);
    }
    SECTION("Werner family: eps = max(0, (3p-1)/2), crossing at p = 1/3") {
        for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0})
            CHECK(negativity(werner_state(p)) ==
                  Approx(std::max(0.0, (3.0 * p - 1.0) / 2.0)).margin(1e-12));
    }
}

TEST_CASE("lambda_minus closed form") {
    CHECK(lambda_minus_closed_form(0.2, 0.2, 0.0) == Approx(0.2));
    CHECK(lambda_minus_closed_form(0.0, 0.0, 0.37) == Approx(-0.37));
    CHECK_THROWS_AS(lambda_minus_closed_form(-0.1, 0.2, 0.0), argument_error);

    SECTION("matches the eigen-solver negativity on random X-states") {
        std::mt19937 rng(20240317);
        for (int i = 0; i < 200; ++i) {
            auto x = random_x_state(rng);
            const double lm = lambda_minus_closed_form(x.b(), x.c(), x.d());
            CHECK(negativity(x) == Approx(-2.0 * std::min(0.0, lm)).margin(1e-10));
        }
    }
}

TEST_CASE("linear entropy") {
    CHECK(linear_entropy(werner_state(1.0)) == Approx(0.0).margin(1e-12));
    CHECK(linear_entropy(werner_state(0.0)) == Approx(1.0).margin(1e-12));
    // Tr(rho_W^2) = (1 + 3p^2)/4 by direct expansion
    for (double p : {0.3, 0.6, 0.9})
        CHECK(linear_entropy(werner_state(p)) == Approx(1.0 - p * p).margin(1e-12));
}

TEST_CASE("MEMS and Werner families") {
    SECTION("mems(1) is the Bell projector") {
        auto m = mems_state(1.0).matrix();
        CHECK(m(0, 0).real() == Approx(0.5).margin(1e-14));
        CHECK(m(3, 3).real() == Approx(0.5).margin(1e-14));
        CHECK(m(0, 3).real() == Approx(0.5).margin(1e-14));
        CHECK(m(1, 1).real() == Approx(0.0).margin(1e-14));
    }
    SECTION("mems(0) is separable with diag (1/3, 1/3, 0, 1/3)") {
        auto m = mems_state(0.0);
        CHECK(m.a() == Approx(1.0 / 3.0).margin(1e-14));
        CHECK(m.b() == Approx(1.0 / 3.0).margin(1e-14));
        CHECK(m.c() == Approx(0.0).margin(1e-14));
        CHECK(m.f() == Approx(1.0 / 3.0).margin(1e-14));
        CHECK(negativity(m) == 0.0);
    }
    SECTION("werner(0) is maximally mixed") {
        CHECK((werner_state(0.0).matrix() - Eigen::Matrix4cd::Identity() / 4.0)
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
    SECTION("out-of-range parameters") {
        CHECK_THROWS_AS(mems_state(-0.01), argument_error);
        CHECK_THROWS_AS(werner_state(1.01), argument_error);
    }
}

TEST_CASE("boundary curve") {
    std::vector<double> grid;
    for (int i = 0; i <= 1000; ++i) grid.push_back(i / 1000.0);
    auto curves = boundary_curve(grid);

    SECTION("p = 1 endpoint is (0, 1) for both families") {
        CHECK(curves.werner.back().s_l == Approx(0.0).margin(1e-12));
        CHECK(curves.werner.back().eps == Approx(1.0).margin(1e-12));
        CHECK(curves.mems.back().s_l == Approx(0.0).margin(1e-12));
        CHECK(curves.mems.back().eps == Approx(1.0).margin(1e-12));
    }

    SECTION("Werner negativity crosses zero at p = 1/3") {
        for (const auto& pt : curves.werner) {
            if (pt.p <= 1.0 / 3.0)
                CHECK(pt.eps == Approx(0.0).margin(1e-12));
            else
                CHECK(pt.eps > 0.0);
        }
    }

    SECTION("the two families trace the same curve in the plane") {
        for (const auto& pt : curves.werner)
            CHECK(std::abs(pt.eps - boundary_negativity(pt.s_l)) < 1e-6);
        for (const auto& pt : curves.mems)
            CHECK(std::abs(pt.eps - boundary_negativity(pt.s_l)) < 1e-6);
    }

    SECTION("negativity decreases as mixedness grows along the boundary") {
        for (std::size_t i = 1; i < curves.mems.size(); ++i) {
            CHECK(curves.mems[i].s_l <= curves.mems[i - 1].s_l + 1e-12);
            CHECK(curves.mems[i].eps >= curves.mems[i - 1].eps - 1e-12);
        }
    }

    SECTION("boundary_negativity domain") {
        CHECK_THROWS_AS(boundary_negativity(-0.1), argument_error);
        CHECK(boundary_negativity(1.0) == 0.0);
        CHECK(boundary_negativity(0.0) == Approx(1.0));
    }
}

TEST_CASE("covariance matrix") {
    SECTION("vacuum gives I/2") {
        Matrix vac = Matrix::Zero(9, 9);
        vac(0, 0) = 1.0;
        auto v = covariance_matrix(DensityOperator(HilbertSpec({3, 3}), vac));
        CHECK((v.matrix() - Eigen::Matrix4d::Identity() * 0.5).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("two-mode squeezed state matches the hyperbolic blocks") {
        for (double r : {0.3, 0.6, 1.0}) {
            auto v = covariance_matrix(truncated_tms_density(r, 25));
            CHECK((v.matrix() - tms_covariance(r)).cwiseAbs().maxCoeff() < 1e-3);
        }
    }

    SECTION("first moments vanish for the artifact's states") {
        auto rho = assemble_cavity_state_closed_form(
            SqueezeParams(0.86, std::asin(std::sqrt(0.1)), 15, 1e-4));
        const Matrix& m = rho.matrix();
        Complex ea{};
        const int d = 16;
        for (int a = 1; a < d; ++a)
            for (int b = 0; b < d; ++b)
                ea += m(static_cast<long>(a) * d + b, static_cast<long>(a - 1) * d + b) *
                      std::sqrt(static_cast<double>(a));
        CHECK(std::abs(ea) < 1e-12);
    }

    SECTION("matches a dense-operator oracle on random states") {
        std::mt19937 rng(7777);
        HilbertSpec small({5, 4});
        for (int trial = 0; trial < 5; ++trial) {
            // random state padded with empty top levels so the truncated
            // oracle operators see no boundary population
            auto seed_rho = random_density(small, rng);
            Matrix padded = Matrix::Zero(7 * 6, 7 * 6);
            for (int a = 0; a < 5; ++a)
                for (int b = 0; b < 4; ++b)
                    for (int ap = 0; ap < 5; ++ap)
                        for (int bp = 0; bp < 4; ++bp)
                            padded(a * 6 + b, ap * 6 + bp) =
                                seed_rho.matrix()(a * 4 + b, ap * 4 + bp);
            DensityOperator rho(HilbertSpec({7, 6}), std::move(padded));
            auto v = covariance_matrix(rho);

            // oracle: build the quadrature operators explicitly
            Matrix aa = kron(annihilation(6), Matrix::Identity(6, 6));
            Matrix bb = kron(Matrix::Identity(7, 7), annihilation(5));
            const double s = 1.0 / std::sqrt(2.0);
            std::array<Matrix, 4> xi = {
                s * (aa + aa.adjoint()), Complex(0, -1) * s * (aa - aa.adjoint()),
                s * (bb + bb.adjoint()), Complex(0, -1) * s * (bb - bb.adjoint())};
            Eigen::Matrix4d expect;
            Eigen::Vector4d mean;
            for (int i = 0; i < 4; ++i) mean[i] = (rho.matrix() * xi[i]).trace().real();
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    expect(i, j) =
                        0.5 * ((rho.matrix() * (xi[i] * xi[j] + xi[j] * xi[i])).trace().real()) -
                        mean[i] * mean[j];
            CHECK((v.matrix() - expect).cwiseAbs().maxCoeff() < 1e-10);
        }
    }

    SECTION("unphysical covariance is rejected") {
        CHECK_THROWS_AS(CovarianceMatrix(Eigen::Matrix4d::Identity() * 0.25), validation_error);
        Eigen::Matrix4d asym = Eigen::Matrix4d::Identity();
        asym(0, 1) = 0.3;
        CHECK_THROWS_AS(CovarianceMatrix(asym), validation_error);
    }
}

TEST_CASE("simon delta") {
    SECTION("vacuum saturates both bounds") {
        CovarianceMatrix vac(Eigen::Matrix4d::Identity() * 0.5);
        CHECK(simon_delta(vac, false) == Approx(0.0).margin(1e-15));
        CHECK(simon_delta(vac, true) == Approx(0.0).margin(1e-15));
    }

    SECTION("two-mode squeezed states: Delta = 0, Delta_NS = -sinh^2(2r)/4") {
        for (double r : {0.1, 0.46, 0.86, 1.4, 2.0}) {
            CovarianceMatrix v(tms_covariance(r));
            const double sh = std::sinh(2 * r);
            CHECK(simon_delta(v, false) == Approx(0.0).margin(1e-10));
            CHECK(simon_delta(v, true) == Approx(-sh * sh / 4.0).epsilon(1e-10));
        }
    }

    SECTION("numeric covariance of a truncated squeezed state is entangled") {
        auto v = covariance_matrix(truncated_tms_density(0.6, 25));
        CHECK(simon_delta(v, true) < 0.0);
        CHECK(simon_delta(v, false) > -1e-8);
    }

    SECTION("products of single-mode states are never flagged") {
        std::mt19937 rng(31415);
        for (int trial = 0; trial < 10; ++trial) {
            auto one = random_density(HilbertSpec({6}), rng);
            auto two = random_density(HilbertSpec({6}), rng);
            auto v = covariance_matrix(tensor(one, two));
            CHECK(simon_delta(v, true) > -1e-10);
            CHECK(simon_delta(v, false) > -1e-10);
        }
    }

    SECTION("invariance under local phase-space rotations") {
        auto rot = [](double phi) {
            Eigen::Matrix2d r;
            r << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
            return r;
        };
        CovarianceMatrix v(tms_covariance(0.7));
        const double det_a = v.a().determinant(), det_c = v.c().determinant();
        const double delta = simon_delta(v, false), delta_ns = simon_delta(v, true);
        for (double phi : {0.3, 1.1}) {
            for (double psi : {0.0, 0.8}) {
                Eigen::Matrix4d rr = Eigen::Matrix4d::Zero();
                rr.block<2, 2>(0, 0) = rot(phi);
                rr.block<2, 2>(2, 2) = rot(psi);
                CovarianceMatrix w(rr * v.matrix() * rr.transpose());
                CHECK(w.a().determinant() == Approx(det_a).margin(1e-8));
                CHECK(w.c().determinant() == Approx(det_c).margin(1e-8));
                CHECK(simon_delta(w, false) == Approx(delta).margin(1e-8));
                CHECK(simon_delta(w, true) == Approx(delta_ns).margin(1e-8));
            }
        }
    }
}

TEST_CASE("QubitPairMatrix validation") {
    Eigen::Matrix4cd bad = Eigen::Matrix4cd::Identity() / 4.0;
    bad(1, 2) = 0.2;  // breaks hermiticity
    CHECK_THROWS_AS(QubitPairMatrix(bad), validation_error);

    Eigen::Matrix4cd nonx = Eigen::Matrix4cd::Identity() / 4.0;
    nonx(1, 2) = nonx(2, 1) = 0.1;
    CHECK_NOTHROW(QubitPairMatrix(nonx));
    CHECK_THROWS_AS(QubitPairMatrix(nonx, true), validation_error);

    // PSD violation: coherence exceeding sqrt(A F)
    Eigen::Matrix4cd neg = Eigen::Matrix4cd::Zero();
    neg(0, 0) = neg(3, 3) = 0.1;
    neg(1, 1) = neg(2, 2) = 0.4;
    neg(0, 3) = neg(3, 0) = 0.3;
    CHECK_THROWS_AS(QubitPairMatrix(neg), validation_error);
}
