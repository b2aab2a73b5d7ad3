#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "maxent/ellipsoid.hpp"
#include "maxent/errors.hpp"
#include "support.hpp"

using namespace maxent;

namespace {

Eigen::VectorXd random_unit(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(dim);
    do {
        for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
    } while (v.norm() < 1e-6);
    return v.normalized();
}

} // namespace

TEST_CASE("initial ball demands an orthonormal basis") {
    Eigen::MatrixXd good(3, 2);
    good << 1, 0, 0, 1, 0, 0;
    CHECK_NOTHROW(init_ball(Eigen::Vector3d::Zero(), good, 1.0));
    Eigen::MatrixXd scaled = 2.0 * good;
    CHECK_THROWS_AS(init_ball(Eigen::Vector3d::Zero(), scaled, 1.0), BadBasis);
    Eigen::MatrixXd skew(3, 2);
    skew << 1, 1, 0, 1, 0, 0;
    CHECK_THROWS_AS(init_ball(Eigen::Vector3d::Zero(), skew, 1.0), BadBasis);
}

TEST_CASE("one-dimensional cut halves the interval") {
    EllipsoidState e = init_ball(Eigen::VectorXd::Zero(1),
                                 Eigen::MatrixXd::Identity(1, 1), 1.0);
    const CutInfo info = central_cut(e, Eigen::VectorXd::Ones(1));
    CHECK(info.volume_ratio == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(e.center(0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(enclosing_radius(e) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("half-disk update has the textbook geometry") {
    EllipsoidState e = init_ball(Eigen::VectorXd::Zero(2),
                                 Eigen::MatrixXd::Identity(2, 2), 1.0);
    const CutInfo info = central_cut(e, Eigen::Vector2d(1.0, 0.0));
    CHECK(info.volume_ratio == doctest::Approx(4.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-12));
    CHECK(e.center(0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(e.center(1) == doctest::Approx(0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e.shape);
    CHECK(eig.eigenvalues()(0) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(eig.eigenvalues()(1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(enclosing_radius(e) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("normals orthogonal to the subspace are degenerate") {
    Eigen::MatrixXd basis(3, 2);
    basis << 1, 0, 0, 1, 0, 0;
    EllipsoidState e = init_ball(Eigen::Vector3d::Zero(), basis, 1.0);
    CHECK_THROWS_AS(central_cut(e, Eigen::Vector3d(0.0, 0.0, 1.0)), DegenerateNormal);
    CHECK_THROWS_AS(central_cut(e, Eigen::Vector3d::Zero()), DegenerateNormal);
}

TEST_CASE("cuts in an affine subspace act through the projected normal") {
    Eigen::MatrixXd basis(3, 2);
    basis << 1, 0, 0, 1, 0, 0;
    const Eigen::Vector3d anchor(0.0, 0.0, 7.0);
    EllipsoidState projected = init_ball(anchor, basis, 1.0);
    EllipsoidState direct = init_ball(anchor, basis, 1.0);
    central_cut(projected, Eigen::Vector3d(0.3, -0.4, 5.0));
    central_cut(direct, Eigen::Vector3d(0.3, -0.4, 0.0));
    CHECK((projected.center - direct.center).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((projected.shape - direct.shape).lpNorm<Eigen::Infinity>() < 1e-12);
    // The ambient center never leaves the affine slice.
    CHECK(projected.ambient_center()(2) == doctest::Approx(7.0));
}

TEST_CASE("every central cut contracts volume at the guaranteed rate") {
    std::mt19937_64 rng(31);
    for (int dim = 1; dim <= 6; ++dim) {
        const double guarantee = std::exp(-1.0 / (2.0 * dim));
        EllipsoidState e = init_ball(Eigen::VectorXd::Zero(dim),
                                     Eigen::MatrixXd::Identity(dim, dim), 10.0);
        double acc = 0.0;
        for (int cut = 0; cut < 50; ++cut) {
            const CutInfo info = central_cut(e, random_unit(rng, dim));
            CHECK(info.volume_ratio <= guarantee + 1e-12);
            CHECK(info.volume_ratio > 0.0);
            acc += std::log(info.volume_ratio);
        }
        // The product of reported ratios tracks the determinant exactly.
        const double logdet = std::log(e.shape.determinant());
        const double logdet0 = 2.0 * dim * std::log(10.0);
        CHECK(acc == doctest::Approx((logdet - logdet0) / 2.0).epsilon(1e-6));
    }
}

TEST_CASE("the kept half stays inside the updated ellipsoid") {
    std::mt19937_64 rng(37);
    for (int dim = 2; dim <= 5; ++dim) {
        EllipsoidState e = init_ball(Eigen::VectorXd::Zero(dim),
                                     Eigen::MatrixXd::Identity(dim, dim), 3.0);
        for (int cut = 0; cut < 8; ++cut) {
            const EllipsoidState before = e;
            const Eigen::VectorXd normal = random_unit(rng, dim);
            central_cut(e, normal);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(before.shape);
            const Eigen::MatrixXd half =
                eig.operatorSqrt();
            const Eigen::MatrixXd inv_new = e.shape.inverse();
            for (int probe = 0; probe < 60; ++probe) {
                // Boundary point of the previous ellipsoid.
                const Eigen::VectorXd y = before.center + half * random_unit(rng, dim);
                const Eigen::VectorXd x = before.anchor + before.basis * y;
                if (normal.dot(x - before.ambient_center()) > 0.0) continue;
                const Eigen::VectorXd d = y - e.center;
                CHECK(d.dot(inv_new * d) <= 1.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("enclosing radius reports the longest semi-axis") {
    EllipsoidState e = init_ball(Eigen::VectorXd::Zero(2),
                                 Eigen::MatrixXd::Identity(2, 2), 2.5);
    CHECK(enclosing_radius(e) == doctest::Approx(2.5).epsilon(1e-12));
    e.shape = Eigen::Vector2d(9.0, 0.25).asDiagonal();
    CHECK(enclosing_radius(e) == doctest::Approx(3.0).epsilon(1e-12));
    e.shape = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    CHECK_THROWS_AS(enclosing_radius(e), NumericalFailure);
}
