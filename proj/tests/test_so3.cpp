#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "attbound/so3.hpp"
#include "support.hpp"

using namespace attbound;
using namespace testsupport;

TEST_CASE("hat matches the cross product") {
    CHECK(hat(Vec3::Zero()).norm() == 0.0);

    Mat3 expected;
    expected << 0, 0, 0,
                0, 0, -1,
                0, 1, 0;
    CHECK((hat(Vec3(1, 0, 0)) - expected).norm() == 0.0);

    std::mt19937_64 rng(101);
    for (int k = 0; k < 200; ++k) {
        const Vec3 v = random_vec3(rng);
        const Vec3 y = random_vec3(rng);
        CHECK((hat(v) * y - v.cross(y)).norm() < 1e-15 * std::max(1.0, v.norm() * y.norm()));
    }
}

TEST_CASE("vee inverts hat") {
    CHECK(vee(Mat3::Zero()).norm() == 0.0);
    CHECK((vee(hat(Vec3(1, 2, 3))) - Vec3(1, 2, 3)).norm() == 0.0);

    std::mt19937_64 rng(102);
    for (int k = 0; k < 200; ++k) {
        const Mat3 a = hat(random_vec3(rng));
        CHECK((hat(vee(a)) - a).norm() < 1e-15 * std::max(1.0, a.norm()));
    }
}

TEST_CASE("vee rejects non-skew input") {
    Mat3 bad = hat(Vec3(0.1, 0.2, 0.3));
    bad(0, 0) = 0.5;
    CHECK_THROWS_AS(vee(bad), Error);
}

TEST_CASE("exp_so3 special values") {
    CHECK((exp_so3(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);

    Mat3 quarter_x;
    quarter_x << 1, 0, 0,
                 0, 0, -1,
                 0, 1, 0;
    CHECK((exp_so3(Vec3(M_PI / 2, 0, 0)) - quarter_x).norm() < 1e-15);
}

TEST_CASE("exp_so3 matches the matrix exponential series") {
    std::mt19937_64 rng(103);
    for (int k = 0; k < 200; ++k) {
        const Vec3 f = uniform(rng, 0.0, M_PI - 1e-3) * random_unit_vec3(rng);
        const Mat3 series = matrix_exp_series(hat(f));
        CHECK((exp_so3(f) - series).norm() < 1e-12);
        CHECK(is_rotation(exp_so3(f), 1e-12));
    }
    // The small-angle branch must agree with the series too.
    for (int k = 0; k < 50; ++k) {
        const Vec3 f = uniform(rng, 0.0, 1e-6) * random_unit_vec3(rng);
        CHECK((exp_so3(f) - matrix_exp_series(hat(f))).norm() < 1e-15);
    }
}

TEST_CASE("log_so3 round trips") {
    CHECK(log_so3(Mat3::Identity()).norm() == 0.0);

    const Vec3 f(0.3, -0.2, 0.1);
    CHECK((log_so3(exp_so3(f)) - f).norm() < 1e-12);

    std::mt19937_64 rng(104);
    for (int k = 0; k < 500; ++k) {
        const double angle = uniform(rng, 0.0, M_PI - 1e-6);
        const Vec3 g = angle * random_unit_vec3(rng);
        CHECK((log_so3(exp_so3(g)) - g).norm() < 1e-10);
    }
    // Hard cases very close to pi: exp(log(C)) must still reproduce C.
    for (int k = 0; k < 100; ++k) {
        const double angle = M_PI - uniform(rng, 0.0, 1e-5);
        const Mat3 c = exp_so3(angle * random_unit_vec3(rng));
        CHECK((exp_so3(log_so3(c)) - c).norm() < 1e-9);
        CHECK(log_so3(c).norm() <= M_PI + 1e-12);
    }
}

TEST_CASE("log_so3 at angle pi uses the positive-first-component convention") {
    Mat3 half_turn_z;
    half_turn_z << -1, 0, 0,
                   0, -1, 0,
                   0, 0, 1;
    const Vec3 f = log_so3(half_turn_z);
    CHECK((f - Vec3(0, 0, M_PI)).norm() < 1e-12);
    CHECK((exp_so3(f) - half_turn_z).norm() < 1e-9);

    // Axis with a negative leading component must be flipped.
    const Vec3 axis = Vec3(-1, 1, 0.5).normalized();
    const Mat3 c = exp_so3(M_PI * axis);
    const Vec3 g = log_so3(c);
    CHECK(g.x() > 0.0);
    CHECK((exp_so3(g) - c).norm() < 1e-9);
}

TEST_CASE("spd_sqrt principal square root") {
    CHECK((spd_sqrt(Eigen::MatrixXd::Identity(3, 3)) - Eigen::MatrixXd::Identity(3, 3)).norm() <
          1e-15);
    CHECK((spd_sqrt(Eigen::MatrixXd(Vec3(4, 9, 16).asDiagonal())) -
           Eigen::MatrixXd(Vec3(2, 3, 4).asDiagonal()))
              .norm() < 1e-12);

    std::mt19937_64 rng(105);
    for (int k = 0; k < 100; ++k) {
        const int n = (k % 2 == 0) ? 3 : 6;
        const Eigen::MatrixXd m = random_spd(rng, n, 1e-6);
        const Eigen::MatrixXd root = spd_sqrt(m);
        CHECK(is_spd(root));
        CHECK((root * root - m).norm() < 1e-10 * m.norm());
    }

    for (const double alpha : {1e-6, 1.0, 1e6}) {
        const Eigen::MatrixXd m = alpha * Eigen::MatrixXd::Identity(3, 3);
        CHECK((spd_sqrt(m) - std::sqrt(alpha) * Eigen::MatrixXd::Identity(3, 3)).norm() <
              1e-12 * std::sqrt(alpha));
    }
}

TEST_CASE("spd_sqrt rejects near-singular or non-SPD input") {
    Eigen::MatrixXd m = Eigen::Vector3d(1.0, 1.0, 1e-16).asDiagonal();
    CHECK_THROWS_AS(spd_sqrt(m), Error);
    CHECK_THROWS_AS(spd_sqrt(Eigen::MatrixXd(hat(Vec3(1, 2, 3)))), Error);
}

TEST_CASE("qr_positive factors and conventions") {
    const QrFactors id = qr_positive(Mat3::Identity());
    CHECK((id.q - Mat3::Identity()).norm() == 0.0);
    CHECK((id.r - Mat3::Identity()).norm() == 0.0);

    const Mat3 diag = Vec3(2, 3, 4).asDiagonal();
    const QrFactors d = qr_positive(diag);
    CHECK((d.q - Mat3::Identity()).norm() < 1e-15);
    CHECK((d.r - diag).norm() < 1e-15);

    std::mt19937_64 rng(106);
    for (int k = 0; k < 200; ++k) {
        Mat3 l;
        do {
            for (int i = 0; i < 9; ++i) l(i / 3, i % 3) = normal01(rng);
        } while (std::abs(l.determinant()) < 1e-3);
        const QrFactors qr = qr_positive(l);
        CHECK((qr.q.transpose() * qr.q - Mat3::Identity()).norm() < 1e-12);
        CHECK(qr.q.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((l - qr.q * qr.r).norm() < 1e-12 * std::max(1.0, l.norm()));
        // R stays upper triangular; its diagonal is positive except possibly
        // the last entry when det(L) < 0 (absorbed by the SO(3) correction).
        CHECK(std::abs(qr.r(1, 0)) < 1e-14);
        CHECK(std::abs(qr.r(2, 0)) < 1e-14);
        CHECK(std::abs(qr.r(2, 1)) < 1e-14);
        CHECK(qr.r(0, 0) > 0.0);
        CHECK(qr.r(1, 1) > 0.0);
        if (l.determinant() > 0.0) CHECK(qr.r(2, 2) > 0.0);
    }
}

TEST_CASE("qr_positive is deterministic") {
    std::mt19937_64 rng(107);
    Mat3 l;
    for (int i = 0; i < 9; ++i) l(i / 3, i % 3) = normal01(rng);
    const QrFactors first = qr_positive(l);
    const QrFactors second = qr_positive(l);
    CHECK((first.q - second.q).cwiseAbs().maxCoeff() == 0.0);
    CHECK((first.r - second.r).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("qr_positive rejects singular input") {
    Mat3 singular = Mat3::Zero();
    singular(0, 0) = 1.0;
    singular(1, 1) = 1.0;
    CHECK_THROWS_AS(qr_positive(singular), DegenerateGeometryError);
}

namespace {

// Characteristic-polynomial oracle: real positive roots of det(AB - t I)
// located by sign changes on a grid and refined by bisection. Assumes the
// roots are distinct (true almost surely for random SPD pairs).
std::vector<double> product_eigenvalues_oracle(const Eigen::MatrixXd& a,
                                               const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd m = a * b;
    const int n = static_cast<int>(m.rows());
    const auto poly = [&](double t) {
        return (m - t * Eigen::MatrixXd::Identity(n, n)).determinant();
    };
    const double bound = 1.05 * m.cwiseAbs().rowwise().sum().maxCoeff();

    std::vector<double> roots;
    const int grid = 400000;
    double prev_t = 0.0;
    double prev_p = poly(prev_t);
    for (int i = 1; i <= grid; ++i) {
        const double t = bound * i / grid;
        const double p = poly(t);
        if ((prev_p < 0.0) != (p < 0.0)) {
            double lo = prev_t, hi = t;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((poly(lo) < 0.0) != (poly(mid) < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_p = p;
    }
    return roots;
}

}  // namespace

TEST_CASE("diagonalize_spd_product simple cases") {
    const auto id = diagonalize_spd_product(Eigen::MatrixXd::Identity(3, 3),
                                            Eigen::MatrixXd::Identity(3, 3));
    CHECK((id.eigenvalues - Eigen::VectorXd::Ones(3)).norm() < 1e-14);

    Eigen::MatrixXd a = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    Eigen::MatrixXd b = Eigen::Vector2d(1.0, 3.0).asDiagonal();
    const auto res = diagonalize_spd_product(a, b);
    Eigen::VectorXd lam = res.eigenvalues;
    std::sort(lam.data(), lam.data() + lam.size());
    CHECK(lam[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lam[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("diagonalize_spd_product reconstructs the product") {
    std::mt19937_64 rng(108);
    for (int k = 0; k < 200; ++k) {
        const Eigen::MatrixXd a = random_spd(rng, 6, 1e-2);
        const Eigen::MatrixXd b = random_spd(rng, 6, 1e-2);
        const auto res = diagonalize_spd_product(a, b);
        CHECK(res.eigenvalues.minCoeff() > 0.0);
        const Eigen::MatrixXd rebuilt = res.v.inverse() * res.eigenvalues.asDiagonal() * res.v;
        CHECK((a * b - rebuilt).norm() < 1e-9 * (a * b).norm());
    }
}

TEST_CASE("diagonalize_spd_product eigenvalues match the characteristic polynomial") {
    std::mt19937_64 rng(109);
    for (int k = 0; k < 3; ++k) {
        const Eigen::MatrixXd a = random_spd(rng, 6, 1e-1);
        const Eigen::MatrixXd b = random_spd(rng, 6, 1e-1);
        const auto res = diagonalize_spd_product(a, b);

        const std::vector<double> roots = product_eigenvalues_oracle(a, b);
        REQUIRE(roots.size() == 6);
        Eigen::VectorXd lam = res.eigenvalues;
        std::sort(lam.data(), lam.data() + lam.size());
        for (int i = 0; i < 6; ++i) {
            CHECK(std::abs(lam[i] - roots[i]) < 1e-8 * std::max(1.0, roots[i]));
        }
    }
}
