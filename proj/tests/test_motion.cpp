#include <doctest.h>

#include <cmath>
#include <random>

#include "atraj/motion.hpp"
#include "test_helpers.hpp"

using namespace atraj;

TEST_CASE("global_time") {
    CHECK(global_time(0, {10.0, 0.0}) == 0.0);
    // 50 frames at 10 Hz span the 5 s observation window.
    CHECK(global_time(50, {10.0, 0.0}) == doctest::Approx(5.0).epsilon(1e-15));
    // A 40-frame offset at 25 Hz is 1.6 s.
    CHECK(global_time(10, {25.0, 1.6}) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(global_time(1, {0.0, 0.0}), InvalidInputError);
    CHECK_THROWS_AS(global_time(-1, {10.0, 0.0}), InvalidInputError);

    // Affine in the frame index: consecutive frames are 1/alpha apart.
    const TimeModel tm{7.3, 0.42};
    for (int f = 0; f < 200; ++f) {
        const double dt = global_time(f + 1, tm) - global_time(f, tm);
        CHECK(dt == doctest::Approx(1.0 / tm.alpha).epsilon(1e-12));
    }
}

namespace {

double naive_eval(const Eigen::VectorXd& coeffs, double t) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        v += coeffs[k] * std::pow(t, static_cast<double>(k));
    }
    return v;
}

}  // namespace

TEST_CASE("eval_trajectory") {
    PolyTrajectory constant = PolyTrajectory::zero(0);
    constant.coeffs_x << 1.0;
    constant.coeffs_y << 2.0;
    constant.coeffs_z << 3.0;
    CHECK(eval_trajectory(constant, -4.2).isApprox(Vec3(1, 2, 3), 1e-15));
    CHECK(eval_trajectory(constant, 17.0).isApprox(Vec3(1, 2, 3), 1e-15));

    PolyTrajectory line = PolyTrajectory::zero(1);
    line.coeffs_x << 1.0, 2.0;
    CHECK(eval_trajectory(line, 2.0).x() == doctest::Approx(5.0));

    std::mt19937 rng(61);
    for (int i = 0; i < 50; ++i) {
        const int order = static_cast<int>(rng() % 4);
        const PolyTrajectory traj = testing::random_trajectory(rng, order, 5.0, 2.0);
        for (double t = -3.0; t <= 3.0; t += 0.5) {
            const Vec3 v = eval_trajectory(traj, t);
            CHECK(v.x() == doctest::Approx(naive_eval(traj.coeffs_x, t)).epsilon(1e-12));
            CHECK(v.y() == doctest::Approx(naive_eval(traj.coeffs_y, t)).epsilon(1e-12));
            CHECK(v.z() == doctest::Approx(naive_eval(traj.coeffs_z, t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("trajectory_derivative") {
    PolyTrajectory line = PolyTrajectory::zero(1);
    line.coeffs_x << 1.0, 2.0;
    CHECK(trajectory_derivative(line, 0.0, 1).x() == doctest::Approx(2.0));
    CHECK(trajectory_derivative(line, 9.0, 1).x() == doctest::Approx(2.0));
    CHECK(trajectory_derivative(line, 1.0, 2).norm() == 0.0);

    PolyTrajectory parabola = PolyTrajectory::zero(2);
    parabola.coeffs_x << 0.0, 0.0, 1.0;
    CHECK(trajectory_derivative(parabola, -5.0, 2).x() == doctest::Approx(2.0));

    CHECK_THROWS_AS(trajectory_derivative(line, 0.0, 0), InvalidInputError);

    std::mt19937 rng(71);
    for (int i = 0; i < 30; ++i) {
        const PolyTrajectory traj = testing::random_trajectory(rng, 3, 5.0, 2.0);
        const double h = 1e-5;
        for (double t = -2.0; t <= 2.0; t += 0.4) {
            const Vec3 fd =
                (eval_trajectory(traj, t + h) - eval_trajectory(traj, t - h)) / (2.0 * h);
            const Vec3 an = trajectory_derivative(traj, t, 1);
            CHECK((an - fd).norm() < 1e-6 * std::max(1.0, an.norm()));
        }
    }
}

TEST_CASE("linearity in coefficients") {
    std::mt19937 rng(83);
    const PolyTrajectory a = testing::random_trajectory(rng, 3, 4.0, 1.5);
    const PolyTrajectory b = testing::random_trajectory(rng, 3, 4.0, 1.5);
    PolyTrajectory sum = PolyTrajectory::zero(3);
    sum.coeffs_x = a.coeffs_x + b.coeffs_x;
    sum.coeffs_y = a.coeffs_y + b.coeffs_y;
    sum.coeffs_z = a.coeffs_z + b.coeffs_z;
    for (double t = -2.0; t <= 2.0; t += 0.25) {
        CHECK((eval_trajectory(sum, t) - eval_trajectory(a, t) - eval_trajectory(b, t)).norm() <
              1e-12);
    }
}

TEST_CASE("time shift re-expansion leaves evaluations unchanged") {
    std::mt19937 rng(97);
    for (int i = 0; i < 30; ++i) {
        const int order = static_cast<int>(rng() % 5);
        const PolyTrajectory traj = testing::random_trajectory(rng, order, 10.0, 3.0);
        const double shift = testing::random_vec3(rng, 2.0).x();
        const PolyTrajectory shifted = traj.shifted_time(shift);
        for (double t = -3.0; t <= 3.0; t += 0.3) {
            CHECK((eval_trajectory(shifted, t) - eval_trajectory(traj, t + shift)).norm() <
                  1e-9);
        }
        // Inverse shift restores the original coefficients.
        const PolyTrajectory back = shifted.shifted_time(-shift);
        CHECK(testing::max_relative_coeff_error(back, traj) < 1e-9);
    }
}

TEST_CASE("trajectory validation") {
    PolyTrajectory bad = PolyTrajectory::zero(2);
    bad.coeffs_y.resize(2);
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);

    PolyTrajectory too_high = PolyTrajectory::zero(4);
    too_high.order = 5;
    CHECK_THROWS_AS(too_high.validate(), InvalidInputError);
}
