#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "atraj/nlls.hpp"
#include "test_helpers.hpp"

using namespace atraj;

namespace {

NllsProblem linear_problem(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& x0) {
    NllsProblem problem;
    problem.blocks.push_back(ParameterBlock::euclidean(x0));
    problem.residual = [a, b](const std::vector<ParameterBlock>& blocks) {
        return Eigen::VectorXd(a * blocks[0].values - b);
    };
    problem.jacobian = [a](const std::vector<ParameterBlock>&) { return a; };
    return problem;
}

}  // namespace

TEST_CASE("LM solves a linear problem like Gauss-Newton") {
    std::mt19937 rng(163);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(8, 3);
    Eigen::VectorXd b(8);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 3; ++c) {
            a(r, c) = normal(rng);
        }
        b[r] = normal(rng);
    }
    a.diagonal().array() += 3.0;  // keep it well conditioned

    NllsProblem problem = linear_problem(a, b, Eigen::VectorXd::Zero(3));
    SolveOptions options;
    options.initial_damping = 1e-9;  // negligible damping: the step is the Newton step
    const SolveReport report = solve_nlls(problem, options);

    const Eigen::VectorXd qr = a.colPivHouseholderQr().solve(b);
    CHECK(report.converged);
    CHECK(report.iterations <= 2);
    CHECK((problem.blocks[0].values - qr).norm() < 1e-10);
    CHECK(report.final_cost <= report.initial_cost);
}

TEST_CASE("LM solves Rosenbrock") {
    NllsProblem problem;
    problem.blocks.push_back(ParameterBlock::euclidean({-1.2, 1.0}));
    problem.residual = [](const std::vector<ParameterBlock>& blocks) {
        const double x = blocks[0].values[0];
        const double y = blocks[0].values[1];
        Eigen::VectorXd r(2);
        r << 1.0 - x, 10.0 * (y - x * x);
        return r;
    };
    problem.jacobian = [](const std::vector<ParameterBlock>& blocks) {
        const double x = blocks[0].values[0];
        Eigen::MatrixXd j(2, 2);
        j << -1.0, 0.0, -20.0 * x, 10.0;
        return j;
    };
    const SolveReport report = solve_nlls(problem);
    CHECK(report.converged);
    CHECK(problem.blocks[0].values[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(problem.blocks[0].values[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("frozen blocks never move") {
    std::mt19937 rng(167);
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(6, 2);
    Eigen::VectorXd b = Eigen::VectorXd::Random(6);

    NllsProblem problem;
    problem.blocks.push_back(ParameterBlock::euclidean({0.17, -0.3}, true));
    problem.blocks.push_back(ParameterBlock::euclidean(Eigen::VectorXd::Zero(2)));
    problem.residual = [a, b](const std::vector<ParameterBlock>& blocks) {
        return Eigen::VectorXd(a * (blocks[0].values + blocks[1].values) - b);
    };
    problem.jacobian = [a](const std::vector<ParameterBlock>&) {
        Eigen::MatrixXd j(6, 4);
        j << a, a;
        return j;
    };
    const Eigen::VectorXd frozen_before = problem.blocks[0].values;
    solve_nlls(problem);
    CHECK(problem.blocks[0].values[0] == frozen_before[0]);
    CHECK(problem.blocks[0].values[1] == frozen_before[1]);
    // The free block still reaches the optimum of the shifted problem.
    const Eigen::VectorXd qr = a.colPivHouseholderQr().solve(b) - frozen_before;
    CHECK((problem.blocks[1].values - qr).norm() < 1e-8);
}

TEST_CASE("numeric_jacobian equals the matrix of a linear residual") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(5, 3);
    NllsProblem problem = linear_problem(a, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Ones(3));
    CHECK((numeric_jacobian(problem) - a).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("quaternion tangent Jacobian at identity is -[v]x") {
    const Vec3 v{0.3, -1.1, 0.7};
    NllsProblem problem;
    problem.blocks.push_back(ParameterBlock::quaternion(UnitQuaternion::identity()));
    problem.residual = [v](const std::vector<ParameterBlock>& blocks) {
        return Eigen::VectorXd(quat_to_rotation(blocks[0].as_quaternion()) * v);
    };
    const Eigen::MatrixXd num = numeric_jacobian(problem);
    CHECK((num - (-skew(v))).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("quaternion block optimization stays on the unit sphere") {
    std::mt19937 rng(173);
    const UnitQuaternion target = testing::random_unit_quaternion(rng);
    const Mat3 r_target = quat_to_rotation(target);
    const std::vector<Vec3> anchors = {Vec3::UnitX(), Vec3::UnitY(), Vec3(0.3, 0.4, 1.0)};

    NllsProblem problem;
    problem.blocks.push_back(ParameterBlock::quaternion(UnitQuaternion::identity()));
    problem.residual = [&](const std::vector<ParameterBlock>& blocks) {
        const Mat3 r = quat_to_rotation(blocks[0].as_quaternion());
        Eigen::VectorXd out(9);
        for (size_t i = 0; i < anchors.size(); ++i) {
            out.segment<3>(3 * i) = r * anchors[i] - r_target * anchors[i];
        }
        return out;
    };
    problem.jacobian = [&](const std::vector<ParameterBlock>& blocks) {
        const Mat3 r = quat_to_rotation(blocks[0].as_quaternion());
        Eigen::MatrixXd j(9, 3);
        for (size_t i = 0; i < anchors.size(); ++i) {
            j.middleRows<3>(3 * i) = -skew(r * anchors[i]);
        }
        return j;
    };

    // Analytic left-perturbation Jacobian agrees with central differences.
    CHECK((problem.jacobian(problem.blocks) - numeric_jacobian(problem)).cwiseAbs().maxCoeff() <
          1e-6);

    const SolveReport report = solve_nlls(problem);
    CHECK(report.converged);
    const UnitQuaternion q = problem.blocks[0].as_quaternion();
    CHECK(std::abs(q.norm() - 1.0) < 1e-12);
    CHECK(q.geodesic_angle_to(target) < 1e-7);
}

TEST_CASE("huge damping steps along the negative gradient") {
    Eigen::MatrixXd a(4, 2);
    a << 2.0, 0.3, -0.4, 1.5, 0.7, 0.7, 1.1, -0.2;
    Eigen::VectorXd b(4);
    b << 1.0, -2.0, 0.5, 0.3;
    NllsProblem problem = linear_problem(a, b, Eigen::VectorXd::Zero(2));

    const Eigen::VectorXd r0 = problem.residual(problem.blocks);
    const Eigen::VectorXd gradient = a.transpose() * r0;

    SolveOptions options;
    options.initial_damping = 1e8;
    options.max_iterations = 1;
    solve_nlls(problem, options);
    const Eigen::VectorXd step = problem.blocks[0].values;
    const double cosine = -step.dot(gradient) / (step.norm() * gradient.norm());
    CHECK(cosine > 0.999);
}

TEST_CASE("invalid start is rejected") {
    NllsProblem problem;
    problem.blocks.push_back(ParameterBlock::euclidean({1.0}));
    problem.residual = [](const std::vector<ParameterBlock>&) {
        Eigen::VectorXd r(1);
        r[0] = std::numeric_limits<double>::quiet_NaN();
        return r;
    };
    problem.jacobian = [](const std::vector<ParameterBlock>&) {
        return Eigen::MatrixXd::Ones(1, 1);
    };
    CHECK_THROWS_AS(solve_nlls(problem), InvalidStartError);
}

TEST_CASE("a lying Jacobian at pathological scale stalls") {
    // The claimed Jacobian has the wrong sign, so every proposed step
    // increases the cost and damping climbs to its ceiling.
    NllsProblem problem;
    problem.blocks.push_back(ParameterBlock::euclidean({0.0}));
    problem.residual = [](const std::vector<ParameterBlock>& blocks) {
        Eigen::VectorXd r(1);
        r[0] = 1e20 * (blocks[0].values[0] - 1.0);
        return r;
    };
    problem.jacobian = [](const std::vector<ParameterBlock>&) {
        return Eigen::MatrixXd::Constant(1, 1, -1e20);
    };
    CHECK_THROWS_AS(solve_nlls(problem), SolverStalledError);
}

TEST_CASE("iteration cap reports non-convergence") {
    NllsProblem problem;
    problem.blocks.push_back(ParameterBlock::euclidean({-1.2, 1.0}));
    problem.residual = [](const std::vector<ParameterBlock>& blocks) {
        const double x = blocks[0].values[0];
        const double y = blocks[0].values[1];
        Eigen::VectorXd r(2);
        r << 1.0 - x, 10.0 * (y - x * x);
        return r;
    };
    problem.jacobian = [](const std::vector<ParameterBlock>& blocks) {
        const double x = blocks[0].values[0];
        Eigen::MatrixXd j(2, 2);
        j << -1.0, 0.0, -20.0 * x, 10.0;
        return j;
    };
    SolveOptions options;
    options.max_iterations = 1;
    const SolveReport report = solve_nlls(problem, options);
    CHECK_FALSE(report.converged);
    CHECK(report.termination_reason == TerminationReason::MaxIterations);
    CHECK(report.final_cost < report.initial_cost);
    CHECK(report.cost_monotone);
}
