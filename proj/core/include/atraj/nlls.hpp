#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "atraj/geometry.hpp"

namespace atraj {

enum class BlockKind { Euclidean, UnitQuaternion };

/// One optimization variable group. Euclidean blocks step additively;
/// unit-quaternion blocks hold 4 values but step through a 3-parameter
/// tangent perturbation (exponential map, left-composed) and are
/// renormalized after every update.
struct ParameterBlock {
    BlockKind kind = BlockKind::Euclidean;
    Eigen::VectorXd values;
    bool frozen = false;

    static ParameterBlock euclidean(const Eigen::VectorXd& v, bool frozen = false);
    static ParameterBlock euclidean(std::initializer_list<double> v, bool frozen = false);
    static ParameterBlock quaternion(const UnitQuaternion& q, bool frozen = false);

    int tangent_size() const {
        return kind == BlockKind::UnitQuaternion ? 3 : static_cast<int>(values.size());
    }
    UnitQuaternion as_quaternion() const;
};

/// Residual problem over a list of parameter blocks. The Jacobian callback
/// is analytic and spans the tangent space of every block (frozen included,
/// columns in block order); the solver masks frozen columns itself.
struct NllsProblem {
    std::vector<ParameterBlock> blocks;
    std::function<Eigen::VectorXd(const std::vector<ParameterBlock>&)> residual;
    std::function<Eigen::MatrixXd(const std::vector<ParameterBlock>&)> jacobian;

    int tangent_size() const;
};

struct SolveOptions {
    int max_iterations = 100;
    double initial_damping = 1e-3;
    double damping_up = 10.0;
    double damping_down = 0.1;
    double gradient_tol = 1e-10;
    double step_tol = 1e-12;
    double cost_tol = 1e-12;
    double max_damping = 1e32;
};

enum class TerminationReason { GradientTol, StepTol, CostTol, MaxIterations };

std::string to_string(TerminationReason reason);

struct SolveReport {
    bool converged = false;
    int iterations = 0;           // accepted steps
    double initial_cost = 0.0;    // 0.5 * ||r||^2
    double final_cost = 0.0;
    TerminationReason termination_reason = TerminationReason::MaxIterations;
    bool cost_monotone = true;    // accepted-cost sequence non-increasing
};

/// Damped (Levenberg-Marquardt) least squares over the problem's blocks.
/// Updates problem.blocks in place. Damping is added to the normal-equation
/// diagonal and scaled up/down multiplicatively on reject/accept.
/// Throws InvalidStartError when residual or Jacobian is non-finite at the
/// starting point and SolverStalledError when damping exceeds max_damping.
SolveReport solve_nlls(NllsProblem& problem, const SolveOptions& options = {});

/// Central-difference Jacobian across every block's tangent space. Test
/// oracle for the analytic Jacobians; not used by the solver.
Eigen::MatrixXd numeric_jacobian(const NllsProblem& problem, double step = 1e-6);

/// Applies a full tangent-space step (one segment per block, frozen blocks
/// included) to a block vector.
void apply_tangent_step(std::vector<ParameterBlock>& blocks, const Eigen::VectorXd& delta);

}  // namespace atraj
