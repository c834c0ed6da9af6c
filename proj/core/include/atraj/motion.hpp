#pragma once

#include <Eigen/Core>

#include "atraj/errors.hpp"
#include "atraj/geometry.hpp"

namespace atraj {

/// Maps a frame index to global time: t = f / alpha + beta.
struct TimeModel {
    double alpha = 1.0;  // frame rate, frames per second
    double beta = 0.0;   // time offset, seconds

    void validate() const {
        if (!(alpha > 0.0)) {
            throw InvalidInputError("frame rate must be positive");
        }
    }
};

/// Global capture time of a frame under a time model.
double global_time(int frame, const TimeModel& tm);

/// Maximum supported polynomial order. Orders above this overfit the short
/// observation windows this library targets.
inline constexpr int kMaxTrajectoryOrder = 4;

/// Degree-K temporal polynomial per axis; coefficient k carries units of
/// meters / second^k.
struct PolyTrajectory {
    int order = 0;
    Eigen::VectorXd coeffs_x;  // length order + 1
    Eigen::VectorXd coeffs_y;
    Eigen::VectorXd coeffs_z;

    static PolyTrajectory zero(int order);

    void validate() const;

    /// Re-expresses the same curve in a shifted time variable:
    /// result(t) == this(t + shift) for all t.
    PolyTrajectory shifted_time(double shift) const;
};

/// Evaluates the trajectory at time t (Horner's scheme per axis).
Vec3 eval_trajectory(const PolyTrajectory& traj, double t);

/// Analytic d-th time derivative at t; zero vector when d exceeds the order.
Vec3 trajectory_derivative(const PolyTrajectory& traj, double t, int d);

}  // namespace atraj
