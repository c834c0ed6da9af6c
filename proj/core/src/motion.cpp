#include "atraj/motion.hpp"

#include <cmath>

namespace atraj {

double global_time(int frame, const TimeModel& tm) {
    tm.validate();
    if (frame < 0) {
        throw InvalidInputError("frame index must be non-negative");
    }
    return static_cast<double>(frame) / tm.alpha + tm.beta;
}

PolyTrajectory PolyTrajectory::zero(int order) {
    PolyTrajectory t;
    t.order = order;
    t.coeffs_x = Eigen::VectorXd::Zero(order + 1);
    t.coeffs_y = Eigen::VectorXd::Zero(order + 1);
    t.coeffs_z = Eigen::VectorXd::Zero(order + 1);
    return t;
}

void PolyTrajectory::validate() const {
    if (order < 0 || order > kMaxTrajectoryOrder) {
        throw InvalidInputError("trajectory order out of supported range [0, " +
                                std::to_string(kMaxTrajectoryOrder) + "]");
    }
    if (coeffs_x.size() != order + 1 || coeffs_y.size() != order + 1 ||
        coeffs_z.size() != order + 1) {
        throw InvalidInputError("coefficient arrays must have length order + 1");
    }
}

namespace {

double horner(const Eigen::VectorXd& c, double t) {
    double v = 0.0;
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) {
        v = v * t + c[k];
    }
    return v;
}

// d-th derivative coefficients evaluated by Horner after scaling by the
// falling factorial k (k-1) ... (k-d+1).
double horner_derivative(const Eigen::VectorXd& c, double t, int d) {
    const int order = static_cast<int>(c.size()) - 1;
    if (d > order) {
        return 0.0;
    }
    double v = 0.0;
    for (int k = order; k >= d; --k) {
        double scale = 1.0;
        for (int j = 0; j < d; ++j) {
            scale *= static_cast<double>(k - j);
        }
        v = v * t + scale * c[k];
    }
    // The loop above evaluates sum_k scale_k c_k t^(k-d) with Horner in t.
    return v;
}

Eigen::VectorXd shift_coeffs(const Eigen::VectorXd& c, double s) {
    // q_j = sum_{k >= j} c_k C(k, j) s^(k - j), so that q(t) = p(t + s).
    const int order = static_cast<int>(c.size()) - 1;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(order + 1);
    for (int k = 0; k <= order; ++k) {
        double binom = 1.0;  // C(k, j), walked down from j = k
        for (int j = k; j >= 0; --j) {
            q[j] += c[k] * binom * std::pow(s, k - j);
            binom = binom * static_cast<double>(j) / static_cast<double>(k - j + 1);
        }
    }
    return q;
}

}  // namespace

PolyTrajectory PolyTrajectory::shifted_time(double shift) const {
    validate();
    PolyTrajectory out;
    out.order = order;
    out.coeffs_x = shift_coeffs(coeffs_x, shift);
    out.coeffs_y = shift_coeffs(coeffs_y, shift);
    out.coeffs_z = shift_coeffs(coeffs_z, shift);
    return out;
}

Vec3 eval_trajectory(const PolyTrajectory& traj, double t) {
    return {horner(traj.coeffs_x, t), horner(traj.coeffs_y, t), horner(traj.coeffs_z, t)};
}

Vec3 trajectory_derivative(const PolyTrajectory& traj, double t, int d) {
    if (d < 1) {
        throw InvalidInputError("derivative order must be >= 1");
    }
    return {horner_derivative(traj.coeffs_x, t, d),
            horner_derivative(traj.coeffs_y, t, d),
            horner_derivative(traj.coeffs_z, t, d)};
}

}  // namespace atraj
