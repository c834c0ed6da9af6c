#pragma once

#include <random>
#include <vector>

#include "atraj/simulator.hpp"

namespace atraj::testing {

inline UnitQuaternion random_unit_quaternion(std::mt19937& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    UnitQuaternion q{normal(rng), normal(rng), normal(rng), normal(rng)};
    return q.normalized();
}

inline Vec3 random_vec3(std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    return {normal(rng), normal(rng), normal(rng)};
}

inline Vec3 random_unit_vec3(std::mt19937& rng) {
    Vec3 v = random_vec3(rng);
    while (v.norm() < 1e-6) {
        v = random_vec3(rng);
    }
    return v.normalized();
}

inline PolyTrajectory random_trajectory(std::mt19937& rng, int order, double position_scale,
                                        double rate_scale) {
    std::normal_distribution<double> normal(0.0, 1.0);
    PolyTrajectory traj = PolyTrajectory::zero(order);
    for (int k = 0; k <= order; ++k) {
        const double scale = k == 0 ? position_scale : rate_scale / k;
        traj.coeffs_x[k] = normal(rng) * scale;
        traj.coeffs_y[k] = normal(rng) * scale;
        traj.coeffs_z[k] = normal(rng) * scale;
    }
    return traj;
}

/// Two cameras on smooth arcs at a few hundred meters standoff watching
/// targets near the origin; the second camera's true offset is given in
/// frames. Mirrors the simulated-experiment layout at unit-test scale.
inline SceneConfig two_camera_scene(int frames, double offset_frames,
                                    std::vector<PolyTrajectory> targets,
                                    double frame_rate = 10.0) {
    SceneConfig cfg;
    cfg.frames_per_camera = {frames, frames};
    cfg.frame_rate_hz = frame_rate;
    cfg.offsets_frames = {0.0, offset_frames};
    CameraPathSpec path0;
    path0.kind = CameraPathSpec::Kind::Quadratic;
    path0.waypoints = {{-420.0, -680.0, 240.0}, {0.0, -780.0, 330.0}, {420.0, -680.0, 240.0}};
    path0.aim = {0.0, 0.0, 55.0};
    CameraPathSpec path1;
    path1.kind = CameraPathSpec::Kind::Quadratic;
    path1.waypoints = {{620.0, -430.0, 200.0}, {740.0, -140.0, 280.0}, {790.0, 150.0, 210.0}};
    path1.aim = {0.0, 0.0, 55.0};
    cfg.camera_paths = {path0, path1};
    cfg.intrinsics = {{1500.0, 1500.0, 640.0, 360.0, 0.0}, {1500.0, 1500.0, 640.0, 360.0, 0.0}};
    cfg.targets = std::move(targets);
    return cfg;
}

inline PolyTrajectory line_target(Vec3 start = {-60.0, -18.0, 52.0},
                                  Vec3 velocity = {24.0, 6.0, 1.2}) {
    PolyTrajectory traj = PolyTrajectory::zero(1);
    traj.coeffs_x << start.x(), velocity.x();
    traj.coeffs_y << start.y(), velocity.y();
    traj.coeffs_z << start.z(), velocity.z();
    return traj;
}

inline std::vector<PolyTrajectory> four_line_targets() {
    return {line_target({-60.0, -18.0, 52.0}, {24.0, 6.0, 1.2}),
            line_target({-40.0, 26.0, 61.0}, {21.0, -5.0, 0.8}),
            line_target({8.0, -38.0, 44.0}, {23.0, 8.0, -0.5}),
            line_target({36.0, 12.0, 66.0}, {19.0, 4.0, 1.5})};
}

/// Worst entrywise |a - b| / max(1, |b|) over two equally sized matrices.
inline double max_entrywise_relative_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            worst = std::max(worst,
                             std::abs(a(r, c) - b(r, c)) / std::max(1.0, std::abs(b(r, c))));
        }
    }
    return worst;
}

inline double max_relative_coeff_error(const PolyTrajectory& est, const PolyTrajectory& truth) {
    double worst = 0.0;
    const double scale = std::max({1.0, truth.coeffs_x.lpNorm<Eigen::Infinity>(),
                                   truth.coeffs_y.lpNorm<Eigen::Infinity>(),
                                   truth.coeffs_z.lpNorm<Eigen::Infinity>()});
    for (int k = 0; k <= truth.order; ++k) {
        worst = std::max(worst, std::abs(est.coeffs_x[k] - truth.coeffs_x[k]) / scale);
        worst = std::max(worst, std::abs(est.coeffs_y[k] - truth.coeffs_y[k]) / scale);
        worst = std::max(worst, std::abs(est.coeffs_z[k] - truth.coeffs_z[k]) / scale);
    }
    return worst;
}

}  // namespace atraj::testing
