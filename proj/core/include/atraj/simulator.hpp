#pragma once

#include <cstdint>
#include <vector>

#include "atraj/estimators.hpp"

namespace atraj {

/// Camera motion over its observation window, either a linear polyline
/// through the waypoints or a smooth quadratic curve fitted through them.
struct CameraPathSpec {
    enum class Kind { Polyline, Quadratic };
    Kind kind = Kind::Quadratic;
    std::vector<Vec3> waypoints;  // meters; one waypoint means a static camera
    Vec3 aim = Vec3::Zero();      // look-at point defining the true rotation

    /// Position at normalized window parameter s in [0, 1].
    Vec3 position(double s) const;
};

/// Ground-truth description of a synthetic multi-camera scene.
struct SceneConfig {
    std::vector<int> frames_per_camera;
    double frame_rate_hz = 10.0;           // true rate, shared by all cameras
    std::vector<double> offsets_frames;    // true per-camera offset, in frames
    std::vector<CameraPathSpec> camera_paths;
    std::vector<PinholeCamera> intrinsics; // per camera
    std::vector<PolyTrajectory> targets;   // true motions, global time

    int num_cameras() const { return static_cast<int>(frames_per_camera.size()); }
    void validate() const;

    /// True clock of one camera: beta = offset_frames / rate.
    TimeModel true_time_model(int camera) const;
};

/// Gaussian measurement corruption. Sigmas of zero leave the corresponding
/// channel bit-exact. Rotation noise draws a uniform axis and a normal
/// angle (degrees) and is composed on the left of the true rotation;
/// position noise is added to the optical centers. Systematic draws happen
/// once per camera, random draws once per frame.
struct NoiseConfig {
    double pixel_sigma = 0.0;                // pixels
    double rotation_systematic_sigma = 0.0;  // degrees
    double rotation_random_sigma = 0.0;      // degrees
    double position_systematic_sigma = 0.0;  // meters
    double position_random_sigma = 0.0;      // meters
    std::uint64_t seed = 0;

    void validate() const;
};

struct GroundTruth {
    std::map<int, PolyTrajectory> trajectories;   // target id -> true motion
    std::vector<TimeModel> time_models;           // per camera index
    std::vector<std::vector<FramePose>> poses;    // true poses per camera
};

struct SimulatedScene {
    ObservationSet observations;  // exact projections; poses are the true poses
    GroundTruth truth;
};

/// Builds the noise-free observation set: every target projected by every
/// camera at that camera's true frame times. Throws ConfigError (naming the
/// camera and frame) if any target falls behind a camera.
SimulatedScene synthesize_scene(const SceneConfig& cfg);

/// Injects pixel, rotation, and position noise; deterministic given
/// (observations, config). Ground truth is untouched by construction.
ObservationSet apply_noise(const ObservationSet& obs, const NoiseConfig& noise);

struct LocalizationError {
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    double sigma_z = 0.0;
    double sigma_3d = 0.0;  // mean Euclidean deviation
};

/// Mean absolute per-axis and mean Euclidean deviation between two
/// trajectories sampled at the given times.
LocalizationError localization_error(const PolyTrajectory& est, const PolyTrajectory& truth,
                                     const std::vector<double>& times);

/// True global capture times of every frame of every camera, sorted.
std::vector<double> true_frame_times(const SceneConfig& cfg);

}  // namespace atraj
