#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "atraj/intersection.hpp"
#include "atraj/nlls.hpp"

namespace atraj {

/// One camera's calibration, nominal clock, and measured per-frame poses.
struct CameraTrack {
    int id = 0;
    PinholeCamera intrinsics;
    TimeModel nominal_time;
    std::vector<FramePose> poses;
};

/// One pixel measurement. `camera` indexes into ObservationSet::cameras.
struct Observation {
    int camera = 0;
    int frame = 0;
    int target = 0;
    Vec2 pixel = Vec2::Zero();
};

/// A full problem instance: cameras with poses plus tagged pixel tracks.
struct ObservationSet {
    std::vector<CameraTrack> cameras;
    std::vector<Observation> observations;

    void validate() const;

    /// Sorted unique target ids appearing in the observations.
    std::vector<int> target_ids() const;

    std::vector<int> frames_per_camera() const;
};

/// Index of the camera whose time model is pinned to its nominal values.
/// Freezing one camera's clock removes the global affine time ambiguity
/// that polynomial re-expansion would otherwise absorb.
inline constexpr int kGaugeCamera = 0;

struct ReconstructionResult {
    std::map<int, PolyTrajectory> trajectories;            // target id -> trajectory
    std::map<int, TimeModel> time_models;                  // camera id -> estimated clock
    std::optional<std::map<int, std::vector<UnitQuaternion>>> rotations;  // camera id -> per frame
    SolveReport report;
};

/// Layout metadata for a joint reconstruction problem built over an
/// observation set. Exposed so tests can probe residuals and Jacobians of
/// the exact systems the estimators solve.
struct JointProblem {
    NllsProblem problem;
    double time_origin = 0.0;            // polynomial basis is centered here
    std::vector<int> target_ids;         // slot -> target id
    std::vector<int> orders;             // slot -> polynomial order
    std::vector<int> coeff_block;        // slot -> block index
    std::vector<int> alpha_block;        // camera index -> block index
    std::vector<int> beta_block;         // camera index -> block index
    std::map<std::pair<int, int>, int> rotation_block;  // (camera index, frame) -> block
    double rotation_prior_weight = 0.0;
};

/// Joint residual over target motion coefficients and per-camera clocks,
/// with rotations fixed at their measured values.
JointProblem make_time_motion_problem(const ObservationSet& obs, const std::vector<int>& orders,
                                      bool optimize_fps);

/// As above but with per-frame camera rotations as additional unknowns
/// (one unit-quaternion block per observed frame). A positive
/// rotation_prior_weight appends tangent-space deviation residuals pulling
/// each rotation toward its measured value.
JointProblem make_rotation_time_motion_problem(const ObservationSet& obs,
                                               const std::vector<int>& orders, bool optimize_fps,
                                               double rotation_prior_weight);

/// Per-target linear trajectory intersection assuming the nominal frame
/// rates and zero offsets (cameras treated as synchronized).
ReconstructionResult reconstruct_multi_ti(const ObservationSet& obs, int order,
                                          const IntersectionOptions& iopts = {});

struct LiOptions {
    int max_outer_iterations = 20;
    double tol = 1e-8;  // offset change convergence threshold, seconds
    IntersectionOptions intersection;
};

/// Iterative baseline: alternates the known-time linear fit with a
/// per-camera offset solve. The offset step assigns every observation the
/// time at which the current trajectory passes closest to its ray
/// (bracketed one-dimensional Newton per observation) and regresses the
/// shared offset from the assignments. Frame rates stay at their nominal
/// values.
ReconstructionResult reconstruct_li(const ObservationSet& obs, int order,
                                    const LiOptions& lopts = {});

/// Joint bundle adjustment over motion coefficients and camera clocks
/// (offsets always, frame rates when optimize_fps), initialized from the
/// Multi-TI fit. Rotations stay fixed at their measured values.
ReconstructionResult reconstruct_algorithm1(const ObservationSet& obs, int order,
                                            bool optimize_fps = false,
                                            const SolveOptions& options = {});

/// Joint bundle adjustment over motion coefficients, camera clocks, and
/// per-frame camera rotations. Requires at least two targets; initialized
/// from the Algorithm 1 solution and the measured rotations.
ReconstructionResult reconstruct_algorithm2(const ObservationSet& obs,
                                            const std::vector<int>& orders,
                                            bool optimize_fps = false,
                                            double rotation_prior_weight = 0.0,
                                            const SolveOptions& options = {});

}  // namespace atraj
