#pragma once

#include <optional>
#include <string>

#include "atraj/estimators.hpp"
#include "atraj/simulator.hpp"

namespace atraj {

/// A problem instance as stored on disk, with optional ground truth
/// (trajectories and true time models) carried alongside.
struct Dataset {
    ObservationSet observations;
    std::optional<GroundTruth> ground_truth;
};

/// Reads a dataset JSON document:
///   {"cameras":[{"id","intrinsics":{fx,fy,cx,cy,skew},"nominal_fps",
///                "poses":[{"frame","q":[w,x,y,z],"t":[x,y,z]}]}],
///    "observations":[{"cam","frame","target","px":[u,v]}],
///    "ground_truth": {...}}        (optional)
/// Units are meters, seconds, and pixels; quaternions are w-first. Camera
/// ids are mapped to indices in file order.
Dataset load_dataset(const std::string& path);

void save_dataset(const std::string& path, const ObservationSet& obs,
                  const GroundTruth* truth = nullptr);

/// Scene plus optional noise description accepted by `simulate`.
struct SimulationConfig {
    SceneConfig scene;
    std::optional<NoiseConfig> noise;
};

/// Accepts either a bare scene-config object or {"scene":..., "noise":...}.
SimulationConfig load_simulation_config(const std::string& path);

SceneConfig parse_scene_config(const std::string& json_text);
NoiseConfig parse_noise_config(const std::string& json_text);

SceneConfig load_scene_config(const std::string& path);
NoiseConfig load_noise_config(const std::string& path);

struct StoredResult {
    std::string method;
    ReconstructionResult result;
};

void save_result(const std::string& path, const std::string& method,
                 const ReconstructionResult& result);
StoredResult load_result(const std::string& path);

/// Fixed-precision decimal with 9 significant digits; every numeric value
/// written by the library goes through this.
std::string format_number(double value);

/// Rounds a value to what format_number would print (for JSON storage).
double round_to_output_precision(double value);

}  // namespace atraj
