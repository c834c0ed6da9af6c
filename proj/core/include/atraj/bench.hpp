#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atraj/simulator.hpp"

namespace atraj {

/// Monte Carlo experiment description: a scene, a noise model, the
/// estimators to compare, and a sweep over the non-gauge cameras' true
/// offsets. Trial t draws its noise from seed + t, so a cell can be
/// reproduced in isolation and all estimators within one trial see the
/// same noisy data.
struct BenchSpec {
    SceneConfig scene;
    NoiseConfig noise;
    std::vector<std::string> estimators;       // of {multi-ti, li, alg1, alg2}
    std::vector<double> offset_sweep_frames;   // applied to every non-gauge camera
    int trials = 1;
    std::vector<int> orders;                   // empty: use the scene targets' orders
    bool optimize_fps = false;
    std::optional<double> nominal_fps_override;  // non-gauge cameras' nominal rate
    double rotation_prior_weight = 0.0;
    std::uint64_t seed = 0;
    int metric_target = 0;                     // target whose error is reported
    std::vector<std::string> emit = {"offset_curve", "error_curve"};

    void validate() const;
    std::vector<int> resolved_orders() const;
};

struct BenchRow {
    std::string estimator;
    double offset_frames = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;       // derived seed used for this trial's noise
    std::string status;           // "ok" or "error:<kind>"
    bool converged = false;
    bool cost_monotone = true;
    double sigma3d_m = 0.0;
    double offset_err_s = 0.0;    // mean |beta_est - beta_true| over non-gauge cameras
    double fps_recovered = 0.0;   // first non-gauge camera's estimated rate
    double solve_seconds = 0.0;   // wall clock around the estimator call only

    std::optional<PolyTrajectory> metric_trajectory;  // estimate, for overlays
};

/// Per (estimator, offset) aggregate; recomputable from the rows.
struct BenchCell {
    std::string estimator;
    double offset_frames = 0.0;
    int trials = 0;
    int failures = 0;
    bool flagged = false;  // more than 10% of trials failed
    double mean_err_m = 0.0;
    double std_err_m = 0.0;
    double mean_offset_err_s = 0.0;
    double mean_fps_recovered = 0.0;
    double mean_solve_seconds = 0.0;
};

struct BenchResult {
    BenchSpec spec;
    std::vector<BenchRow> rows;    // sorted by (estimator, offset, trial)
    std::vector<BenchCell> cells;

    const BenchCell& cell(const std::string& estimator, double offset_frames) const;
};

/// Runs the full sweep. Estimator failures become "error:..." rows and the
/// run continues; a cell with more than 10% failures is flagged. Cells are
/// distributed over `parallel` worker threads; output is deterministic
/// regardless of scheduling (timing columns aside).
BenchResult run_monte_carlo(const BenchSpec& spec, int parallel = 1);

/// Reads a bench spec document. "scene" and "noise" may be inline objects
/// or path strings resolved relative to the spec file.
BenchSpec load_bench_spec(const std::string& path);

/// Recomputes the per-cell aggregates from raw rows.
std::vector<BenchCell> aggregate_cells(const std::vector<BenchRow>& rows);

enum class PlotKind { OffsetCurve, ErrorCurve, TrajectoryOverlay };

/// Parses one of "offset_curve", "error_curve", "trajectory_overlay".
PlotKind parse_plot_kind(const std::string& name);

/// Writes one CSV document for the requested plot kind.
///   offset_curve:       offset_frames,estimator,mean_err_m,std_err_m,mean_offset_err_s
///   error_curve:        ... plus fps_nominal,fps_recovered
///   trajectory_overlay: t,truth_x,truth_y,truth_z,<estimator>_{x,y,z}...
void emit_plot_data(const BenchResult& result, PlotKind kind, std::ostream& out,
                    int overlay_grid = 100);

/// Raw per-trial rows and per-cell aggregates as CSV.
void write_rows_csv(const BenchResult& result, std::ostream& out);
void write_cells_csv(const BenchResult& result, std::ostream& out);

}  // namespace atraj
