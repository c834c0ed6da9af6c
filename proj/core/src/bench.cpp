#include "atraj/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "atraj/dataset_io.hpp"

namespace atraj {

namespace {

const std::set<std::string> kKnownEstimators = {"multi-ti", "li", "alg1", "alg2"};

}  // namespace

void BenchSpec::validate() const {
    scene.validate();
    noise.validate();
    if (trials < 1) {
        throw ConfigError("bench needs at least one trial");
    }
    if (estimators.empty()) {
        throw ConfigError("bench needs at least one estimator");
    }
    for (const std::string& name : estimators) {
        if (!kKnownEstimators.count(name)) {
            throw ConfigError("unknown estimator '" + name + "'");
        }
    }
    if (offset_sweep_frames.empty()) {
        throw ConfigError("bench needs at least one offset value");
    }
    if (metric_target < 0 || metric_target >= static_cast<int>(scene.targets.size())) {
        throw ConfigError("metric target out of range");
    }
    if (!orders.empty() && orders.size() != scene.targets.size()) {
        throw ConfigError("orders list must match the scene's target count");
    }
    if (nominal_fps_override && !(*nominal_fps_override > 0.0)) {
        throw ConfigError("nominal fps override must be positive");
    }
}

std::vector<int> BenchSpec::resolved_orders() const {
    if (!orders.empty()) {
        return orders;
    }
    std::vector<int> out;
    out.reserve(scene.targets.size());
    for (const PolyTrajectory& t : scene.targets) {
        out.push_back(t.order);
    }
    return out;
}

namespace {

bool uniform_order(const std::vector<int>& orders) {
    return std::all_of(orders.begin(), orders.end(),
                       [&](int k) { return k == orders.front(); });
}

ReconstructionResult dispatch_estimator(const std::string& name, const ObservationSet& obs,
                                        const std::vector<int>& orders, const BenchSpec& spec) {
    if (name == "alg2") {
        return reconstruct_algorithm2(obs, orders, spec.optimize_fps,
                                      spec.rotation_prior_weight);
    }
    if (!uniform_order(orders)) {
        throw ConfigError("estimator '" + name + "' supports a single shared order");
    }
    const int order = orders.front();
    if (name == "multi-ti") {
        return reconstruct_multi_ti(obs, order);
    }
    if (name == "li") {
        return reconstruct_li(obs, order);
    }
    if (name == "alg1") {
        return reconstruct_algorithm1(obs, order, spec.optimize_fps);
    }
    throw ConfigError("unknown estimator '" + name + "'");
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const UnderdeterminedError*>(&e)) return "error:underdetermined";
    if (dynamic_cast<const IllConditionedError*>(&e)) return "error:ill_conditioned";
    if (dynamic_cast<const DegenerateGeometryError*>(&e)) return "error:degenerate";
    if (dynamic_cast<const SolverStalledError*>(&e)) return "error:stalled";
    if (dynamic_cast<const InvalidStartError*>(&e)) return "error:invalid_start";
    return "error:other";
}

struct TrialWork {
    size_t offset_index;
    int trial;
};

}  // namespace

std::vector<BenchCell> aggregate_cells(const std::vector<BenchRow>& rows) {
    std::map<std::pair<std::string, double>, std::vector<const BenchRow*>> groups;
    for (const BenchRow& row : rows) {
        groups[{row.estimator, row.offset_frames}].push_back(&row);
    }
    std::vector<BenchCell> cells;
    for (const auto& [key, members] : groups) {
        BenchCell cell;
        cell.estimator = key.first;
        cell.offset_frames = key.second;
        cell.trials = static_cast<int>(members.size());
        double sum = 0.0, sum_sq = 0.0, sum_offset = 0.0, sum_fps = 0.0, sum_sec = 0.0;
        int ok = 0;
        for (const BenchRow* row : members) {
            if (row->status != "ok") {
                ++cell.failures;
                continue;
            }
            ++ok;
            sum += row->sigma3d_m;
            sum_sq += row->sigma3d_m * row->sigma3d_m;
            sum_offset += row->offset_err_s;
            sum_fps += row->fps_recovered;
            sum_sec += row->solve_seconds;
        }
        if (ok > 0) {
            const double n = static_cast<double>(ok);
            cell.mean_err_m = sum / n;
            const double var = ok > 1 ? (sum_sq - sum * sum / n) / (n - 1.0) : 0.0;
            cell.std_err_m = std::sqrt(std::max(0.0, var));
            cell.mean_offset_err_s = sum_offset / n;
            cell.mean_fps_recovered = sum_fps / n;
            cell.mean_solve_seconds = sum_sec / n;
        }
        cell.flagged = cell.failures * 10 > cell.trials;
        cells.push_back(std::move(cell));
    }
    return cells;
}

const BenchCell& BenchResult::cell(const std::string& estimator, double offset_frames) const {
    for (const BenchCell& c : cells) {
        if (c.estimator == estimator && c.offset_frames == offset_frames) {
            return c;
        }
    }
    throw InvalidInputError("no such bench cell: " + estimator);
}

BenchResult run_monte_carlo(const BenchSpec& spec, int parallel) {
    spec.validate();
    const std::vector<int> orders = spec.resolved_orders();

    std::vector<TrialWork> work;
    for (size_t o = 0; o < spec.offset_sweep_frames.size(); ++o) {
        for (int t = 0; t < spec.trials; ++t) {
            work.push_back({o, t});
        }
    }

    std::vector<BenchRow> rows;
    std::mutex rows_mutex;
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        std::vector<BenchRow> local;
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= work.size()) {
                break;
            }
            const TrialWork& item = work[i];
            const double offset = spec.offset_sweep_frames[item.offset_index];

            SceneConfig cfg = spec.scene;
            for (int c = 0; c < cfg.num_cameras(); ++c) {
                if (c != kGaugeCamera) {
                    cfg.offsets_frames[c] = offset;
                }
            }
            NoiseConfig noise = spec.noise;
            noise.seed = spec.seed + static_cast<std::uint64_t>(item.trial);

            const SimulatedScene scene = synthesize_scene(cfg);
            ObservationSet noisy = apply_noise(scene.observations, noise);
            if (spec.nominal_fps_override) {
                for (int c = 0; c < cfg.num_cameras(); ++c) {
                    if (c != kGaugeCamera) {
                        noisy.cameras[c].nominal_time.alpha = *spec.nominal_fps_override;
                    }
                }
            }
            const std::vector<double> eval_times = true_frame_times(cfg);
            const PolyTrajectory& truth_traj =
                scene.truth.trajectories.at(spec.metric_target);

            for (const std::string& estimator : spec.estimators) {
                BenchRow row;
                row.estimator = estimator;
                row.offset_frames = offset;
                row.trial = item.trial;
                row.seed = noise.seed;
                try {
                    const auto start = std::chrono::steady_clock::now();
                    const ReconstructionResult res =
                        dispatch_estimator(estimator, noisy, orders, spec);
                    const auto stop = std::chrono::steady_clock::now();
                    row.solve_seconds =
                        std::chrono::duration<double>(stop - start).count();
                    row.status = "ok";
                    row.converged = res.report.converged;
                    row.cost_monotone = res.report.cost_monotone;
                    row.sigma3d_m = localization_error(
                        res.trajectories.at(spec.metric_target), truth_traj, eval_times)
                            .sigma_3d;
                    double offset_err = 0.0;
                    int non_gauge = 0;
                    row.fps_recovered = 0.0;
                    for (int c = 0; c < cfg.num_cameras(); ++c) {
                        if (c == kGaugeCamera) {
                            continue;
                        }
                        const TimeModel est = res.time_models.at(noisy.cameras[c].id);
                        offset_err += std::abs(est.beta - scene.truth.time_models[c].beta);
                        if (non_gauge == 0) {
                            row.fps_recovered = est.alpha;
                        }
                        ++non_gauge;
                    }
                    row.offset_err_s = non_gauge > 0 ? offset_err / non_gauge : 0.0;
                    row.metric_trajectory = res.trajectories.at(spec.metric_target);
                } catch (const std::exception& e) {
                    row.status = error_kind(e);
                    row.sigma3d_m = std::numeric_limits<double>::quiet_NaN();
                    row.offset_err_s = std::numeric_limits<double>::quiet_NaN();
                    row.fps_recovered = std::numeric_limits<double>::quiet_NaN();
                }
                local.push_back(std::move(row));
            }
        }
        const std::lock_guard<std::mutex> lock(rows_mutex);
        for (BenchRow& row : local) {
            rows.push_back(std::move(row));
        }
    };

    const int threads = std::max(1, parallel);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.estimator, a.offset_frames, a.trial) <
               std::tie(b.estimator, b.offset_frames, b.trial);
    });

    BenchResult result;
    result.spec = spec;
    result.rows = std::move(rows);
    result.cells = aggregate_cells(result.rows);
    return result;
}

PlotKind parse_plot_kind(const std::string& name) {
    if (name == "offset_curve") return PlotKind::OffsetCurve;
    if (name == "error_curve") return PlotKind::ErrorCurve;
    if (name == "trajectory_overlay") return PlotKind::TrajectoryOverlay;
    throw ConfigError("unknown plot kind '" + name + "'");
}

namespace {

void emit_curve(const BenchResult& result, bool with_fps, std::ostream& out) {
    out << "offset_frames,estimator,mean_err_m,std_err_m,mean_offset_err_s";
    if (with_fps) {
        out << ",fps_nominal,fps_recovered";
    }
    out << "\n";
    // Rows ordered by offset then estimator, matching the sweep.
    std::vector<const BenchCell*> cells;
    for (const BenchCell& c : result.cells) {
        cells.push_back(&c);
    }
    std::sort(cells.begin(), cells.end(), [](const BenchCell* a, const BenchCell* b) {
        return std::tie(a->offset_frames, a->estimator) <
               std::tie(b->offset_frames, b->estimator);
    });
    const double nominal = result.spec.nominal_fps_override
                               ? *result.spec.nominal_fps_override
                               : result.spec.scene.frame_rate_hz;
    for (const BenchCell* c : cells) {
        out << format_number(c->offset_frames) << ',' << c->estimator << ','
            << format_number(c->mean_err_m) << ',' << format_number(c->std_err_m) << ','
            << format_number(c->mean_offset_err_s);
        if (with_fps) {
            out << ',' << format_number(nominal) << ','
                << format_number(c->mean_fps_recovered);
        }
        out << "\n";
    }
}

void emit_overlay(const BenchResult& result, std::ostream& out, int grid) {
    if (result.rows.empty()) {
        throw InvalidInputError("cannot emit overlay from an empty result");
    }
    if (grid < 2) {
        throw InvalidInputError("overlay grid needs at least two samples");
    }
    // Representative cell: first offset, trial 0, every estimator present.
    const double offset = result.spec.offset_sweep_frames.front();
    std::vector<std::pair<std::string, const PolyTrajectory*>> estimates;
    for (const std::string& name : result.spec.estimators) {
        for (const BenchRow& row : result.rows) {
            if (row.estimator == name && row.offset_frames == offset && row.trial == 0 &&
                row.status == "ok" && row.metric_trajectory) {
                estimates.emplace_back(name, &*row.metric_trajectory);
                break;
            }
        }
    }
    SceneConfig cfg = result.spec.scene;
    for (int c = 0; c < cfg.num_cameras(); ++c) {
        if (c != kGaugeCamera) {
            cfg.offsets_frames[c] = offset;
        }
    }
    const std::vector<double> times = true_frame_times(cfg);
    const double t0 = times.front();
    const double t1 = times.back();
    const PolyTrajectory& truth = result.spec.scene.targets[result.spec.metric_target];

    out << "t,truth_x,truth_y,truth_z";
    for (const auto& [name, traj] : estimates) {
        out << ',' << name << "_x," << name << "_y," << name << "_z";
    }
    out << "\n";
    for (int i = 0; i < grid; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / (grid - 1);
        const Vec3 x = eval_trajectory(truth, t);
        out << format_number(t) << ',' << format_number(x.x()) << ',' << format_number(x.y())
            << ',' << format_number(x.z());
        for (const auto& [name, traj] : estimates) {
            const Vec3 e = eval_trajectory(*traj, t);
            out << ',' << format_number(e.x()) << ',' << format_number(e.y()) << ','
                << format_number(e.z());
        }
        out << "\n";
    }
}

}  // namespace

void emit_plot_data(const BenchResult& result, PlotKind kind, std::ostream& out,
                    int overlay_grid) {
    if (result.rows.empty()) {
        throw InvalidInputError("cannot emit plot data from an empty result");
    }
    switch (kind) {
        case PlotKind::OffsetCurve:
            emit_curve(result, false, out);
            break;
        case PlotKind::ErrorCurve:
            emit_curve(result, true, out);
            break;
        case PlotKind::TrajectoryOverlay:
            emit_overlay(result, out, overlay_grid);
            break;
    }
}

void write_rows_csv(const BenchResult& result, std::ostream& out) {
    out << "estimator,offset_frames,trial,seed,status,converged,cost_monotone,"
           "sigma3d_m,offset_err_s,fps_recovered,solve_seconds\n";
    for (const BenchRow& row : result.rows) {
        out << row.estimator << ',' << format_number(row.offset_frames) << ',' << row.trial
            << ',' << row.seed << ',' << row.status << ',' << (row.converged ? 1 : 0) << ','
            << (row.cost_monotone ? 1 : 0) << ',' << format_number(row.sigma3d_m) << ','
            << format_number(row.offset_err_s) << ',' << format_number(row.fps_recovered)
            << ',' << format_number(row.solve_seconds) << "\n";
    }
}

void write_cells_csv(const BenchResult& result, std::ostream& out) {
    out << "estimator,offset_frames,trials,failures,flagged,mean_err_m,std_err_m,"
           "mean_offset_err_s,mean_fps_recovered,mean_solve_seconds\n";
    for (const BenchCell& c : result.cells) {
        out << c.estimator << ',' << format_number(c.offset_frames) << ',' << c.trials << ','
            << c.failures << ',' << (c.flagged ? 1 : 0) << ',' << format_number(c.mean_err_m)
            << ',' << format_number(c.std_err_m) << ',' << format_number(c.mean_offset_err_s)
            << ',' << format_number(c.mean_fps_recovered) << ','
            << format_number(c.mean_solve_seconds) << "\n";
    }
}

}  // namespace atraj
