#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "atraj/bench.hpp"
#include "atraj/dataset_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitSolverFailure = 4;

std::vector<int> parse_orders(const std::string& text) {
    std::vector<int> orders;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        orders.push_back(std::stoi(item));
    }
    if (orders.empty()) {
        throw atraj::ConfigError("--order must name at least one polynomial order");
    }
    return orders;
}

int run_simulate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_path) {
    atraj::SimulationConfig config = atraj::load_simulation_config(config_path);
    const atraj::SimulatedScene scene = atraj::synthesize_scene(config.scene);
    atraj::ObservationSet observations = scene.observations;
    if (config.noise) {
        config.noise->seed = seed;
        observations = atraj::apply_noise(observations, *config.noise);
    }
    atraj::save_dataset(out_path, observations, &scene.truth);
    std::cout << "wrote " << out_path << " (" << observations.observations.size()
              << " observations, " << observations.cameras.size() << " cameras)\n";
    return kExitOk;
}

int run_solve(const std::string& method, const std::string& order_text,
              const std::string& data_path, const std::string& out_path, bool optimize_fps,
              double rotation_prior) {
    const atraj::Dataset dataset = atraj::load_dataset(data_path);
    const std::vector<int> orders = parse_orders(order_text);
    const size_t num_targets = dataset.observations.target_ids().size();

    atraj::ReconstructionResult result;
    if (method == "alg2") {
        std::vector<int> expanded = orders;
        if (expanded.size() == 1) {
            expanded.assign(num_targets, expanded.front());
        }
        result = atraj::reconstruct_algorithm2(dataset.observations, expanded, optimize_fps,
                                               rotation_prior);
    } else {
        if (orders.size() != 1) {
            throw atraj::ConfigError("method '" + method + "' takes a single --order value");
        }
        if (method == "multi-ti") {
            result = atraj::reconstruct_multi_ti(dataset.observations, orders.front());
        } else if (method == "li") {
            result = atraj::reconstruct_li(dataset.observations, orders.front());
        } else if (method == "alg1") {
            result = atraj::reconstruct_algorithm1(dataset.observations, orders.front(),
                                                   optimize_fps);
        } else {
            throw atraj::ConfigError("unknown method '" + method + "'");
        }
    }
    atraj::save_result(out_path, method, result);
    std::cout << "wrote " << out_path << " (converged="
              << (result.report.converged ? "yes" : "no")
              << ", final_cost=" << atraj::format_number(result.report.final_cost) << ")\n";
    return kExitOk;
}

int run_eval(const std::string& est_path, const std::string& truth_path, int grid) {
    if (grid < 2) {
        throw atraj::ConfigError("--grid needs at least two samples");
    }
    const atraj::StoredResult est = atraj::load_result(est_path);
    const atraj::Dataset truth_data = atraj::load_dataset(truth_path);
    if (!truth_data.ground_truth) {
        throw atraj::ConfigError("truth dataset carries no ground_truth block");
    }
    const atraj::GroundTruth& truth = *truth_data.ground_truth;
    if (truth.time_models.size() != truth_data.observations.cameras.size()) {
        throw atraj::ConfigError("ground truth time models do not cover every camera");
    }

    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < truth_data.observations.cameras.size(); ++c) {
        const int frames =
            static_cast<int>(truth_data.observations.cameras[c].poses.size());
        t_min = std::min(t_min, atraj::global_time(0, truth.time_models[c]));
        t_max = std::max(t_max, atraj::global_time(frames - 1, truth.time_models[c]));
    }
    std::vector<double> times;
    times.reserve(grid);
    for (int i = 0; i < grid; ++i) {
        times.push_back(t_min + (t_max - t_min) * static_cast<double>(i) / (grid - 1));
    }

    std::cout << "target,sigma_x,sigma_y,sigma_z,sigma_3d\n";
    for (const auto& [target, traj] : est.result.trajectories) {
        const auto it = truth.trajectories.find(target);
        if (it == truth.trajectories.end()) {
            continue;
        }
        const atraj::LocalizationError err = atraj::localization_error(traj, it->second, times);
        std::cout << target << ',' << atraj::format_number(err.sigma_x) << ','
                  << atraj::format_number(err.sigma_y) << ','
                  << atraj::format_number(err.sigma_z) << ','
                  << atraj::format_number(err.sigma_3d) << "\n";
    }
    return kExitOk;
}

int run_bench(const std::string& spec_path, const std::string& out_dir, int parallel) {
    const atraj::BenchSpec spec = atraj::load_bench_spec(spec_path);
    std::filesystem::create_directories(out_dir);
    const atraj::BenchResult result = atraj::run_monte_carlo(spec, parallel);

    auto write = [&](const std::string& name, auto&& writer) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream out(path);
        if (!out) {
            throw atraj::ConfigError("cannot write " + path);
        }
        writer(out);
        std::cout << "wrote " << path << "\n";
    };
    write("rows.csv", [&](std::ostream& out) { atraj::write_rows_csv(result, out); });
    write("cells.csv", [&](std::ostream& out) { atraj::write_cells_csv(result, out); });
    for (const std::string& kind_name : spec.emit) {
        const atraj::PlotKind kind = atraj::parse_plot_kind(kind_name);
        write(kind_name + ".csv",
              [&](std::ostream& out) { atraj::emit_plot_data(result, kind, out); });
    }
    int flagged = 0;
    for (const atraj::BenchCell& cell : result.cells) {
        flagged += cell.flagged ? 1 : 0;
    }
    if (flagged > 0) {
        std::cerr << "warning: " << flagged << " cell(s) flagged with >10% failures\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D trajectory reconstruction of moving points from unsynchronized cameras"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "Synthesize a (noisy) observation dataset");
    std::string sim_config, sim_out;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--config", sim_config, "Scene (+ optional noise) config JSON")
        ->required();
    simulate->add_option("--seed", sim_seed, "Noise seed")->required();
    simulate->add_option("--out", sim_out, "Output dataset path")->required();

    auto* solve = app.add_subcommand("solve", "Reconstruct trajectories from a dataset");
    std::string solve_method, solve_order, solve_data, solve_out;
    bool solve_fps = false;
    double solve_prior = 0.0;
    solve->add_option("--method", solve_method, "multi-ti | li | alg1 | alg2")
        ->required()
        ->check(CLI::IsMember({"multi-ti", "li", "alg1", "alg2"}));
    solve->add_option("--order", solve_order, "Polynomial order K, or K,K,... for alg2")
        ->required();
    solve->add_option("--data", solve_data, "Input dataset path")->required();
    solve->add_option("--out", solve_out, "Output result path")->required();
    solve->add_flag("--optimize-fps", solve_fps, "Also optimize non-gauge frame rates");
    solve->add_option("--rotation-prior", solve_prior,
                      "Rotation prior weight for alg2 (0 disables)");

    auto* eval = app.add_subcommand("eval", "Compare a result against ground truth");
    std::string eval_est, eval_truth;
    int eval_grid = 0;
    eval->add_option("--est", eval_est, "Result JSON from solve")->required();
    eval->add_option("--truth", eval_truth, "Dataset JSON carrying ground_truth")->required();
    eval->add_option("--grid", eval_grid, "Number of evaluation samples")->required();

    auto* bench = app.add_subcommand("bench", "Run a Monte Carlo benchmark sweep");
    std::string bench_spec, bench_out;
    int bench_parallel = 1;
    bench->add_option("--spec", bench_spec, "Bench spec JSON")->required();
    bench->add_option("--out-dir", bench_out, "Output directory")->required();
    bench->add_option("--parallel", bench_parallel, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(sim_config, sim_seed, sim_out);
        }
        if (solve->parsed()) {
            return run_solve(solve_method, solve_order, solve_data, solve_out, solve_fps,
                             solve_prior);
        }
        if (eval->parsed()) {
            return run_eval(eval_est, eval_truth, eval_grid);
        }
        if (bench->parsed()) {
            return run_bench(bench_spec, bench_out, bench_parallel);
        }
    } catch (const atraj::UnderdeterminedError& e) {
        std::cerr << "error: " << e.what() << " (equations=" << e.equations
                  << ", unknowns=" << e.unknowns << ")\n";
        return kExitDegenerate;
    } catch (const atraj::IllConditionedError& e) {
        std::cerr << "error: " << e.what() << " (condition="
                  << atraj::format_number(e.condition) << ")\n";
        return kExitDegenerate;
    } catch (const atraj::DegenerateGeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const atraj::InvalidStartError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const atraj::SolverStalledError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const atraj::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
