#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "atraj/bench.hpp"
#include "atraj/dataset_io.hpp"
#include "test_helpers.hpp"

using namespace atraj;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("atraj_test_" + name);
}

BenchSpec small_bench_spec() {
    BenchSpec spec;
    spec.scene = testing::two_camera_scene(12, 0.0, {testing::line_target()});
    spec.estimators = {"multi-ti", "alg1"};
    spec.offset_sweep_frames = {1.0, 2.0};
    spec.trials = 2;
    spec.seed = 31;
    spec.noise.pixel_sigma = 1.0;
    return spec;
}

// Strip the wall-clock column so runs can be compared byte for byte.
std::string drop_timing_column(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const size_t cut = line.rfind(',');
        out << line.substr(0, cut) << '\n';
    }
    return out.str();
}

}  // namespace

TEST_CASE("dataset save/load round trip") {
    const SceneConfig cfg = testing::two_camera_scene(8, 2.0, {testing::line_target()});
    const SimulatedScene scene = synthesize_scene(cfg);
    const auto path = temp_file("dataset.json");
    save_dataset(path.string(), scene.observations, &scene.truth);

    const Dataset loaded = load_dataset(path.string());
    REQUIRE(loaded.observations.cameras.size() == 2);
    REQUIRE(loaded.observations.observations.size() ==
            scene.observations.observations.size());
    CHECK(loaded.ground_truth.has_value());

    // Values survive up to the 9-significant-digit output precision.
    for (size_t i = 0; i < loaded.observations.observations.size(); ++i) {
        const Vec2 a = loaded.observations.observations[i].pixel;
        const Vec2 b = scene.observations.observations[i].pixel;
        CHECK((a - b).norm() < 1e-5);
    }
    for (size_t c = 0; c < 2; ++c) {
        CHECK(loaded.observations.cameras[c].nominal_time.alpha == 10.0);
        for (size_t f = 0; f < loaded.observations.cameras[c].poses.size(); ++f) {
            const FramePose& a = loaded.observations.cameras[c].poses[f];
            const FramePose& b = scene.observations.cameras[c].poses[f];
            CHECK((a.translation - b.translation).norm() < 1e-5);
            CHECK(a.rotation.geodesic_angle_to(b.rotation) < 1e-7);
        }
    }
    CHECK(testing::max_relative_coeff_error(loaded.ground_truth->trajectories.at(0),
                                            scene.truth.trajectories.at(0)) < 1e-8);
    std::filesystem::remove(path);
}

TEST_CASE("result save/load round trip") {
    const SceneConfig cfg = testing::two_camera_scene(10, 3.0, {testing::line_target()});
    const SimulatedScene scene = synthesize_scene(cfg);
    const ReconstructionResult res = reconstruct_algorithm1(scene.observations, 1);
    const auto path = temp_file("result.json");
    save_result(path.string(), "alg1", res);

    const StoredResult loaded = load_result(path.string());
    CHECK(loaded.method == "alg1");
    CHECK(testing::max_relative_coeff_error(loaded.result.trajectories.at(0),
                                            res.trajectories.at(0)) < 1e-8);
    CHECK(loaded.result.time_models.at(1).beta ==
          doctest::Approx(res.time_models.at(1).beta).epsilon(1e-8));
    std::filesystem::remove(path);
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_scene_config("{\"frames_per_camera\": [10]}"), std::exception);
    CHECK_THROWS_AS(parse_noise_config("{\"pixel_sigma\": -1}"), ConfigError);
    CHECK_THROWS_AS(load_dataset("/nonexistent/path.json"), ConfigError);
    CHECK_THROWS_AS(parse_plot_kind("pie_chart"), ConfigError);
}

TEST_CASE("format_number uses nine significant digits") {
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.123456789123) == "0.123456789");
    CHECK(format_number(-1234567891.0) == "-1.23456789e+09");
}

TEST_CASE("monte carlo: noise-free trial solves to micrometers") {
    BenchSpec spec;
    spec.scene = testing::two_camera_scene(12, 0.0, {testing::line_target()});
    spec.estimators = {"alg1"};
    spec.offset_sweep_frames = {3.0};
    spec.trials = 1;
    const BenchResult result = run_monte_carlo(spec);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].status == "ok");
    CHECK(result.rows[0].sigma3d_m < 1e-6);
    CHECK(result.rows[0].offset_err_s < 1e-6);
    CHECK(result.rows[0].cost_monotone);
}

TEST_CASE("monte carlo aggregates are recomputable from rows") {
    const BenchResult result = run_monte_carlo(small_bench_spec(), 2);
    REQUIRE(result.rows.size() == 8);  // 2 estimators x 2 offsets x 2 trials

    for (const BenchCell& cell : result.cells) {
        double sum = 0.0;
        int n = 0;
        for (const BenchRow& row : result.rows) {
            if (row.estimator == cell.estimator && row.offset_frames == cell.offset_frames &&
                row.status == "ok") {
                sum += row.sigma3d_m;
                ++n;
            }
        }
        REQUIRE(n > 0);
        CHECK(cell.mean_err_m == doctest::Approx(sum / n).epsilon(1e-12));
    }
}

TEST_CASE("plot emission") {
    const BenchResult result = run_monte_carlo(small_bench_spec(), 2);

    SUBCASE("offset curve has one row per cell") {
        std::ostringstream out;
        emit_plot_data(result, PlotKind::OffsetCurve, out);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "offset_frames,estimator,mean_err_m,std_err_m,mean_offset_err_s");
        int rows = 0;
        while (std::getline(in, line)) {
            ++rows;
        }
        CHECK(rows == 4);  // 2 offsets x 2 estimators
    }

    SUBCASE("error curve carries the fps columns") {
        std::ostringstream out;
        emit_plot_data(result, PlotKind::ErrorCurve, out);
        std::string header;
        std::istringstream in(out.str());
        std::getline(in, header);
        CHECK(header ==
              "offset_frames,estimator,mean_err_m,std_err_m,mean_offset_err_s,"
              "fps_nominal,fps_recovered");
    }

    SUBCASE("noise-free overlay matches the truth") {
        BenchSpec spec;
        spec.scene = testing::two_camera_scene(12, 0.0, {testing::line_target()});
        spec.estimators = {"alg1"};
        spec.offset_sweep_frames = {2.0};
        spec.trials = 1;
        const BenchResult clean = run_monte_carlo(spec);
        std::ostringstream out;
        emit_plot_data(clean, PlotKind::TrajectoryOverlay, out, 25);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "t,truth_x,truth_y,truth_z,alg1_x,alg1_y,alg1_z");
        int rows = 0;
        while (std::getline(in, line)) {
            double t, tx, ty, tz, ex, ey, ez;
            char comma;
            std::istringstream fields(line);
            fields >> t >> comma >> tx >> comma >> ty >> comma >> tz >> comma >> ex >>
                comma >> ey >> comma >> ez;
            CHECK(std::abs(tx - ex) < 1e-6);
            CHECK(std::abs(ty - ey) < 1e-6);
            CHECK(std::abs(tz - ez) < 1e-6);
            ++rows;
        }
        CHECK(rows == 25);
    }
}

TEST_CASE("bench output is deterministic given the seed") {
    const BenchSpec spec = small_bench_spec();
    const BenchResult a = run_monte_carlo(spec, 2);
    const BenchResult b = run_monte_carlo(spec, 1);  // thread count must not matter

    std::ostringstream rows_a, rows_b;
    write_rows_csv(a, rows_a);
    write_rows_csv(b, rows_b);
    CHECK(drop_timing_column(rows_a.str()) == drop_timing_column(rows_b.str()));

    std::ostringstream curve_a, curve_b;
    emit_plot_data(a, PlotKind::OffsetCurve, curve_a);
    emit_plot_data(b, PlotKind::OffsetCurve, curve_b);
    CHECK(curve_a.str() == curve_b.str());
}

TEST_CASE("bench spec validation") {
    BenchSpec spec = small_bench_spec();
    spec.estimators = {"gradient-descent"};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = small_bench_spec();
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = small_bench_spec();
    spec.offset_sweep_frames.clear();
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("estimator failures become failed rows and flag the cell") {
    BenchSpec spec;
    // Four frames per camera cannot support a quartic: every trial fails.
    spec.scene = testing::two_camera_scene(4, 1.0, {testing::line_target()});
    spec.orders = {4};
    spec.estimators = {"multi-ti"};
    spec.offset_sweep_frames = {1.0};
    spec.trials = 2;
    const BenchResult result = run_monte_carlo(spec);
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0].status == "error:underdetermined");
    CHECK(result.cells[0].failures == 2);
    CHECK(result.cells[0].flagged);
}
