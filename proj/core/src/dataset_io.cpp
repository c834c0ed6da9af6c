#include "atraj/dataset_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "atraj/bench.hpp"

namespace atraj {

using nlohmann::json;

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

double round_to_output_precision(double value) {
    return std::strtod(format_number(value).c_str(), nullptr);
}

namespace {

double j9(double v) { return round_to_output_precision(v); }

json to_json(const Vec3& v) { return json::array({j9(v.x()), j9(v.y()), j9(v.z())}); }

Vec3 vec3_from(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError("expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json coeffs_to_json(const Eigen::VectorXd& c) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        arr.push_back(j9(c[i]));
    }
    return arr;
}

Eigen::VectorXd coeffs_from_json(const json& j) {
    Eigen::VectorXd c(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        c[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return c;
}

json trajectory_to_json(int target, const PolyTrajectory& traj) {
    return json{{"target", target},
                {"order", traj.order},
                {"coeffs_x", coeffs_to_json(traj.coeffs_x)},
                {"coeffs_y", coeffs_to_json(traj.coeffs_y)},
                {"coeffs_z", coeffs_to_json(traj.coeffs_z)}};
}

PolyTrajectory trajectory_from_json(const json& j) {
    PolyTrajectory traj;
    traj.order = j.at("order").get<int>();
    traj.coeffs_x = coeffs_from_json(j.at("coeffs_x"));
    traj.coeffs_y = coeffs_from_json(j.at("coeffs_y"));
    traj.coeffs_z = coeffs_from_json(j.at("coeffs_z"));
    traj.validate();
    return traj;
}

json quaternion_to_json(const UnitQuaternion& q) {
    return json::array({j9(q.w), j9(q.x), j9(q.y), j9(q.z)});
}

UnitQuaternion quaternion_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw ConfigError("quaternion must be a 4-element array, w first");
    }
    return UnitQuaternion{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                          j[3].get<double>()};
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

json ground_truth_to_json(const GroundTruth& truth) {
    json trajectories = json::array();
    for (const auto& [target, traj] : truth.trajectories) {
        trajectories.push_back(trajectory_to_json(target, traj));
    }
    json time_models = json::array();
    for (size_t c = 0; c < truth.time_models.size(); ++c) {
        time_models.push_back(json{{"cam", c},
                                   {"alpha", j9(truth.time_models[c].alpha)},
                                   {"beta", j9(truth.time_models[c].beta)}});
    }
    return json{{"trajectories", trajectories}, {"time_models", time_models}};
}

GroundTruth ground_truth_from_json(const json& j) {
    GroundTruth truth;
    for (const json& t : j.at("trajectories")) {
        truth.trajectories[t.at("target").get<int>()] = trajectory_from_json(t);
    }
    if (j.contains("time_models")) {
        truth.time_models.resize(j["time_models"].size());
        for (const json& tm : j["time_models"]) {
            const size_t c = tm.at("cam").get<size_t>();
            if (c >= truth.time_models.size()) {
                truth.time_models.resize(c + 1);
            }
            truth.time_models[c] = {tm.at("alpha").get<double>(), tm.at("beta").get<double>()};
        }
    }
    return truth;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
    const json j = load_json_file(path);
    Dataset dataset;
    std::map<int, int> index_of_id;
    if (!j.contains("cameras") || !j["cameras"].is_array()) {
        throw ConfigError("dataset needs a cameras array");
    }
    for (const json& jc : j["cameras"]) {
        CameraTrack cam;
        cam.id = jc.at("id").get<int>();
        if (index_of_id.count(cam.id)) {
            throw ConfigError("duplicate camera id " + std::to_string(cam.id));
        }
        const json& ji = jc.at("intrinsics");
        cam.intrinsics = {ji.at("fx").get<double>(), ji.at("fy").get<double>(),
                          ji.at("cx").get<double>(), ji.at("cy").get<double>(),
                          ji.value("skew", 0.0)};
        cam.nominal_time = {jc.at("nominal_fps").get<double>(), 0.0};
        std::map<int, FramePose> poses;
        for (const json& jp : jc.at("poses")) {
            FramePose pose;
            pose.rotation = quaternion_from_json(jp.at("q")).normalized();
            pose.translation = vec3_from(jp.at("t"));
            poses[jp.at("frame").get<int>()] = pose;
        }
        for (const auto& [frame, pose] : poses) {
            if (frame != static_cast<int>(cam.poses.size())) {
                throw ConfigError("camera " + std::to_string(cam.id) +
                                  " poses must cover frames 0..F-1 without gaps");
            }
            cam.poses.push_back(pose);
        }
        index_of_id[cam.id] = static_cast<int>(dataset.observations.cameras.size());
        dataset.observations.cameras.push_back(std::move(cam));
    }
    for (const json& jo : j.value("observations", json::array())) {
        Observation ob;
        const int cam_id = jo.at("cam").get<int>();
        const auto it = index_of_id.find(cam_id);
        if (it == index_of_id.end()) {
            throw ConfigError("observation references unknown camera id " +
                              std::to_string(cam_id));
        }
        ob.camera = it->second;
        ob.frame = jo.at("frame").get<int>();
        ob.target = jo.at("target").get<int>();
        const json& px = jo.at("px");
        ob.pixel = {px.at(0).get<double>(), px.at(1).get<double>()};
        dataset.observations.observations.push_back(ob);
    }
    dataset.observations.validate();
    if (j.contains("ground_truth")) {
        dataset.ground_truth = ground_truth_from_json(j["ground_truth"]);
    }
    return dataset;
}

void save_dataset(const std::string& path, const ObservationSet& obs,
                  const GroundTruth* truth) {
    json cameras = json::array();
    for (const CameraTrack& cam : obs.cameras) {
        json poses = json::array();
        for (size_t f = 0; f < cam.poses.size(); ++f) {
            poses.push_back(json{{"frame", f},
                                 {"q", quaternion_to_json(cam.poses[f].rotation)},
                                 {"t", to_json(cam.poses[f].translation)}});
        }
        cameras.push_back(json{{"id", cam.id},
                               {"intrinsics",
                                json{{"fx", j9(cam.intrinsics.fx)},
                                     {"fy", j9(cam.intrinsics.fy)},
                                     {"cx", j9(cam.intrinsics.cx)},
                                     {"cy", j9(cam.intrinsics.cy)},
                                     {"skew", j9(cam.intrinsics.skew)}}},
                               {"nominal_fps", j9(cam.nominal_time.alpha)},
                               {"poses", poses}});
    }
    json observations = json::array();
    for (const Observation& ob : obs.observations) {
        observations.push_back(json{{"cam", obs.cameras[ob.camera].id},
                                    {"frame", ob.frame},
                                    {"target", ob.target},
                                    {"px", json::array({j9(ob.pixel.x()), j9(ob.pixel.y())})}});
    }
    json doc{{"cameras", cameras}, {"observations", observations}};
    if (truth != nullptr) {
        doc["ground_truth"] = ground_truth_to_json(*truth);
    }
    write_json_file(path, doc);
}

namespace {

SceneConfig scene_config_from_json(const json& j) {
    SceneConfig cfg;
    cfg.frames_per_camera = j.at("frames_per_camera").get<std::vector<int>>();
    cfg.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    cfg.offsets_frames = j.at("offsets_frames").get<std::vector<double>>();
    for (const json& jp : j.at("camera_paths")) {
        CameraPathSpec path;
        const std::string kind = jp.value("kind", "quadratic");
        if (kind == "polyline") {
            path.kind = CameraPathSpec::Kind::Polyline;
        } else if (kind == "quadratic") {
            path.kind = CameraPathSpec::Kind::Quadratic;
        } else {
            throw ConfigError("unknown camera path kind '" + kind + "'");
        }
        for (const json& w : jp.at("waypoints")) {
            path.waypoints.push_back(vec3_from(w));
        }
        path.aim = vec3_from(jp.at("aim"));
        cfg.camera_paths.push_back(std::move(path));
    }
    for (const json& ji : j.at("intrinsics")) {
        cfg.intrinsics.push_back({ji.at("fx").get<double>(), ji.at("fy").get<double>(),
                                  ji.at("cx").get<double>(), ji.at("cy").get<double>(),
                                  ji.value("skew", 0.0)});
    }
    for (const json& jt : j.at("targets")) {
        cfg.targets.push_back(trajectory_from_json(jt));
    }
    cfg.validate();
    return cfg;
}

NoiseConfig noise_config_from_json(const json& j) {
    NoiseConfig noise;
    noise.pixel_sigma = j.value("pixel_sigma", 0.0);
    noise.rotation_systematic_sigma = j.value("rotation_systematic_sigma", 0.0);
    noise.rotation_random_sigma = j.value("rotation_random_sigma", 0.0);
    noise.position_systematic_sigma = j.value("position_systematic_sigma", 0.0);
    noise.position_random_sigma = j.value("position_random_sigma", 0.0);
    noise.seed = j.value("seed", std::uint64_t{0});
    noise.validate();
    return noise;
}

}  // namespace

SimulationConfig load_simulation_config(const std::string& path) {
    const json j = load_json_file(path);
    SimulationConfig cfg;
    if (j.contains("scene")) {
        cfg.scene = scene_config_from_json(j["scene"]);
        if (j.contains("noise")) {
            cfg.noise = noise_config_from_json(j["noise"]);
        }
    } else {
        cfg.scene = scene_config_from_json(j);
    }
    return cfg;
}

SceneConfig parse_scene_config(const std::string& text) {
    return scene_config_from_json(json::parse(text));
}

NoiseConfig parse_noise_config(const std::string& text) {
    return noise_config_from_json(json::parse(text));
}

SceneConfig load_scene_config(const std::string& path) {
    return scene_config_from_json(load_json_file(path));
}

NoiseConfig load_noise_config(const std::string& path) {
    return noise_config_from_json(load_json_file(path));
}

BenchSpec load_bench_spec(const std::string& path) {
    const json j = load_json_file(path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    auto resolve = [&](const json& node) -> json {
        if (node.is_string()) {
            return load_json_file((base / node.get<std::string>()).string());
        }
        return node;
    };

    BenchSpec spec;
    spec.scene = scene_config_from_json(resolve(j.at("scene")));
    if (j.contains("noise")) {
        spec.noise = noise_config_from_json(resolve(j["noise"]));
    }
    spec.estimators = j.at("estimators").get<std::vector<std::string>>();
    spec.offset_sweep_frames = j.at("offset_sweep_frames").get<std::vector<double>>();
    spec.trials = j.value("trials", 1);
    if (j.contains("orders")) {
        spec.orders = j["orders"].get<std::vector<int>>();
    }
    spec.optimize_fps = j.value("optimize_fps", false);
    if (j.contains("nominal_fps_override")) {
        spec.nominal_fps_override = j["nominal_fps_override"].get<double>();
    }
    spec.rotation_prior_weight = j.value("rotation_prior_weight", 0.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.metric_target = j.value("metric_target", 0);
    if (j.contains("emit")) {
        spec.emit = j["emit"].get<std::vector<std::string>>();
    }
    spec.validate();
    return spec;
}

void save_result(const std::string& path, const std::string& method,
                 const ReconstructionResult& result) {
    json trajectories = json::array();
    for (const auto& [target, traj] : result.trajectories) {
        trajectories.push_back(trajectory_to_json(target, traj));
    }
    json time_models = json::array();
    for (const auto& [cam, tm] : result.time_models) {
        time_models.push_back(json{{"cam", cam}, {"alpha", j9(tm.alpha)}, {"beta", j9(tm.beta)}});
    }
    json doc{{"method", method},
             {"trajectories", trajectories},
             {"time_models", time_models},
             {"report",
              json{{"converged", result.report.converged},
                   {"iterations", result.report.iterations},
                   {"initial_cost", j9(result.report.initial_cost)},
                   {"final_cost", j9(result.report.final_cost)},
                   {"termination_reason", to_string(result.report.termination_reason)},
                   {"cost_monotone", result.report.cost_monotone}}}};
    if (result.rotations) {
        json rotations = json::array();
        for (const auto& [cam, qs] : *result.rotations) {
            json arr = json::array();
            for (const UnitQuaternion& q : qs) {
                arr.push_back(quaternion_to_json(q));
            }
            rotations.push_back(json{{"cam", cam}, {"q", arr}});
        }
        doc["rotations"] = rotations;
    }
    write_json_file(path, doc);
}

StoredResult load_result(const std::string& path) {
    const json j = load_json_file(path);
    StoredResult stored;
    stored.method = j.value("method", "");
    for (const json& t : j.at("trajectories")) {
        stored.result.trajectories[t.at("target").get<int>()] = trajectory_from_json(t);
    }
    for (const json& tm : j.value("time_models", json::array())) {
        stored.result.time_models[tm.at("cam").get<int>()] = {tm.at("alpha").get<double>(),
                                                              tm.at("beta").get<double>()};
    }
    if (j.contains("rotations")) {
        std::map<int, std::vector<UnitQuaternion>> rotations;
        for (const json& jr : j["rotations"]) {
            std::vector<UnitQuaternion> qs;
            for (const json& q : jr.at("q")) {
                qs.push_back(quaternion_from_json(q));
            }
            rotations[jr.at("cam").get<int>()] = std::move(qs);
        }
        stored.result.rotations = std::move(rotations);
    }
    return stored;
}

}  // namespace atraj
