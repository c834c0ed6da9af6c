#include "atraj/simulator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "atraj/rng.hpp"

namespace atraj {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream)
    : state0_(splitmix_finalize(seed + kGolden * splitmix_finalize(stream + kGolden))) {}

std::uint64_t StreamRng::next_bits() {
    return splitmix_finalize(state0_ + kGolden * ++counter_);
}

double StreamRng::uniform01() {
    return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
}

double StreamRng::normal(double sigma) {
    if (has_cached_) {
        has_cached_ = false;
        return cached_ * sigma;
    }
    double u1 = uniform01();
    const double u2 = uniform01();
    if (u1 <= 0.0) {
        u1 = 0x1.0p-53;
    }
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle) * sigma;
}

Vec3 StreamRng::isotropic_unit() {
    Vec3 v{normal(), normal(), normal()};
    double n = v.norm();
    while (!(n > 1e-12)) {
        v = {normal(), normal(), normal()};
        n = v.norm();
    }
    return v / n;
}

std::uint64_t noise_stream(NoiseChannel channel, int camera) {
    return (static_cast<std::uint64_t>(channel) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(camera));
}

Vec3 CameraPathSpec::position(double s) const {
    if (waypoints.empty()) {
        throw ConfigError("camera path needs at least one waypoint");
    }
    if (waypoints.size() == 1) {
        return waypoints.front();
    }
    s = std::clamp(s, 0.0, 1.0);
    if (kind == Kind::Polyline) {
        const double scaled = s * static_cast<double>(waypoints.size() - 1);
        const size_t seg = std::min(static_cast<size_t>(scaled), waypoints.size() - 2);
        const double frac = scaled - static_cast<double>(seg);
        return (1.0 - frac) * waypoints[seg] + frac * waypoints[seg + 1];
    }
    // Quadratic: least-squares degree-<=2 polynomial through the waypoints at
    // uniform parameters (exact interpolation for three waypoints).
    const int degree = std::min<int>(2, static_cast<int>(waypoints.size()) - 1);
    Eigen::MatrixXd vand(waypoints.size(), degree + 1);
    Eigen::MatrixXd rhs(waypoints.size(), 3);
    for (size_t i = 0; i < waypoints.size(); ++i) {
        const double si = static_cast<double>(i) / static_cast<double>(waypoints.size() - 1);
        double p = 1.0;
        for (int d = 0; d <= degree; ++d) {
            vand(i, d) = p;
            p *= si;
        }
        rhs.row(i) = waypoints[i].transpose();
    }
    const Eigen::MatrixXd coeffs = vand.colPivHouseholderQr().solve(rhs);
    Vec3 out = Vec3::Zero();
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
        out += p * coeffs.row(d).transpose();
        p *= s;
    }
    return out;
}

void SceneConfig::validate() const {
    const size_t c = frames_per_camera.size();
    if (c == 0) {
        throw ConfigError("scene has no cameras");
    }
    if (offsets_frames.size() != c || camera_paths.size() != c || intrinsics.size() != c) {
        throw ConfigError("per-camera lists must all have the same length");
    }
    if (!(frame_rate_hz > 0.0)) {
        throw ConfigError("frame rate must be positive");
    }
    for (int f : frames_per_camera) {
        if (f < 1) {
            throw ConfigError("every camera needs at least one frame");
        }
    }
    for (const PinholeCamera& k : intrinsics) {
        k.validate();
    }
    if (targets.empty()) {
        throw ConfigError("scene has no targets");
    }
    for (const PolyTrajectory& t : targets) {
        t.validate();
    }
}

TimeModel SceneConfig::true_time_model(int camera) const {
    return {frame_rate_hz, offsets_frames[camera] / frame_rate_hz};
}

namespace {

UnitQuaternion look_at_rotation(const Vec3& position, const Vec3& aim) {
    const Vec3 to_aim = aim - position;
    if (!(to_aim.norm() > 1e-9)) {
        throw ConfigError("camera position coincides with its aim point");
    }
    const Vec3 forward = to_aim.normalized();
    const Vec3 up_world = Vec3::UnitZ();
    Vec3 right = forward.cross(up_world);
    if (!(right.norm() > 1e-9)) {
        throw ConfigError("camera looks along the world vertical; aim is degenerate");
    }
    right.normalize();
    const Vec3 down = forward.cross(right);
    Mat3 r;
    r.row(0) = right.transpose();
    r.row(1) = down.transpose();
    r.row(2) = forward.transpose();
    return UnitQuaternion::from_rotation_matrix(r);
}

}  // namespace

SimulatedScene synthesize_scene(const SceneConfig& cfg) {
    cfg.validate();
    SimulatedScene scene;
    const int num_cameras = cfg.num_cameras();

    for (int c = 0; c < num_cameras; ++c) {
        const TimeModel tm = cfg.true_time_model(c);
        const int frames = cfg.frames_per_camera[c];
        const double t_first = global_time(0, tm);
        const double t_last = global_time(frames - 1, tm);
        const double span = t_last - t_first;

        CameraTrack track;
        track.id = c;
        track.intrinsics = cfg.intrinsics[c];
        track.nominal_time = {cfg.frame_rate_hz, 0.0};
        track.poses.reserve(frames);
        for (int f = 0; f < frames; ++f) {
            const double t = global_time(f, tm);
            const double s = span > 0.0 ? (t - t_first) / span : 0.0;
            const Vec3 position = cfg.camera_paths[c].position(s);
            const UnitQuaternion q = look_at_rotation(position, cfg.camera_paths[c].aim);
            track.poses.push_back(FramePose::from_center(q, position));
        }
        scene.observations.cameras.push_back(std::move(track));
        scene.truth.time_models.push_back(tm);
    }

    for (size_t n = 0; n < cfg.targets.size(); ++n) {
        scene.truth.trajectories[static_cast<int>(n)] = cfg.targets[n];
    }

    for (int c = 0; c < num_cameras; ++c) {
        const CameraTrack& track = scene.observations.cameras[c];
        const TimeModel tm = cfg.true_time_model(c);
        for (int f = 0; f < cfg.frames_per_camera[c]; ++f) {
            const double t = global_time(f, tm);
            for (size_t n = 0; n < cfg.targets.size(); ++n) {
                const Vec3 x = eval_trajectory(cfg.targets[n], t);
                Observation ob;
                ob.camera = c;
                ob.frame = f;
                ob.target = static_cast<int>(n);
                try {
                    ob.pixel = project_point(x, track.intrinsics, track.poses[f]);
                } catch (const BehindCameraError&) {
                    throw ConfigError("target " + std::to_string(n) + " behind camera " +
                                      std::to_string(c) + " at frame " + std::to_string(f));
                }
                scene.observations.observations.push_back(ob);
            }
        }
    }

    for (int c = 0; c < num_cameras; ++c) {
        scene.truth.poses.push_back(scene.observations.cameras[c].poses);
    }
    return scene;
}

void NoiseConfig::validate() const {
    const double sigmas[] = {pixel_sigma, rotation_systematic_sigma, rotation_random_sigma,
                             position_systematic_sigma, position_random_sigma};
    for (double s : sigmas) {
        if (s < 0.0 || !std::isfinite(s)) {
            throw ConfigError("noise sigmas must be finite and non-negative");
        }
    }
}

ObservationSet apply_noise(const ObservationSet& obs, const NoiseConfig& noise) {
    noise.validate();
    ObservationSet out = obs;
    const double deg2rad = M_PI / 180.0;
    const bool rotation_noise =
        noise.rotation_systematic_sigma > 0.0 || noise.rotation_random_sigma > 0.0;
    const bool position_noise =
        noise.position_systematic_sigma > 0.0 || noise.position_random_sigma > 0.0;

    for (size_t c = 0; c < out.cameras.size(); ++c) {
        CameraTrack& cam = out.cameras[c];

        if (rotation_noise || position_noise) {
            UnitQuaternion q_sys = UnitQuaternion::identity();
            if (noise.rotation_systematic_sigma > 0.0) {
                StreamRng rng(noise.seed,
                              noise_stream(NoiseChannel::RotationSystematic, static_cast<int>(c)));
                const Vec3 axis = rng.isotropic_unit();
                q_sys = UnitQuaternion::from_axis_angle(
                    axis, rng.normal(noise.rotation_systematic_sigma * deg2rad));
            }
            Vec3 d_sys = Vec3::Zero();
            if (noise.position_systematic_sigma > 0.0) {
                StreamRng rng(noise.seed,
                              noise_stream(NoiseChannel::PositionSystematic, static_cast<int>(c)));
                d_sys = {rng.normal(noise.position_systematic_sigma),
                         rng.normal(noise.position_systematic_sigma),
                         rng.normal(noise.position_systematic_sigma)};
            }
            StreamRng rot_rng(noise.seed,
                              noise_stream(NoiseChannel::RotationRandom, static_cast<int>(c)));
            StreamRng pos_rng(noise.seed,
                              noise_stream(NoiseChannel::PositionRandom, static_cast<int>(c)));

            for (FramePose& pose : cam.poses) {
                UnitQuaternion q = pose.rotation;
                if (noise.rotation_random_sigma > 0.0) {
                    const Vec3 axis = rot_rng.isotropic_unit();
                    const UnitQuaternion q_rand = UnitQuaternion::from_axis_angle(
                        axis, rot_rng.normal(noise.rotation_random_sigma * deg2rad));
                    q = q_rand.compose(q_sys).compose(q);
                } else if (noise.rotation_systematic_sigma > 0.0) {
                    q = q_sys.compose(q);
                }
                Vec3 center = optical_center(pose);
                if (noise.position_random_sigma > 0.0) {
                    center += Vec3{pos_rng.normal(noise.position_random_sigma),
                                   pos_rng.normal(noise.position_random_sigma),
                                   pos_rng.normal(noise.position_random_sigma)};
                }
                center += d_sys;
                pose = FramePose::from_center(q.normalized(), center);
            }
        }

        if (noise.pixel_sigma > 0.0) {
            StreamRng rng(noise.seed, noise_stream(NoiseChannel::Pixel, static_cast<int>(c)));
            for (Observation& ob : out.observations) {
                if (ob.camera == static_cast<int>(c)) {
                    ob.pixel.x() += rng.normal(noise.pixel_sigma);
                    ob.pixel.y() += rng.normal(noise.pixel_sigma);
                }
            }
        }
    }
    return out;
}

LocalizationError localization_error(const PolyTrajectory& est, const PolyTrajectory& truth,
                                     const std::vector<double>& times) {
    if (times.empty()) {
        throw InvalidInputError("localization error requires at least one sample time");
    }
    LocalizationError err;
    for (double t : times) {
        const Vec3 d = eval_trajectory(est, t) - eval_trajectory(truth, t);
        err.sigma_x += std::abs(d.x());
        err.sigma_y += std::abs(d.y());
        err.sigma_z += std::abs(d.z());
        err.sigma_3d += d.norm();
    }
    const double n = static_cast<double>(times.size());
    err.sigma_x /= n;
    err.sigma_y /= n;
    err.sigma_z /= n;
    err.sigma_3d /= n;
    return err;
}

std::vector<double> true_frame_times(const SceneConfig& cfg) {
    std::vector<double> times;
    for (int c = 0; c < cfg.num_cameras(); ++c) {
        const TimeModel tm = cfg.true_time_model(c);
        for (int f = 0; f < cfg.frames_per_camera[c]; ++f) {
            times.push_back(global_time(f, tm));
        }
    }
    std::sort(times.begin(), times.end());
    return times;
}

}  // namespace atraj
