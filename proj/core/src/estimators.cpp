#include "atraj/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

namespace atraj {

void ObservationSet::validate() const {
    if (cameras.empty()) {
        throw InvalidInputError("observation set has no cameras");
    }
    for (const CameraTrack& cam : cameras) {
        cam.intrinsics.validate();
        cam.nominal_time.validate();
    }
    for (const Observation& ob : observations) {
        if (ob.camera < 0 || ob.camera >= static_cast<int>(cameras.size())) {
            throw InvalidInputError("observation references unknown camera");
        }
        const CameraTrack& cam = cameras[ob.camera];
        if (ob.frame < 0 || ob.frame >= static_cast<int>(cam.poses.size())) {
            throw InvalidInputError("observation references frame beyond the camera's poses");
        }
        if (!ob.pixel.allFinite()) {
            throw InvalidInputError("observation pixel is not finite");
        }
    }
}

std::vector<int> ObservationSet::target_ids() const {
    std::set<int> ids;
    for (const Observation& ob : observations) {
        ids.insert(ob.target);
    }
    return {ids.begin(), ids.end()};
}

std::vector<int> ObservationSet::frames_per_camera() const {
    std::vector<int> frames;
    frames.reserve(cameras.size());
    for (const CameraTrack& cam : cameras) {
        frames.push_back(static_cast<int>(cam.poses.size()));
    }
    return frames;
}

namespace {

// Inverse of the SO(3) left Jacobian, used for the derivative of the
// log-map prior residual under a left tangent perturbation.
Mat3 left_jacobian_inverse(const Vec3& phi) {
    const double theta = phi.norm();
    const Mat3 hat = skew(phi);
    if (theta < 1e-5) {
        return Mat3::Identity() - 0.5 * hat + (1.0 / 12.0) * hat * hat;
    }
    const double c = 1.0 / (theta * theta) -
                     (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
    return Mat3::Identity() - 0.5 * hat + c * hat * hat;
}

struct ObsEntry {
    int cam = 0;
    int frame = 0;
    int slot = 0;          // dense target index
    Vec3 center;           // measured optical center (positions are trusted)
    Vec3 back_proj;        // K^-1 [u v 1]^T in the camera frame
    double back_proj_norm = 1.0;
    Mat3 fixed_projector;  // projector from the measured rotation
    int rot_block = -1;
};

struct ProblemData {
    std::vector<ObsEntry> entries;
    std::vector<int> orders;                     // per slot
    std::vector<int> coeff_block;                // per slot
    std::vector<int> alpha_block, beta_block;    // per camera index
    std::vector<int> rot_block_list;             // rotation block indices, prior row order
    std::vector<UnitQuaternion> measured_rot;    // aligned with rot_block_list
    std::vector<Eigen::Index> block_offsets;     // tangent offset per block
    double t0 = 0.0;
    double prior_weight = 0.0;
    bool with_rotations = false;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
};

Vec3 eval_block_poly(const Eigen::VectorXd& coeffs, int order, double u) {
    Vec3 x = Vec3::Zero();
    double power = 1.0;
    for (int k = 0; k <= order; ++k) {
        x += power * coeffs.segment<3>(3 * k);
        power *= u;
    }
    return x;
}

Vec3 eval_block_poly_derivative(const Eigen::VectorXd& coeffs, int order, double u) {
    Vec3 x = Vec3::Zero();
    double power = 1.0;
    for (int k = 1; k <= order; ++k) {
        x += static_cast<double>(k) * power * coeffs.segment<3>(3 * k);
        power *= u;
    }
    return x;
}

double mid_nominal_time(const ObservationSet& obs) {
    double tmin = std::numeric_limits<double>::infinity();
    double tmax = -std::numeric_limits<double>::infinity();
    for (const Observation& ob : obs.observations) {
        const double t = global_time(ob.frame, obs.cameras[ob.camera].nominal_time);
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    if (!(tmin <= tmax)) {
        return 0.0;
    }
    return 0.5 * (tmin + tmax);
}

JointProblem build_joint_problem(const ObservationSet& obs, const std::vector<int>& orders,
                                 bool optimize_fps, bool with_rotations,
                                 double rotation_prior_weight) {
    obs.validate();
    const std::vector<int> targets = obs.target_ids();
    if (targets.empty()) {
        throw UnderdeterminedError("no observations", 0, 1);
    }
    if (orders.size() != targets.size()) {
        throw InvalidInputError("orders list must match the number of observed targets");
    }
    for (int k : orders) {
        if (k < 0 || k > kMaxTrajectoryOrder) {
            throw InvalidInputError("unsupported trajectory order");
        }
    }

    JointProblem jp;
    jp.target_ids = targets;
    jp.orders = orders;
    jp.time_origin = mid_nominal_time(obs);
    jp.rotation_prior_weight = with_rotations ? rotation_prior_weight : 0.0;

    auto data = std::make_shared<ProblemData>();
    data->orders = orders;
    data->t0 = jp.time_origin;
    data->prior_weight = jp.rotation_prior_weight;
    data->with_rotations = with_rotations;

    NllsProblem& problem = jp.problem;

    // Motion coefficient blocks, one per target, interleaved [x y z] per power.
    for (size_t s = 0; s < targets.size(); ++s) {
        jp.coeff_block.push_back(static_cast<int>(problem.blocks.size()));
        problem.blocks.push_back(
            ParameterBlock::euclidean(Eigen::VectorXd::Zero(3 * (orders[s] + 1))));
    }
    data->coeff_block = jp.coeff_block;

    // Per-camera clock blocks. The gauge camera is pinned to its nominal
    // values; other cameras free their frame rate only when requested.
    for (size_t c = 0; c < obs.cameras.size(); ++c) {
        const bool gauge = static_cast<int>(c) == kGaugeCamera;
        jp.alpha_block.push_back(static_cast<int>(problem.blocks.size()));
        problem.blocks.push_back(ParameterBlock::euclidean(
            {obs.cameras[c].nominal_time.alpha}, gauge || !optimize_fps));
        jp.beta_block.push_back(static_cast<int>(problem.blocks.size()));
        problem.blocks.push_back(ParameterBlock::euclidean({0.0}, gauge));
    }
    data->alpha_block = jp.alpha_block;
    data->beta_block = jp.beta_block;

    // Rotation blocks for every observed (camera, frame) pair.
    if (with_rotations) {
        std::set<std::pair<int, int>> frames;
        for (const Observation& ob : obs.observations) {
            frames.emplace(ob.camera, ob.frame);
        }
        for (const auto& [cam, frame] : frames) {
            const int idx = static_cast<int>(problem.blocks.size());
            jp.rotation_block[{cam, frame}] = idx;
            const UnitQuaternion measured = obs.cameras[cam].poses[frame].rotation.normalized();
            problem.blocks.push_back(ParameterBlock::quaternion(measured));
            data->rot_block_list.push_back(idx);
            data->measured_rot.push_back(measured);
        }
    }

    // Tangent offsets per block.
    Eigen::Index offset = 0;
    for (const ParameterBlock& b : problem.blocks) {
        data->block_offsets.push_back(offset);
        offset += b.tangent_size();
    }
    data->cols = offset;

    std::map<int, int> slot_of_target;
    for (size_t s = 0; s < targets.size(); ++s) {
        slot_of_target[targets[s]] = static_cast<int>(s);
    }
    data->entries.reserve(obs.observations.size());
    for (const Observation& ob : obs.observations) {
        ObsEntry e;
        e.cam = ob.camera;
        e.frame = ob.frame;
        e.slot = slot_of_target.at(ob.target);
        const CameraTrack& cam = obs.cameras[ob.camera];
        const FramePose& pose = cam.poses[ob.frame];
        e.center = optical_center(pose);
        e.back_proj = cam.intrinsics.back_project(ob.pixel);
        e.back_proj_norm = e.back_proj.norm();
        const SightRay ray = sight_ray(ob.pixel, cam.intrinsics, pose);
        e.fixed_projector = ray_projector(ray.direction);
        if (with_rotations) {
            e.rot_block = jp.rotation_block.at({ob.camera, ob.frame});
        }
        data->entries.push_back(e);
    }
    data->rows = 3 * static_cast<Eigen::Index>(data->entries.size());
    if (data->prior_weight > 0.0) {
        data->rows += 3 * static_cast<Eigen::Index>(data->rot_block_list.size());
    }

    problem.residual = [data](const std::vector<ParameterBlock>& blocks) -> Eigen::VectorXd {
        Eigen::VectorXd r(data->rows);
        Eigen::Index row = 0;
        for (const ObsEntry& e : data->entries) {
            const double alpha = blocks[data->alpha_block[e.cam]].values[0];
            const double beta = blocks[data->beta_block[e.cam]].values[0];
            const double u = static_cast<double>(e.frame) / alpha + beta - data->t0;
            const Eigen::VectorXd& coeffs = blocks[data->coeff_block[e.slot]].values;
            const Vec3 x = eval_block_poly(coeffs, data->orders[e.slot], u);
            if (data->with_rotations) {
                const Mat3 rot = quat_to_rotation(blocks[e.rot_block].as_quaternion());
                const Vec3 uvec = rot.transpose() * e.back_proj;
                const Vec3 dir = uvec / e.back_proj_norm;
                const Vec3 w = x - e.center;
                r.segment<3>(row) = w - dir * dir.dot(w);
            } else {
                r.segment<3>(row) = e.fixed_projector * (x - e.center);
            }
            row += 3;
        }
        if (data->prior_weight > 0.0) {
            for (size_t i = 0; i < data->rot_block_list.size(); ++i) {
                const UnitQuaternion q = blocks[data->rot_block_list[i]].as_quaternion();
                const Vec3 phi = q.compose(data->measured_rot[i].conjugate()).log_map();
                r.segment<3>(row) = data->prior_weight * phi;
                row += 3;
            }
        }
        return r;
    };

    problem.jacobian = [data](const std::vector<ParameterBlock>& blocks) -> Eigen::MatrixXd {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(data->rows, data->cols);
        Eigen::Index row = 0;
        for (const ObsEntry& e : data->entries) {
            const double alpha = blocks[data->alpha_block[e.cam]].values[0];
            const double beta = blocks[data->beta_block[e.cam]].values[0];
            const double u = static_cast<double>(e.frame) / alpha + beta - data->t0;
            const int order = data->orders[e.slot];
            const Eigen::VectorXd& coeffs = blocks[data->coeff_block[e.slot]].values;
            const Vec3 xdot = eval_block_poly_derivative(coeffs, order, u);

            Mat3 projector;
            if (data->with_rotations) {
                const Mat3 rot = quat_to_rotation(blocks[e.rot_block].as_quaternion());
                const Vec3 uvec = rot.transpose() * e.back_proj;
                const Vec3 dir = uvec / e.back_proj_norm;
                projector = ray_projector(dir);

                const Vec3 x = eval_block_poly(coeffs, order, u);
                const Vec3 w = x - e.center;
                const Mat3 de_dl = -(dir.dot(w) * Mat3::Identity() + dir * w.transpose());
                const Mat3 dl_du = projector / e.back_proj_norm;
                const Mat3 du_ddelta = rot.transpose() * skew(e.back_proj);
                jac.block<3, 3>(row, data->block_offsets[e.rot_block]) =
                    de_dl * dl_du * du_ddelta;
            } else {
                projector = e.fixed_projector;
            }

            double power = 1.0;
            const Eigen::Index coeff_off = data->block_offsets[data->coeff_block[e.slot]];
            for (int k = 0; k <= order; ++k) {
                jac.block<3, 3>(row, coeff_off + 3 * k) = projector * power;
                power *= u;
            }

            const Vec3 v_xdot = projector * xdot;
            jac.block<3, 1>(row, data->block_offsets[data->beta_block[e.cam]]) = v_xdot;
            jac.block<3, 1>(row, data->block_offsets[data->alpha_block[e.cam]]) =
                v_xdot * (-static_cast<double>(e.frame) / (alpha * alpha));
            row += 3;
        }
        if (data->prior_weight > 0.0) {
            for (size_t i = 0; i < data->rot_block_list.size(); ++i) {
                const int b = data->rot_block_list[i];
                const UnitQuaternion q = blocks[b].as_quaternion();
                const Vec3 phi = q.compose(data->measured_rot[i].conjugate()).log_map();
                jac.block<3, 3>(row, data->block_offsets[b]) =
                    data->prior_weight * left_jacobian_inverse(phi);
                row += 3;
            }
        }
        return jac;
    };

    return jp;
}

// Objective value at fixed trajectories/time models, for reports.
double objective_cost(const ObservationSet& obs, const std::map<int, PolyTrajectory>& trajs,
                      const std::vector<TimeModel>& tms) {
    double cost = 0.0;
    for (const Observation& ob : obs.observations) {
        const CameraTrack& cam = obs.cameras[ob.camera];
        const SightRay ray = sight_ray(ob.pixel, cam.intrinsics, cam.poses[ob.frame]);
        const double t = global_time(ob.frame, tms[ob.camera]);
        const Vec3 x = eval_trajectory(trajs.at(ob.target), t);
        cost += 0.5 * ray_residual(x, ray).squaredNorm();
    }
    return cost;
}

void check_linear_solvability(const ObservationSet& obs, const std::vector<int>& orders) {
    const SolvabilityReport rep = check_solvability(
        static_cast<int>(obs.cameras.size()), obs.frames_per_camera(), orders, false);
    if (!rep.solvable) {
        throw UnderdeterminedError("not enough observations for the requested orders",
                                   rep.equations, rep.unknowns);
    }
}

std::map<int, PolyTrajectory> fit_all_targets(const ObservationSet& obs,
                                              const std::vector<int>& targets,
                                              const std::vector<int>& orders,
                                              const std::vector<TimeModel>& tms,
                                              const IntersectionOptions& iopts) {
    std::map<int, PolyTrajectory> trajs;
    for (size_t s = 0; s < targets.size(); ++s) {
        RayBundle bundle;
        bundle.target_id = targets[s];
        for (const Observation& ob : obs.observations) {
            if (ob.target != targets[s]) {
                continue;
            }
            const CameraTrack& cam = obs.cameras[ob.camera];
            bundle.rays.push_back(sight_ray(ob.pixel, cam.intrinsics, cam.poses[ob.frame]));
            bundle.times.push_back(global_time(ob.frame, tms[ob.camera]));
        }
        trajs[targets[s]] = fit_trajectory_known_time(bundle, orders[s], iopts);
    }
    return trajs;
}

std::vector<TimeModel> nominal_time_models(const ObservationSet& obs) {
    std::vector<TimeModel> tms;
    tms.reserve(obs.cameras.size());
    for (const CameraTrack& cam : obs.cameras) {
        tms.push_back({cam.nominal_time.alpha, 0.0});
    }
    return tms;
}

ReconstructionResult finish_linear_result(const ObservationSet& obs,
                                          std::map<int, PolyTrajectory> trajs,
                                          const std::vector<TimeModel>& tms,
                                          SolveReport report) {
    ReconstructionResult result;
    result.trajectories = std::move(trajs);
    for (size_t c = 0; c < obs.cameras.size(); ++c) {
        result.time_models[obs.cameras[c].id] = tms[c];
    }
    result.report = report;
    return result;
}

}  // namespace

JointProblem make_time_motion_problem(const ObservationSet& obs, const std::vector<int>& orders,
                                      bool optimize_fps) {
    return build_joint_problem(obs, orders, optimize_fps, false, 0.0);
}

JointProblem make_rotation_time_motion_problem(const ObservationSet& obs,
                                               const std::vector<int>& orders, bool optimize_fps,
                                               double rotation_prior_weight) {
    return build_joint_problem(obs, orders, optimize_fps, true, rotation_prior_weight);
}

ReconstructionResult reconstruct_multi_ti(const ObservationSet& obs, int order,
                                          const IntersectionOptions& iopts) {
    obs.validate();
    const std::vector<int> targets = obs.target_ids();
    if (targets.empty()) {
        throw UnderdeterminedError("no observations", 0, 3 * (order + 1));
    }
    const std::vector<int> orders(targets.size(), order);
    check_linear_solvability(obs, orders);

    const std::vector<TimeModel> tms = nominal_time_models(obs);
    std::map<int, PolyTrajectory> trajs = fit_all_targets(obs, targets, orders, tms,
                                                          iopts);
    SolveReport report;
    report.converged = true;
    report.iterations = 0;
    report.initial_cost = report.final_cost = objective_cost(obs, trajs, tms);
    return finish_linear_result(obs, std::move(trajs), tms, report);
}

namespace {

// Point-to-ray distance of the trajectory point at time t, with first and
// second time derivatives.
struct RayTimeObjective {
    const PolyTrajectory& traj;
    const SightRay& ray;
    Mat3 projector;

    explicit RayTimeObjective(const PolyTrajectory& traj, const SightRay& ray)
        : traj(traj), ray(ray), projector(ray_projector(ray.direction)) {}

    double value(double t) const {
        return 0.5 * (projector * (eval_trajectory(traj, t) - ray.origin)).squaredNorm();
    }

    std::pair<double, double> derivatives(double t) const {
        const Vec3 e = projector * (eval_trajectory(traj, t) - ray.origin);
        const Vec3 vdot = projector * trajectory_derivative(traj, t, 1);
        double d2 = vdot.squaredNorm();
        if (traj.order >= 2) {
            d2 += e.dot(projector * trajectory_derivative(traj, t, 2));
        }
        return {e.dot(vdot), d2};
    }
};

// Time at which the trajectory passes closest to the ray: coarse bracket
// scan over the widened window, then Newton refinement.
double closest_time_on_ray(const RayTimeObjective& objective, double window_lo,
                           double window_hi) {
    const double margin = std::max(1.0, window_hi - window_lo);
    const double lo = window_lo - margin;
    const double hi = window_hi + margin;
    const int samples = 61;
    double best_t = lo;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
        const double v = objective.value(t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    double t = best_t;
    for (int i = 0; i < 20; ++i) {
        const auto [d1, d2] = objective.derivatives(t);
        if (!(d2 > 0.0)) {
            break;
        }
        const double step = d1 / d2;
        const double next = std::clamp(t - step, lo, hi);
        const double v = objective.value(next);
        if (v <= best) {
            best = v;
            best_t = next;
        }
        t = next;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(t))) {
            break;
        }
    }
    return best_t;
}

// Offset update for one camera: assign each of its observations the time at
// which the current trajectory meets the observation ray, then regress the
// shared offset (slope pinned to 1/alpha) as the mean assignment residual.
double assign_camera_offset(const ObservationSet& obs,
                            const std::map<int, PolyTrajectory>& trajs, int camera,
                            const TimeModel& tm, int frames) {
    const double window_lo = tm.beta;
    const double window_hi = static_cast<double>(frames - 1) / tm.alpha + tm.beta;
    double sum = 0.0;
    long count = 0;
    for (const Observation& ob : obs.observations) {
        if (ob.camera != camera) {
            continue;
        }
        const CameraTrack& cam = obs.cameras[ob.camera];
        const SightRay ray = sight_ray(ob.pixel, cam.intrinsics, cam.poses[ob.frame]);
        const RayTimeObjective objective(trajs.at(ob.target), ray);
        const double assigned = closest_time_on_ray(objective, window_lo, window_hi);
        sum += assigned - static_cast<double>(ob.frame) / tm.alpha;
        ++count;
    }
    return count > 0 ? sum / static_cast<double>(count) : tm.beta;
}

}  // namespace

ReconstructionResult reconstruct_li(const ObservationSet& obs, int order,
                                    const LiOptions& lopts) {
    obs.validate();
    const std::vector<int> targets = obs.target_ids();
    if (targets.empty()) {
        throw UnderdeterminedError("no observations", 0, 3 * (order + 1));
    }
    const std::vector<int> orders(targets.size(), order);
    check_linear_solvability(obs, orders);

    std::vector<TimeModel> tms = nominal_time_models(obs);
    std::map<int, PolyTrajectory> trajs;

    SolveReport report;
    bool first = true;
    int outer = 0;
    for (; outer < lopts.max_outer_iterations; ++outer) {
        trajs = fit_all_targets(obs, targets, orders, tms, lopts.intersection);
        if (first) {
            report.initial_cost = objective_cost(obs, trajs, tms);
            first = false;
        }
        double max_change = 0.0;
        for (size_t c = 0; c < obs.cameras.size(); ++c) {
            if (static_cast<int>(c) == kGaugeCamera) {
                continue;
            }
            const int frames = static_cast<int>(obs.cameras[c].poses.size());
            const double beta =
                assign_camera_offset(obs, trajs, static_cast<int>(c), tms[c], frames);
            max_change = std::max(max_change, std::abs(beta - tms[c].beta));
            tms[c].beta = beta;
        }
        if (max_change < lopts.tol) {
            report.converged = true;
            ++outer;
            break;
        }
    }
    trajs = fit_all_targets(obs, targets, orders, tms, lopts.intersection);
    report.iterations = outer;
    report.final_cost = objective_cost(obs, trajs, tms);
    report.termination_reason = report.converged ? TerminationReason::StepTol
                                                 : TerminationReason::MaxIterations;
    return finish_linear_result(obs, std::move(trajs), tms, report);
}

namespace {

PolyTrajectory trajectory_from_block(const Eigen::VectorXd& values, int order,
                                     double time_origin) {
    PolyTrajectory centered;
    centered.order = order;
    centered.coeffs_x.resize(order + 1);
    centered.coeffs_y.resize(order + 1);
    centered.coeffs_z.resize(order + 1);
    for (int k = 0; k <= order; ++k) {
        centered.coeffs_x[k] = values[3 * k + 0];
        centered.coeffs_y[k] = values[3 * k + 1];
        centered.coeffs_z[k] = values[3 * k + 2];
    }
    return centered.shifted_time(-time_origin);
}

void seed_coeff_block(Eigen::VectorXd& values, const PolyTrajectory& traj, double time_origin) {
    const PolyTrajectory centered = traj.shifted_time(time_origin);
    for (int k = 0; k <= traj.order; ++k) {
        values[3 * k + 0] = centered.coeffs_x[k];
        values[3 * k + 1] = centered.coeffs_y[k];
        values[3 * k + 2] = centered.coeffs_z[k];
    }
}

ReconstructionResult extract_joint_result(const ObservationSet& obs, const JointProblem& jp,
                                          SolveReport report, bool with_rotations) {
    ReconstructionResult result;
    for (size_t s = 0; s < jp.target_ids.size(); ++s) {
        result.trajectories[jp.target_ids[s]] = trajectory_from_block(
            jp.problem.blocks[jp.coeff_block[s]].values, jp.orders[s], jp.time_origin);
    }
    for (size_t c = 0; c < obs.cameras.size(); ++c) {
        TimeModel tm;
        tm.alpha = jp.problem.blocks[jp.alpha_block[c]].values[0];
        tm.beta = jp.problem.blocks[jp.beta_block[c]].values[0];
        result.time_models[obs.cameras[c].id] = tm;
    }
    if (with_rotations) {
        std::map<int, std::vector<UnitQuaternion>> rotations;
        for (size_t c = 0; c < obs.cameras.size(); ++c) {
            std::vector<UnitQuaternion> qs;
            qs.reserve(obs.cameras[c].poses.size());
            for (size_t f = 0; f < obs.cameras[c].poses.size(); ++f) {
                const auto it = jp.rotation_block.find({static_cast<int>(c),
                                                        static_cast<int>(f)});
                if (it != jp.rotation_block.end()) {
                    qs.push_back(jp.problem.blocks[it->second].as_quaternion());
                } else {
                    qs.push_back(obs.cameras[c].poses[f].rotation);
                }
            }
            rotations[obs.cameras[c].id] = std::move(qs);
        }
        result.rotations = std::move(rotations);
    }
    result.report = report;
    return result;
}

ReconstructionResult algorithm1_impl(const ObservationSet& obs, const std::vector<int>& orders,
                                     bool optimize_fps, const SolveOptions& options) {
    obs.validate();
    const std::vector<int> targets = obs.target_ids();
    if (targets.empty()) {
        throw UnderdeterminedError("no observations", 0, 1);
    }
    check_linear_solvability(obs, orders);

    // Linear initialization: zero offsets, nominal rates.
    const std::vector<TimeModel> tms = nominal_time_models(obs);
    const std::map<int, PolyTrajectory> init =
        fit_all_targets(obs, targets, orders, tms, IntersectionOptions{});

    JointProblem jp = make_time_motion_problem(obs, orders, optimize_fps);
    for (size_t s = 0; s < targets.size(); ++s) {
        seed_coeff_block(jp.problem.blocks[jp.coeff_block[s]].values, init.at(targets[s]),
                         jp.time_origin);
    }
    const SolveReport report = solve_nlls(jp.problem, options);
    return extract_joint_result(obs, jp, report, false);
}

}  // namespace

ReconstructionResult reconstruct_algorithm1(const ObservationSet& obs, int order,
                                            bool optimize_fps, const SolveOptions& options) {
    obs.validate();
    const std::vector<int> orders(obs.target_ids().size(), order);
    return algorithm1_impl(obs, orders, optimize_fps, options);
}

ReconstructionResult reconstruct_algorithm2(const ObservationSet& obs,
                                            const std::vector<int>& orders, bool optimize_fps,
                                            double rotation_prior_weight,
                                            const SolveOptions& options) {
    obs.validate();
    const SolvabilityReport solvability = check_solvability(
        static_cast<int>(obs.cameras.size()), obs.frames_per_camera(), orders, true);
    if (!solvability.solvable) {
        throw UnderdeterminedError("rotation optimization is not solvable for this setup",
                                   solvability.equations, solvability.unknowns);
    }

    const ReconstructionResult init = algorithm1_impl(obs, orders, optimize_fps, options);

    JointProblem jp =
        make_rotation_time_motion_problem(obs, orders, optimize_fps, rotation_prior_weight);
    for (size_t s = 0; s < jp.target_ids.size(); ++s) {
        seed_coeff_block(jp.problem.blocks[jp.coeff_block[s]].values,
                         init.trajectories.at(jp.target_ids[s]), jp.time_origin);
    }
    for (size_t c = 0; c < obs.cameras.size(); ++c) {
        const TimeModel& tm = init.time_models.at(obs.cameras[c].id);
        jp.problem.blocks[jp.alpha_block[c]].values[0] = tm.alpha;
        jp.problem.blocks[jp.beta_block[c]].values[0] = tm.beta;
    }
    const SolveReport report = solve_nlls(jp.problem, options);
    return extract_joint_result(obs, jp, report, true);
}

}  // namespace atraj
