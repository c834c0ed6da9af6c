#include "atraj/intersection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace atraj {

void RayBundle::validate() const {
    if (rays.size() != times.size()) {
        throw InvalidInputError("ray bundle rays/times length mismatch");
    }
    for (double t : times) {
        if (!std::isfinite(t)) {
            throw InvalidInputError("ray bundle contains a non-finite time");
        }
    }
}

Vec3 triangulate_synchronized(const std::vector<SightRay>& rays,
                              const IntersectionOptions& opts) {
    if (rays.size() < 2) {
        throw InvalidInputError("triangulation requires at least two rays");
    }
    Mat3 normal = Mat3::Zero();
    Vec3 rhs = Vec3::Zero();
    for (const SightRay& ray : rays) {
        const Mat3 v = ray_projector(ray.direction);
        normal += v;
        rhs += v * ray.origin;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(normal);
    const Vec3 ev = eig.eigenvalues();  // ascending
    const double ratio = ev[2] > 0.0 ? ev[0] / ev[2] : 0.0;
    if (!(ratio > opts.rank_tol)) {
        throw DegenerateGeometryError(
            "rank-deficient ray system (parallel or identical rays)", ratio);
    }
    return normal.ldlt().solve(rhs);
}

namespace {

// Design matrix row block for one ray at centered time u:
// V * [u^0 I3 | u^1 I3 | ... | u^K I3].
void fill_design_block(Eigen::Ref<Eigen::MatrixXd> block, const Mat3& v, double u, int order) {
    double power = 1.0;
    for (int k = 0; k <= order; ++k) {
        block.middleCols(3 * k, 3) = v * power;
        power *= u;
    }
}

}  // namespace

PolyTrajectory fit_trajectory_known_time(const RayBundle& bundle, int order,
                                         const IntersectionOptions& opts) {
    bundle.validate();
    if (order < 0 || order > kMaxTrajectoryOrder) {
        throw InvalidInputError("unsupported trajectory order");
    }
    const long num_rays = static_cast<long>(bundle.rays.size());
    const long unknowns = 3 * (order + 1);
    if (2 * num_rays < unknowns) {
        throw UnderdeterminedError("too few rays for the requested order",
                                   2 * num_rays, unknowns);
    }

    // Centered time keeps the Vandermonde-like columns well scaled.
    const auto [tmin_it, tmax_it] =
        std::minmax_element(bundle.times.begin(), bundle.times.end());
    const double t_mid = 0.5 * (*tmin_it + *tmax_it);

    Eigen::MatrixXd design(3 * num_rays, unknowns);
    Eigen::VectorXd rhs(3 * num_rays);
    for (long i = 0; i < num_rays; ++i) {
        const SightRay& ray = bundle.rays[i];
        const Mat3 v = ray_projector(ray.direction);
        fill_design_block(design.middleRows(3 * i, 3), v, bundle.times[i] - t_mid, order);
        rhs.segment<3>(3 * i) = v * ray.origin;
    }

    // Rank-revealing QR on the stacked design matrix; the pivoted R diagonal
    // ratio serves as the condition estimate.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::MatrixXd& r = qr.matrixR();
    const double r_head = std::abs(r(0, 0));
    const double r_tail = std::abs(r(unknowns - 1, unknowns - 1));
    const double condition =
        r_tail > 0.0 ? r_head / r_tail : std::numeric_limits<double>::infinity();
    if (!(condition < opts.cond_max)) {
        throw IllConditionedError("trajectory fit is ill conditioned", condition,
                                  detect_degeneracy(bundle, opts));
    }
    const Eigen::VectorXd sol = qr.solve(rhs);

    PolyTrajectory centered;
    centered.order = order;
    centered.coeffs_x.resize(order + 1);
    centered.coeffs_y.resize(order + 1);
    centered.coeffs_z.resize(order + 1);
    for (int k = 0; k <= order; ++k) {
        centered.coeffs_x[k] = sol[3 * k + 0];
        centered.coeffs_y[k] = sol[3 * k + 1];
        centered.coeffs_z[k] = sol[3 * k + 2];
    }
    // Shift back to the global time origin: X(t) = centered(t - t_mid).
    return centered.shifted_time(-t_mid);
}

DegeneracyReport detect_degeneracy(const RayBundle& bundle, const IntersectionOptions& opts) {
    bundle.validate();
    if (bundle.rays.size() < 2) {
        throw InvalidInputError("degeneracy analysis requires at least two rays");
    }
    DegeneracyReport report;
    const long n = static_cast<long>(bundle.rays.size());

    // Common finite point: does one 3D point sit on every ray?
    Mat3 normal = Mat3::Zero();
    Vec3 rhs = Vec3::Zero();
    for (const SightRay& ray : bundle.rays) {
        const Mat3 v = ray_projector(ray.direction);
        normal += v;
        rhs += v * ray.origin;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(normal);
    const Vec3 ev = eig.eigenvalues();
    const double rank_ratio = ev[2] > 0.0 ? ev[0] / ev[2] : 0.0;
    if (rank_ratio > opts.rank_tol) {
        const Vec3 point = normal.ldlt().solve(rhs);
        double sq_sum = 0.0;
        double depth_sum = 0.0;
        for (const SightRay& ray : bundle.rays) {
            sq_sum += ray_residual(point, ray).squaredNorm();
            depth_sum += (point - ray.origin).norm();
        }
        const double rms = std::sqrt(sq_sum / static_cast<double>(n));
        const double mean_depth = std::max(1.0, depth_sum / static_cast<double>(n));
        if (rms / mean_depth < opts.point_tol) {
            report.common_point = true;
            report.common_point_witness = point;
        }
    } else {
        // Rank-deficient normal matrix: the rays share a direction and meet
        // at infinity. Witness is that direction.
        report.common_point = true;
        report.witness_at_infinity = true;
        report.common_point_witness = bundle.rays.front().direction;
    }

    // Coplanarity: a normal n with n . direction = 0 for every ray and
    // n . (origin - centroid) = 0 for every origin. Stack both families of
    // rows and look at the smallest singular value.
    Vec3 centroid = Vec3::Zero();
    for (const SightRay& ray : bundle.rays) {
        centroid += ray.origin;
    }
    centroid /= static_cast<double>(n);
    double origin_scale = 0.0;
    for (const SightRay& ray : bundle.rays) {
        origin_scale = std::max(origin_scale, (ray.origin - centroid).norm());
    }
    if (origin_scale <= 0.0) {
        origin_scale = 1.0;
    }
    Eigen::MatrixXd coplanarity(2 * n, 3);
    for (long i = 0; i < n; ++i) {
        coplanarity.row(2 * i) = bundle.rays[i].direction.transpose();
        coplanarity.row(2 * i + 1) =
            ((bundle.rays[i].origin - centroid) / origin_scale).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(coplanarity, Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(2);
    report.min_singular_ratio = smax > 0.0 ? smin / smax : 0.0;
    if (report.min_singular_ratio < opts.plane_tol) {
        report.coplanar = true;
        report.plane_normal = svd.matrixV().col(2);
    }
    return report;
}

SolvabilityReport check_solvability(int num_cameras, const std::vector<int>& frames_per_camera,
                                    const std::vector<int>& orders, bool optimize_rotations) {
    if (num_cameras < 1 || static_cast<int>(frames_per_camera.size()) != num_cameras) {
        throw InvalidInputError("frames_per_camera must list every camera");
    }
    if (orders.empty()) {
        throw InvalidInputError("at least one target order is required");
    }
    const long num_targets = static_cast<long>(orders.size());
    const long total_frames = std::accumulate(frames_per_camera.begin(),
                                              frames_per_camera.end(), 0L);
    long motion_unknowns = 0;
    for (int k : orders) {
        motion_unknowns += 3 * (static_cast<long>(k) + 1);
    }

    SolvabilityReport report;
    report.equations = 2 * total_frames * num_targets;
    report.unknowns = motion_unknowns + 2 * num_cameras;
    if (optimize_rotations) {
        report.unknowns += 3 * total_frames;
        // With one target the equation count can never reach the per-frame
        // rotation unknowns; otherwise apply the frame-count bound.
        if (num_targets < 2) {
            report.solvable = false;
        } else {
            const double bound = static_cast<double>(motion_unknowns + 2 * num_cameras) /
                                 static_cast<double>(2 * num_targets - 3);
            report.solvable = static_cast<double>(total_frames) >= bound;
        }
    } else {
        report.solvable = report.equations >= report.unknowns;
    }
    return report;
}

}  // namespace atraj
