#include "atraj/geometry.hpp"

#include <cmath>

namespace atraj {

Mat3 PinholeCamera::matrix() const {
    Mat3 k;
    k << fx, skew, cx,
         0.0, fy, cy,
         0.0, 0.0, 1.0;
    return k;
}

Vec3 PinholeCamera::back_project(const Vec2& pixel) const {
    validate();
    // Analytic inverse of the upper-triangular intrinsic matrix.
    const double y = (pixel.y() - cy) / fy;
    const double x = (pixel.x() - cx - skew * y) / fx;
    return {x, y, 1.0};
}

void PinholeCamera::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw InvalidInputError("pinhole camera requires positive focal lengths");
    }
}

double UnitQuaternion::norm() const {
    return std::sqrt(w * w + x * x + y * y + z * z);
}

UnitQuaternion UnitQuaternion::normalized() const {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw InvalidInputError("cannot normalize a zero or non-finite quaternion");
    }
    return {w / n, x / n, y / n, z / n};
}

UnitQuaternion UnitQuaternion::compose(const UnitQuaternion& r) const {
    return {w * r.w - x * r.x - y * r.y - z * r.z,
            w * r.x + x * r.w + y * r.z - z * r.y,
            w * r.y - x * r.z + y * r.w + z * r.x,
            w * r.z + x * r.y - y * r.x + z * r.w};
}

double UnitQuaternion::geodesic_angle_to(const UnitQuaternion& other) const {
    const UnitQuaternion a = normalized();
    const UnitQuaternion b = other.normalized();
    double dot = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    dot = std::min(1.0, std::abs(dot));
    return 2.0 * std::acos(dot);
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle_rad) {
    const double n = axis.norm();
    if (!(n > 0.0)) {
        throw InvalidInputError("axis-angle rotation requires a nonzero axis");
    }
    const double half = 0.5 * angle_rad;
    const Vec3 u = axis / n;
    const double s = std::sin(half);
    return {std::cos(half), u.x() * s, u.y() * s, u.z() * s};
}

UnitQuaternion UnitQuaternion::from_rotation_matrix(const Mat3& r) {
    // Shepperd's method: pick the largest diagonal combination for stability.
    const double trace = r.trace();
    UnitQuaternion q;
    if (trace > 0.0) {
        const double s = std::sqrt(trace + 1.0) * 2.0;
        q.w = 0.25 * s;
        q.x = (r(2, 1) - r(1, 2)) / s;
        q.y = (r(0, 2) - r(2, 0)) / s;
        q.z = (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        q.w = (r(2, 1) - r(1, 2)) / s;
        q.x = 0.25 * s;
        q.y = (r(0, 1) + r(1, 0)) / s;
        q.z = (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        q.w = (r(0, 2) - r(2, 0)) / s;
        q.x = (r(0, 1) + r(1, 0)) / s;
        q.y = 0.25 * s;
        q.z = (r(1, 2) + r(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        q.w = (r(1, 0) - r(0, 1)) / s;
        q.x = (r(0, 2) + r(2, 0)) / s;
        q.y = (r(1, 2) + r(2, 1)) / s;
        q.z = 0.25 * s;
    }
    return q.normalized();
}

UnitQuaternion UnitQuaternion::exp_map(const Vec3& rv) {
    const double angle = rv.norm();
    if (angle < 1e-12) {
        // First-order expansion; renormalize to stay on the sphere.
        return UnitQuaternion{1.0, 0.5 * rv.x(), 0.5 * rv.y(), 0.5 * rv.z()}.normalized();
    }
    return from_axis_angle(rv, angle);
}

Vec3 UnitQuaternion::log_map() const {
    UnitQuaternion q = normalized();
    if (q.w < 0.0) {  // shortest representative
        q = {-q.w, -q.x, -q.y, -q.z};
    }
    const Vec3 v{q.x, q.y, q.z};
    const double vn = v.norm();
    if (vn < 1e-12) {
        return 2.0 * v;
    }
    const double angle = 2.0 * std::atan2(vn, q.w);
    return (angle / vn) * v;
}

FramePose FramePose::from_center(const UnitQuaternion& q, const Vec3& center) {
    FramePose pose;
    pose.rotation = q.normalized();
    pose.translation = -(quat_to_rotation(pose.rotation) * center);
    return pose;
}

Mat3 quat_to_rotation(const UnitQuaternion& q_in) {
    const UnitQuaternion q = q_in.normalized();
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 r;
    r << 1 - 2 * y * y - 2 * z * z, 2 * x * y - 2 * w * z, 2 * x * z + 2 * w * y,
         2 * x * y + 2 * w * z, 1 - 2 * x * x - 2 * z * z, 2 * y * z - 2 * w * x,
         2 * x * z - 2 * w * y, 2 * y * z + 2 * w * x, 1 - 2 * x * x - 2 * y * y;
    return r;
}

Vec2 project_point(const Vec3& point, const PinholeCamera& cam, const FramePose& pose,
                   double depth_epsilon) {
    cam.validate();
    const Mat3 r = quat_to_rotation(pose.rotation);
    const Vec3 pc = r * point + pose.translation;
    if (!(pc.z() > depth_epsilon)) {
        throw BehindCameraError("point at non-positive depth " + std::to_string(pc.z()));
    }
    const Vec3 h = cam.matrix() * pc;
    return {h.x() / h.z(), h.y() / h.z()};
}

Vec3 optical_center(const FramePose& pose) {
    const Mat3 r = quat_to_rotation(pose.rotation);
    return -(r.transpose() * pose.translation);
}

SightRay sight_ray(const Vec2& pixel, const PinholeCamera& cam, const FramePose& pose) {
    const Mat3 r = quat_to_rotation(pose.rotation);
    const Vec3 d = r.transpose() * cam.back_project(pixel);
    SightRay ray;
    ray.origin = optical_center(pose);
    ray.direction = d / d.norm();
    return ray;
}

Vec3 ray_residual(const Vec3& point, const SightRay& ray) {
    const Vec3 w = point - ray.origin;
    return w - ray.direction * ray.direction.dot(w);
}

Mat3 ray_projector(const Vec3& direction) {
    return Mat3::Identity() - direction * direction.transpose();
}

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

}  // namespace atraj
