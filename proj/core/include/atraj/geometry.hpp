#pragma once

#include <Eigen/Core>

#include "atraj/errors.hpp"

namespace atraj {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Pinhole intrinsics. The assembled matrix is upper-triangular with
/// positive diagonal; pixel coordinates are continuous (sub-pixel).
struct PinholeCamera {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    double skew = 0.0;

    Mat3 matrix() const;

    /// Back-projects a pixel to a direction in the camera frame (z = 1).
    Vec3 back_project(const Vec2& pixel) const;

    void validate() const;
};

/// Rotation as a unit quaternion, w-first. q and -q encode the same rotation.
struct UnitQuaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
    UnitQuaternion normalized() const;

    /// Hamilton product this * rhs.
    UnitQuaternion compose(const UnitQuaternion& rhs) const;
    UnitQuaternion conjugate() const { return {w, -x, -y, -z}; }

    /// Rotation angle in radians separating two quaternions (double-cover aware).
    double geodesic_angle_to(const UnitQuaternion& other) const;

    static UnitQuaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }
    static UnitQuaternion from_axis_angle(const Vec3& axis, double angle_rad);
    static UnitQuaternion from_rotation_matrix(const Mat3& r);

    /// Exponential map from a rotation vector (axis * angle).
    static UnitQuaternion exp_map(const Vec3& rotation_vector);

    /// Logarithm map to a rotation vector; shortest representative.
    Vec3 log_map() const;
};

/// World-to-camera extrinsics for one camera at one frame: x_cam = R X + T.
struct FramePose {
    UnitQuaternion rotation;
    Vec3 translation = Vec3::Zero();

    /// Builds the pose from a rotation and the camera's world-space
    /// optical center (T = -R C).
    static FramePose from_center(const UnitQuaternion& q, const Vec3& center);
};

/// Half-line from a camera center through a pixel back-projection.
struct SightRay {
    Vec3 origin = Vec3::Zero();     // meters
    Vec3 direction = Vec3::UnitZ(); // unit norm
};

/// Quaternion to rotation matrix. Normalizes internally; throws
/// InvalidInputError on an all-zero quaternion.
Mat3 quat_to_rotation(const UnitQuaternion& q);

/// Projects a world point to pixel coordinates. Throws BehindCameraError
/// when the depth in the camera frame is <= depth_epsilon.
Vec2 project_point(const Vec3& point, const PinholeCamera& cam, const FramePose& pose,
                   double depth_epsilon = 1e-6);

/// World-space position of the optical center, C = -R^T T.
Vec3 optical_center(const FramePose& pose);

/// Back-projects a pixel to a unit-direction world ray anchored at the
/// optical center.
SightRay sight_ray(const Vec2& pixel, const PinholeCamera& cam, const FramePose& pose);

/// Component of (X - C) orthogonal to the ray: (I - L L^T)(X - C).
/// Its norm is the point-to-ray distance.
Vec3 ray_residual(const Vec3& point, const SightRay& ray);

/// Orthogonal projector I - L L^T for a unit direction L.
Mat3 ray_projector(const Vec3& direction);

/// Skew-symmetric cross-product matrix [v]x.
Mat3 skew(const Vec3& v);

}  // namespace atraj
