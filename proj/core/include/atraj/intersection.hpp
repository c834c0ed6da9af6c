#pragma once

#include <optional>
#include <vector>

#include "atraj/geometry.hpp"
#include "atraj/motion.hpp"

namespace atraj {

/// Sight rays of one target with their capture times.
struct RayBundle {
    std::vector<SightRay> rays;
    std::vector<double> times;  // seconds, same length as rays
    int target_id = 0;

    void validate() const;
};

/// Outcome of the ray-geometry degeneracy analysis.
struct DegeneracyReport {
    bool common_point = false;
    Vec3 common_point_witness = Vec3::Zero();
    /// When the common point lies at infinity (all rays parallel) the
    /// witness is the shared direction instead of a finite point.
    bool witness_at_infinity = false;

    bool coplanar = false;
    Vec3 plane_normal = Vec3::Zero();

    /// Smallest-to-largest singular value ratio of the coplanarity system.
    double min_singular_ratio = 1.0;

    bool degenerate() const { return common_point || coplanar; }
};

/// Tolerances for the linear solvers and degeneracy tests. The degenerate
/// cases are structural; these thresholds only decide how close to them we
/// refuse to solve.
struct IntersectionOptions {
    double point_tol = 1e-6;   // residual RMS per unit depth
    double plane_tol = 1e-8;   // relative singular-value cutoff
    double cond_max = 1e12;    // design-matrix condition ceiling
    double rank_tol = 1e-10;   // eigenvalue ratio cutoff for the normal matrix
};

/// Least-squares point from two or more simultaneous rays, solved from the
/// stacked normal equations (sum V) X = sum (V C). Throws
/// DegenerateGeometryError when the normal matrix is rank deficient
/// (parallel or identical rays).
Vec3 triangulate_synchronized(const std::vector<SightRay>& rays,
                              const IntersectionOptions& opts = {});

/// Fits a degree-K trajectory through the ray bundle at its known times by
/// one linear least-squares solve (QR on the stacked design matrix).
/// Throws UnderdeterminedError when 2 * rays < 3 (K + 1) and
/// IllConditionedError when the design matrix condition exceeds cond_max.
PolyTrajectory fit_trajectory_known_time(const RayBundle& bundle, int order,
                                         const IntersectionOptions& opts = {});

/// Ill-conditioned trajectory fit; carries the degeneracy analysis of the
/// offending bundle.
class IllConditionedError : public Error {
public:
    IllConditionedError(const std::string& what, double condition, DegeneracyReport report)
        : Error(what), condition(condition), report(std::move(report)) {}
    double condition;
    DegeneracyReport report;
};

/// Flags common-point and coplanar ray configurations with witnesses.
DegeneracyReport detect_degeneracy(const RayBundle& bundle,
                                   const IntersectionOptions& opts = {});

/// Equation/unknown accounting for the joint reconstruction problem.
struct SolvabilityReport {
    bool solvable = false;
    long equations = 0;
    long unknowns = 0;
};

/// Counts constraint equations (two per observation of each target) against
/// motion, time, and optional per-frame rotation unknowns. With rotation
/// optimization a single target is never solvable.
SolvabilityReport check_solvability(int num_cameras, const std::vector<int>& frames_per_camera,
                                    const std::vector<int>& orders, bool optimize_rotations);

}  // namespace atraj
