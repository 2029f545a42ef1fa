#pragma once

// Ground-plane fitting, up-vector selection, and gravity alignment of a
// reconstruction.

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <vector>

#include "del/reconstruction.hpp"

namespace del {

struct Plane {
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    double offset = 0.0;  // normal . x = offset for on-plane x

    double distance(const Eigen::Vector3d& x) const {
        return std::abs(normal.dot(x) - offset);
    }
};

struct PlaneFitResult {
    Plane plane;
    std::vector<int> inliers;
};

struct RansacParams {
    double inlier_dist = 2.0;  // meters
    int max_iters = 1000;
    uint64_t seed = 0;
};

namespace detail {

inline Plane least_squares_plane(const std::vector<Eigen::Vector3d>& points,
                                 const std::vector<int>& idx) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i : idx) centroid += points[i];
    centroid /= static_cast<double>(idx.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i : idx) {
        const Eigen::Vector3d d = points[i] - centroid;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const Eigen::Vector3d n = es.eigenvectors().col(0).normalized();
    return {n, n.dot(centroid)};
}

inline bool collinear(const std::vector<Eigen::Vector3d>& points) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : points) centroid += p;
    centroid /= static_cast<double>(points.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector3d d = p - centroid;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const double e0 = es.eigenvalues()(2);
    const double e1 = es.eigenvalues()(1);
    return e0 <= 0.0 || e1 / e0 < 1e-12;
}

}  // namespace detail

inline PlaneFitResult fit_plane_ransac(const std::vector<Eigen::Vector3d>& points,
                                       const RansacParams& params) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw std::invalid_argument("fit_plane_ransac: need >= 3 points");
    if (detail::collinear(points))
        throw std::invalid_argument("fit_plane_ransac: points are collinear");

    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<int> pick(0, n - 1);

    int best_count = -1;
    Plane best_plane;
    for (int it = 0; it < params.max_iters; ++it) {
        const int a = pick(rng), b = pick(rng), c = pick(rng);
        if (a == b || a == c || b == c) continue;
        const Eigen::Vector3d nrm =
            (points[b] - points[a]).cross(points[c] - points[a]);
        if (nrm.norm() < 1e-12) continue;
        const Eigen::Vector3d nh = nrm.normalized();
        const double d = nh.dot(points[a]);
        int count = 0;
        for (const auto& p : points)
            if (std::abs(nh.dot(p) - d) <= params.inlier_dist) ++count;
        if (count > best_count) {
            best_count = count;
            best_plane = {nh, d};
        }
    }
    if (best_count < 3)
        throw std::invalid_argument("fit_plane_ransac: no consensus plane found");

    // Refit on the consensus set, then reclassify against the refit plane.
    std::vector<int> inliers;
    for (int i = 0; i < n; ++i)
        if (best_plane.distance(points[i]) <= params.inlier_dist) inliers.push_back(i);
    Plane refined = detail::least_squares_plane(points, inliers);
    inliers.clear();
    for (int i = 0; i < n; ++i)
        if (refined.distance(points[i]) <= params.inlier_dist) inliers.push_back(i);
    return {refined, std::move(inliers)};
}

// Chooses the normal sign pointing from the inlier centroid toward the cameras.
inline Eigen::Vector3d select_up_vector(const Plane& plane,
                                        const std::vector<Eigen::Vector3d>& camera_centers,
                                        const Eigen::Vector3d& plane_centroid) {
    if (camera_centers.empty())
        throw std::invalid_argument("select_up_vector: no camera centers");
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& c : camera_centers) mean += c;
    mean /= static_cast<double>(camera_centers.size());
    const double proj = plane.normal.dot(mean - plane_centroid);
    if (proj == 0.0)
        throw std::invalid_argument("select_up_vector: cameras lie in the plane");
    return proj > 0.0 ? plane.normal : Eigen::Vector3d(-plane.normal);
}

// Minimal rotation R with R * v_up = +z. Antipodal case: 180 deg about x.
inline Eigen::Matrix3d alignment_rotation(const Eigen::Vector3d& v_up) {
    const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
    const double c = v_up.dot(z);
    Eigen::Vector3d axis = v_up.cross(z);
    const double s = axis.norm();
    if (s < 1e-15) {
        if (c > 0.0) return Eigen::Matrix3d::Identity();
        return Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()).toRotationMatrix();
    }
    axis /= s;
    return Eigen::AngleAxisd(std::atan2(s, c), axis).toRotationMatrix();
}

// Rigidly rotates points and poses about the pivot; reprojection residuals are
// unchanged.
inline Reconstruction apply_alignment(const Reconstruction& recon,
                                      const Eigen::Matrix3d& R,
                                      const Eigen::Vector3d& pivot) {
    Reconstruction out = recon;
    for (auto& p : out.points) p = R * (p - pivot) + pivot;
    const Eigen::Matrix3d Rt = R.transpose();
    for (Shot& s : out.shots) {
        const Eigen::Matrix3d Rwc = s.rotation.toRotationMatrix();
        const Eigen::Matrix3d Rwc_new = Rwc * Rt;
        s.translation = s.translation + Rwc * pivot - Rwc_new * pivot;
        s.rotation = Eigen::Quaterniond(Rwc_new).normalized();
    }
    return out;
}

}  // namespace del
