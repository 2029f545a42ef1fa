#pragma once

// Synthetic oblique-survey scene generator with stored ground truth: flat
// ground at a known tilt, pinhole cameras on a near-collinear track, planted
// correspondence outliers, and feature maps whose CAM reproduces a known
// flood polygon.

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "del/cam.hpp"
#include "del/geodesy.hpp"
#include "del/geometry.hpp"
#include "del/homography.hpp"
#include "del/plane_align.hpp"
#include "del/reconstruction.hpp"

namespace del {

struct SynthParams {
    int n_cameras = 12;
    int n_points = 500;
    double outlier_fraction = 0.2;
    double pixel_noise = 0.0;      // px, on inlier observations
    double ground_noise = 0.05;    // m, vertical roughness of ground points
    double tilt_deg = 12.0;        // tilt applied to the whole reconstruction
    double altitude = 300.0;       // m
    double pitch_deg = 30.0;       // camera pitch from nadir
    int image_size = 512;          // square images
    double focal_px = 512.0;
    int feature_size = 64;         // square CAM feature grid
    GeoPoint origin{30.45, -91.15, 0.0};
};

struct SynthImageTruth {
    std::string image_id;
    Homography world_to_image;  // ground plane (z = 0) to pixels
    Homography image_to_world;
    std::vector<int> inlier_observation_indices;  // per-shot observation indices
};

struct SynthScene {
    SynthParams params;
    Reconstruction reconstruction;      // tilted, as handed to the pipeline
    Reconstruction true_reconstruction; // gravity-aligned
    Polygon2D flood_polygon;            // true frame, ENU meters
    Polygon2D boundary;                 // evaluation boundary, true frame
    Eigen::Matrix3d tilt = Eigen::Matrix3d::Identity();
    Eigen::Vector3d tilt_pivot = Eigen::Vector3d::Zero();
    std::vector<SynthImageTruth> image_truth;
    std::vector<FeatureMap> feature_maps;  // one per shot, same order as shots
    ClassWeights weights;
};

namespace detail {

// world -> camera rotation for a camera at `pos` looking at `target`.
inline Eigen::Matrix3d look_at(const Eigen::Vector3d& pos, const Eigen::Vector3d& target) {
    const Eigen::Vector3d fwd = (target - pos).normalized();       // camera +z
    Eigen::Vector3d right = fwd.cross(Eigen::Vector3d::UnitZ());   // camera +x
    if (right.norm() < 1e-9) right = Eigen::Vector3d::UnitX();
    right.normalize();
    const Eigen::Vector3d down = fwd.cross(right).normalized();    // camera +y
    Eigen::Matrix3d R;
    R.row(0) = right;
    R.row(1) = down;
    R.row(2) = fwd;
    return R;
}

// Homography from ground plane (z = 0) to pixels: K [r1 r2 t].
inline Eigen::Matrix3d ground_to_image_h(const CameraModel& cam, const Eigen::Matrix3d& Rwc,
                                         const Eigen::Vector3d& t) {
    Eigen::Matrix3d K;
    K << cam.focal_px, 0, cam.cx, 0, cam.focal_px, cam.cy, 0, 0, 1;
    Eigen::Matrix3d P;
    P.col(0) = Rwc.col(0);
    P.col(1) = Rwc.col(1);
    P.col(2) = t;
    return K * P;
}

}  // namespace detail

inline SynthScene generate_scene(const SynthParams& params, uint64_t seed) {
    SynthScene scene;
    scene.params = params;
    std::mt19937_64 rng(seed);

    Reconstruction& rec = scene.true_reconstruction;
    rec.origin = params.origin;

    CameraModel cam;
    cam.width = params.image_size;
    cam.height = params.image_size;
    cam.focal_px = params.focal_px;
    cam.cx = params.image_size / 2.0;
    cam.cy = params.image_size / 2.0;
    rec.cameras["cam0"] = cam;

    // Flood polygon: a convex hexagon under the surveyed strip.
    scene.flood_polygon.vertices = {{60, 110}, {300, 90},  {540, 120},
                                    {560, 300}, {290, 360}, {50, 320}};
    scene.boundary.vertices = {{-1200, -1200}, {1800, -1200}, {1800, 1800}, {-1200, 1800}};

    // Ground points over the viewed strip, with vertical roughness.
    std::uniform_real_distribution<double> ux(-150.0, 750.0);
    std::uniform_real_distribution<double> uy(0.0, 500.0);
    std::normal_distribution<double> nz(0.0, params.ground_noise);
    for (int i = 0; i < params.n_points; ++i)
        rec.points.emplace_back(ux(rng), uy(rng), nz(rng));

    // Cameras on a near-collinear track along x, pitched toward +y.
    const double pitch = deg2rad(params.pitch_deg);
    std::normal_distribution<double> jitter(0.0, 3.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> px_noise(0.0, params.pixel_noise);
    std::uniform_int_distribution<int> any_point(0, params.n_points - 1);

    for (int i = 0; i < params.n_cameras; ++i) {
        Shot shot;
        shot.image_id = "img" + std::string(i < 10 ? "0" : "") + std::to_string(i);
        shot.camera_id = "cam0";
        const double cx = params.n_cameras > 1
                              ? 600.0 * i / (params.n_cameras - 1)
                              : 300.0;
        const Eigen::Vector3d pos(cx + jitter(rng), jitter(rng), params.altitude);
        const Eigen::Vector3d target(pos.x(), pos.y() + params.altitude * std::tan(pitch), 0.0);
        const Eigen::Matrix3d Rwc = detail::look_at(pos, target);
        shot.rotation = Eigen::Quaterniond(Rwc).normalized();
        shot.translation = -(Rwc * pos);
        shot.gps = enu_to_geodetic({pos.x(), pos.y(), pos.z()}, params.origin);

        SynthImageTruth truth;
        truth.image_id = shot.image_id;
        const Eigen::Matrix3d Hw2i = detail::ground_to_image_h(cam, Rwc, shot.translation);
        truth.world_to_image = normalize_homography(Hw2i);
        truth.image_to_world = normalize_homography(Hw2i.inverse());

        // Observations of visible ground points; a planted fraction are
        // gross outliers pointing at the wrong 3D point.
        for (int p = 0; p < params.n_points; ++p) {
            const Eigen::Vector3d& x = rec.points[p];
            const Eigen::Vector3d xc = Rwc * x + shot.translation;
            if (xc.z() <= 1.0) continue;
            double u = cam.focal_px * xc.x() / xc.z() + cam.cx;
            double v = cam.focal_px * xc.y() / xc.z() + cam.cy;
            if (u < 0 || u >= cam.width || v < 0 || v >= cam.height) continue;
            Observation obs;
            if (u01(rng) < params.outlier_fraction) {
                int wrong = any_point(rng);
                if (wrong == p) wrong = (wrong + 1) % params.n_points;
                obs = {u, v, wrong};
            } else {
                u += px_noise(rng);
                v += px_noise(rng);
                obs = {u, v, p};
                truth.inlier_observation_indices.push_back(
                    static_cast<int>(shot.observations.size()));
            }
            shot.observations.push_back(obs);
        }

        // Feature maps: two channels encoding the flood-coverage fraction of
        // each feature cell, so CAM = 2 * coverage - 1 and the zero level set
        // tracks the flood boundary.
        FeatureMap fm;
        fm.channels = 2;
        fm.height = params.feature_size;
        fm.width = params.feature_size;
        fm.values.assign(static_cast<size_t>(2) * params.feature_size * params.feature_size, 0.0f);
        const double cell = static_cast<double>(params.image_size) / params.feature_size;
        const int ss = 3;  // supersamples per cell axis
        for (int fy = 0; fy < params.feature_size; ++fy) {
            for (int fx = 0; fx < params.feature_size; ++fx) {
                int hits = 0;
                for (int sy = 0; sy < ss; ++sy) {
                    for (int sx = 0; sx < ss; ++sx) {
                        const double pu = (fx + (sx + 0.5) / ss) * cell;
                        const double pv = (fy + (sy + 0.5) / ss) * cell;
                        const Point2 w = project_point(truth.image_to_world, {pu, pv});
                        if (point_in_ring(w, scene.flood_polygon)) ++hits;
                    }
                }
                const float cov = static_cast<float>(hits) / (ss * ss);
                const size_t idx = static_cast<size_t>(fy) * params.feature_size + fx;
                fm.values[idx] = cov;
                fm.values[static_cast<size_t>(params.feature_size) * params.feature_size + idx] =
                    1.0f - cov;
            }
        }
        scene.feature_maps.push_back(std::move(fm));
        scene.image_truth.push_back(std::move(truth));
        rec.shots.push_back(std::move(shot));
    }
    scene.weights.w = {1.0f, -1.0f};

    // Tilt the whole reconstruction about the ground-point centroid so the
    // pipeline has a real alignment to recover.
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : rec.points) centroid += p;
    centroid /= static_cast<double>(rec.points.size());
    scene.tilt_pivot = centroid;
    scene.tilt = Eigen::AngleAxisd(deg2rad(params.tilt_deg),
                                   Eigen::Vector3d(1.0, 0.3, 0.0).normalized())
                     .toRotationMatrix();
    scene.reconstruction = apply_alignment(rec, scene.tilt, centroid);
    return scene;
}

}  // namespace del
