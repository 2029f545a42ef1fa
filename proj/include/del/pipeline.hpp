#pragma once

// End-to-end orchestration: align, per-image georeferencing, CAM polygon
// extraction, projection, filtering, dissolve, and evaluation. Per-image
// work fans out to a bounded worker pool; results merge at a single point.

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "del/cam.hpp"
#include "del/clipping.hpp"
#include "del/evaluation.hpp"
#include "del/footprint.hpp"
#include "del/homography.hpp"
#include "del/io.hpp"
#include "del/plane_align.hpp"

namespace del {

struct PipelineConfig {
    std::string reconstruction_path;
    std::string feature_map_dir;  // <dir>/<image_id>.delt
    std::string weights_path;
    std::string truth_path;     // GeoJSON
    std::string boundary_path;  // GeoJSON
    std::string metadata_path;  // CSV: image_id,lat,lon,alt,flood
    std::string output_dir;

    FilterConfig filters;
    RansacParams plane_ransac;
    HomographyRansacParams homography_ransac;
    double cam_tau = 0.0;
    int min_region_px = 25;
    uint64_t seed = 0;
    int workers = 0;  // 0 = hardware concurrency
    bool strict = false;
};

inline uint64_t per_image_seed(uint64_t global_seed, const std::string& image_id) {
    // FNV-1a, mixed with the global seed; stable across platforms.
    uint64_t h = 14695981039346656037ull ^ global_seed;
    for (char c : image_id) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

enum class Disposition {
    Ok,
    NotReconstructed,
    EstimatedNotLocalized,  // flood-classified but absent from the reconstruction
    TooFewMatches,
    GatedOut,
    Horizon,
    FilteredOut,
    NotFlood,
    Error,
};

inline const char* disposition_name(Disposition d) {
    switch (d) {
        case Disposition::Ok: return "ok";
        case Disposition::NotReconstructed: return "not_reconstructed";
        case Disposition::EstimatedNotLocalized: return "estimated_not_localized";
        case Disposition::TooFewMatches: return "too_few_matches";
        case Disposition::GatedOut: return "gated_out";
        case Disposition::Horizon: return "horizon";
        case Disposition::FilteredOut: return "filtered_out";
        case Disposition::NotFlood: return "not_flood";
        case Disposition::Error: return "error";
    }
    return "?";
}

struct ImageRecord {
    std::string image_id;
    Disposition disposition = Disposition::Ok;
    std::string detail;
    bool flood = false;
    std::optional<GeorefResult> georef;
    std::optional<Footprint> footprint;
    std::vector<Polygon2D> cam_world_polygons;
};

struct PipelineResult {
    GeoPoint origin;
    std::vector<ImageRecord> records;
    std::optional<PrecisionReport> gps_report;
    std::optional<PrecisionReport> footprint_report;
    std::optional<PrecisionReport> cam_report;
    MultiPolygon2D footprint_estimate;
    MultiPolygon2D cam_estimate;
    // Funnel counts.
    int total_images = 0;
    int reconstructed = 0;
    int gated = 0;
    int flood_and_gated = 0;
    int retained = 0;
};

struct AlignmentInfo {
    Plane plane;
    Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d pivot = Eigen::Vector3d::Zero();
    size_t inlier_count = 0;
};

inline std::pair<Reconstruction, AlignmentInfo> align_reconstruction(
    const Reconstruction& rec, const RansacParams& params) {
    AlignmentInfo info;
    const PlaneFitResult fit = fit_plane_ransac(rec.points, params);
    info.plane = fit.plane;
    info.inlier_count = fit.inliers.size();
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i : fit.inliers) centroid += rec.points[i];
    centroid /= static_cast<double>(fit.inliers.size());
    info.pivot = centroid;
    std::vector<Eigen::Vector3d> centers;
    for (const Shot& s : rec.shots) centers.push_back(s.center());
    info.up = select_up_vector(fit.plane, centers, centroid);
    info.rotation = alignment_rotation(info.up);
    return {apply_alignment(rec, info.rotation, info.pivot), info};
}

// Correspondences for one shot: pixels vs aligned 3D points dropped to the
// ground plane.
inline std::vector<Correspondence> shot_correspondences(const Reconstruction& aligned,
                                                        const Shot& shot) {
    std::vector<Correspondence> corrs;
    corrs.reserve(shot.observations.size());
    for (const Observation& o : shot.observations) {
        const Eigen::Vector3d& p = aligned.points[o.point_index];
        corrs.push_back({o.u, o.v, p.x(), p.y()});
    }
    return corrs;
}

// CAM polygons for one image, in pixel coordinates.
inline std::vector<ImagePolygon> extract_cam_polygons(const FeatureMap& fm,
                                                      const ClassWeights& w,
                                                      int image_width, int image_height,
                                                      double tau, int min_region_px) {
    const ActivationGrid cam = compute_cam(fm, w);
    const ActivationGrid up = upsample(cam, image_width, image_height);
    const BinaryMask mask = threshold_mask(up, tau);
    return min_region_filter(trace_polygons(mask), min_region_px);
}

namespace detail {

inline void run_parallel(int n_items, int workers, const std::function<void(int)>& fn) {
    if (workers <= 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n_items > 0 ? n_items : 1);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    PipelineResult result;

    const Reconstruction raw = load_reconstruction(cfg.reconstruction_path);
    result.origin = raw.origin;
    auto [aligned, align_info] = align_reconstruction(raw, cfg.plane_ransac);

    const ClassWeights weights = load_weights(cfg.weights_path);
    std::vector<ImageMeta> metas;
    if (!cfg.metadata_path.empty()) metas = load_metadata_csv(cfg.metadata_path);
    std::map<std::string, ImageMeta> meta_by_id;
    for (const ImageMeta& m : metas) meta_by_id[m.image_id] = m;

    std::map<std::string, const Shot*> shot_by_id;
    for (const Shot& s : aligned.shots) shot_by_id[s.image_id] = &s;

    // Image universe: metadata rows when given, otherwise the reconstruction.
    std::vector<std::string> image_ids;
    if (!cfg.metadata_path.empty())
        for (const ImageMeta& m : metas) image_ids.push_back(m.image_id);
    else
        for (const Shot& s : aligned.shots) image_ids.push_back(s.image_id);
    result.total_images = static_cast<int>(image_ids.size());

    std::vector<ImageRecord> records(image_ids.size());
    detail::run_parallel(
        static_cast<int>(image_ids.size()), cfg.workers, [&](int i) {
            ImageRecord& r = records[i];
            r.image_id = image_ids[i];
            auto mit = meta_by_id.find(r.image_id);
            r.flood = mit != meta_by_id.end() ? mit->second.flood : true;
            auto sit = shot_by_id.find(r.image_id);
            if (sit == shot_by_id.end()) {
                r.disposition = r.flood ? Disposition::EstimatedNotLocalized
                                        : Disposition::NotReconstructed;
                return;
            }
            const Shot& shot = *sit->second;
            try {
                const auto corrs = shot_correspondences(aligned, shot);
                if (corrs.size() < 4) {
                    r.disposition = Disposition::TooFewMatches;
                    return;
                }
                HomographyRansacParams hp = cfg.homography_ransac;
                hp.seed = per_image_seed(cfg.seed, r.image_id);
                GeorefResult g = estimate_ransac(corrs, hp);
                g.image_id = r.image_id;
                r.georef = g;
                if (!retain_gate(g)) {
                    r.disposition = Disposition::GatedOut;
                    return;
                }
                const CameraModel& cam = aligned.cameras.at(shot.camera_id);
                r.footprint = image_footprint(r.image_id, g.H, cam);
                if (!passes_filters(*r.footprint, cfg.filters)) {
                    r.disposition = Disposition::FilteredOut;
                    return;
                }
                if (!r.flood) {
                    r.disposition = Disposition::NotFlood;
                    return;
                }
                if (!cfg.feature_map_dir.empty()) {
                    const fs::path fmp = fs::path(cfg.feature_map_dir) / (r.image_id + ".delt");
                    const FeatureMap fm = load_tensor(fmp.string());
                    const auto polys = extract_cam_polygons(fm, weights, cam.width, cam.height,
                                                            cfg.cam_tau, cfg.min_region_px);
                    const MultiPolygon2D fp_mp = to_multipolygon(r.footprint->polygon);
                    for (const ImagePolygon& ip : polys) {
                        const Polygon2D world = project_polygon(g.H, ip.polygon);
                        // Clip the damage polygon to the image footprint.
                        const MultiPolygon2D clipped = intersection(to_multipolygon(world), fp_mp);
                        for (const auto& pwh : clipped.polygons)
                            r.cam_world_polygons.push_back(pwh.outer);
                    }
                }
                r.disposition = Disposition::Ok;
            } catch (const HorizonError& e) {
                r.disposition = Disposition::Horizon;
                r.detail = e.what();
            } catch (const std::exception& e) {
                r.disposition = Disposition::Error;
                r.detail = e.what();
            }
        });
    result.records = std::move(records);

    // Merge point: funnel counts and dissolved estimates.
    std::vector<Polygon2D> footprint_polys, cam_polys;
    for (const ImageRecord& r : result.records) {
        if (r.georef) ++result.reconstructed;
        const bool gated = r.georef && retain_gate(*r.georef);
        if (gated) ++result.gated;
        if (gated && r.flood) ++result.flood_and_gated;
        if (r.disposition == Disposition::Ok) ++result.retained;
        if (r.disposition == Disposition::Ok && r.flood && r.footprint) {
            footprint_polys.push_back(r.footprint->polygon);
            for (const Polygon2D& p : r.cam_world_polygons) cam_polys.push_back(p);
        }
    }
    result.footprint_estimate = dissolve(footprint_polys);
    result.cam_estimate = dissolve(cam_polys);

    if (!cfg.truth_path.empty() && !cfg.boundary_path.empty()) {
        const MultiPolygon2D truth = load_geojson_multipolygon(cfg.truth_path, raw.origin);
        const MultiPolygon2D boundary = load_geojson_multipolygon(cfg.boundary_path, raw.origin);
        std::vector<Point2> gps_points;
        for (const ImageRecord& r : result.records) {
            if (!r.flood) continue;
            auto mit = meta_by_id.find(r.image_id);
            const Shot* shot = shot_by_id.count(r.image_id) ? shot_by_id.at(r.image_id) : nullptr;
            GeoPoint gps;
            if (mit != meta_by_id.end()) gps = mit->second.gps;
            else if (shot) gps = shot->gps;
            else continue;
            const EnuPoint e = geodetic_to_enu(gps, raw.origin);
            gps_points.push_back({e.e, e.n});
        }
        try {
            result.gps_report = gps_precision(gps_points, truth, boundary);
        } catch (const std::exception&) {
        }
        try {
            result.footprint_report =
                area_precision(Method::Footprint, footprint_polys, truth, boundary);
        } catch (const std::exception&) {
        }
        try {
            result.cam_report = area_precision(Method::Cam, cam_polys, truth, boundary);
        } catch (const std::exception&) {
        }
    }
    return result;
}

inline ordered_json manifest_to_json(const PipelineResult& result) {
    ordered_json j;
    j["counts"] = {{"total", result.total_images},
                   {"reconstructed", result.reconstructed},
                   {"gated", result.gated},
                   {"flood_and_gated", result.flood_and_gated},
                   {"retained", result.retained}};
    ordered_json imgs = ordered_json::object();
    for (const ImageRecord& r : result.records) {
        ordered_json ji;
        ji["disposition"] = disposition_name(r.disposition);
        ji["flood"] = r.flood;
        if (!r.detail.empty()) ji["detail"] = r.detail;
        if (r.georef) {
            ji["inlier_ratio"] = r.georef->inlier_ratio;
            ji["inlier_count"] = r.georef->inlier_count;
            ji["rms_error"] = r.georef->rms_error;
        }
        if (r.footprint) {
            ji["area_km2"] = r.footprint->area_km2;
            ji["aspect_ratio"] = r.footprint->aspect_ratio;
        }
        imgs[r.image_id] = std::move(ji);
    }
    j["images"] = std::move(imgs);
    return j;
}

inline ordered_json report_to_json(const PrecisionReport& r) {
    return {{"method", method_name(r.method)},
            {"precision", r.precision},
            {"numerator", r.numerator},
            {"denominator", r.denominator},
            {"image_count", r.image_count}};
}

// Writes estimates, reports, and the manifest under cfg.output_dir.
inline PipelineResult run_pipeline_to_files(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    const PipelineResult result = run_pipeline(cfg);
    fs::create_directories(cfg.output_dir);
    auto dump_estimate = [&](const MultiPolygon2D& mp, const char* method,
                             const std::string& name) {
        std::vector<GeoFeature> feats;
        for (const auto& pwh : mp.polygons) {
            GeoFeature gf;
            gf.method = method;
            gf.polygon = pwh.outer;
            gf.area_km2 = polygon_area(pwh.outer) / 1e6;
            feats.push_back(std::move(gf));
        }
        save_geojson(feats, result.origin, (fs::path(cfg.output_dir) / name).string());
    };
    dump_estimate(result.footprint_estimate, "footprint", "estimate_footprint.geojson");
    dump_estimate(result.cam_estimate, "cam", "estimate_cam.geojson");
    ordered_json reports = ordered_json::object();
    if (result.gps_report) reports["gps"] = report_to_json(*result.gps_report);
    if (result.footprint_report)
        reports["footprint"] = report_to_json(*result.footprint_report);
    if (result.cam_report) reports["cam"] = report_to_json(*result.cam_report);
    save_json(reports, (fs::path(cfg.output_dir) / "precision.json").string());
    save_json(manifest_to_json(result), (fs::path(cfg.output_dir) / "manifest.json").string());
    return result;
}

}  // namespace del
