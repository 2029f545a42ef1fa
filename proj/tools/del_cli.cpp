// Command-line driver for the damage estimation and localization pipeline.
// Every stage is runnable standalone on intermediate files.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "del/del.hpp"
#include "del/scene_io.hpp"

namespace fs = std::filesystem;
using del::ordered_json;

namespace {

int log_level() {
    const char* env = std::getenv("DEL_LOG_LEVEL");
    return env ? std::atoi(env) : 1;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << msg << "\n";
}

del::PipelineConfig config_from_json(const nlohmann::json& j) {
    del::PipelineConfig cfg;
    cfg.reconstruction_path = j.value("reconstruction", "");
    cfg.feature_map_dir = j.value("feature_maps", "");
    cfg.weights_path = j.value("weights", "");
    cfg.truth_path = j.value("truth", "");
    cfg.boundary_path = j.value("boundary", "");
    cfg.metadata_path = j.value("metadata", "");
    cfg.output_dir = j.value("output", "out");
    cfg.filters.max_aspect_ratio = j.value("max_aspect_ratio", 4.0);
    cfg.filters.max_area_km2 = j.value("max_area_km2", 5.0);
    cfg.plane_ransac.inlier_dist = j.value("plane_inlier_dist", 2.0);
    cfg.plane_ransac.max_iters = j.value("plane_max_iters", 1000);
    cfg.homography_ransac.inlier_dist = j.value("homography_inlier_dist", 5.0);
    cfg.homography_ransac.max_iters = j.value("homography_max_iters", 2000);
    cfg.cam_tau = j.value("cam_tau", 0.0);
    cfg.min_region_px = j.value("min_region_px", 25);
    cfg.seed = j.value("seed", 0ull);
    cfg.workers = j.value("workers", 0);
    cfg.strict = j.value("strict", false);
    cfg.plane_ransac.seed = cfg.seed;
    if (cfg.filters.max_aspect_ratio <= 0 || cfg.filters.max_area_km2 <= 0 ||
        cfg.plane_ransac.inlier_dist <= 0 || cfg.homography_ransac.inlier_dist <= 0)
        throw del::IoError("config: thresholds must be positive");
    return cfg;
}

void write_scene(const del::SynthScene& scene, const std::string& dir) {
    const del::PipelineConfig pcfg = del::save_scene(scene, dir);
    ordered_json cfg;
    cfg["reconstruction"] = pcfg.reconstruction_path;
    cfg["feature_maps"] = pcfg.feature_map_dir;
    cfg["weights"] = pcfg.weights_path;
    cfg["truth"] = pcfg.truth_path;
    cfg["boundary"] = pcfg.boundary_path;
    cfg["metadata"] = pcfg.metadata_path;
    cfg["output"] = pcfg.output_dir;
    cfg["seed"] = 0;
    del::save_json(cfg, (fs::path(dir) / "config.json").string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damage estimation and localization from sparse aerial imagery"};
    app.require_subcommand(1);

    // --- align ---
    auto* align = app.add_subcommand("align", "Gravity-align a reconstruction");
    std::string align_in, align_out;
    double plane_dist = 2.0;
    int plane_iters = 1000;
    uint64_t seed = 0;
    align->add_option("input", align_in, "Reconstruction JSON")->required();
    align->add_option("-o,--output", align_out, "Aligned reconstruction JSON")->required();
    align->add_option("--inlier-dist", plane_dist, "Plane RANSAC inlier distance (m)");
    align->add_option("--max-iters", plane_iters, "Plane RANSAC iterations");
    align->add_option("--seed", seed, "RANSAC seed");

    // --- georef ---
    auto* georef = app.add_subcommand("georef", "Estimate per-image homographies");
    std::string georef_in, georef_out;
    double h_dist = 5.0;
    int h_iters = 2000;
    georef->add_option("input", georef_in, "Aligned reconstruction JSON")->required();
    georef->add_option("-o,--output", georef_out, "Georeferencing results JSON")->required();
    georef->add_option("--inlier-dist", h_dist, "World-space inlier distance (m)");
    georef->add_option("--max-iters", h_iters, "RANSAC iterations");
    georef->add_option("--seed", seed, "Global seed (per-image seeds derive from it)");

    // --- cam ---
    auto* camc = app.add_subcommand("cam", "Extract CAM polygons from a feature map");
    std::string cam_tensor, cam_weights, cam_out, cam_mask_out;
    double tau = 0.0;
    int min_region = 25, out_w = 0, out_h = 0;
    camc->add_option("tensor", cam_tensor, "Feature map tensor (.delt)")->required();
    camc->add_option("-w,--weights", cam_weights, "Class weights (.delt)")->required();
    camc->add_option("-o,--output", cam_out, "Image polygons JSON")->required();
    camc->add_option("--mask", cam_mask_out, "Optional PGM mask dump");
    camc->add_option("--tau", tau, "CAM threshold");
    camc->add_option("--min-region", min_region, "Minimum region size (px)");
    camc->add_option("--width", out_w, "Upsample width (0 = feature width)");
    camc->add_option("--height", out_h, "Upsample height (0 = feature height)");

    // --- project ---
    auto* project = app.add_subcommand("project", "Project image polygons to world");
    std::string proj_polys, proj_georef, proj_id, proj_out;
    project->add_option("polygons", proj_polys, "Image polygons JSON")->required();
    project->add_option("-g,--georef", proj_georef, "Georeferencing results JSON")->required();
    project->add_option("-i,--image", proj_id, "Image id")->required();
    project->add_option("-o,--output", proj_out, "World polygons GeoJSON")->required();
    double proj_lat = 0.0, proj_lon = 0.0;
    project->add_option("--origin-lat", proj_lat, "ENU origin latitude")->required();
    project->add_option("--origin-lon", proj_lon, "ENU origin longitude")->required();

    // --- filter ---
    auto* filter = app.add_subcommand("filter", "Compute footprints and apply filters");
    std::string filt_recon, filt_georef, filt_out;
    double max_ratio = 4.0, max_area = 5.0;
    filter->add_option("reconstruction", filt_recon, "Aligned reconstruction JSON")->required();
    filter->add_option("-g,--georef", filt_georef, "Georeferencing results JSON")->required();
    filter->add_option("-o,--output", filt_out, "Footprint report JSON")->required();
    filter->add_option("--max-aspect-ratio", max_ratio, "Aspect ratio threshold");
    filter->add_option("--max-area-km2", max_area, "Area threshold (km^2)");

    // --- evaluate ---
    auto* evaluate = app.add_subcommand("evaluate", "Precision against truth polygons");
    std::string eval_est, eval_truth, eval_boundary, eval_out, eval_gps;
    double eval_lat = 0.0, eval_lon = 0.0;
    evaluate->add_option("estimate", eval_est, "Estimate GeoJSON")->required();
    evaluate->add_option("-t,--truth", eval_truth, "Truth GeoJSON")->required();
    evaluate->add_option("-b,--boundary", eval_boundary, "Boundary GeoJSON")->required();
    evaluate->add_option("-o,--output", eval_out, "Report JSON")->required();
    evaluate->add_option("--gps-csv", eval_gps, "Metadata CSV for the GPS baseline");
    evaluate->add_option("--origin-lat", eval_lat, "ENU origin latitude")->required();
    evaluate->add_option("--origin-lon", eval_lon, "ENU origin longitude")->required();

    // --- labels ---
    auto* labels = app.add_subcommand("labels", "Aggregate worker votes into labels");
    std::string votes_csv, labels_out, scheme_str = "A";
    labels->add_option("votes", votes_csv, "Votes CSV: image_id,B,w")->required();
    labels->add_option("-o,--output", labels_out, "Labels CSV")->required();
    labels->add_option("-s,--scheme", scheme_str, "Scheme: A, B, or C");

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
    std::string synth_dir;
    int synth_cams = 12, synth_points = 500;
    double synth_outliers = 0.2;
    synth->add_option("-o,--output", synth_dir, "Scene directory")->required();
    synth->add_option("--cameras", synth_cams, "Camera count");
    synth->add_option("--points", synth_points, "Ground point count");
    synth->add_option("--outliers", synth_outliers, "Correspondence outlier fraction");
    synth->add_option("--seed", seed, "Scene seed");

    // --- run ---
    auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
    std::string run_config;
    bool strict = false;
    run->add_option("config", run_config, "Pipeline config JSON")->required();
    run->add_flag("--strict", strict, "Exit 2 on any per-image hard failure");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*align) {
            del::Reconstruction rec = del::load_reconstruction(align_in);
            del::RansacParams params{plane_dist, plane_iters, seed};
            auto [aligned, inf] = del::align_reconstruction(rec, params);
            del::save_reconstruction(aligned, align_out);
            info("plane inliers: " + std::to_string(inf.inlier_count) + "/" +
                 std::to_string(rec.points.size()));
        } else if (*georef) {
            del::Reconstruction rec = del::load_reconstruction(georef_in);
            std::vector<del::GeorefResult> results;
            for (const del::Shot& s : rec.shots) {
                const auto corrs = del::shot_correspondences(rec, s);
                if (corrs.size() < 4) continue;
                del::HomographyRansacParams hp;
                hp.inlier_dist = h_dist;
                hp.max_iters = h_iters;
                hp.seed = del::per_image_seed(seed, s.image_id);
                try {
                    del::GeorefResult g = del::estimate_ransac(corrs, hp);
                    g.image_id = s.image_id;
                    results.push_back(std::move(g));
                } catch (const std::exception& e) {
                    info(s.image_id + ": " + e.what());
                }
            }
            del::save_json(del::georef_to_json(results), georef_out);
        } else if (*camc) {
            const del::FeatureMap fm = del::load_tensor(cam_tensor);
            const del::ClassWeights w = del::load_weights(cam_weights);
            const int W = out_w > 0 ? out_w : fm.width;
            const int H = out_h > 0 ? out_h : fm.height;
            if (!cam_mask_out.empty()) {
                const auto mask =
                    del::threshold_mask(del::upsample(del::compute_cam(fm, w), W, H), tau);
                del::save_mask_pgm(mask, cam_mask_out);
            }
            const auto polys = del::extract_cam_polygons(fm, w, W, H, tau, min_region);
            ordered_json j = ordered_json::array();
            for (const auto& ip : polys) {
                ordered_json ring = ordered_json::array();
                for (const auto& p : ip.polygon.vertices) ring.push_back({p.x, p.y});
                j.push_back({{"pixel_area", ip.pixel_area}, {"vertices", std::move(ring)}});
            }
            del::save_json(j, cam_out);
        } else if (*project) {
            const auto georefs = del::georef_from_json(del::load_json(proj_georef));
            const del::GeorefResult* g = nullptr;
            for (const auto& r : georefs)
                if (r.image_id == proj_id) g = &r;
            if (!g) throw del::IoError("image id not in georef results: " + proj_id);
            const auto jpolys = del::load_json(proj_polys);
            std::vector<del::GeoFeature> feats;
            for (const auto& jp : jpolys) {
                del::Polygon2D img_poly;
                for (const auto& v : jp.at("vertices"))
                    img_poly.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
                del::GeoFeature gf;
                gf.image_id = proj_id;
                gf.method = "cam";
                gf.polygon = del::project_polygon(g->H, img_poly);
                gf.area_km2 = del::polygon_area(gf.polygon) / 1e6;
                feats.push_back(std::move(gf));
            }
            del::save_geojson(feats, {proj_lat, proj_lon, 0.0}, proj_out);
        } else if (*filter) {
            del::Reconstruction rec = del::load_reconstruction(filt_recon);
            const auto georefs = del::georef_from_json(del::load_json(filt_georef));
            del::FilterConfig cfg{max_ratio, max_area};
            ordered_json j = ordered_json::object();
            for (const auto& g : georefs) {
                const del::Shot* shot = nullptr;
                for (const del::Shot& s : rec.shots)
                    if (s.image_id == g.image_id) shot = &s;
                if (!shot || !del::retain_gate(g)) continue;
                try {
                    const del::Footprint fp = del::image_footprint(
                        g.image_id, g.H, rec.cameras.at(shot->camera_id));
                    j[g.image_id] = {{"area_km2", fp.area_km2},
                                     {"aspect_ratio", fp.aspect_ratio},
                                     {"retained", del::passes_filters(fp, cfg)}};
                } catch (const del::HorizonError& e) {
                    j[g.image_id] = {{"horizon", true}, {"retained", false}};
                }
            }
            del::save_json(j, filt_out);
        } else if (*evaluate) {
            const del::GeoPoint origin{eval_lat, eval_lon, 0.0};
            const auto truth = del::load_geojson_multipolygon(eval_truth, origin);
            const auto boundary = del::load_geojson_multipolygon(eval_boundary, origin);
            const auto est = del::load_geojson_multipolygon(eval_est, origin);
            std::vector<del::Polygon2D> polys;
            for (const auto& pwh : est.polygons) polys.push_back(pwh.outer);
            ordered_json j = ordered_json::object();
            j["area"] = del::report_to_json(
                del::area_precision(del::Method::Cam, polys, truth, boundary));
            if (!eval_gps.empty()) {
                std::vector<del::Point2> pts;
                for (const auto& m : del::load_metadata_csv(eval_gps)) {
                    if (!m.flood) continue;
                    const del::EnuPoint e = del::geodetic_to_enu(m.gps, origin);
                    pts.push_back({e.e, e.n});
                }
                j["gps"] = del::report_to_json(del::gps_precision(pts, truth, boundary));
            }
            del::save_json(j, eval_out);
        } else if (*labels) {
            const auto records = del::load_votes_csv(votes_csv);
            const auto result = del::aggregate(records, del::parse_scheme(scheme_str));
            std::ofstream f(labels_out);
            if (!f) throw del::IoError("cannot write " + labels_out);
            f << "image_id,label\n";
            for (const auto& l : result) f << l.image_id << "," << (l.positive ? 1 : 0) << "\n";
        } else if (*synth) {
            del::SynthParams p;
            p.n_cameras = synth_cams;
            p.n_points = synth_points;
            p.outlier_fraction = synth_outliers;
            write_scene(del::generate_scene(p, seed), synth_dir);
        } else if (*run) {
            const del::PipelineConfig cfg0 = config_from_json(del::load_json(run_config));
            del::PipelineConfig cfg = cfg0;
            cfg.strict = cfg.strict || strict;
            const del::PipelineResult result = del::run_pipeline_to_files(cfg);
            info("retained " + std::to_string(result.retained) + "/" +
                 std::to_string(result.total_images) + " images");
            if (cfg.strict)
                for (const auto& r : result.records)
                    if (r.disposition == del::Disposition::Error ||
                        r.disposition == del::Disposition::Horizon)
                        return 2;
        }
    } catch (const del::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
