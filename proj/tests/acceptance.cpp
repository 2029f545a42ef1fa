// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// Each check is self-contained and uses independent oracles where one exists.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "del/del.hpp"
#include "del/scene_io.hpp"
#include "oracles.hpp"

using namespace del;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool ok, const std::string& detail = "") {
    std::printf("[%s] %d. %s%s%s\n", ok ? "PASS" : "FAIL", index, name,
                detail.empty() ? "" : " — ", detail.c_str());
    if (!ok) ++g_failures;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("del_accept_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

double iou(const MultiPolygon2D& a, const MultiPolygon2D& b) {
    const double inter = intersection_area(a, b);
    const double uni = multipolygon_area(a) + multipolygon_area(b) - inter;
    return uni > 0 ? inter / uni : 0.0;
}

// ---------------------------------------------------------------------------
// 1. End-to-end synthetic run: IoU >= 0.95 against the true flood polygon.

void criterion_end_to_end() {
    const fs::path dir = fresh_dir("e2e");
    const SynthScene scene = generate_scene({}, 424242);
    const PipelineConfig cfg = save_scene(scene, dir.string());

    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult result = run_pipeline(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double score = iou(result.cam_estimate, to_multipolygon(scene.flood_polygon));
    char buf[128];
    std::snprintf(buf, sizeof(buf), "IoU %.4f (need >= 0.95), %.2f s (need < 10)",
                  score, secs);
    report(1, "end-to-end synthetic localization", score >= 0.95 && secs < 10.0, buf);
}

// ---------------------------------------------------------------------------
// 2. Homography recovery under noise and outliers.

std::vector<Correspondence> grid_correspondences(const Homography& world_to_image,
                                                 const CameraModel& cam) {
    std::vector<Correspondence> corrs;
    for (double x = -50.0; x <= 650.0; x += 70.0)
        for (double y = 0.0; y <= 500.0; y += 50.0) {
            Point2 px;
            try {
                px = project_point(world_to_image, {x, y});
            } catch (const HorizonError&) {
                continue;
            }
            if (px.x < 0 || px.x >= cam.width || px.y < 0 || px.y >= cam.height) continue;
            corrs.push_back({px.x, px.y, x, y});
        }
    return corrs;
}

void criterion_homography() {
    const SynthScene scene = generate_scene({}, 7);
    const CameraModel& cam = scene.true_reconstruction.cameras.at("cam0");
    const std::vector<Correspondence> clean =
        grid_correspondences(scene.image_truth[0].world_to_image, cam);

    // Noiseless: exact recovery.
    HomographyRansacParams hp;
    const GeorefResult exact = estimate_ransac(clean, hp);
    double max_err = 0.0;
    for (const Correspondence& c : clean) {
        const Point2 w = project_point(exact.H, {c.u, c.v});
        max_err = std::max(max_err, norm(w - Point2{c.x, c.y}));
    }
    const bool noiseless_ok = max_err < 1e-6;

    // Isotropic world noise sigma = 1 m: RMS over inliers <= 3 m.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Correspondence> noisy = clean;
    for (Correspondence& c : noisy) {
        c.x += g(rng);
        c.y += g(rng);
    }
    const GeorefResult noisy_fit = estimate_ransac(noisy, hp);
    const bool noise_ok = noisy_fit.rms_error <= 3.0;

    // 100 seeds, 50% outliers: exact inlier-set recovery in >= 95 runs.
    int exact_sets = 0;
    for (uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 r2(seed * 31 + 5);
        std::uniform_int_distribution<size_t> pick(0, clean.size() - 1);
        std::uniform_real_distribution<double> off(80.0, 600.0);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
        std::vector<Correspondence> mixed;
        const size_t n_in = 20;
        for (size_t i = 0; i < n_in; ++i) mixed.push_back(clean[pick(r2)]);
        for (size_t i = 0; i < n_in; ++i) {
            Correspondence c = clean[pick(r2)];
            const double d = off(r2), a = ang(r2);
            c.x += d * std::cos(a);
            c.y += d * std::sin(a);
            mixed.push_back(c);
        }
        HomographyRansacParams sp;
        sp.seed = seed;
        const GeorefResult res = estimate_ransac(mixed, sp);
        std::vector<int> expected(n_in);
        for (size_t i = 0; i < n_in; ++i) expected[i] = static_cast<int>(i);
        if (res.inliers == expected) ++exact_sets;
    }
    const bool outlier_ok = exact_sets >= 95;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "noiseless max err %.2e m, noisy RMS %.2f m, exact inlier set %d/100",
                  max_err, noisy_fit.rms_error, exact_sets);
    report(2, "homography recovery", noiseless_ok && noise_ok && outlier_ok, buf);
}

// ---------------------------------------------------------------------------
// 3. Plane RANSAC under 40% outliers.

void criterion_plane() {
    int good_runs = 0;
    for (uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed * 7919 + 1);
        std::uniform_real_distribution<double> uxy(-100.0, 100.0);
        std::normal_distribution<double> gz(0.0, 0.3);
        std::uniform_real_distribution<double> uz(5.0, 80.0);
        std::bernoulli_distribution sign(0.5);

        std::vector<Eigen::Vector3d> pts;
        const int n_in = 600, n_out = 400;
        for (int i = 0; i < n_in; ++i)
            pts.emplace_back(uxy(rng), uxy(rng), gz(rng));
        for (int i = 0; i < n_out; ++i)
            pts.emplace_back(uxy(rng), uxy(rng), (sign(rng) ? 1.0 : -1.0) * uz(rng));

        RansacParams rp;
        rp.seed = seed;
        const PlaneFitResult fit = fit_plane_ransac(pts, rp);
        const double angle =
            std::acos(std::min(1.0, std::abs(fit.plane.normal.z()))) * 180.0 / M_PI;
        int recovered = 0;
        for (int i : fit.inliers)
            if (i < n_in) ++recovered;
        if (angle < 1.0 && recovered >= static_cast<int>(0.95 * n_in)) ++good_runs;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d/100 runs good (need >= 95)", good_runs);
    report(3, "plane RANSAC robustness", good_runs >= 95, buf);
}

// ---------------------------------------------------------------------------
// 4. CAM against the scalar oracle plus the pooling-order identity.

void criterion_cam() {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> uk(1, 64), ud(1, 16);
    std::uniform_real_distribution<float> uv(-2.0f, 2.0f);
    double worst_cam = 0.0, worst_pool = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        FeatureMap f;
        f.channels = uk(rng);
        f.height = ud(rng);
        f.width = ud(rng);
        f.values.resize(static_cast<size_t>(f.channels) * f.height * f.width);
        for (float& v : f.values) v = uv(rng);
        ClassWeights w;
        w.w.resize(f.channels);
        for (float& v : w.w) v = uv(rng);

        const ActivationGrid m = compute_cam(f, w);
        const std::vector<double> oracle_m =
            oracle::scalar_cam(f.values, f.channels, f.height, f.width, w.w);
        for (size_t i = 0; i < oracle_m.size(); ++i)
            worst_cam = std::max(worst_cam, std::abs(m.values[i] - oracle_m[i]));

        // sum_xy M(x, y) == sum_k w_k sum_xy f_k(x, y)
        double pooled = 0.0;
        for (int k = 0; k < f.channels; ++k) {
            double s = 0.0;
            for (int y = 0; y < f.height; ++y)
                for (int x = 0; x < f.width; ++x) s += f.at(k, y, x);
            pooled += static_cast<double>(w.w[k]) * s;
        }
        worst_pool = std::max(worst_pool, std::abs(class_score(m) - pooled));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max |CAM - oracle| %.2e, pooling identity %.2e",
                  worst_cam, worst_pool);
    report(4, "CAM correctness", worst_cam < 1e-9 && worst_pool < 1e-9, buf);
}

// ---------------------------------------------------------------------------
// 5. Border tracing against a union-find component oracle.

void criterion_tracing() {
    std::mt19937_64 rng(17);
    bool counts_ok = true, contain_ok = true, area_ok = true;
    for (int trial = 0; trial < 1000 && counts_ok && contain_ok && area_ok; ++trial) {
        const double fill = 0.05 + 0.9 * (trial % 10) / 10.0;
        std::bernoulli_distribution bit(fill);
        BinaryMask mask;
        mask.width = 64;
        mask.height = 64;
        mask.values.resize(64 * 64);
        for (auto& v : mask.values) v = bit(rng) ? 1 : 0;

        const std::vector<ImagePolygon> polys = trace_polygons(mask);
        if (static_cast<int>(polys.size()) != oracle::count_components_8(mask)) {
            counts_ok = false;
            break;
        }
        long fg = 0;
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                if (!mask.at(y, x)) continue;
                ++fg;
                // Traced rings run through pixel centers at integer coords.
                const Point2 c{double(x), double(y)};
                bool inside = false;
                for (const ImagePolygon& ip : polys) {
                    if (!(point_in_ring(c, ip.polygon) || point_on_ring(c, ip.polygon)))
                        continue;
                    bool in_hole = false;
                    for (const Polygon2D& h : ip.holes)
                        if (point_in_ring(c, h) && !point_on_ring(c, h)) {
                            in_hole = true;
                            break;
                        }
                    if (!in_hole) {
                        inside = true;
                        break;
                    }
                }
                if (!inside) {
                    contain_ok = false;
                    break;
                }
            }
        long traced = 0;
        for (const ImagePolygon& ip : polys) {
            traced += ip.pixel_area;
            double area = std::abs(signed_area(ip.polygon));
            double perim = polygon_perimeter(ip.polygon);
            for (const Polygon2D& h : ip.holes) {
                area -= std::abs(signed_area(h));
                perim += polygon_perimeter(h);
            }
            if (std::abs(area - ip.pixel_area) > perim + 1e-9) area_ok = false;
        }
        if (traced != fg) counts_ok = false;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "counts %s, containment %s, area bound %s",
                  counts_ok ? "ok" : "bad", contain_ok ? "ok" : "bad",
                  area_ok ? "ok" : "bad");
    report(5, "border tracing vs component oracle", counts_ok && contain_ok && area_ok,
           buf);
}

// ---------------------------------------------------------------------------
// 6. Geometry kernel vs rasterization / rotation-sweep oracles.

void criterion_geometry() {
    std::mt19937_64 rng(19);
    double worst_inter = 0.0;
    int checked = 0;
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    std::uniform_int_distribution<int> nv(5, 14);
    while (checked < 200) {
        const Polygon2D a = oracle::random_star_polygon(rng, nv(rng));
        const Polygon2D b =
            oracle::random_star_polygon(rng, nv(rng), 1.0, 5.0, {shift(rng), shift(rng)});
        const double oracle_area = oracle::scanline_intersection_area(a, b);
        if (oracle_area < 0.5) continue;  // too small for a stable relative error
        const double got = intersection_area(to_multipolygon(a), to_multipolygon(b));
        worst_inter = std::max(worst_inter, std::abs(got - oracle_area) / oracle_area);
        ++checked;
    }

    double worst_rect = 0.0;
    std::uniform_real_distribution<double> up(-10.0, 10.0);
    std::uniform_int_distribution<int> np(4, 40);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Point2> pts;
        const int n = np(rng);
        for (int i = 0; i < n; ++i) pts.push_back({up(rng), up(rng)});
        Polygon2D hull;
        try {
            hull = convex_hull(pts);
        } catch (const std::invalid_argument&) {
            --trial;
            continue;
        }
        const MinAreaRect r = min_area_rect(hull);
        const double got = r.long_side * r.short_side;
        const double swept = oracle::sweep_min_rect_area(hull.vertices);
        worst_rect = std::max(worst_rect, std::abs(got - swept) / swept);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "intersection max rel err %.4f%%, rect %.4f%%",
                  100.0 * worst_inter, 100.0 * worst_rect);
    report(6, "geometry kernel vs oracles", worst_inter < 0.01 && worst_rect < 0.005,
           buf);
}

// ---------------------------------------------------------------------------
// 7. Filter sweep: footprint precision degrades faster than CAM precision.

void criterion_filter_sweep() {
    const MultiPolygon2D truth =
        to_multipolygon({{{0, 0}, {1000, 0}, {1000, 1000}, {0, 1000}}});
    const MultiPolygon2D boundary =
        to_multipolygon({{{-9000, -9000}, {9000, -9000}, {9000, 9000}, {-9000, 9000}}});

    Footprint good;
    good.image_id = "good";
    good.polygon = {{{100, 100}, {900, 100}, {900, 900}, {100, 900}}};
    good.area_km2 = polygon_area(good.polygon) / 1e6;
    good.aspect_ratio = 1.0;

    Footprint skewed;  // long sliver mostly outside truth: a horizon artifact
    skewed.image_id = "skewed";
    skewed.polygon = {{{500, 500}, {8500, 500}, {8500, 1500}, {500, 1500}}};
    skewed.area_km2 = polygon_area(skewed.polygon) / 1e6;
    skewed.aspect_ratio = 8.0;

    std::map<std::string, std::vector<Polygon2D>> cams;
    cams["good"] = {{{{150, 150}, {850, 150}, {850, 850}, {150, 850}}}};
    cams["skewed"] = {{{{600, 600}, {950, 600}, {950, 950}, {600, 950}}}};

    const std::vector<SweepCell> cells = precision_sweep(
        {good, skewed}, cams, truth, boundary, {8.0}, {5.0, 10.0});
    const double fp_drop = cells[0].footprint.precision - cells[1].footprint.precision;
    const double cam_drop = cells[0].cam.precision - cells[1].cam.precision;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "footprint drop %.3f, cam drop %.3f", fp_drop,
                  cam_drop);
    report(7, "filter sweep degradation ordering", fp_drop > 0.0 && cam_drop < fp_drop,
           buf);
}

// ---------------------------------------------------------------------------
// 8. Label schemes vs direct formula evaluation.

void criterion_labels() {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> uw(1, 9);
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        std::vector<VoteRecord> records;
        const int n = 1 + trial % 30;
        for (int i = 0; i < n; ++i) {
            const int w = uw(rng);
            std::uniform_int_distribution<int> ub(0, w);
            records.push_back({"img" + std::to_string(i), ub(rng), w});
        }
        const auto a = aggregate(records, LabelScheme::A);
        const auto b = aggregate(records, LabelScheme::B);
        const auto c = aggregate(records, LabelScheme::C);

        std::vector<double> ratios;
        for (const auto& r : records)
            ratios.push_back(static_cast<double>(r.positive_votes) / r.total_workers);
        std::sort(ratios.begin(), ratios.end());
        const double med = ratios.size() % 2
                               ? ratios[ratios.size() / 2]
                               : 0.5 * (ratios[ratios.size() / 2 - 1] +
                                        ratios[ratios.size() / 2]);
        for (int i = 0; i < n; ++i) {
            const VoteRecord& r = records[i];
            const double ratio = static_cast<double>(r.positive_votes) / r.total_workers;
            if (a[i].positive != (r.positive_votes > 1)) ok = false;
            if (b[i].positive != (r.positive_votes > 2)) ok = false;
            if (c[i].positive != (r.positive_votes > 1 && ratio > med)) ok = false;
            if (b[i].positive && !a[i].positive) ok = false;  // B subset of A
            if (c[i].positive && !a[i].positive) ok = false;  // C subset of A
        }
    }
    // Even-length median tie: ratios {0.2, 0.4, 0.6, 0.8} -> median 0.5; the
    // 0.5-ratio record (3/6) must be negative under the strict comparison.
    const std::vector<VoteRecord> even{
        {"a", 1, 5}, {"b", 2, 5}, {"c", 3, 5}, {"d", 4, 5}};
    const auto ce = aggregate(even, LabelScheme::C);
    if (ce[1].positive || !ce[2].positive || !ce[3].positive) ok = false;
    const std::vector<VoteRecord> tie{{"a", 2, 4}, {"b", 3, 6}, {"c", 4, 8}, {"d", 5, 10}};
    for (const auto& l : aggregate(tie, LabelScheme::C))
        if (l.positive) ok = false;  // all ratios equal the median; strictly-above fails
    report(8, "label schemes match formulas", ok);
}

// ---------------------------------------------------------------------------
// 9. Byte-determinism of pipeline outputs.

void criterion_determinism() {
    const fs::path dir = fresh_dir("determinism");
    const SynthScene scene = generate_scene({}, 555);
    PipelineConfig cfg = save_scene(scene, dir.string());
    cfg.seed = 42;
    cfg.workers = 3;
    run_pipeline_to_files(cfg);
    const std::string cam1 = slurp(fs::path(cfg.output_dir) / "estimate_cam.geojson");
    const std::string fp1 = slurp(fs::path(cfg.output_dir) / "estimate_footprint.geojson");
    const std::string man1 = slurp(fs::path(cfg.output_dir) / "manifest.json");
    fs::remove_all(cfg.output_dir);
    run_pipeline_to_files(cfg);
    const bool ok =
        cam1 == slurp(fs::path(cfg.output_dir) / "estimate_cam.geojson") &&
        fp1 == slurp(fs::path(cfg.output_dir) / "estimate_footprint.geojson") &&
        man1 == slurp(fs::path(cfg.output_dir) / "manifest.json");
    report(9, "pipeline outputs byte-deterministic", ok);
}

}  // namespace

int main() {
    criterion_end_to_end();
    criterion_homography();
    criterion_plane();
    criterion_cam();
    criterion_tracing();
    criterion_geometry();
    criterion_filter_sweep();
    criterion_labels();
    criterion_determinism();
    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
