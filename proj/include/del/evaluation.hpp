#pragma once

// Precision metrics against a truth multipolygon within an administrative
// boundary: GPS-tag baseline, footprint method, and CAM method.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "del/clipping.hpp"
#include "del/footprint.hpp"
#include "del/geometry.hpp"

namespace del {

enum class Method { Gps, Footprint, Cam };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::Gps: return "gps";
        case Method::Footprint: return "footprint";
        case Method::Cam: return "cam";
    }
    return "?";
}

struct PrecisionReport {
    Method method = Method::Gps;
    double precision = 0.0;
    double numerator = 0.0;    // points or km^2
    double denominator = 0.0;  // points or km^2
    int image_count = 0;
};

// Fraction of flood-tagged GPS points inside the truth region, among those
// inside the boundary.
inline PrecisionReport gps_precision(const std::vector<Point2>& points,
                                     const MultiPolygon2D& truth,
                                     const MultiPolygon2D& boundary) {
    int in_boundary = 0, in_truth = 0;
    for (const Point2& p : points) {
        if (!point_in_multipolygon(p, boundary)) continue;
        ++in_boundary;
        if (point_in_multipolygon(p, truth)) ++in_truth;
    }
    if (in_boundary == 0)
        throw std::invalid_argument("gps_precision: no points inside boundary");
    PrecisionReport r;
    r.method = Method::Gps;
    r.numerator = in_truth;
    r.denominator = in_boundary;
    r.precision = static_cast<double>(in_truth) / in_boundary;
    r.image_count = in_boundary;
    return r;
}

// Dissolves the per-image polygons, clips the union to the boundary, and
// reports overlap area with truth over total clipped area.
inline PrecisionReport area_precision(Method method,
                                      const std::vector<Polygon2D>& estimate,
                                      const MultiPolygon2D& truth,
                                      const MultiPolygon2D& boundary) {
    const MultiPolygon2D dissolved = dissolve(estimate);
    const MultiPolygon2D clipped = intersection(dissolved, boundary);
    const double denom = multipolygon_area(clipped);
    if (denom <= 0.0)
        throw std::invalid_argument("area_precision: estimate has zero area within boundary");
    const double num = intersection_area(clipped, truth);
    PrecisionReport r;
    r.method = method;
    r.numerator = num / 1e6;
    r.denominator = denom / 1e6;
    r.precision = num / denom;
    r.image_count = static_cast<int>(estimate.size());
    return r;
}

struct SweepCell {
    FilterConfig config;
    PrecisionReport footprint;
    PrecisionReport cam;
};

// Per-image CAM polygons keyed by image id; re-filters and re-evaluates both
// methods for every threshold pair.
inline std::vector<SweepCell> precision_sweep(
    const std::vector<Footprint>& footprints,
    const std::map<std::string, std::vector<Polygon2D>>& cam_polygons,
    const MultiPolygon2D& truth, const MultiPolygon2D& boundary,
    const std::vector<double>& ratio_thresholds,
    const std::vector<double>& area_thresholds) {
    std::vector<SweepCell> cells;
    for (double ratio : ratio_thresholds) {
        for (double area : area_thresholds) {
            SweepCell cell;
            cell.config = {ratio, area};
            const std::vector<Footprint> retained = apply_filters(footprints, cell.config);
            std::vector<Polygon2D> fp_polys, cam_polys;
            for (const Footprint& fp : retained) {
                fp_polys.push_back(fp.polygon);
                auto it = cam_polygons.find(fp.image_id);
                if (it != cam_polygons.end())
                    for (const Polygon2D& p : it->second) cam_polys.push_back(p);
            }
            cell.footprint = area_precision(Method::Footprint, fp_polys, truth, boundary);
            cell.cam = area_precision(Method::Cam, cam_polys, truth, boundary);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

}  // namespace del
