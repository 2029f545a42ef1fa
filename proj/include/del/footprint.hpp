#pragma once

// Ground footprints of images and the area / aspect-ratio retention
// heuristics for horizon-skewed projections.

#include <string>
#include <vector>

#include "del/geometry.hpp"
#include "del/homography.hpp"
#include "del/reconstruction.hpp"

namespace del {

struct Footprint {
    std::string image_id;
    Polygon2D polygon;  // world ENU meters
    double area_km2 = 0.0;
    double aspect_ratio = 1.0;  // long / short side of the min-area rectangle
};

struct FilterConfig {
    double max_aspect_ratio = 4.0;  // unitless
    double max_area_km2 = 5.0;
};

// Projects the four image corners to the ground. Throws HorizonError when a
// corner maps at or beyond the horizon.
inline Footprint image_footprint(const std::string& image_id, const Homography& h,
                                 const CameraModel& cam) {
    Polygon2D corners;
    corners.vertices = {{0.0, 0.0},
                        {static_cast<double>(cam.width), 0.0},
                        {static_cast<double>(cam.width), static_cast<double>(cam.height)},
                        {0.0, static_cast<double>(cam.height)}};
    Footprint fp;
    fp.image_id = image_id;
    fp.polygon = project_polygon(h, corners);
    fp.area_km2 = polygon_area(fp.polygon) / 1e6;
    const MinAreaRect r = min_area_rect(fp.polygon);
    fp.aspect_ratio = r.long_side / r.short_side;
    return fp;
}

// Retain iff neither metric strictly exceeds its threshold.
inline bool passes_filters(const Footprint& fp, const FilterConfig& cfg) {
    return fp.area_km2 <= cfg.max_area_km2 && fp.aspect_ratio <= cfg.max_aspect_ratio;
}

inline std::vector<Footprint> apply_filters(const std::vector<Footprint>& footprints,
                                            const FilterConfig& cfg) {
    std::vector<Footprint> out;
    for (const Footprint& fp : footprints)
        if (passes_filters(fp, cfg)) out.push_back(fp);
    return out;
}

}  // namespace del
