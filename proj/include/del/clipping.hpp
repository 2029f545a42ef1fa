#pragma once

// General polygon boolean operations (intersection, union/dissolve) on the
// geometry.hpp types. Backed by Boost.Geometry's overlay engine.

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "del/geometry.hpp"

namespace del {

namespace bgeo {
namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint>;  // clockwise, closed
using BMulti = bg::model::multi_polygon<BPolygon>;

inline BPolygon to_boost(const PolygonWithHoles& pwh) {
    BPolygon bp;
    for (const Point2& p : pwh.outer.vertices)
        bg::append(bp.outer(), BPoint{p.x, p.y});
    bp.inners().resize(pwh.holes.size());
    for (size_t i = 0; i < pwh.holes.size(); ++i)
        for (const Point2& p : pwh.holes[i].vertices)
            bg::append(bp.inners()[i], BPoint{p.x, p.y});
    bg::correct(bp);
    return bp;
}

inline BMulti to_boost(const MultiPolygon2D& mp) {
    BMulti bm;
    for (const auto& pwh : mp.polygons)
        if (pwh.outer.vertices.size() >= 3) bm.push_back(to_boost(pwh));
    return bm;
}

inline MultiPolygon2D from_boost(const BMulti& bm) {
    MultiPolygon2D mp;
    for (const BPolygon& bp : bm) {
        PolygonWithHoles pwh;
        const auto& outer = bp.outer();
        // Boost rings are closed; drop the repeated last vertex.
        for (size_t i = 0; i + 1 < outer.size(); ++i)
            pwh.outer.vertices.push_back({bg::get<0>(outer[i]), bg::get<1>(outer[i])});
        for (const auto& inner : bp.inners()) {
            Polygon2D hole;
            for (size_t i = 0; i + 1 < inner.size(); ++i)
                hole.vertices.push_back({bg::get<0>(inner[i]), bg::get<1>(inner[i])});
            if (hole.vertices.size() >= 3) pwh.holes.push_back(std::move(hole));
        }
        if (pwh.outer.vertices.size() >= 3) mp.polygons.push_back(std::move(pwh));
    }
    return mp;
}
}  // namespace bgeo

inline double multipolygon_area(const MultiPolygon2D& mp) {
    return boost::geometry::area(bgeo::to_boost(mp));
}

inline double intersection_area(const MultiPolygon2D& a, const MultiPolygon2D& b) {
    const auto ba = bgeo::to_boost(a);
    const auto bb = bgeo::to_boost(b);
    if (ba.empty() || bb.empty()) return 0.0;
    bgeo::BMulti out;
    boost::geometry::intersection(ba, bb, out);
    return boost::geometry::area(out);
}

inline MultiPolygon2D intersection(const MultiPolygon2D& a, const MultiPolygon2D& b) {
    bgeo::BMulti out;
    boost::geometry::intersection(bgeo::to_boost(a), bgeo::to_boost(b), out);
    return bgeo::from_boost(out);
}

// Union of all input polygons into a dissolved multipolygon.
inline MultiPolygon2D dissolve(const std::vector<Polygon2D>& polys) {
    bgeo::BMulti acc;
    for (const Polygon2D& p : polys) {
        if (p.vertices.size() < 3) continue;
        bgeo::BMulti one = bgeo::to_boost(to_multipolygon(p));
        bgeo::BMulti merged;
        boost::geometry::union_(acc, one, merged);
        acc = std::move(merged);
    }
    return bgeo::from_boost(acc);
}

inline MultiPolygon2D union_(const MultiPolygon2D& a, const MultiPolygon2D& b) {
    bgeo::BMulti out;
    boost::geometry::union_(bgeo::to_boost(a), bgeo::to_boost(b), out);
    return bgeo::from_boost(out);
}

}  // namespace del
