#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace del {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

// Exterior ring; implicitly closed (first vertex not repeated).
struct Polygon2D {
    std::vector<Point2> vertices;
};

// Outer rings with optional holes.
struct PolygonWithHoles {
    Polygon2D outer;
    std::vector<Polygon2D> holes;
};

struct MultiPolygon2D {
    std::vector<PolygonWithHoles> polygons;
};

inline double signed_area(const Polygon2D& poly) {
    const auto& v = poly.vertices;
    double a = 0.0;
    for (size_t i = 0, n = v.size(); i < n; ++i) {
        const Point2& p = v[i];
        const Point2& q = v[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

inline double polygon_area(const Polygon2D& poly) {
    if (poly.vertices.size() < 3)
        throw std::invalid_argument("polygon_area: need >= 3 vertices");
    return std::abs(signed_area(poly));
}

inline double polygon_perimeter(const Polygon2D& poly) {
    const auto& v = poly.vertices;
    double s = 0.0;
    for (size_t i = 0, n = v.size(); i < n; ++i)
        s += norm(v[(i + 1) % n] - v[i]);
    return s;
}

// Andrew's monotone chain, CCW output.
inline Polygon2D convex_hull(std::vector<Point2> pts) {
    if (pts.size() < 3) throw std::invalid_argument("convex_hull: need >= 3 points");
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
                  return a.x == b.x && a.y == b.y;
              }),
              pts.end());
    const size_t n = pts.size();
    if (n < 3) throw std::invalid_argument("convex_hull: degenerate point set");
    std::vector<Point2> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    if (h.size() < 3) throw std::invalid_argument("convex_hull: collinear point set");
    return {std::move(h)};
}

struct MinAreaRect {
    Polygon2D rect;
    double long_side = 0.0;
    double short_side = 0.0;
};

// Rotating calipers: optimal rectangle has an edge collinear with a hull edge.
inline MinAreaRect min_area_rect(const Polygon2D& poly) {
    if (poly.vertices.size() < 3)
        throw std::invalid_argument("min_area_rect: need >= 3 vertices");
    Polygon2D hull = convex_hull(poly.vertices);
    const auto& v = hull.vertices;
    const size_t n = v.size();
    double best_area = std::numeric_limits<double>::infinity();
    MinAreaRect best;
    for (size_t i = 0; i < n; ++i) {
        Point2 edge = v[(i + 1) % n] - v[i];
        const double len = norm(edge);
        if (len < 1e-15) continue;
        const Point2 ux{edge.x / len, edge.y / len};
        const Point2 uy{-ux.y, ux.x};
        double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
        for (const Point2& p : v) {
            const Point2 d = p - v[i];
            minx = std::min(minx, dot(d, ux));
            maxx = std::max(maxx, dot(d, ux));
            miny = std::min(miny, dot(d, uy));
            maxy = std::max(maxy, dot(d, uy));
        }
        const double w = maxx - minx, h = maxy - miny;
        const double area = w * h;
        if (area < best_area) {
            best_area = area;
            auto corner = [&](double a, double b) {
                return Point2{v[i].x + a * ux.x + b * uy.x, v[i].y + a * ux.y + b * uy.y};
            };
            best.rect.vertices = {corner(minx, miny), corner(maxx, miny),
                                  corner(maxx, maxy), corner(minx, maxy)};
            best.long_side = std::max(w, h);
            best.short_side = std::min(w, h);
        }
    }
    if (!std::isfinite(best_area) || best_area <= 0.0)
        throw std::invalid_argument("min_area_rect: degenerate polygon");
    return best;
}

inline bool point_on_segment(Point2 p, Point2 a, Point2 b, double eps = 1e-12) {
    const Point2 ab = b - a, ap = p - a;
    const double c = cross(ab, ap);
    const double l = norm(ab);
    if (std::abs(c) > eps * std::max(1.0, l)) return false;
    const double t = dot(ap, ab);
    return t >= -eps && t <= l * l + eps;
}

inline bool point_on_ring(Point2 p, const Polygon2D& ring) {
    const auto& v = ring.vertices;
    for (size_t i = 0, n = v.size(); i < n; ++i)
        if (point_on_segment(p, v[i], v[(i + 1) % n])) return true;
    return false;
}

// Ray-casting crossing test; boundary not handled here.
inline bool point_in_ring(Point2 p, const Polygon2D& ring) {
    const auto& v = ring.vertices;
    bool in = false;
    for (size_t i = 0, n = v.size(); i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) in = !in;
        }
    }
    return in;
}

// Boundary (outer or hole rings) counts as inside.
inline bool point_in_multipolygon(Point2 p, const MultiPolygon2D& mp) {
    for (const auto& pwh : mp.polygons) {
        if (point_on_ring(p, pwh.outer)) return true;
        for (const auto& h : pwh.holes)
            if (point_on_ring(p, h)) return true;
        if (point_in_ring(p, pwh.outer)) {
            bool in_hole = false;
            for (const auto& h : pwh.holes)
                if (point_in_ring(p, h)) { in_hole = true; break; }
            if (!in_hole) return true;
        }
    }
    return false;
}

inline MultiPolygon2D to_multipolygon(const Polygon2D& poly) {
    MultiPolygon2D mp;
    mp.polygons.push_back({poly, {}});
    return mp;
}

}  // namespace del
