#pragma once

// Class activation map computation, thresholding, bilinear upsampling, and
// border tracing of the binary mask into image-space polygons.

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "del/geometry.hpp"

namespace del {

struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> values;  // channel-major, row-major within channel

    float at(int k, int y, int x) const {
        return values[(static_cast<size_t>(k) * height + y) * width + x];
    }
};

struct ClassWeights {
    std::vector<float> w;
};

struct ActivationGrid {
    int height = 0;
    int width = 0;
    std::vector<double> values;  // row-major

    double at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
    double& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
};

struct BinaryMask {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> values;

    bool at(int y, int x) const { return values[static_cast<size_t>(y) * width + x] != 0; }
};

struct ImagePolygon {
    Polygon2D polygon;            // outer border, pixel coordinates
    std::vector<Polygon2D> holes; // borders of enclosed background regions
    int pixel_area = 0;           // mask pixels in the component
};

inline ActivationGrid compute_cam(const FeatureMap& f, const ClassWeights& w) {
    if (static_cast<int>(w.w.size()) != f.channels)
        throw std::invalid_argument("compute_cam: channel count mismatch");
    ActivationGrid m{f.height, f.width,
                     std::vector<double>(static_cast<size_t>(f.height) * f.width, 0.0)};
    for (int k = 0; k < f.channels; ++k) {
        const double wk = w.w[k];
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x)
                m.at(y, x) += wk * static_cast<double>(f.at(k, y, x));
    }
    return m;
}

inline double class_score(const ActivationGrid& m) {
    double s = 0.0;
    for (double v : m.values) s += v;
    return s;
}

inline BinaryMask threshold_mask(const ActivationGrid& m, double tau = 0.0) {
    BinaryMask mask{m.height, m.width,
                    std::vector<uint8_t>(m.values.size(), 0)};
    for (size_t i = 0; i < m.values.size(); ++i)
        mask.values[i] = m.values[i] >= tau ? 1 : 0;
    return mask;
}

// Corner-aligned bilinear resampling.
inline ActivationGrid upsample(const ActivationGrid& m, int out_width, int out_height) {
    if (out_width <= 0 || out_height <= 0)
        throw std::invalid_argument("upsample: output dims must be positive");
    ActivationGrid out{out_height, out_width,
                       std::vector<double>(static_cast<size_t>(out_height) * out_width)};
    const double sx = out_width > 1 ? static_cast<double>(m.width - 1) / (out_width - 1) : 0.0;
    const double sy = out_height > 1 ? static_cast<double>(m.height - 1) / (out_height - 1) : 0.0;
    for (int y = 0; y < out_height; ++y) {
        const double fy = y * sy;
        const int y0 = std::min(static_cast<int>(fy), m.height - 1);
        const int y1 = std::min(y0 + 1, m.height - 1);
        const double ty = fy - y0;
        for (int x = 0; x < out_width; ++x) {
            const double fx = x * sx;
            const int x0 = std::min(static_cast<int>(fx), m.width - 1);
            const int x1 = std::min(x0 + 1, m.width - 1);
            const double tx = fx - x0;
            const double a = m.at(y0, x0) * (1 - tx) + m.at(y0, x1) * tx;
            const double b = m.at(y1, x0) * (1 - tx) + m.at(y1, x1) * tx;
            out.at(y, x) = a * (1 - ty) + b * ty;
        }
    }
    return out;
}

namespace detail {

// Moore neighborhood, clockwise starting east.
inline constexpr int kNb8x[8] = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr int kNb8y[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// Outer border of one 8-connected component via border following through
// pixel centers. `label` marks the component's pixels in `labels`.
inline Polygon2D trace_border(const BinaryMask& mask,
                              const std::vector<int>& labels, int label,
                              int start_x, int start_y, int area, int start_backtrack) {
    auto is_fg = [&](int x, int y) {
        return x >= 0 && x < mask.width && y >= 0 && y < mask.height &&
               labels[static_cast<size_t>(y) * mask.width + x] == label;
    };
    Polygon2D poly;
    const int sx = start_x, sy = start_y;
    int cx = sx, cy = sy;
    int backtrack = start_backtrack;
    int first_move = -1;
    const int safety = 8 * area + 16;
    for (int step = 0; step < safety; ++step) {
        int found = -1;
        for (int i = 1; i <= 8; ++i) {
            const int d = (backtrack + i) % 8;
            if (is_fg(cx + kNb8x[d], cy + kNb8y[d])) { found = d; break; }
        }
        if (found < 0) break;  // isolated pixel, handled by caller
        if (cx == sx && cy == sy) {
            if (first_move < 0) first_move = found;
            else if (found == first_move) break;  // Jacob's stopping criterion
        }
        poly.vertices.push_back({static_cast<double>(cx), static_cast<double>(cy)});
        cx += kNb8x[found];
        cy += kNb8y[found];
        backtrack = (found + 4) % 8;
    }
    // Drop consecutive duplicates from revisited pixels.
    std::vector<Point2> cleaned;
    for (const Point2& p : poly.vertices) {
        if (cleaned.empty() || cleaned.back().x != p.x || cleaned.back().y != p.y)
            cleaned.push_back(p);
    }
    while (cleaned.size() > 1 && cleaned.front().x == cleaned.back().x &&
           cleaned.front().y == cleaned.back().y)
        cleaned.pop_back();
    poly.vertices = std::move(cleaned);
    return poly;
}

}  // namespace detail

// One polygon per 8-connected foreground component, ordered by raster-scan
// first pixel, with one hole ring per enclosed background region. Single-pixel
// components become the pixel's unit square.
inline std::vector<ImagePolygon> trace_polygons(const BinaryMask& mask) {
    std::vector<int> labels(mask.values.size(), 0);
    std::vector<ImagePolygon> out;
    int next_label = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const size_t idx = static_cast<size_t>(y) * mask.width + x;
            if (!mask.values[idx] || labels[idx]) continue;
            const int label = ++next_label;
            // Flood fill the 8-connected component.
            int area = 0;
            std::queue<std::pair<int, int>> q;
            q.push({x, y});
            labels[idx] = label;
            while (!q.empty()) {
                auto [px, py] = q.front();
                q.pop();
                ++area;
                for (int d = 0; d < 8; ++d) {
                    const int nx = px + detail::kNb8x[d];
                    const int ny = py + detail::kNb8y[d];
                    if (nx < 0 || nx >= mask.width || ny < 0 || ny >= mask.height) continue;
                    const size_t nidx = static_cast<size_t>(ny) * mask.width + nx;
                    if (mask.values[nidx] && !labels[nidx]) {
                        labels[nidx] = label;
                        q.push({nx, ny});
                    }
                }
            }
            ImagePolygon ip;
            ip.pixel_area = area;
            if (area == 1) {
                const double fx = x, fy = y;
                ip.polygon.vertices = {{fx - 0.5, fy - 0.5}, {fx + 0.5, fy - 0.5},
                                       {fx + 0.5, fy + 0.5}, {fx - 0.5, fy + 0.5}};
            } else {
                // Raster-first pixel: everything west and above is background,
                // so the backtrack direction is west.
                ip.polygon = detail::trace_border(mask, labels, label, x, y, area, 4);
                if (ip.polygon.vertices.size() < 3) {
                    // Two-pixel or fully degenerate trace; widen to a thin box.
                    double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
                    for (int yy = 0; yy < mask.height; ++yy)
                        for (int xx = 0; xx < mask.width; ++xx)
                            if (labels[static_cast<size_t>(yy) * mask.width + xx] == label) {
                                minx = std::min(minx, double(xx));
                                maxx = std::max(maxx, double(xx));
                                miny = std::min(miny, double(yy));
                                maxy = std::max(maxy, double(yy));
                            }
                    ip.polygon.vertices = {{minx - 0.5, miny - 0.5}, {maxx + 0.5, miny - 0.5},
                                           {maxx + 0.5, maxy + 0.5}, {minx - 0.5, maxy + 0.5}};
                }
            }
            out.push_back(std::move(ip));
        }
    }

    // Hole rings: 4-connected background regions that never touch the image
    // border are enclosed by exactly one foreground component; trace that
    // component's inner border around each of them.
    std::vector<int> bg_labels(mask.values.size(), 0);
    int bg_next = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const size_t idx = static_cast<size_t>(y) * mask.width + x;
            if (mask.values[idx] || bg_labels[idx]) continue;
            ++bg_next;
            bool touches_border = false;
            std::vector<std::pair<int, int>> region;
            std::queue<std::pair<int, int>> q;
            q.push({x, y});
            bg_labels[idx] = bg_next;
            while (!q.empty()) {
                auto [px, py] = q.front();
                q.pop();
                region.push_back({px, py});
                if (px == 0 || px == mask.width - 1 || py == 0 || py == mask.height - 1)
                    touches_border = true;
                constexpr int dx4[4] = {1, -1, 0, 0};
                constexpr int dy4[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const int nx = px + dx4[d], ny = py + dy4[d];
                    if (nx < 0 || nx >= mask.width || ny < 0 || ny >= mask.height) continue;
                    const size_t nidx = static_cast<size_t>(ny) * mask.width + nx;
                    if (!mask.values[nidx] && !bg_labels[nidx]) {
                        bg_labels[nidx] = bg_next;
                        q.push({nx, ny});
                    }
                }
            }
            if (touches_border) continue;
            // (x, y) is the raster-first pixel of the hole; the pixel above it
            // is foreground and belongs to the enclosing component.
            const int owner = labels[static_cast<size_t>(y - 1) * mask.width + x];
            ImagePolygon& ip = out[owner - 1];
            // Backtrack points south, into the hole.
            Polygon2D ring = detail::trace_border(mask, labels, owner, x, y - 1,
                                                  ip.pixel_area, 2);
            if (ring.vertices.size() >= 3) ip.holes.push_back(std::move(ring));
        }
    }
    return out;
}

inline std::vector<ImagePolygon> min_region_filter(const std::vector<ImagePolygon>& polys,
                                                   int min_pixels) {
    std::vector<ImagePolygon> out;
    for (const auto& p : polys)
        if (p.pixel_area >= min_pixels) out.push_back(p);
    return out;
}

}  // namespace del
