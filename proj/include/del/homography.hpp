#pragma once

// Image-to-ground projective transformation: normalized DLT, RANSAC wrapper,
// and point/polygon projection with horizon guarding.

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "del/geometry.hpp"

namespace del {

struct Correspondence {
    double u = 0.0, v = 0.0;  // image pixels
    double x = 0.0, y = 0.0;  // ground ENU meters
};

struct Homography {
    Eigen::Matrix3d H = Eigen::Matrix3d::Identity();
};

struct GeorefResult {
    std::string image_id;
    Homography H;
    double inlier_ratio = 0.0;
    int inlier_count = 0;
    double rms_error = 0.0;       // meters, over inliers
    std::vector<int> inliers;     // indices into the input correspondences
};

struct HorizonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HomographyRansacParams {
    double inlier_dist = 5.0;  // meters, world space
    int max_iters = 2000;
    double confidence = 0.999;
    uint64_t seed = 0;
};

// Scale to Frobenius norm 1, sign fixed by the bottom-right entry (falling
// back to the largest-magnitude entry when h33 is zero).
inline Homography normalize_homography(const Eigen::Matrix3d& H) {
    const double f = H.norm();
    if (f < 1e-300) throw std::invalid_argument("normalize_homography: zero matrix");
    Eigen::Matrix3d N = H / f;
    double pivot = N(2, 2);
    if (std::abs(pivot) < 1e-12) {
        int r = 0, c = 0;
        N.cwiseAbs().maxCoeff(&r, &c);
        pivot = N(r, c);
    }
    if (pivot < 0.0) N = -N;
    return {N};
}

inline Point2 project_point(const Homography& h, Point2 px) {
    const Eigen::Vector3d p(px.x, px.y, 1.0);
    const Eigen::Vector3d q = h.H * p;
    if (std::abs(q.z()) < 1e-10 * h.H.norm() * p.norm())
        throw HorizonError("point maps to infinity");
    return {q.x() / q.z(), q.y() / q.z()};
}

// Vertex-wise projection; throws if the polygon straddles the horizon line.
inline Polygon2D project_polygon(const Homography& h, const Polygon2D& poly) {
    Polygon2D out;
    out.vertices.reserve(poly.vertices.size());
    double sign = 0.0;
    for (const Point2& v : poly.vertices) {
        const Eigen::Vector3d p(v.x, v.y, 1.0);
        const double w = h.H.row(2).dot(p);
        if (std::abs(w) < 1e-10 * h.H.norm() * p.norm())
            throw HorizonError("polygon vertex maps to infinity");
        if (sign == 0.0) sign = w > 0 ? 1.0 : -1.0;
        else if ((w > 0 ? 1.0 : -1.0) != sign)
            throw HorizonError("polygon straddles the horizon");
        out.vertices.push_back({h.H.row(0).dot(p) / w, h.H.row(1).dot(p) / w});
    }
    return out;
}

namespace detail {

struct Similarity {
    double scale = 1.0;
    Point2 centroid;
};

inline Similarity hartley_normalization(const std::vector<Point2>& pts) {
    Similarity s;
    for (const Point2& p : pts) s.centroid = s.centroid + p;
    s.centroid = (1.0 / pts.size()) * s.centroid;
    double mean_dist = 0.0;
    for (const Point2& p : pts) mean_dist += norm(p - s.centroid);
    mean_dist /= pts.size();
    s.scale = mean_dist > 1e-300 ? std::sqrt(2.0) / mean_dist : 1.0;
    return s;
}

inline Eigen::Matrix3d similarity_matrix(const Similarity& s) {
    Eigen::Matrix3d T;
    T << s.scale, 0, -s.scale * s.centroid.x,
         0, s.scale, -s.scale * s.centroid.y,
         0, 0, 1;
    return T;
}

inline bool three_collinear(Point2 a, Point2 b, Point2 c) {
    const double area2 = std::abs(cross(b - a, c - a));
    const double scale = std::max({norm(b - a), norm(c - a), 1e-12});
    return area2 < 1e-9 * scale * scale;
}

}  // namespace detail

inline Homography estimate_dlt(const std::vector<Correspondence>& corrs) {
    const size_t n = corrs.size();
    if (n < 4) throw std::invalid_argument("estimate_dlt: need >= 4 correspondences");

    std::vector<Point2> src(n), dst(n);
    for (size_t i = 0; i < n; ++i) {
        src[i] = {corrs[i].u, corrs[i].v};
        dst[i] = {corrs[i].x, corrs[i].y};
    }
    const auto ts = detail::hartley_normalization(src);
    const auto td = detail::hartley_normalization(dst);
    const Eigen::Matrix3d Ts = detail::similarity_matrix(ts);
    const Eigen::Matrix3d Td = detail::similarity_matrix(td);

    Eigen::MatrixXd A(2 * n, 9);
    for (size_t i = 0; i < n; ++i) {
        const double u = ts.scale * (src[i].x - ts.centroid.x);
        const double v = ts.scale * (src[i].y - ts.centroid.y);
        const double x = td.scale * (dst[i].x - td.centroid.x);
        const double y = td.scale * (dst[i].y - td.centroid.y);
        A.row(2 * i)     << u, v, 1, 0, 0, 0, -x * u, -x * v, -x;
        A.row(2 * i + 1) << 0, 0, 0, u, v, 1, -y * u, -y * v, -y;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(7) < 1e-9 * sv(0))
        throw std::invalid_argument("estimate_dlt: degenerate configuration");
    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d Hn;
    Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    const Eigen::Matrix3d H = Td.inverse() * Hn * Ts;
    return normalize_homography(H);
}

inline GeorefResult estimate_ransac(const std::vector<Correspondence>& corrs,
                                    const HomographyRansacParams& params) {
    const int n = static_cast<int>(corrs.size());
    if (n < 4) throw std::invalid_argument("estimate_ransac: need >= 4 correspondences");

    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<int> pick(0, n - 1);

    auto residual = [&](const Homography& h, const Correspondence& c) {
        try {
            const Point2 p = project_point(h, {c.u, c.v});
            return norm(p - Point2{c.x, c.y});
        } catch (const HorizonError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    int best_count = -1;
    std::vector<int> best_inliers;
    int needed = params.max_iters;
    for (int it = 0; it < needed && it < params.max_iters; ++it) {
        int idx[4];
        idx[0] = pick(rng); idx[1] = pick(rng); idx[2] = pick(rng); idx[3] = pick(rng);
        bool dup = false;
        for (int i = 0; i < 4 && !dup; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (idx[i] == idx[j]) { dup = true; break; }
        if (dup) continue;
        std::vector<Correspondence> sample{corrs[idx[0]], corrs[idx[1]],
                                           corrs[idx[2]], corrs[idx[3]]};
        bool degen = false;
        for (int i = 0; i < 4 && !degen; ++i)
            for (int j = i + 1; j < 4 && !degen; ++j)
                for (int k = j + 1; k < 4; ++k)
                    if (detail::three_collinear({sample[i].u, sample[i].v},
                                                {sample[j].u, sample[j].v},
                                                {sample[k].u, sample[k].v})) {
                        degen = true;
                        break;
                    }
        if (degen) continue;
        Homography h;
        try {
            h = estimate_dlt(sample);
        } catch (const std::invalid_argument&) {
            continue;
        }
        std::vector<int> inliers;
        for (int i = 0; i < n; ++i)
            if (residual(h, corrs[i]) <= params.inlier_dist) inliers.push_back(i);
        if (static_cast<int>(inliers.size()) > best_count) {
            best_count = static_cast<int>(inliers.size());
            best_inliers = std::move(inliers);
            // Standard adaptive stopping bound.
            const double w = static_cast<double>(best_count) / n;
            const double denom = std::log(1.0 - std::min(0.999999, std::pow(w, 4)));
            if (denom < 0.0) {
                const int k = static_cast<int>(
                    std::ceil(std::log(1.0 - params.confidence) / denom));
                needed = std::min(params.max_iters, std::max(it + 1, k));
            }
        }
    }
    if (best_count < 4)
        throw std::invalid_argument("estimate_ransac: no model with >= 4 inliers");

    std::vector<Correspondence> inlier_corrs;
    for (int i : best_inliers) inlier_corrs.push_back(corrs[i]);
    Homography refit = estimate_dlt(inlier_corrs);

    // Reclassify against the refit model.
    std::vector<int> final_inliers;
    double sq_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = residual(refit, corrs[i]);
        if (r <= params.inlier_dist) {
            final_inliers.push_back(i);
            sq_sum += r * r;
        }
    }
    if (final_inliers.size() < 4) {
        // Refit made things worse; keep the consensus-sample model.
        refit = estimate_dlt(inlier_corrs);
        final_inliers = best_inliers;
        sq_sum = 0.0;
        for (int i : final_inliers) {
            const double r = residual(refit, corrs[i]);
            sq_sum += r * r;
        }
    }
    GeorefResult res;
    res.H = refit;
    res.inlier_count = static_cast<int>(final_inliers.size());
    res.inlier_ratio = static_cast<double>(res.inlier_count) / n;
    res.rms_error = std::sqrt(sq_sum / res.inlier_count);
    res.inliers = std::move(final_inliers);
    return res;
}

// Retention gate: keep images with at least 20% inlier matches.
inline bool retain_gate(const GeorefResult& r) { return r.inlier_ratio >= 0.20; }

}  // namespace del
