#pragma once

// File formats: reconstruction JSON, binary tensors, GeoJSON polygon
// import/export, PGM masks, and CSV tables.

#include <cstdint>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "del/cam.hpp"
#include "del/geodesy.hpp"
#include "del/geometry.hpp"
#include "del/homography.hpp"
#include "del/labels.hpp"
#include "del/reconstruction.hpp"

namespace del {

using ordered_json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Reconstruction JSON

inline Reconstruction reconstruction_from_json(const nlohmann::json& j) {
    Reconstruction rec;
    try {
        rec.origin = {j.at("origin").at("lat").get<double>(),
                      j.at("origin").at("lon").get<double>(),
                      j.at("origin").at("alt").get<double>()};
        for (auto& [id, jc] : j.at("cameras").items()) {
            CameraModel cam;
            cam.width = jc.at("width").get<int>();
            cam.height = jc.at("height").get<int>();
            cam.focal_px = jc.at("focal_px").get<double>();
            cam.cx = jc.at("cx").get<double>();
            cam.cy = jc.at("cy").get<double>();
            if (cam.focal_px <= 0)
                throw IoError("camera " + id + ": focal must be positive");
            if (cam.cx < 0 || cam.cx > cam.width || cam.cy < 0 || cam.cy > cam.height)
                throw IoError("camera " + id + ": principal point outside image");
            rec.cameras[id] = cam;
        }
        for (const auto& jp : j.at("points"))
            rec.points.emplace_back(jp.at(0).get<double>(), jp.at(1).get<double>(),
                                    jp.at(2).get<double>());
        const auto& jobs = j.contains("observations") ? j.at("observations")
                                                      : nlohmann::json::object();
        for (auto& [id, js] : j.at("shots").items()) {
            Shot s;
            s.image_id = id;
            s.camera_id = js.at("camera").get<std::string>();
            const auto& q = js.at("q");
            s.rotation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                            q.at(2).get<double>(), q.at(3).get<double>());
            const auto& t = js.at("t");
            s.translation = {t.at(0).get<double>(), t.at(1).get<double>(),
                             t.at(2).get<double>()};
            s.gps = {js.at("gps").at("lat").get<double>(),
                     js.at("gps").at("lon").get<double>(),
                     js.at("gps").at("alt").get<double>()};
            if (jobs.contains(id))
                for (const auto& jo : jobs.at(id))
                    s.observations.push_back({jo.at(0).get<double>(), jo.at(1).get<double>(),
                                              jo.at(2).get<int>()});
            rec.shots.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("reconstruction schema error: ") + e.what());
    }
    rec.validate();
    return rec;
}

inline ordered_json reconstruction_to_json(const Reconstruction& rec) {
    ordered_json j;
    j["origin"] = {{"lat", rec.origin.lat}, {"lon", rec.origin.lon}, {"alt", rec.origin.alt}};
    ordered_json jc = ordered_json::object();
    for (const auto& [id, cam] : rec.cameras)
        jc[id] = {{"width", cam.width}, {"height", cam.height}, {"focal_px", cam.focal_px},
                  {"cx", cam.cx}, {"cy", cam.cy}};
    j["cameras"] = std::move(jc);
    ordered_json js = ordered_json::object();
    ordered_json jo = ordered_json::object();
    for (const Shot& s : rec.shots) {
        js[s.image_id] = {
            {"camera", s.camera_id},
            {"q", {s.rotation.w(), s.rotation.x(), s.rotation.y(), s.rotation.z()}},
            {"t", {s.translation.x(), s.translation.y(), s.translation.z()}},
            {"gps", {{"lat", s.gps.lat}, {"lon", s.gps.lon}, {"alt", s.gps.alt}}}};
        ordered_json obs = ordered_json::array();
        for (const Observation& o : s.observations)
            obs.push_back({o.u, o.v, o.point_index});
        jo[s.image_id] = std::move(obs);
    }
    j["shots"] = std::move(js);
    ordered_json jp = ordered_json::array();
    for (const auto& p : rec.points) jp.push_back({p.x(), p.y(), p.z()});
    j["points"] = std::move(jp);
    j["observations"] = std::move(jo);
    return j;
}

inline Reconstruction load_reconstruction(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return reconstruction_from_json(j);
}

inline void save_reconstruction(const Reconstruction& rec, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << reconstruction_to_json(rec).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Binary tensor format: "DELT" magic, u32 K/H/W little-endian, f32 payload.

inline void save_tensor(const FeatureMap& fm, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f.write("DELT", 4);
    const uint32_t dims[3] = {static_cast<uint32_t>(fm.channels),
                              static_cast<uint32_t>(fm.height),
                              static_cast<uint32_t>(fm.width)};
    f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    f.write(reinterpret_cast<const char*>(fm.values.data()),
            static_cast<std::streamsize>(fm.values.size() * sizeof(float)));
}

inline FeatureMap load_tensor(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != "DELT")
        throw IoError(path + ": bad tensor magic");
    uint32_t dims[3];
    f.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!f) throw IoError(path + ": truncated tensor header");
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0)
        throw IoError(path + ": zero tensor dimension");
    FeatureMap fm;
    fm.channels = static_cast<int>(dims[0]);
    fm.height = static_cast<int>(dims[1]);
    fm.width = static_cast<int>(dims[2]);
    const size_t count = static_cast<size_t>(dims[0]) * dims[1] * dims[2];
    fm.values.resize(count);
    f.read(reinterpret_cast<char*>(fm.values.data()),
           static_cast<std::streamsize>(count * sizeof(float)));
    if (!f) throw IoError(path + ": payload shorter than header dims");
    char extra;
    if (f.read(&extra, 1)) throw IoError(path + ": payload longer than header dims");
    for (float v : fm.values)
        if (!std::isfinite(v)) throw IoError(path + ": non-finite tensor value");
    return fm;
}

inline void save_weights(const ClassWeights& w, const std::string& path) {
    FeatureMap fm;
    fm.channels = static_cast<int>(w.w.size());
    fm.height = 1;
    fm.width = 1;
    fm.values = w.w;
    save_tensor(fm, path);
}

inline ClassWeights load_weights(const std::string& path) {
    const FeatureMap fm = load_tensor(path);
    if (fm.height != 1 || fm.width != 1)
        throw IoError(path + ": weights must be K x 1 x 1");
    return {fm.values};
}

// ---------------------------------------------------------------------------
// PGM (P2) mask export for debugging.

inline void save_mask_pgm(const BinaryMask& mask, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << "P2\n" << mask.width << " " << mask.height << "\n1\n";
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x)
            f << (mask.at(y, x) ? 1 : 0) << (x + 1 < mask.width ? " " : "");
        f << "\n";
    }
}

// ---------------------------------------------------------------------------
// GeoJSON (RFC 7946)

struct GeoFeature {
    std::string image_id;
    std::string method;
    double area_km2 = 0.0;
    Polygon2D polygon;  // ENU meters
};

inline ordered_json geojson_feature_collection(const std::vector<GeoFeature>& features,
                                               const GeoPoint& origin) {
    ordered_json fc;
    fc["type"] = "FeatureCollection";
    ordered_json arr = ordered_json::array();
    for (const GeoFeature& gf : features) {
        ordered_json ring = ordered_json::array();
        auto push = [&](const Point2& p) {
            const GeoPoint g = enu_to_geodetic({p.x, p.y, 0.0}, origin);
            ring.push_back({g.lon, g.lat});
        };
        for (const Point2& p : gf.polygon.vertices) push(p);
        if (!gf.polygon.vertices.empty()) push(gf.polygon.vertices.front());
        ordered_json feat;
        feat["type"] = "Feature";
        feat["geometry"] = {{"type", "Polygon"}, {"coordinates", {ring}}};
        feat["properties"] = {{"image_id", gf.image_id}, {"method", gf.method},
                              {"area_km2", gf.area_km2}};
        arr.push_back(std::move(feat));
    }
    fc["features"] = std::move(arr);
    return fc;
}

inline void save_geojson(const std::vector<GeoFeature>& features, const GeoPoint& origin,
                         const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << geojson_feature_collection(features, origin).dump(2) << "\n";
}

// Reads Polygon/MultiPolygon geometries into a single ENU multipolygon.
inline MultiPolygon2D load_geojson_multipolygon(const std::string& path,
                                                const GeoPoint& origin) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    MultiPolygon2D mp;
    auto ring_to_poly = [&](const nlohmann::json& jring) {
        Polygon2D poly;
        for (const auto& c : jring) {
            const GeoPoint g{c.at(1).get<double>(), c.at(0).get<double>(), 0.0};
            const EnuPoint e = geodetic_to_enu(g, origin);
            poly.vertices.push_back({e.e, e.n});
        }
        // GeoJSON rings repeat the first coordinate.
        if (poly.vertices.size() > 1 &&
            poly.vertices.front().x == poly.vertices.back().x &&
            poly.vertices.front().y == poly.vertices.back().y)
            poly.vertices.pop_back();
        return poly;
    };
    auto add_polygon = [&](const nlohmann::json& jcoords) {
        PolygonWithHoles pwh;
        bool first = true;
        for (const auto& jring : jcoords) {
            if (first) {
                pwh.outer = ring_to_poly(jring);
                first = false;
            } else {
                pwh.holes.push_back(ring_to_poly(jring));
            }
        }
        if (pwh.outer.vertices.size() >= 3) mp.polygons.push_back(std::move(pwh));
    };
    auto add_geometry = [&](const nlohmann::json& geom) {
        const std::string type = geom.at("type").get<std::string>();
        if (type == "Polygon") add_polygon(geom.at("coordinates"));
        else if (type == "MultiPolygon")
            for (const auto& jp : geom.at("coordinates")) add_polygon(jp);
        else throw IoError(path + ": unsupported geometry type " + type);
    };
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "FeatureCollection")
            for (const auto& feat : j.at("features")) add_geometry(feat.at("geometry"));
        else if (type == "Feature") add_geometry(j.at("geometry"));
        else add_geometry(j);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return mp;
}

// ---------------------------------------------------------------------------
// CSV tables

inline std::vector<VoteRecord> load_votes_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::vector<VoteRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.find("image_id") != std::string::npos) continue;
        std::istringstream ss(line);
        VoteRecord r;
        std::string field;
        if (!std::getline(ss, r.image_id, ',') || !std::getline(ss, field, ','))
            throw IoError(path + ":" + std::to_string(lineno) + ": malformed row");
        try {
            r.positive_votes = std::stoi(field);
            if (!std::getline(ss, field, ','))
                throw IoError(path + ":" + std::to_string(lineno) + ": missing worker count");
            r.total_workers = std::stoi(field);
        } catch (const std::logic_error&) {
            throw IoError(path + ":" + std::to_string(lineno) + ": non-numeric field");
        }
        records.push_back(std::move(r));
    }
    return records;
}

struct ImageMeta {
    std::string image_id;
    GeoPoint gps;
    bool flood = false;
};

inline std::vector<ImageMeta> load_metadata_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::vector<ImageMeta> metas;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.find("image_id") != std::string::npos) continue;
        std::istringstream ss(line);
        ImageMeta m;
        std::string field;
        try {
            if (!std::getline(ss, m.image_id, ',')) throw std::invalid_argument("id");
            std::getline(ss, field, ',');
            m.gps.lat = std::stod(field);
            std::getline(ss, field, ',');
            m.gps.lon = std::stod(field);
            std::getline(ss, field, ',');
            m.gps.alt = std::stod(field);
            std::getline(ss, field, ',');
            m.flood = std::stoi(field) != 0;
        } catch (const std::logic_error&) {
            throw IoError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
        metas.push_back(std::move(m));
    }
    return metas;
}

// ---------------------------------------------------------------------------
// Georeferencing results JSON (intermediate)

inline ordered_json georef_to_json(const std::vector<GeorefResult>& results) {
    ordered_json j = ordered_json::object();
    for (const GeorefResult& r : results) {
        ordered_json h = ordered_json::array();
        for (int row = 0; row < 3; ++row)
            for (int col = 0; col < 3; ++col) h.push_back(r.H.H(row, col));
        j[r.image_id] = {{"H", std::move(h)},
                         {"inlier_ratio", r.inlier_ratio},
                         {"inlier_count", r.inlier_count},
                         {"rms_error", r.rms_error}};
    }
    return j;
}

inline std::vector<GeorefResult> georef_from_json(const nlohmann::json& j) {
    std::vector<GeorefResult> out;
    for (auto& [id, jr] : j.items()) {
        GeorefResult r;
        r.image_id = id;
        const auto& h = jr.at("H");
        for (int row = 0; row < 3; ++row)
            for (int col = 0; col < 3; ++col)
                r.H.H(row, col) = h.at(row * 3 + col).get<double>();
        r.inlier_ratio = jr.at("inlier_ratio").get<double>();
        r.inlier_count = jr.at("inlier_count").get<int>();
        r.rms_error = jr.at("rms_error").get<double>();
        out.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return j;
}

inline void save_json(const ordered_json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << j.dump(2) << "\n";
}

}  // namespace del
