#pragma once

// Writes a generated synthetic scene as the file set the pipeline consumes.

#include <filesystem>
#include <fstream>

#include "del/io.hpp"
#include "del/synth.hpp"

namespace del {

inline PipelineConfig save_scene(const SynthScene& scene, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::create_directories(fs::path(dir) / "features");
    save_reconstruction(scene.reconstruction, (fs::path(dir) / "recon.json").string());
    save_weights(scene.weights, (fs::path(dir) / "weights.delt").string());
    for (size_t i = 0; i < scene.reconstruction.shots.size(); ++i) {
        const std::string id = scene.reconstruction.shots[i].image_id;
        save_tensor(scene.feature_maps[i],
                    (fs::path(dir) / "features" / (id + ".delt")).string());
    }
    const GeoPoint origin = scene.params.origin;
    save_geojson({{"truth", "truth", polygon_area(scene.flood_polygon) / 1e6,
                   scene.flood_polygon}},
                 origin, (fs::path(dir) / "truth.geojson").string());
    save_geojson({{"boundary", "boundary", polygon_area(scene.boundary) / 1e6,
                   scene.boundary}},
                 origin, (fs::path(dir) / "boundary.geojson").string());
    std::ofstream meta((fs::path(dir) / "metadata.csv").string());
    meta << "image_id,lat,lon,alt,flood\n";
    meta.precision(12);
    for (const Shot& s : scene.reconstruction.shots)
        meta << s.image_id << "," << s.gps.lat << "," << s.gps.lon << "," << s.gps.alt
             << ",1\n";

    PipelineConfig cfg;
    cfg.reconstruction_path = (fs::path(dir) / "recon.json").string();
    cfg.feature_map_dir = (fs::path(dir) / "features").string();
    cfg.weights_path = (fs::path(dir) / "weights.delt").string();
    cfg.truth_path = (fs::path(dir) / "truth.geojson").string();
    cfg.boundary_path = (fs::path(dir) / "boundary.geojson").string();
    cfg.metadata_path = (fs::path(dir) / "metadata.csv").string();
    cfg.output_dir = (fs::path(dir) / "out").string();
    return cfg;
}

}  // namespace del
