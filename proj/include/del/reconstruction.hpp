#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "del/geodesy.hpp"

namespace del {

struct CameraModel {
    int width = 0;
    int height = 0;
    double focal_px = 0.0;
    double cx = 0.0;
    double cy = 0.0;
};

struct Observation {
    double u = 0.0;
    double v = 0.0;
    int point_index = -1;
};

struct Shot {
    std::string image_id;
    std::string camera_id;
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();  // world -> camera
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    GeoPoint gps;
    std::vector<Observation> observations;

    Eigen::Vector3d center() const {
        return -(rotation.conjugate() * translation);
    }
};

struct Reconstruction {
    GeoPoint origin;
    std::map<std::string, CameraModel> cameras;
    std::vector<Shot> shots;
    std::vector<Eigen::Vector3d> points;

    void validate() const {
        if (points.size() < 3)
            throw std::invalid_argument("reconstruction: need >= 3 points");
        for (const Shot& s : shots) {
            if (std::abs(s.rotation.norm() - 1.0) > 1e-9)
                throw std::invalid_argument("reconstruction: non-unit quaternion in shot " + s.image_id);
            if (!cameras.count(s.camera_id))
                throw std::invalid_argument("reconstruction: unknown camera " + s.camera_id);
            if (!s.center().allFinite())
                throw std::invalid_argument("reconstruction: non-finite camera center in " + s.image_id);
            for (const Observation& o : s.observations)
                if (o.point_index < 0 || o.point_index >= static_cast<int>(points.size()))
                    throw std::invalid_argument("reconstruction: dangling point index in " + s.image_id);
        }
    }

    Eigen::Vector2d project(const Shot& shot, const Eigen::Vector3d& x) const {
        const CameraModel& cam = cameras.at(shot.camera_id);
        const Eigen::Vector3d xc = shot.rotation * x + shot.translation;
        return {cam.focal_px * xc.x() / xc.z() + cam.cx,
                cam.focal_px * xc.y() / xc.z() + cam.cy};
    }
};

}  // namespace del
