#pragma once

#include <cmath>
#include <stdexcept>

namespace del {

// WGS84 ellipsoid constants.
inline constexpr double kWgs84A = 6378137.0;
inline constexpr double kWgs84F = 1.0 / 298.257223563;
inline constexpr double kWgs84B = kWgs84A * (1.0 - kWgs84F);
inline constexpr double kWgs84E2 = kWgs84F * (2.0 - kWgs84F);

struct GeoPoint {
    double lat = 0.0;  // degrees
    double lon = 0.0;  // degrees
    double alt = 0.0;  // meters above ellipsoid
};

struct EnuPoint {
    double e = 0.0;
    double n = 0.0;
    double u = 0.0;
};

struct EcefPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

inline void validate_geo(const GeoPoint& p) {
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || !std::isfinite(p.alt))
        throw std::invalid_argument("non-finite geodetic coordinate");
    if (p.lat < -90.0 || p.lat > 90.0)
        throw std::invalid_argument("latitude out of [-90, 90]");
    if (p.lon < -180.0 || p.lon > 180.0)
        throw std::invalid_argument("longitude out of [-180, 180]");
}

inline EcefPoint geodetic_to_ecef(const GeoPoint& p) {
    validate_geo(p);
    const double lat = deg2rad(p.lat);
    const double lon = deg2rad(p.lon);
    const double slat = std::sin(lat), clat = std::cos(lat);
    const double slon = std::sin(lon), clon = std::cos(lon);
    const double nrad = kWgs84A / std::sqrt(1.0 - kWgs84E2 * slat * slat);
    return {(nrad + p.alt) * clat * clon,
            (nrad + p.alt) * clat * slon,
            (nrad * (1.0 - kWgs84E2) + p.alt) * slat};
}

// Bowring's iteration; converges to sub-nanometer in a few steps.
inline GeoPoint ecef_to_geodetic(const EcefPoint& p) {
    const double rho = std::hypot(p.x, p.y);
    const double lon = std::atan2(p.y, p.x);
    double lat = std::atan2(p.z, rho * (1.0 - kWgs84E2));
    double alt = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double slat = std::sin(lat);
        const double nrad = kWgs84A / std::sqrt(1.0 - kWgs84E2 * slat * slat);
        alt = rho / std::cos(lat) - nrad;
        lat = std::atan2(p.z, rho * (1.0 - kWgs84E2 * nrad / (nrad + alt)));
    }
    // Polar singularity: rho ~ 0
    if (rho < 1e-9) {
        lat = p.z >= 0.0 ? M_PI / 2 : -M_PI / 2;
        alt = std::abs(p.z) - kWgs84B;
    }
    return {rad2deg(lat), rad2deg(lon), alt};
}

inline EnuPoint geodetic_to_enu(const GeoPoint& p, const GeoPoint& origin) {
    const EcefPoint pe = geodetic_to_ecef(p);
    const EcefPoint oe = geodetic_to_ecef(origin);
    const double dx = pe.x - oe.x, dy = pe.y - oe.y, dz = pe.z - oe.z;
    const double lat = deg2rad(origin.lat), lon = deg2rad(origin.lon);
    const double slat = std::sin(lat), clat = std::cos(lat);
    const double slon = std::sin(lon), clon = std::cos(lon);
    return {-slon * dx + clon * dy,
            -slat * clon * dx - slat * slon * dy + clat * dz,
            clat * clon * dx + clat * slon * dy + slat * dz};
}

inline GeoPoint enu_to_geodetic(const EnuPoint& p, const GeoPoint& origin) {
    if (!std::isfinite(p.e) || !std::isfinite(p.n) || !std::isfinite(p.u))
        throw std::invalid_argument("non-finite ENU coordinate");
    const EcefPoint oe = geodetic_to_ecef(origin);
    const double lat = deg2rad(origin.lat), lon = deg2rad(origin.lon);
    const double slat = std::sin(lat), clat = std::cos(lat);
    const double slon = std::sin(lon), clon = std::cos(lon);
    EcefPoint pe;
    pe.x = oe.x - slon * p.e - slat * clon * p.n + clat * clon * p.u;
    pe.y = oe.y + clon * p.e - slat * slon * p.n + clat * slon * p.u;
    pe.z = oe.z + clat * p.n + slat * p.u;
    return ecef_to_geodetic(pe);
}

}  // namespace del
