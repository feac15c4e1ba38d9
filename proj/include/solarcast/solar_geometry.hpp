#pragma once

#include "solarcast/error.hpp"
#include "solarcast/time.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace solarcast {

inline constexpr double kSolarConstant = 1367.0;      // W/m²
inline constexpr double kStandardPressure = 1013.25;  // hPa

class GeoLocation {
public:
    GeoLocation(double latitude_deg, double longitude_deg, double elevation_m = 0.0)
        : latitude_(latitude_deg), longitude_(longitude_deg), elevation_(elevation_m) {
        detail::require(latitude_ >= -90.0 && latitude_ <= 90.0, "latitude must be within [-90, 90] degrees");
        detail::require(longitude_ >= -180.0 && longitude_ <= 180.0, "longitude must be within [-180, 180] degrees");
        detail::require(elevation_ >= -500.0, "elevation must be at least -500 m");
    }

    double latitude() const noexcept { return latitude_; }
    double longitude() const noexcept { return longitude_; }
    double elevation() const noexcept { return elevation_; }

    friend bool operator==(const GeoLocation&, const GeoLocation&) = default;

private:
    double latitude_;
    double longitude_;
    double elevation_;
};

struct SolarPosition {
    double zenith = 0.0;   ///< degrees, geometric (no refraction)
    double azimuth = 0.0;  ///< degrees clockwise from north, [0, 360)
    double day_angle = 0.0;  ///< radians, 2π(doy − 1)/365
    double earth_sun_distance_factor = 1.0;  ///< (r0/r)², Spencer series

    double elevation() const noexcept { return 90.0 - zenith; }
    bool above_horizon() const noexcept { return zenith < 90.0; }
};

namespace detail {

inline constexpr double deg2rad(double d) noexcept { return d * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double r) noexcept { return r * 180.0 / std::numbers::pi; }

inline double day_angle(int day_of_year) noexcept {
    return 2.0 * std::numbers::pi * (day_of_year - 1) / 365.0;
}

// Spencer (1971) Fourier series for the eccentricity correction.
inline double eccentricity_factor(double gamma) noexcept {
    return 1.000110 + 0.034221 * std::cos(gamma) + 0.001280 * std::sin(gamma) + 0.000719 * std::cos(2.0 * gamma) +
           0.000077 * std::sin(2.0 * gamma);
}

inline void require_ephemeris_range(Timestamp t) {
    const int y = t.year();
    if (y < 1900 || y > 2100)
        throw Error(ErrorKind::range, "timestamp " + t.iso8601() + " outside the supported 1900-2100 range");
}

} // namespace detail

/// Sun position from the NOAA low-precision ephemeris (Meeus series in
/// Julian centuries). Good to a few hundredths of a degree over 1900-2100.
inline SolarPosition sun_position(const GeoLocation& loc, Timestamp t) {
    using detail::deg2rad;
    using detail::rad2deg;
    detail::require_ephemeris_range(t);

    const double jd = static_cast<double>(t.unix_seconds()) / 86400.0 + 2440587.5;
    const double T = (jd - 2451545.0) / 36525.0;

    const double mean_long = std::fmod(280.46646 + T * (36000.76983 + 0.0003032 * T), 360.0);
    const double mean_anom = 357.52911 + T * (35999.05029 - 0.0001537 * T);
    const double ecc = 0.016708634 - T * (0.000042037 + 0.0000001267 * T);
    const double M = deg2rad(mean_anom);
    const double center = std::sin(M) * (1.914602 - T * (0.004817 + 0.000014 * T)) +
                          std::sin(2.0 * M) * (0.019993 - 0.000101 * T) + std::sin(3.0 * M) * 0.000289;
    const double true_long = mean_long + center;
    const double omega = deg2rad(125.04 - 1934.136 * T);
    const double app_long = deg2rad(true_long - 0.00569 - 0.00478 * std::sin(omega));
    const double obliq_mean = 23.0 + (26.0 + (21.448 - T * (46.815 + T * (0.00059 - T * 0.001813))) / 60.0) / 60.0;
    const double obliq = deg2rad(obliq_mean + 0.00256 * std::cos(omega));
    const double decl = std::asin(std::sin(obliq) * std::sin(app_long));

    const double y = std::pow(std::tan(obliq / 2.0), 2);
    const double L0 = deg2rad(mean_long);
    const double eot_min = 4.0 * rad2deg(y * std::sin(2.0 * L0) - 2.0 * ecc * std::sin(M) +
                                         4.0 * ecc * y * std::sin(M) * std::cos(2.0 * L0) -
                                         0.5 * y * y * std::sin(4.0 * L0) - 1.25 * ecc * ecc * std::sin(2.0 * M));

    const double utc_min = static_cast<double>(t.second_of_day()) / 60.0;
    const double true_solar_min = utc_min + eot_min + 4.0 * loc.longitude();
    const double hour_angle = deg2rad(true_solar_min / 4.0 - 180.0);

    const double lat = deg2rad(loc.latitude());
    double cos_zen = std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
    cos_zen = std::clamp(cos_zen, -1.0, 1.0);

    SolarPosition pos;
    pos.zenith = rad2deg(std::acos(cos_zen));
    double az = rad2deg(std::atan2(std::sin(hour_angle),
                                   std::cos(hour_angle) * std::sin(lat) - std::tan(decl) * std::cos(lat))) +
                180.0;
    az = std::fmod(az, 360.0);
    if (az < 0.0) az += 360.0;
    pos.azimuth = az;
    pos.day_angle = detail::day_angle(t.day_of_year());
    pos.earth_sun_distance_factor = detail::eccentricity_factor(pos.day_angle);
    return pos;
}

/// Kasten & Young (1989) relative optical air mass at sea-level pressure.
/// nullopt when the sun is at or below the horizon.
inline std::optional<double> relative_air_mass(double zenith_deg) {
    detail::require(std::isfinite(zenith_deg) && zenith_deg >= 0.0, "zenith must be finite and non-negative");
    if (zenith_deg >= 90.0) return std::nullopt;
    return 1.0 / (std::cos(detail::deg2rad(zenith_deg)) + 0.50572 * std::pow(96.07995 - zenith_deg, -1.6364));
}

/// Pressure-corrected air mass, `relative_air_mass(z) · p / 1013.25`.
inline std::optional<double> air_mass(double zenith_deg, double pressure_hpa = kStandardPressure) {
    detail::require(pressure_hpa > 0.0, "pressure must be positive");
    const auto am = relative_air_mass(zenith_deg);
    if (!am) return std::nullopt;
    return *am * pressure_hpa / kStandardPressure;
}

/// Solar constant scaled by the Earth–Sun distance factor for the day of year.
inline double extraterrestrial_irradiance(Timestamp t) {
    return kSolarConstant * detail::eccentricity_factor(detail::day_angle(t.day_of_year()));
}

} // namespace solarcast
