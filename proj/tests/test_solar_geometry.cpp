#include <catch_amalgamated.hpp>

#include "solarcast/solar_geometry.hpp"

#include <cmath>

using namespace solarcast;
using Catch::Approx;

namespace {

// NREL SPA (pvlib "nrel_numpy"), geometric zenith; tests/oracles/pvlib_oracle.py.
struct SpaReference {
    const char* when;
    double zenith;
    double azimuth;
};

constexpr SpaReference kUtrechtSpa[] = {
    {"2015-03-20T11:40:00Z", 52.295708, 177.764542}, {"2015-06-21T06:15:00Z", 66.634214, 81.357479},
    {"2015-06-21T11:40:00Z", 28.657684, 179.407431}, {"2015-09-23T15:30:00Z", 71.936564, 245.018961},
    {"2015-12-21T11:40:00Z", 75.527105, 180.606240}, {"2015-12-21T08:30:00Z", 85.881728, 137.850346},
    {"2015-04-10T17:00:00Z", 77.424955, 266.893325},
};

} // namespace

TEST_CASE("GeoLocation rejects out-of-range coordinates", "[solar_geometry]") {
    CHECK_NOTHROW(GeoLocation(52.09, 5.12, 10.0));
    CHECK_THROWS_AS(GeoLocation(90.5, 0.0), Error);
    CHECK_THROWS_AS(GeoLocation(0.0, -180.1), Error);
    CHECK_THROWS_AS(GeoLocation(0.0, 0.0, -501.0), Error);
}

TEST_CASE("equinox noon on the equator is near the zenith", "[solar_geometry]") {
    const auto pos = sun_position(GeoLocation(0.0, 0.0), Timestamp::parse_iso8601("2015-03-20T12:07:30Z"));
    CHECK(pos.zenith < 1.0);
    CHECK(pos.elevation() == Approx(90.0 - pos.zenith));
}

TEST_CASE("local solar midnight is below the horizon", "[solar_geometry]") {
    for (double lat : {-60.0, -33.9, 0.0, 35.0, 52.09, 60.0}) {
        for (int month : {1, 3, 6, 9, 12}) {
            // 0° longitude: solar midnight is within the equation of time of 00:00 UTC
            const auto pos = sun_position(GeoLocation(lat, 0.0), Timestamp::from_civil(2015, month, 15, 0, 0));
            INFO("lat " << lat << " month " << month);
            CHECK(pos.zenith > 90.0);
            CHECK_FALSE(pos.above_horizon());
        }
    }
}

TEST_CASE("Utrecht sun position agrees with SPA", "[solar_geometry][oracle]") {
    const GeoLocation utrecht(52.09, 5.12);
    for (const auto& ref : kUtrechtSpa) {
        const auto pos = sun_position(utrecht, Timestamp::parse_iso8601(ref.when));
        INFO(ref.when);
        CHECK(std::abs(pos.zenith - ref.zenith) < 0.3);
        CHECK(std::abs(pos.azimuth - ref.azimuth) < 0.5);
    }
}

TEST_CASE("sun position outside 1900-2100 is a range error", "[solar_geometry]") {
    try {
        sun_position(GeoLocation(0, 0), Timestamp::from_civil(1899, 12, 31));
        FAIL("accepted 1899");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::range);
    }
    CHECK_THROWS_AS(sun_position(GeoLocation(0, 0), Timestamp::from_civil(2101, 1, 1)), Error);
    CHECK_NOTHROW(sun_position(GeoLocation(0, 0), Timestamp::from_civil(2100, 12, 31)));
}

TEST_CASE("zenith is continuous over a day", "[solar_geometry][property]") {
    const GeoLocation loc(52.09, 5.12);
    auto t = Timestamp::from_civil(2015, 6, 21);
    double prev = sun_position(loc, t).zenith;
    for (int i = 1; i < 1440 * 3; ++i) {
        t = t + 60;
        const double z = sun_position(loc, t).zenith;
        REQUIRE(std::abs(z - prev) < 1.0);
        prev = z;
    }
}

TEST_CASE("Kasten-Young air mass", "[solar_geometry]") {
    CHECK(*air_mass(0.0) == Approx(1.0).margin(1e-3));
    CHECK(*air_mass(60.0) == Approx(2.0).epsilon(0.01));
    // direct evaluation of the published formula (pvlib kastenyoung1989)
    CHECK(*relative_air_mass(85.0) == Approx(10.305791327930).epsilon(1e-10));
    CHECK(*air_mass(60.0, 506.625) == Approx(*relative_air_mass(60.0) / 2.0));
    CHECK_FALSE(air_mass(90.0).has_value());
    CHECK_FALSE(air_mass(120.0).has_value());
}

TEST_CASE("air mass increases strictly with zenith", "[solar_geometry][property]") {
    double prev = *air_mass(0.0, 950.0);
    for (double z = 0.05; z < 90.0; z += 0.05) {
        const double am = *air_mass(z, 950.0);
        REQUIRE(am > prev);
        REQUIRE(am >= 0.9);
        prev = am;
    }
}

TEST_CASE("extraterrestrial irradiance follows the orbit", "[solar_geometry]") {
    // Spencer series evaluated independently (pvlib get_extra_radiation, method="spencer")
    CHECK(extraterrestrial_irradiance(Timestamp::from_civil(2015, 1, 3)) == Approx(1414.950771).epsilon(1e-6));
    CHECK(extraterrestrial_irradiance(Timestamp::from_civil(2015, 7, 4)) == Approx(1321.327677).epsilon(1e-6));
    CHECK(extraterrestrial_irradiance(Timestamp::from_civil(2015, 1, 3)) == Approx(1412.0).epsilon(0.01));
    CHECK(extraterrestrial_irradiance(Timestamp::from_civil(2015, 7, 4)) == Approx(1322.0).epsilon(0.01));

    double sum = 0.0;
    for (int d = 0; d < 365; ++d) sum += extraterrestrial_irradiance(Timestamp::from_civil(2015, 1, 1) + d * 86400);
    CHECK(sum / 365.0 == Approx(1367.0).epsilon(0.005));

    for (int d = 0; d < 365; d += 7) {
        const auto t = Timestamp::from_civil(2015, 1, 1) + d * 86400;
        const double a = extraterrestrial_irradiance(t);
        const double b = extraterrestrial_irradiance(t + 365 * 86400);
        CHECK(std::abs(a - b) / a < 1e-3);
        const double factor = sun_position(GeoLocation(10, 10), t).earth_sun_distance_factor;
        CHECK(factor >= 0.96);
        CHECK(factor <= 1.04);
    }
}
