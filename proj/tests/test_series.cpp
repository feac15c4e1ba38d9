#include <catch_amalgamated.hpp>

#include "solarcast/series.hpp"
#include "solarcast/synth.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace solarcast;

namespace {

ErrorKind kind_of(const std::string& csv) {
    try {
        parse_csv(csv);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("parse_csv accepted malformed input");
    return ErrorKind::validation;
}

std::size_t line_of(const std::string& csv) {
    try {
        parse_csv(csv);
    } catch (const Error& e) {
        REQUIRE(e.line().has_value());
        return *e.line();
    }
    FAIL("parse_csv accepted malformed input");
    return 0;
}

IrradianceSeries random_masked(std::uint64_t seed, std::size_t n, std::int64_t step) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> value(0.0, 1200.0);
    std::bernoulli_distribution keep(0.7);
    std::vector<double> v(n);
    std::vector<bool> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = value(gen);
        m[i] = keep(gen);
    }
    return IrradianceSeries(Timestamp::from_civil(2015, 5, 1), step, v, m);
}

} // namespace

TEST_CASE("parse_csv minimal input", "[series_io]") {
    const auto s = parse_csv("timestamp_utc,ghi_wm2\n2015-06-01T10:00:00Z,100.0\n2015-06-01T10:01:00Z,200.0\n");
    CHECK(s.step() == 60);
    CHECK(s.values() == std::vector<double>{100.0, 200.0});
    CHECK(s.valid() == std::vector<bool>{true, true});
    CHECK(s.start() == Timestamp::from_civil(2015, 6, 1, 10));
}

TEST_CASE("parse_csv fills grid gaps with invalid samples", "[series_io]") {
    const auto s = parse_csv(
        "timestamp_utc,ghi_wm2\n2015-06-01T10:00:00Z,1\n2015-06-01T10:01:00Z,2\n2015-06-01T10:03:00Z,4\n");
    REQUIRE(s.size() == 4);
    CHECK(s.valid() == std::vector<bool>{true, true, false, true});
    CHECK(s.value(3) == 4.0);
}

TEST_CASE("parse_csv missing values", "[series_io]") {
    const auto s = parse_csv("# site=utrecht\ntimestamp_utc,ghi_wm2\r\n2015-06-01T10:00:00Z,\r\n"
                             "2015-06-01T10:05:00Z,NaN\n2015-06-01T10:10:00Z,nan\n2015-06-01T10:15:00Z,3.5\n");
    CHECK(s.step() == 300);
    CHECK(s.valid() == std::vector<bool>{false, false, false, true});
    CHECK(s.value(0) == 0.0);
}

TEST_CASE("parse_csv error classes and line numbers", "[series_io]") {
    const std::string head = "timestamp_utc,ghi_wm2\n";
    CHECK(kind_of(head + "2015-06-01T10:00:00Z,1\n2015-06-01 10:01:00,2\n") == ErrorKind::parse);
    CHECK(line_of(head + "2015-06-01T10:00:00Z,1\n2015-06-01 10:01:00,2\n") == 3);
    CHECK(kind_of(head + "2015-06-01T10:01:00Z,1\n2015-06-01T10:00:00Z,2\n") == ErrorKind::ordering);
    CHECK(kind_of(head + "2015-06-01T10:00:00Z,1\n2015-06-01T10:00:00Z,2\n") == ErrorKind::ordering);
    CHECK(kind_of(head + "2015-06-01T10:00:00Z,1\n") == ErrorKind::insufficient_data);
    CHECK(kind_of(head) == ErrorKind::insufficient_data);
    CHECK(kind_of(head + "2015-06-01T10:00:00Z,1\n2015-06-01T10:01:00Z,-3\n") == ErrorKind::validation);
    CHECK(line_of(head + "2015-06-01T10:00:00Z,1\n2015-06-01T10:01:00Z,-3\n") == 3);
    CHECK(kind_of(head + "2015-06-01T10:00:00Z,abc\n2015-06-01T10:01:00Z,1\n") == ErrorKind::parse);
    CHECK(kind_of("time,value\n2015-06-01T10:00:00Z,1\n2015-06-01T10:01:00Z,1\n") == ErrorKind::parse);
    CHECK(kind_of(head + "2015-06-01T10:00:00Z,1\n2015-06-01T10:02:00Z,1\n2015-06-01T10:05:00Z,1\n") ==
          ErrorKind::alignment);
}

TEST_CASE("write_csv then parse_csv is the identity on a synthetic year", "[series_io]") {
    SynthConfig cfg{SiteAtmosphere(GeoLocation(52.09, 5.12)), 2015, 300, 0.9, 0.6, 42};
    const auto year = synthesize_year(cfg);
    const auto back = parse_csv(write_csv(year));
    CHECK(back == year);

    // invalid samples survive as empty fields
    const auto masked = random_masked(3, 500, 60);
    CHECK(parse_csv(write_csv(masked)) == masked);
}

TEST_CASE("resample window means", "[series_io]") {
    const auto start = Timestamp::from_civil(2015, 6, 1, 12);
    const IrradianceSeries flat(start, 30, std::vector<double>(10, 100.0));
    const auto a = resample(flat, 300);
    REQUIRE(a.size() == 1);
    CHECK(a.value(0) == 100.0);

    const IrradianceSeries step_up(start, 30, {0, 0, 0, 0, 0, 600, 600, 600, 600, 600});
    CHECK(resample(step_up, 300).value(0) == 300.0);

    const IrradianceSeries partial(start, 30, {1, 2, 3, 10, 20}, {false, false, false, true, false});
    const auto p = resample(partial, 90);
    REQUIRE(p.size() == 2);
    CHECK_FALSE(p.is_valid(0));
    CHECK(p.is_valid(1));
    CHECK(p.value(1) == 10.0);
}

TEST_CASE("resample rejects bad ratios", "[series_io]") {
    const IrradianceSeries s(Timestamp{0}, 60, std::vector<double>(10, 1.0));
    try {
        resample(s, 90);
        FAIL("accepted non-integer ratio");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::alignment);
    }
    try {
        resample(s, 30);
        FAIL("accepted upsampling");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unsupported);
    }
}

TEST_CASE("resample matches a brute-force windowed mean", "[series_io][property]") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t ratio = 1 + seed % 12;
        const auto s = random_masked(seed, 37 + seed * 11, 30);
        const auto r = resample(s, static_cast<std::int64_t>(30 * ratio));

        std::size_t window = 0;
        double energy_in = 0.0, energy_out = 0.0;
        for (std::size_t first = 0; first < s.size(); first += ratio, ++window) {
            double sum = 0.0;
            int n = 0;
            for (std::size_t i = first; i < s.size() && i < first + ratio; ++i) {
                if (s.is_valid(i)) {
                    sum += s.value(i);
                    ++n;
                    energy_in += s.value(i);
                }
            }
            REQUIRE(r.is_valid(window) == (n > 0));
            if (n > 0) {
                CHECK(std::abs(r.value(window) - sum / n) <= 1e-12 * std::max(1.0, sum / n));
                energy_out += r.value(window) * n;
            }
        }
        CHECK(window == r.size());
        CHECK(std::abs(energy_out - energy_in) <= 1e-9 * std::max(1.0, energy_in));
        CHECK(resample(r, r.step()) == r);
    }
}
