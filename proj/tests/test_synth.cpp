#include <doctest.h>

#include <fstream>
#include <sstream>

#include "aq/csv_io.hpp"
#include "aq/synth.hpp"
#include "helpers.hpp"

using namespace aq;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

synth::FixtureConfig small() {
    synth::FixtureConfig c;
    c.zone_counts = {2, 2, 2, 2, 4};
    c.start = make_date(2019, 3, 1);
    c.end = make_date(2020, 7, 31);
    return c;
}

}  // namespace

TEST_CASE("pm25_aqi breakpoints") {
    CHECK(synth::pm25_aqi(0.0) == 0.0);
    CHECK(synth::pm25_aqi(15.0) == doctest::Approx(25.0));
    CHECK(synth::pm25_aqi(30.0) == doctest::Approx(50.0));
    CHECK(synth::pm25_aqi(60.0) == doctest::Approx(100.0));
    CHECK(synth::pm25_aqi(250.0) == doctest::Approx(400.0));
    CHECK(synth::pm25_aqi(900.0) == 500.0);
}

TEST_CASE("generate is deterministic and yields a valid panel") {
    const auto a = synth::generate(small());
    const auto b = synth::generate(small());
    std::ostringstream sa, sb;
    io::write_observations(sa, a.observations);
    io::write_observations(sb, b.observations);
    CHECK(sa.str() == sb.str());
    CHECK(a.stations.size() == 12);
    const StationPanel panel(a.stations, a.observations);
    CHECK(panel.date_range().start >= make_date(2019, 3, 1));
    CHECK(a.zones.size() == 4);
    for (const auto& z : a.zones) CHECK(std::abs(z.expected_beta3 - z.planted_shift) < 3.0);

    auto other = small();
    other.seed = 43;
    std::ostringstream sc;
    io::write_observations(sc, synth::generate(other).observations);
    CHECK(sc.str() != sa.str());
}

TEST_CASE("generate honours dropped pollutants") {
    auto c = small();
    c.dropped_pollutants = {Pollutant::CO, Pollutant::NO};
    for (const auto& o : synth::generate(c).observations) {
        CHECK_FALSE(o.value(Pollutant::CO).has_value());
        CHECK_FALSE(o.value(Pollutant::NO).has_value());
    }
    auto bad = small();
    bad.end = make_date(2018, 1, 1);
    CHECK_AQ_ERROR(synth::generate(bad), ErrorCode::InvalidArgument);
}

TEST_CASE("checked-in fixture matches the generator") {
    const auto fx = synth::generate({});
    std::ostringstream st, ob;
    io::write_stations(st, fx.stations);
    io::write_observations(ob, fx.observations);
    CHECK(st.str() == slurp(AQ_FIXTURE_DIR "/stations.csv"));
    CHECK(ob.str() == slurp(AQ_FIXTURE_DIR "/observations.csv"));
}
