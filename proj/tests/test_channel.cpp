#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "risbeam/channel.hpp"
#include "risbeam/scenario_io.hpp"

using namespace risbeam;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;

Scenario basic_scenario(std::size_t rows, std::size_t cols, double carrier_hz) {
    Scenario sc;
    sc.id = "test";
    sc.carrier_hz = carrier_hz;
    sc.tx_power_dbm = 0.0;
    sc.ris.position = {0, 0, 0};
    sc.ris.normal = {1, 0, 0};
    sc.ris.up = {0, 0, 1};
    sc.ris.geometry = RisGeometry::half_wavelength(rows, cols, sc.wavelength());
    sc.tx = {{2.0, 0.0, 0.0}, AntennaModel::isotropic()};
    sc.rx = {{2.0, 1.5, 0.0}, AntennaModel::isotropic()};
    sc.direct_path = {false, 0.0};
    return sc;
}

// Independent closed-form cascade evaluation for the oracle cross-check.
cxd reference_cascade(const Scenario& sc, std::size_t m, std::size_t n) {
    Vec3 axis_y = sc.ris.up.cross(sc.ris.normal);
    Vec3 p = sc.ris.position + double(n) * sc.ris.geometry.spacing_y * axis_y +
             double(m) * sc.ris.geometry.spacing_z * sc.ris.up;
    double dt = (sc.tx.position - p).norm();
    double dr = (sc.rx.position - p).norm();
    double lambda = sc.wavelength();
    double ci = (sc.tx.position - p).normalized().dot(sc.ris.normal);
    double cr = (sc.rx.position - p).normalized().dot(sc.ris.normal);
    double amp = lambda / (4 * pi * dt * dr) * std::pow(ci * cr, sc.element_cos_exponent);
    double phase = -2 * pi * (dt + dr) / lambda;
    return std::polar(amp, phase);
}
}  // namespace

TEST_CASE("single-element cascade at unit distances") {
    Scenario sc = basic_scenario(1, 1, 2.6e9);
    sc.tx.position = {1.0, 0.0, 0.0};
    sc.rx.position = {1.0, 0.0, 0.0};
    double lambda = sc.wavelength();
    CHECK(lambda == doctest::Approx(0.1153).epsilon(1e-3));

    cxd g = element_cascade_gain(sc, 0, 0);
    CHECK(std::abs(g) == doctest::Approx(lambda / (4 * pi)).epsilon(1e-12));
    CHECK(std::abs(g) == doctest::Approx(9.18e-3).epsilon(1e-2));
    CHECK(std::arg(g) ==
          doctest::Approx(std::remainder(-2 * pi * 2.0 / lambda, 2 * pi)).epsilon(1e-9));

    CHECK_THROWS_AS(element_cascade_gain(sc, 1, 0), std::out_of_range);
}

TEST_CASE("doubling both distances costs 12.04 dB") {
    Scenario sc = basic_scenario(1, 1, 5.8e9);
    sc.tx.position = {1.0, 0.0, 0.0};
    sc.rx.position = {1.0, 0.0, 0.0};
    double g1 = std::abs(element_cascade_gain(sc, 0, 0));
    sc.tx.position = {2.0, 0.0, 0.0};
    sc.rx.position = {2.0, 0.0, 0.0};
    double g2 = std::abs(element_cascade_gain(sc, 0, 0));
    CHECK(20 * std::log10(g1 / g2) == doctest::Approx(12.0412).epsilon(1e-6));
}

TEST_CASE("cascade gains match an independent closed-form sum") {
    Scenario sc = basic_scenario(3, 1, 2.6e9);
    sc.tx.position = {1.7, 0.4, 0.2};
    sc.rx.position = {2.4, -0.8, 0.5};
    for (std::size_t m = 0; m < 3; ++m) {
        cxd got = element_cascade_gain(sc, m, 0);
        cxd want = reference_cascade(sc, m, 0);
        CHECK(std::abs(got - want) < 1e-15);
    }
}

TEST_CASE("terminal behind the surface kills the cascade") {
    Scenario sc = basic_scenario(2, 2, 2.6e9);
    sc.tx.position = {-1.0, 0.0, 0.0};
    CHECK(element_cascade_gain(sc, 0, 0) == cxd{});
}

TEST_CASE("coherent summation law for equal-gain elements") {
    // Both terminals far away on the broadside axis: all 64 gains equal to
    // machine precision, conjugate phasing makes them add in phase.
    Scenario sc = basic_scenario(8, 8, 2.6e9);
    sc.tx.position = {1e7, 0.0, 0.0};
    sc.rx.position = {1e7, 1.0, 0.0};
    sc.tx_power_dbm = 100.0;

    PhaseProfile best = optimal_phase_profile(sc);
    PhaseProfile single = PhaseProfile::uniform(sc.ris.geometry, cxd{});
    single.at(0, 0) = best.at(0, 0);

    double p64 = received_power(sc, best);
    double p1 = received_power(sc, single);
    CHECK(p64 - p1 == doctest::Approx(20 * std::log10(64.0)).epsilon(1e-12));
    CHECK(p64 - p1 == doctest::Approx(36.1236).epsilon(1e-4));
}

TEST_CASE("zero-amplitude profile hits the no-signal floor") {
    Scenario sc = basic_scenario(2, 2, 2.6e9);
    PhaseProfile dark = PhaseProfile::uniform(sc.ris.geometry, cxd{});
    CHECK(received_power(sc, dark) == no_signal_floor_dbm);
}

TEST_CASE("received_power rejects mismatched profiles") {
    Scenario sc = basic_scenario(2, 2, 2.6e9);
    auto other = RisGeometry::half_wavelength(3, 3, sc.wavelength());
    CHECK_THROWS_AS(received_power(sc, PhaseProfile::uniform(other)), std::invalid_argument);
}

TEST_CASE("conjugate profile beats random 1-bit profiles") {
    Scenario sc = basic_scenario(8, 8, 2.6e9);
    sc.tx.position = {2.0, 0.3, 0.1};
    sc.rx.position = {1.5, -0.9, 0.2};
    PhaseProfile best = optimal_phase_profile(sc);
    double p_best = received_power(sc, best);

    std::mt19937_64 rng(99);
    double p_rand_max = -1e9;
    PhaseProfile p = PhaseProfile::uniform(sc.ris.geometry);
    for (int trial = 0; trial < 1000; ++trial) {
        for (auto& c : p.coefficients) c = (rng() & 1) ? cxd(-1, 0) : cxd(1, 0);
        p_rand_max = std::max(p_rand_max, received_power(sc, p));
    }
    CHECK(p_best > p_rand_max);
}

TEST_CASE("conjugate profile dominates random continuous profiles") {
    Scenario sc = basic_scenario(4, 4, 5.8e9);
    sc.tx.position = {1.0, 0.5, 0.3};
    sc.rx.position = {2.0, -0.5, -0.1};
    double p_best = received_power(sc, optimal_phase_profile(sc));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-pi, pi);
    PhaseProfile p = PhaseProfile::uniform(sc.ris.geometry);
    for (int trial = 0; trial < 1000; ++trial) {
        for (auto& c : p.coefficients) c = std::polar(1.0, u(rng));
        CHECK(received_power(sc, p) <= p_best + 1e-12);
    }
}

TEST_CASE("far-field optimal profile approaches the broadside steering vector") {
    Scenario sc = basic_scenario(4, 4, 2.6e9);
    sc.tx.position = {1e7, 0.0, 0.0};
    sc.rx.position = {8e6, 0.0, 0.0};
    PhaseProfile best = optimal_phase_profile(sc);
    // Broadside steering is all-ones; the conjugate profile matches it up to
    // one global phase.
    cxd ref = best.at(0, 0);
    for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t m = 0; m < 4; ++m) {
            double rel = std::abs(std::arg(best.at(m, n) * std::conj(ref)));
            CHECK(rel < 1e-6);
        }
}

TEST_CASE("oracle counts queries and is deterministic at sigma 0") {
    Scenario sc = basic_scenario(4, 4, 2.6e9);
    SimulatedOracle oracle(sc);
    PhaseProfile p = PhaseProfile::uniform(sc.ris.geometry);
    CHECK(oracle.query_count() == 0);
    double a = oracle.query(p);
    double b = oracle.query(p);
    CHECK(oracle.query_count() == 2);
    CHECK(a == b);
    CHECK(a == received_power(sc, p));
}

TEST_CASE("noisy oracle: sample statistics and reseed determinism") {
    Scenario sc = basic_scenario(2, 2, 2.6e9);
    sc.noise_sigma_db = 1.0;
    sc.rng_seed = 42;
    SimulatedOracle oracle(sc);
    PhaseProfile p = PhaseProfile::uniform(sc.ris.geometry);
    const double clean = received_power(sc, p);

    const int n = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = oracle.query(p) - clean;
        sum += v;
        sum2 += v * v;
    }
    double mean = sum / n;
    double stddev = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(stddev - 1.0) < 0.05);
    CHECK(oracle.query_count() == n);

    oracle.reseed(42);
    double r1 = oracle.query(p);
    SimulatedOracle fresh(sc);
    double r2 = fresh.query(p);
    CHECK(r1 == r2);
}

TEST_CASE("reciprocity: swapping terminals leaves the power unchanged") {
    Scenario sc = basic_scenario(5, 6, 5.8e9);
    sc.tx.position = {3.0, 1.0, 0.4};
    sc.rx.position = {2.0, -2.0, 0.1};
    sc.scatterers.push_back({{1.0, 3.0, 0.0}, 0.3});
    sc.direct_path = {true, 7.0};
    PhaseProfile p = optimal_phase_profile(sc);

    double forward = received_power(sc, p);
    std::swap(sc.tx, sc.rx);
    double backward = received_power(sc, p);
    CHECK(forward == doctest::Approx(backward).epsilon(1e-12));
}

TEST_CASE("blockage attenuation is monotone") {
    Scenario sc = basic_scenario(2, 2, 5.8e9);
    sc.direct_path = {true, 0.0};
    double prev = std::abs(direct_path_gain(sc));
    for (double att : {5.0, 10.0, 20.0, 40.0}) {
        sc.direct_path.extra_attenuation_db = att;
        double mag = std::abs(direct_path_gain(sc));
        CHECK(mag <= prev);
        prev = mag;
    }
}

TEST_CASE("directional antenna pattern") {
    auto horn = AntennaModel::directional(14.8, 30.0, {1, 0, 0});
    CHECK(horn.gain_db({1, 0, 0}) == doctest::Approx(14.8));
    // 3 dB down at half the beamwidth off boresight.
    Vec3 off{std::cos(15.0 * deg), std::sin(15.0 * deg), 0.0};
    CHECK(horn.gain_db(off) == doctest::Approx(14.8 - 3.0).epsilon(1e-6));
    // Floor 20 dB below boresight.
    CHECK(horn.gain_db({-1, 0, 0}) == doctest::Approx(14.8 - 20.0));
    CHECK(AntennaModel::isotropic().gain_db({0, 1, 0}) == 0.0);
    CHECK_THROWS_AS(AntennaModel::directional(-3.0, 30.0, {1, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(AntennaModel::directional(10.0, 200.0, {1, 0, 0}), std::invalid_argument);
}

TEST_CASE("ris frame angle helpers invert each other") {
    RisPlacement ris;
    ris.position = {1.0, 2.0, 3.0};
    ris.normal = Vec3{1.0, 1.0, 0.0}.normalized();
    ris.up = {0.0, 0.0, 1.0};
    ris.geometry = RisGeometry::half_wavelength(2, 2, 0.1);
    for (double th : {40.0, 90.0, 120.0})
        for (double ph : {-60.0, 0.0, 35.0}) {
            Vec3 p = ris.position + 7.5 * direction_from_angles(ris, th * deg, ph * deg);
            auto [theta, phi] = angles_from_ris(ris, p);
            CHECK(theta == doctest::Approx(th * deg).epsilon(1e-12));
            CHECK(phi == doctest::Approx(ph * deg).epsilon(1e-12));
        }
}

TEST_CASE("scenario JSON: shipped files load and unknown keys are rejected") {
    Scenario sc = load_scenario(std::string(RISBEAM_SCENARIO_DIR) + "/corridor.json");
    CHECK(sc.ris.geometry.rows_z == 20);
    CHECK(sc.ris.geometry.cols_y == 55);
    CHECK(sc.carrier_hz == doctest::Approx(5.8e9));
    CHECK(sc.ris.phase_states.is_discrete());

    std::string json = scenario_to_json(sc);
    Scenario again = parse_scenario(json);
    CHECK(again.tx.position.x == sc.tx.position.x);
    CHECK(again.direct_path.extra_attenuation_db == sc.direct_path.extra_attenuation_db);

    CHECK_THROWS_AS(parse_scenario("{\"bogus\": 1}"), ConfigError);
    try {
        parse_scenario(
            "{\"carrier_hz\":2.6e9,\"tx_power_dbm\":0,\"noise_sigma_db\":0,\"rng_seed\":1,"
            "\"frobnicate\":2,"
            "\"tx\":{\"position\":[1,0,0],\"antenna\":{\"kind\":\"isotropic\"}},"
            "\"rx\":{\"position\":[1,1,0],\"antenna\":{\"kind\":\"isotropic\"}},"
            "\"ris\":{\"position\":[0,0,0],\"normal\":[1,0,0],\"up\":[0,0,1],"
            "\"rows_z\":2,\"cols_y\":2,\"phase_states\":{\"mode\":\"continuous\"}},"
            "\"direct_path\":{\"present\":false},\"scatterers\":[]}");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("frobnicate") != std::string::npos);
    }
}

TEST_CASE("scenario validation rejects non-orthonormal frames") {
    Scenario sc = basic_scenario(2, 2, 2.6e9);
    sc.ris.up = {0.0, 0.3, 1.0};
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}
