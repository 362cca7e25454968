#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "risbeam/geometry.hpp"

using namespace risbeam;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;

// Independent per-element evaluation of the response formula, no shared code
// with steering_vector.
cxd reference_entry(const RisGeometry& g, std::size_t m, std::size_t n, double theta,
                    double phi) {
    double phase = -(2.0 * pi / g.wavelength) *
                   (m * g.spacing_z * std::cos(theta) +
                    n * g.spacing_y * std::sin(theta) * std::sin(phi));
    return {std::cos(phase), std::sin(phase)};
}
}  // namespace

TEST_CASE("steering vector broadside identity") {
    auto g = RisGeometry::half_wavelength(2, 2, 0.1);
    auto v = steering_vector(g, 90.0 * deg, 0.0);
    for (const auto& e : v.entries) {
        CHECK(e.real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("steering vector matches hand evaluation at 60/30") {
    auto g = RisGeometry::half_wavelength(2, 2, 0.1);
    auto v = steering_vector(g, 60.0 * deg, 30.0 * deg);
    // element (m=1, n=1): phase = -pi*(cos60 + sin60*sin30)
    double expected = -pi * (0.5 + std::sin(60.0 * deg) * 0.5);
    CHECK(expected == doctest::Approx(-2.93115).epsilon(1e-4));
    cxd e = v.entries[g.flat_index(1, 1)];
    CHECK(std::arg(e) == doctest::Approx(wrap_angle(expected)).epsilon(1e-12));
}

TEST_CASE("steering vector entry 0 is always 1") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> th(0.05, pi - 0.05), ph(-1.5, 1.5);
    for (int i = 0; i < 20; ++i) {
        auto g = RisGeometry::half_wavelength(3, 5, 0.05);
        auto v = steering_vector(g, th(rng), ph(rng));
        CHECK(v.entries[0] == cxd(1.0, 0.0));
    }
}

TEST_CASE("steering vector rejects non-finite angles") {
    auto g = RisGeometry::half_wavelength(2, 2, 0.1);
    CHECK_THROWS_AS(steering_vector(g, std::nan(""), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(steering_vector(g, 1.0, INFINITY), std::invalid_argument);
    CHECK_THROWS_AS(steering_vector_z(g, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(steering_vector_y(g, 1.0, -INFINITY), std::invalid_argument);
}

TEST_CASE("z response: endfire and broadside") {
    auto g4 = RisGeometry::half_wavelength(4, 1, 0.2);
    auto broadside = steering_vector_z(g4, 90.0 * deg);
    for (auto e : broadside) CHECK(std::abs(e - cxd(1, 0)) < 1e-12);

    auto endfire = steering_vector_z(g4, 0.0);
    for (std::size_t m = 0; m < 4; ++m)  // phases 0, -pi, -2pi, -3pi
        CHECK(std::abs(endfire[m] - std::polar(1.0, -pi * double(m))) < 1e-12);

    auto g20 = RisGeometry::half_wavelength(20, 1, 0.2);
    auto v45 = steering_vector_z(g20, 45.0 * deg);
    CHECK(std::arg(v45[1]) == doctest::Approx(-pi * std::cos(45.0 * deg)).epsilon(1e-9));
    CHECK(std::arg(v45[1]) == doctest::Approx(-2.2214).epsilon(1e-4));
}

TEST_CASE("y response: zero azimuth and hand values") {
    auto g = RisGeometry::half_wavelength(2, 2, 0.1);
    auto ones = steering_vector_y(g, 70.0 * deg, 0.0);
    for (auto e : ones) CHECK(std::abs(e - cxd(1, 0)) < 1e-12);

    auto v = steering_vector_y(g, 90.0 * deg, 30.0 * deg);
    CHECK(std::arg(v[1]) == doctest::Approx(-pi / 2.0).epsilon(1e-12));

    auto g8 = RisGeometry::half_wavelength(1, 8, 0.1);
    auto v8 = steering_vector_y(g8, 60.0 * deg, 45.0 * deg);
    double expected = -3.0 * pi * std::sin(60.0 * deg) * std::sin(45.0 * deg);
    CHECK(expected == doctest::Approx(-5.77147).epsilon(1e-4));
    CHECK(std::abs(v8[3] - std::polar(1.0, expected)) < 1e-12);
}

TEST_CASE("kronecker compose: 2x2 by hand") {
    RisGeometry g{2, 2, 0.05, 0.05, 0.1};
    std::vector<cxd> a_y{{1, 0}, {0, 1}};   // [1, j]
    std::vector<cxd> a_z{{1, 0}, {-1, 0}};  // [1, -1]
    auto v = kronecker_compose(g, a_y, a_z);
    CHECK(v.entries[0] == cxd(1, 0));
    CHECK(v.entries[1] == cxd(-1, 0));
    CHECK(v.entries[2] == cxd(0, 1));
    CHECK(v.entries[3] == cxd(0, -1));
}

TEST_CASE("kronecker compose: all-ones repeats a_z") {
    RisGeometry g{3, 4, 0.05, 0.05, 0.1};
    std::vector<cxd> ones(4, cxd(1, 0));
    auto a_z = steering_vector_z(g, 55.0 * deg);
    auto v = kronecker_compose(g, ones, a_z);
    for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t m = 0; m < 3; ++m)
            CHECK(v.entries[g.flat_index(m, n)] == a_z[m]);
}

TEST_CASE("kronecker compose equals brute-force outer product") {
    RisGeometry g{3, 4, 0.05, 0.05, 0.1};
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-pi, pi);
    std::vector<cxd> a_y(4), a_z(3);
    for (auto& e : a_y) e = std::polar(1.0, u(rng));
    for (auto& e : a_z) e = std::polar(1.0, u(rng));
    auto v = kronecker_compose(g, a_y, a_z);
    // Independent oracle: outer product flattened column-major.
    std::size_t k = 0;
    for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t m = 0; m < 3; ++m, ++k) CHECK(std::abs(v.entries[k] - a_y[n] * a_z[m]) < 1e-15);

    CHECK_THROWS_AS(kronecker_compose(g, a_z, a_y), std::invalid_argument);
}

TEST_CASE("kronecker consistency with the 2-D steering vector") {
    auto g = RisGeometry::half_wavelength(5, 7, 0.0517);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> th(0.05, pi - 0.05), ph(-pi / 2 + 0.05, pi / 2 - 0.05);
    for (int trial = 0; trial < 100; ++trial) {
        double theta = th(rng), phi = ph(rng);
        auto direct = steering_vector(g, theta, phi);
        auto composed = kronecker_compose(g, steering_vector_y(g, theta, phi),
                                          steering_vector_z(g, theta));
        for (std::size_t k = 0; k < direct.entries.size(); ++k)
            CHECK(std::abs(direct.entries[k] - composed.entries[k]) < 1e-12);
    }
}

TEST_CASE("unit modulus of steering entries") {
    auto g = RisGeometry::half_wavelength(6, 9, 0.1153);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> th(0.05, pi - 0.05), ph(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        auto v = steering_vector(g, th(rng), ph(rng));
        for (const auto& e : v.entries) CHECK(std::abs(std::abs(e) - 1.0) < 1e-12);
    }
}

TEST_CASE("quantization: nearest phase and tie rule") {
    auto one_bit = PhaseStateSet::one_bit();
    RisGeometry g{1, 1, 0.05, 0.05, 0.1};

    PhaseProfile p = PhaseProfile::uniform(g, std::polar(1.0, -167.94 * deg));
    auto q = quantize_profile(p, one_bit);
    CHECK(std::arg(q.at(0, 0)) == doctest::Approx(pi));  // 180-degree state

    // Exactly 90 degrees is equidistant; the tie goes to the lower index.
    p = PhaseProfile::uniform(g, std::polar(1.0, pi / 2.0));
    q = quantize_profile(p, one_bit);
    CHECK(q.at(0, 0) == cxd(1.0, 0.0));
}

TEST_CASE("quantization: 1-bit error bound over a full surface") {
    auto g = RisGeometry::half_wavelength(8, 8, 0.1153);
    auto v = steering_vector(g, 60.0 * deg, 30.0 * deg);
    auto q = quantize_profile(profile_from_vector(v), PhaseStateSet::one_bit());
    for (std::size_t n = 0; n < 8; ++n)
        for (std::size_t m = 0; m < 8; ++m) {
            double err = std::abs(
                wrap_angle(std::arg(v.entries[g.flat_index(m, n)]) - std::arg(q.at(m, n))));
            CHECK(err <= pi / 2.0 + 1e-12);
        }
}

TEST_CASE("quantization is idempotent") {
    auto g = RisGeometry::half_wavelength(4, 6, 0.1);
    auto states = PhaseStateSet::uniform(2);
    auto v = steering_vector(g, 75.0 * deg, -20.0 * deg);
    auto q1 = quantize_profile(profile_from_vector(v), states);
    auto q2 = quantize_profile(q1, states);
    for (std::size_t k = 0; k < q1.coefficients.size(); ++k)
        CHECK(q1.coefficients[k] == q2.coefficients[k]);
}

TEST_CASE("quantization rejects continuous sets; empty sets rejected") {
    auto g = RisGeometry::half_wavelength(2, 2, 0.1);
    CHECK_THROWS_AS(quantize_profile(PhaseProfile::uniform(g), PhaseStateSet::continuous()),
                    std::invalid_argument);
    CHECK_THROWS_AS(PhaseStateSet::discrete({}), std::invalid_argument);
    CHECK_THROWS_AS(PhaseStateSet::discrete({{1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("profile/vector reshape round trip") {
    auto g = RisGeometry::half_wavelength(5, 3, 0.1);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-pi, pi);
    SteeringVector v{g, 0, 0, {}};
    v.entries.resize(g.element_count());
    for (auto& e : v.entries) e = std::polar(1.0, u(rng));

    auto p = profile_from_vector(v);
    auto back = vector_from_profile(p);
    for (std::size_t k = 0; k < v.entries.size(); ++k) CHECK(v.entries[k] == back.entries[k]);

    // Column n equals a_y[n] * a_z for a composed vector.
    auto a_y = steering_vector_y(g, 80.0 * deg, 25.0 * deg);
    auto a_z = steering_vector_z(g, 80.0 * deg);
    auto composed = profile_from_vector(kronecker_compose(g, a_y, a_z));
    for (std::size_t n = 0; n < g.cols_y; ++n)
        for (std::size_t m = 0; m < g.rows_z; ++m)
            CHECK(std::abs(composed.at(m, n) - a_y[n] * a_z[m]) < 1e-15);

    auto all_ones = PhaseProfile::uniform(g);
    auto ones_vec = vector_from_profile(all_ones);
    for (auto e : ones_vec.entries) CHECK(e == cxd(1.0, 0.0));
}

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS((RisGeometry{0, 2, 0.1, 0.1, 0.2}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RisGeometry{2, 2, -0.1, 0.1, 0.2}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RisGeometry{2, 2, 0.1, 0.1, 0.0}.validate()), std::invalid_argument);
    auto g = RisGeometry::half_wavelength(20, 55, 0.0517);
    CHECK(g.element_count() == 1100);
    CHECK(g.flat_index(1, 2) == 2 * 20 + 1);
}
