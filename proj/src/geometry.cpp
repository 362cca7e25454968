#include "risbeam/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risbeam {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

void require_finite_angle(double value, const char* name) {
    if (!std::isfinite(value))
        throw std::invalid_argument(std::string(name) + " must be finite");
}
}  // namespace

double wrap_angle(double radians) {
    double w = std::remainder(radians, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

RisGeometry RisGeometry::half_wavelength(std::size_t rows_z, std::size_t cols_y,
                                         double wavelength) {
    RisGeometry g{rows_z, cols_y, wavelength / 2.0, wavelength / 2.0, wavelength};
    g.validate();
    return g;
}

void RisGeometry::validate() const {
    if (rows_z < 1 || cols_y < 1)
        throw std::invalid_argument("RisGeometry: element counts must be >= 1");
    if (!(spacing_z > 0.0) || !std::isfinite(spacing_z) ||
        !(spacing_y > 0.0) || !std::isfinite(spacing_y))
        throw std::invalid_argument("RisGeometry: spacings must be positive");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw std::invalid_argument("RisGeometry: wavelength must be positive");
}

PhaseStateSet PhaseStateSet::continuous() { return PhaseStateSet{}; }

PhaseStateSet PhaseStateSet::one_bit() {
    return discrete({{1.0, 0.0}, {1.0, std::numbers::pi}});
}

PhaseStateSet PhaseStateSet::uniform(unsigned bits) {
    if (bits == 0 || bits > 16)
        throw std::invalid_argument("PhaseStateSet::uniform: bits must be in [1, 16]");
    std::size_t count = std::size_t{1} << bits;
    std::vector<PhaseState> states(count);
    for (std::size_t i = 0; i < count; ++i)
        states[i] = {1.0, two_pi * static_cast<double>(i) / static_cast<double>(count)};
    return discrete(std::move(states));
}

PhaseStateSet PhaseStateSet::discrete(std::vector<PhaseState> states) {
    if (states.size() < 2)
        throw std::invalid_argument("PhaseStateSet: discrete set needs >= 2 states");
    for (const auto& s : states) {
        if (s.amplitude < 0.0 || s.amplitude > 1.0 || !std::isfinite(s.amplitude))
            throw std::invalid_argument("PhaseStateSet: amplitude must be in [0, 1]");
        if (s.phase < 0.0 || s.phase >= two_pi || !std::isfinite(s.phase))
            throw std::invalid_argument("PhaseStateSet: phase must be in [0, 2*pi)");
    }
    PhaseStateSet set;
    set.mode_ = Mode::discrete;
    set.states_ = std::move(states);
    return set;
}

unsigned PhaseStateSet::bits_per_index() const {
    if (!is_discrete())
        throw std::logic_error("bits_per_index: state set is continuous");
    unsigned bits = 1;
    while ((std::size_t{1} << bits) < states_.size()) ++bits;
    return bits;
}

std::size_t PhaseStateSet::nearest_state(double phase) const {
    if (!is_discrete() || states_.empty())
        throw std::invalid_argument("nearest_state: state set is not discrete");
    std::size_t best = 0;
    double best_dist = std::abs(wrap_angle(phase - states_[0].phase));
    for (std::size_t i = 1; i < states_.size(); ++i) {
        double d = std::abs(wrap_angle(phase - states_[i].phase));
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

PhaseProfile PhaseProfile::uniform(const RisGeometry& geom, cxd value) {
    geom.validate();
    return PhaseProfile{geom, std::vector<cxd>(geom.element_count(), value)};
}

PhaseProfile PhaseProfile::uniform_state(const RisGeometry& geom,
                                         const PhaseStateSet& states,
                                         std::size_t index) {
    if (!states.is_discrete())
        return uniform(geom);
    if (index >= states.state_count())
        throw std::out_of_range("uniform_state: state index out of range");
    return uniform(geom, states.states()[index].coefficient());
}

SteeringVector steering_vector(const RisGeometry& geom, double theta, double phi) {
    geom.validate();
    require_finite_angle(theta, "theta");
    require_finite_angle(phi, "phi");

    const double k = two_pi / geom.wavelength;
    const double cz = std::cos(theta);
    const double sy = std::sin(theta) * std::sin(phi);

    SteeringVector v{geom, theta, phi, {}};
    v.entries.resize(geom.element_count());
    for (std::size_t n = 0; n < geom.cols_y; ++n) {
        const double phase_y = -k * static_cast<double>(n) * geom.spacing_y * sy;
        for (std::size_t m = 0; m < geom.rows_z; ++m) {
            const double phase = phase_y - k * static_cast<double>(m) * geom.spacing_z * cz;
            v.entries[geom.flat_index(m, n)] = std::polar(1.0, phase);
        }
    }
    return v;
}

std::vector<cxd> steering_vector_z(const RisGeometry& geom, double theta) {
    geom.validate();
    require_finite_angle(theta, "theta");
    const double step = -two_pi / geom.wavelength * geom.spacing_z * std::cos(theta);
    std::vector<cxd> a(geom.rows_z);
    for (std::size_t m = 0; m < geom.rows_z; ++m)
        a[m] = std::polar(1.0, step * static_cast<double>(m));
    return a;
}

std::vector<cxd> steering_vector_y(const RisGeometry& geom, double theta, double phi) {
    geom.validate();
    require_finite_angle(theta, "theta");
    require_finite_angle(phi, "phi");
    const double step =
        -two_pi / geom.wavelength * geom.spacing_y * std::sin(theta) * std::sin(phi);
    std::vector<cxd> a(geom.cols_y);
    for (std::size_t n = 0; n < geom.cols_y; ++n)
        a[n] = std::polar(1.0, step * static_cast<double>(n));
    return a;
}

SteeringVector kronecker_compose(const RisGeometry& geom,
                                 const std::vector<cxd>& a_y,
                                 const std::vector<cxd>& a_z,
                                 double theta, double phi) {
    if (a_y.size() != geom.cols_y || a_z.size() != geom.rows_z)
        throw std::invalid_argument("kronecker_compose: vector lengths do not match geometry");
    SteeringVector v{geom, theta, phi, {}};
    v.entries.resize(geom.element_count());
    for (std::size_t n = 0; n < geom.cols_y; ++n)
        for (std::size_t m = 0; m < geom.rows_z; ++m)
            v.entries[geom.flat_index(m, n)] = a_y[n] * a_z[m];
    return v;
}

PhaseProfile quantize_profile(const PhaseProfile& profile, const PhaseStateSet& states) {
    if (!states.is_discrete())
        throw std::invalid_argument("quantize_profile: state set must be discrete");
    PhaseProfile out = profile;
    for (auto& c : out.coefficients) {
        std::size_t idx = states.nearest_state(std::arg(c));
        c = states.states()[idx].coefficient();
    }
    return out;
}

PhaseProfile profile_from_vector(const SteeringVector& v) {
    if (v.entries.size() != v.geometry.element_count())
        throw std::invalid_argument("profile_from_vector: entry count mismatch");
    return PhaseProfile{v.geometry, v.entries};
}

SteeringVector vector_from_profile(const PhaseProfile& p) {
    if (p.coefficients.size() != p.geometry.element_count())
        throw std::invalid_argument("vector_from_profile: coefficient count mismatch");
    return SteeringVector{p.geometry, 0.0, 0.0, p.coefficients};
}

}  // namespace risbeam
