#include "risbeam/pattern.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace risbeam {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;

double cos_from_normal(double theta, double phi) { return std::sin(theta) * std::cos(phi); }
}  // namespace

cxd array_factor(const RisGeometry& geom, const PhaseProfile& profile, double theta,
                 double phi, const Incidence& incidence, bool element_factor,
                 double element_cos_exponent) {
    if (profile.coefficients.size() != geom.element_count())
        throw std::invalid_argument("array_factor: profile does not match geometry");

    const double k = 2.0 * pi / geom.wavelength;
    const double dz_term = k * geom.spacing_z * (std::cos(theta) - std::cos(incidence.theta));
    const double dy_term =
        k * geom.spacing_y *
        (std::sin(theta) * std::sin(phi) - std::sin(incidence.theta) * std::sin(incidence.phi));

    // Separable phase ramps walked with incremental phasors; the rounding
    // drift over an array dimension stays far below the 1e-9 test tolerances.
    const cxd wz = std::polar(1.0, dz_term);
    const cxd wy = std::polar(1.0, dy_term);
    cxd sum{};
    cxd row_phasor{1.0, 0.0};
    for (std::size_t n = 0; n < geom.cols_y; ++n) {
        cxd col{};
        cxd col_phasor{1.0, 0.0};
        for (std::size_t m = 0; m < geom.rows_z; ++m) {
            col += profile.at(m, n) * col_phasor;
            col_phasor *= wz;
        }
        sum += row_phasor * col;
        row_phasor *= wy;
    }

    if (element_factor) {
        const double c_in = std::max(0.0, cos_from_normal(incidence.theta, incidence.phi));
        const double c_out = std::max(0.0, cos_from_normal(theta, phi));
        sum *= std::pow(c_in * c_out, element_cos_exponent);
    }
    return sum;
}

RadiationPattern compute_cut(const RisGeometry& geom, const PhaseProfile& profile,
                             const CutSpec& cut, const Incidence& incidence,
                             bool element_factor, double element_cos_exponent) {
    if (!(cut.step_deg > 0.0) || cut.step_deg > 0.1 + 1e-12)
        throw std::invalid_argument("compute_cut: step must be in (0, 0.1] degrees");
    if (!(cut.stop_deg > cut.start_deg)) throw std::invalid_argument("compute_cut: empty span");

    RadiationPattern pattern;
    pattern.cut = cut;
    pattern.incidence = incidence;

    const int count = static_cast<int>(std::floor((cut.stop_deg - cut.start_deg) / cut.step_deg + 1e-9)) + 1;
    std::vector<double> magnitudes(count);
    double peak = 0.0;
    for (int i = 0; i < count; ++i) {
        const double angle_deg = cut.start_deg + i * cut.step_deg;
        double theta, phi;
        if (cut.axis == CutAxis::azimuth) {
            theta = cut.fixed_deg * deg;
            phi = angle_deg * deg;
        } else {
            theta = angle_deg * deg;
            phi = cut.fixed_deg * deg;
        }
        magnitudes[i] = std::abs(
            array_factor(geom, profile, theta, phi, incidence, element_factor, element_cos_exponent));
        peak = std::max(peak, magnitudes[i]);
    }
    if (peak <= 0.0) throw std::runtime_error("compute_cut: pattern is identically zero");

    pattern.peak_magnitude = peak;
    pattern.samples.resize(count);
    for (int i = 0; i < count; ++i) {
        const double angle_deg = cut.start_deg + i * cut.step_deg;
        const double db =
            magnitudes[i] > 0.0 ? 20.0 * std::log10(magnitudes[i] / peak) : -300.0;
        pattern.samples[i] = {angle_deg, std::max(db, -300.0)};
    }
    return pattern;
}

PatternMetrics extract_metrics(const RadiationPattern& pattern) {
    const auto& s = pattern.samples;
    if (s.size() < 3) throw std::invalid_argument("extract_metrics: too few samples");

    std::size_t peak = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].gain_db > s[peak].gain_db) peak = i;

    PatternMetrics metrics;
    metrics.peak_angle_deg = s[peak].angle_deg;

    // -3 dB crossings by linear interpolation around the peak. A beam
    // steered near endfire can push one crossing out of visible space; the
    // width then doubles the one-sided distance.
    auto crossing = [&](int dir) -> std::optional<double> {
        std::size_t i = peak;
        while (true) {
            std::size_t next = i + dir;
            if (next >= s.size()) return std::nullopt;  // wraps for dir = -1 at 0
            if (s[next].gain_db < -3.0) {
                const double g1 = s[i].gain_db, g2 = s[next].gain_db;
                return s[i].angle_deg +
                       (s[next].angle_deg - s[i].angle_deg) * (-3.0 - g1) / (g2 - g1);
            }
            i = next;
        }
    };
    const auto left = crossing(-1);
    const auto right = crossing(+1);
    if (left && right)
        metrics.beamwidth_3db_deg = *right - *left;
    else if (left)
        metrics.beamwidth_3db_deg = 2.0 * (s[peak].angle_deg - *left);
    else if (right)
        metrics.beamwidth_3db_deg = 2.0 * (*right - s[peak].angle_deg);
    else
        throw std::runtime_error("extract_metrics: no -3 dB crossing found");

    // Main-lobe span: first local minimum below -10 dB on each side.
    auto lobe_edge = [&](int dir) -> std::size_t {
        std::size_t i = peak;
        while (true) {
            std::size_t next = i + dir;
            if (next >= s.size()) return i;  // no qualifying minimum on this side
            if (s[i].gain_db < -10.0 && s[i].gain_db <= s[next].gain_db &&
                i != peak && s[i].gain_db <= s[i - dir].gain_db)
                return i;
            i = next;
        }
    };
    const std::size_t lo = lobe_edge(-1);
    const std::size_t hi = lobe_edge(+1);

    double sll = -300.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i < lo || i > hi) sll = std::max(sll, s[i].gain_db);
    metrics.sidelobe_level_db = std::min(sll, 0.0);
    return metrics;
}

std::string pattern_to_csv(const RadiationPattern& pattern) {
    std::ostringstream out;
    out << "angle_deg,gain_db\n";
    char buf[64];
    for (const auto& sample : pattern.samples) {
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f", sample.angle_deg, sample.gain_db);
        out << buf << "\n";
    }
    return out.str();
}

}  // namespace risbeam
