#include "risbeam/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risbeam {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double rad2deg = 180.0 / pi;

double db_to_linear_field(double db) { return std::pow(10.0, db / 20.0); }
}  // namespace

AntennaModel AntennaModel::isotropic() { return AntennaModel{}; }

AntennaModel AntennaModel::directional(double gain_dbi, double beamwidth_deg, Vec3 boresight) {
    AntennaModel a;
    a.kind = Kind::directional;
    a.boresight_gain_dbi = gain_dbi;
    a.beamwidth_3db_deg = beamwidth_deg;
    a.boresight = boresight.normalized();
    a.validate();
    return a;
}

void AntennaModel::validate() const {
    if (kind == Kind::isotropic) {
        if (boresight_gain_dbi != 0.0)
            throw std::invalid_argument("AntennaModel: isotropic antennas have 0 dBi gain");
        return;
    }
    if (boresight_gain_dbi < 0.0)
        throw std::invalid_argument("AntennaModel: directional gain must be >= 0 dBi");
    if (!(beamwidth_3db_deg > 0.0) || !(beamwidth_3db_deg < 180.0))
        throw std::invalid_argument("AntennaModel: beamwidth must lie in (0, 180) degrees");
    if (std::abs(boresight.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("AntennaModel: boresight must be a unit vector");
}

double AntennaModel::gain_db(const Vec3& direction) const {
    if (kind == Kind::isotropic) return 0.0;
    Vec3 d = direction.normalized();
    double c = std::clamp(boresight.dot(d), -1.0, 1.0);
    double psi_deg = std::acos(c) * rad2deg;
    double rolloff = 12.0 * (psi_deg / beamwidth_3db_deg) * (psi_deg / beamwidth_3db_deg);
    return boresight_gain_dbi - std::min(rolloff, 20.0);
}

Vec3 RisPlacement::element_position(std::size_t m, std::size_t n) const {
    return position + static_cast<double>(n) * geometry.spacing_y * axis_y() +
           static_cast<double>(m) * geometry.spacing_z * up;
}

Vec3 RisPlacement::panel_center() const {
    return position +
           0.5 * static_cast<double>(geometry.cols_y - 1) * geometry.spacing_y * axis_y() +
           0.5 * static_cast<double>(geometry.rows_z - 1) * geometry.spacing_z * up;
}

void Scenario::validate() const {
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("Scenario: carrier_hz must be positive");
    if (noise_sigma_db < 0.0)
        throw std::invalid_argument("Scenario: noise_sigma_db must be >= 0");
    if (direct_path.extra_attenuation_db < 0.0)
        throw std::invalid_argument("Scenario: extra_attenuation_db must be >= 0");
    if (element_cos_exponent < 0.0)
        throw std::invalid_argument("Scenario: element_cos_exponent must be >= 0");
    tx.antenna.validate();
    rx.antenna.validate();
    ris.geometry.validate();
    if (std::abs(ris.normal.norm() - 1.0) > 1e-9 || std::abs(ris.up.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("Scenario: ris normal/up must be unit vectors");
    if (std::abs(ris.normal.dot(ris.up)) > 1e-9)
        throw std::invalid_argument("Scenario: ris normal and up must be orthogonal");
    for (const auto& s : scatterers)
        if (s.amplitude_gain < 0.0)
            throw std::invalid_argument("Scenario: scatterer amplitude_gain must be >= 0");
}

std::pair<double, double> angles_from_ris(const RisPlacement& ris, const Vec3& point) {
    const Vec3 v = point - ris.position;
    const double r = v.norm();
    if (r == 0.0) throw std::domain_error("angles_from_ris: point coincides with the origin");
    const double xl = v.dot(ris.normal);
    const double yl = v.dot(ris.axis_y());
    const double zl = v.dot(ris.up);
    return {std::acos(std::clamp(zl / r, -1.0, 1.0)), std::atan2(yl, xl)};
}

Vec3 direction_from_angles(const RisPlacement& ris, double theta, double phi) {
    const double st = std::sin(theta);
    return (st * std::cos(phi)) * ris.normal + (st * std::sin(phi)) * ris.axis_y() +
           std::cos(theta) * ris.up;
}

cxd element_cascade_gain(const Scenario& sc, std::size_t m, std::size_t n) {
    const RisGeometry& g = sc.ris.geometry;
    if (m >= g.rows_z || n >= g.cols_y)
        throw std::out_of_range("element_cascade_gain: element index out of range");

    // Reflective operation only: no contribution when a terminal is behind.
    if ((sc.tx.position - sc.ris.position).dot(sc.ris.normal) <= 0.0) return {};
    if ((sc.rx.position - sc.ris.position).dot(sc.ris.normal) <= 0.0) return {};

    const Vec3 p = sc.ris.element_position(m, n);
    const Vec3 to_tx = sc.tx.position - p;
    const Vec3 to_rx = sc.rx.position - p;
    const double dt = to_tx.norm();
    const double dr = to_rx.norm();
    const double lambda = sc.wavelength();

    const double gt = sc.tx.antenna.gain_db(p - sc.tx.position);
    const double gr = sc.rx.antenna.gain_db(p - sc.rx.position);

    const double cos_inc = std::max(0.0, to_tx.normalized().dot(sc.ris.normal));
    const double cos_ref = std::max(0.0, to_rx.normalized().dot(sc.ris.normal));

    double amp = lambda / (4.0 * pi * dt * dr) * db_to_linear_field(gt + gr);
    if (sc.element_cos_exponent > 0.0)
        amp *= std::pow(cos_inc * cos_ref, sc.element_cos_exponent);
    const double phase = -2.0 * pi * (dt + dr) / lambda;
    return std::polar(amp, phase);
}

cxd direct_path_gain(const Scenario& sc) {
    if (!sc.direct_path.present) return {};
    const Vec3 d = sc.rx.position - sc.tx.position;
    const double dist = d.norm();
    const double lambda = sc.wavelength();
    const double gt = sc.tx.antenna.gain_db(d);
    const double gr = sc.rx.antenna.gain_db(Vec3{} - d);
    const double amp = lambda / (4.0 * pi * dist) *
                       db_to_linear_field(gt + gr - sc.direct_path.extra_attenuation_db);
    return std::polar(amp, -2.0 * pi * dist / lambda);
}

cxd scatterer_gain(const Scenario& sc, const Scatterer& s) {
    if (s.amplitude_gain <= 0.0) return {};
    const Vec3 to_s = s.position - sc.tx.position;
    const Vec3 s_to_rx = sc.rx.position - s.position;
    const double d1 = to_s.norm();
    const double d2 = s_to_rx.norm();
    const double lambda = sc.wavelength();
    const double gt = sc.tx.antenna.gain_db(to_s);
    const double gr = sc.rx.antenna.gain_db(Vec3{} - s_to_rx);
    const double amp =
        lambda / (4.0 * pi * d1 * d2) * db_to_linear_field(gt + gr) * s.amplitude_gain;
    return std::polar(amp, -2.0 * pi * (d1 + d2) / lambda);
}

namespace {
double field_to_dbm(const Scenario& sc, cxd field) {
    const double mag = std::abs(field);
    if (!std::isfinite(mag))
        throw std::domain_error("received_power: degenerate geometry (coincident points)");
    if (mag == 0.0) return no_signal_floor_dbm;  // keeps the dB arithmetic total
    return sc.tx_power_dbm + 20.0 * std::log10(mag);
}

cxd static_environment_field(const Scenario& sc) {
    cxd field = direct_path_gain(sc);
    for (const auto& s : sc.scatterers) field += scatterer_gain(sc, s);
    return field;
}
}  // namespace

double received_power(const Scenario& sc, const PhaseProfile& profile) {
    cxd field = static_environment_field(sc);
    if (sc.ris_present) {
        const RisGeometry& g = sc.ris.geometry;
        if (profile.geometry.rows_z != g.rows_z || profile.geometry.cols_y != g.cols_y)
            throw std::invalid_argument("received_power: profile does not match RIS geometry");
        for (std::size_t n = 0; n < g.cols_y; ++n)
            for (std::size_t m = 0; m < g.rows_z; ++m)
                field += element_cascade_gain(sc, m, n) * profile.at(m, n);
    }
    return field_to_dbm(sc, field);
}

PhaseProfile optimal_phase_profile(const Scenario& sc) {
    const RisGeometry& g = sc.ris.geometry;
    PhaseProfile p = PhaseProfile::uniform(g);
    for (std::size_t n = 0; n < g.cols_y; ++n)
        for (std::size_t m = 0; m < g.rows_z; ++m) {
            cxd gain = element_cascade_gain(sc, m, n);
            p.at(m, n) = std::polar(1.0, gain == cxd{} ? 0.0 : -std::arg(gain));
        }
    return p;
}

void GaussianStream::reseed(std::uint64_t seed) {
    engine_.seed(seed);
    has_spare_ = false;
}

double GaussianStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on explicit 53-bit uniforms; u1 in (0, 1].
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) / 9007199254740993.0;
    const double u2 = static_cast<double>(engine_() >> 11) / 9007199254740992.0;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
}

SimulatedOracle::SimulatedOracle(const Scenario& sc)
    : scenario_(sc), noise_(sc.rng_seed) {
    scenario_.validate();
    static_field_ = static_environment_field(scenario_);
    if (scenario_.ris_present) {
        const RisGeometry& g = scenario_.ris.geometry;
        element_gains_.resize(g.element_count());
        for (std::size_t n = 0; n < g.cols_y; ++n)
            for (std::size_t m = 0; m < g.rows_z; ++m)
                element_gains_[g.flat_index(m, n)] = element_cascade_gain(scenario_, m, n);
    }
}

double SimulatedOracle::query(const PhaseProfile& profile) {
    cxd field = static_field_;
    if (scenario_.ris_present) {
        if (profile.coefficients.size() != element_gains_.size())
            throw std::invalid_argument("SimulatedOracle: profile does not match RIS geometry");
        for (std::size_t k = 0; k < element_gains_.size(); ++k)
            field += element_gains_[k] * profile.coefficients[k];
    }
    ++count_;
    double power = field_to_dbm(scenario_, field);
    if (scenario_.noise_sigma_db > 0.0) power += scenario_.noise_sigma_db * noise_.next();
    return power;
}

void SimulatedOracle::reseed(std::uint64_t seed) { noise_.reseed(seed); }

std::unique_ptr<PowerOracle> make_oracle(const Scenario& sc) {
    return std::make_unique<SimulatedOracle>(sc);
}

}  // namespace risbeam
