#ifndef RISBEAM_CHANNEL_HPP
#define RISBEAM_CHANNEL_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "risbeam/geometry.hpp"
#include "risbeam/vec3.hpp"

namespace risbeam {

inline constexpr double speed_of_light = 299792458.0;

/// Power reported when the summed field is exactly zero, keeping the dB
/// arithmetic total.
inline constexpr double no_signal_floor_dbm = -200.0;

/// Default exponent of the per-element radiation factor
/// (cos(theta_inc) * cos(theta_ref))^exponent applied to the field amplitude.
inline constexpr double default_element_cos_exponent = 0.45;

struct AntennaModel {
    enum class Kind { isotropic, directional };
    Kind kind = Kind::isotropic;
    double boresight_gain_dbi = 0.0;
    double beamwidth_3db_deg = 0.0;   ///< directional only, (0, 180)
    Vec3 boresight{1.0, 0.0, 0.0};    ///< directional only, unit vector

    static AntennaModel isotropic();
    static AntennaModel directional(double gain_dbi, double beamwidth_deg, Vec3 boresight);

    /// Gain in dBi toward `direction` (from the antenna). The directional
    /// pattern is Gaussian in dB, G0 - 12*(psi/HPBW)^2, floored at G0 - 20 dB.
    double gain_db(const Vec3& direction) const;

    void validate() const;
};

struct Terminal {
    Vec3 position;
    AntennaModel antenna;
};

struct RisPlacement {
    Vec3 position;          ///< global position of element (0,0), the local origin
    Vec3 normal{1, 0, 0};   ///< local +x, unit
    Vec3 up{0, 0, 1};       ///< local +z, unit; must be orthogonal to normal
    RisGeometry geometry;
    PhaseStateSet phase_states = PhaseStateSet::continuous();

    /// Local y axis (element columns run along it): up x normal.
    Vec3 axis_y() const { return up.cross(normal); }
    /// Global position of element (m, n).
    Vec3 element_position(std::size_t m, std::size_t n) const;
    /// Geometric center of the panel.
    Vec3 panel_center() const;
};

struct DirectPath {
    bool present = true;
    double extra_attenuation_db = 0.0;
};

struct Scatterer {
    Vec3 position;
    double amplitude_gain = 0.0;  ///< linear field scale, >= 0
};

/// Full description of one physical link: geometry, antennas, blockage,
/// environment and noise. The power oracle for every search is built from
/// this.
struct Scenario {
    std::string id = "scenario";
    double carrier_hz = 0.0;
    double tx_power_dbm = 0.0;
    double noise_sigma_db = 0.0;
    std::uint64_t rng_seed = 1;
    double element_cos_exponent = default_element_cos_exponent;
    Terminal tx;
    Terminal rx;
    RisPlacement ris;
    DirectPath direct_path;
    std::vector<Scatterer> scatterers;
    bool ris_present = true;  ///< false models the no-deployment baseline

    double wavelength() const { return speed_of_light / carrier_hz; }
    void validate() const;
};

/// Zenith/azimuth of a global point seen from the RIS local origin, using
/// the steering-vector convention (broadside is theta = pi/2, phi = 0).
std::pair<double, double> angles_from_ris(const RisPlacement& ris, const Vec3& point);

/// Global unit direction for local (theta, phi).
Vec3 direction_from_angles(const RisPlacement& ris, double theta, double phi);

/// Cascaded TX -> element (m,n) -> RX complex field gain:
/// lambda/(4*pi*dt*dr) * sqrt(Gt*Gr) * (cos_inc*cos_ref)^exponent
/// * exp(-j*2*pi*(dt+dr)/lambda), with exact spherical distances. Zero when
/// TX or RX lies behind the surface.
cxd element_cascade_gain(const Scenario& sc, std::size_t m, std::size_t n);

/// Complex TX->RX direct-path field gain including blockage attenuation;
/// zero when the path is absent.
cxd direct_path_gain(const Scenario& sc);

/// Single-bounce field gain through one scatterer.
cxd scatterer_gain(const Scenario& sc, const Scatterer& s);

/// Noiseless received power in dBm for the given profile:
/// tx_power_dbm + 20*log10 |h_direct + sum g_mn r_mn + sum h_s|.
/// Throws on dimension mismatch; degenerate geometry (coincident points)
/// yields a non-finite field and raises std::domain_error.
double received_power(const Scenario& sc, const PhaseProfile& profile);

/// Continuous-phase upper-bound profile r_mn = exp(-j*arg(g_mn)).
PhaseProfile optimal_phase_profile(const Scenario& sc);

/// Deterministic Gaussian stream (mt19937_64 + Box-Muller), identical output
/// for identical seeds on every platform. std::normal_distribution is not
/// used because its sequence is implementation-defined.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
    void reseed(std::uint64_t seed);
    double next();  ///< standard normal draw

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Power-feedback contract shared by the simulator and the networked client:
/// one dBm value per profile query, a counter that advances by exactly one
/// per query, and deterministic reseeding of the noise stream.
class PowerOracle {
  public:
    virtual ~PowerOracle() = default;
    virtual double query(const PhaseProfile& profile) = 0;
    virtual std::uint64_t query_count() const = 0;
    virtual void reseed(std::uint64_t seed) = 0;
};

/// Simulated oracle: caches the per-element gains of a fixed scenario and
/// adds seeded Gaussian noise in dB when noise_sigma_db > 0.
class SimulatedOracle final : public PowerOracle {
  public:
    explicit SimulatedOracle(const Scenario& sc);

    double query(const PhaseProfile& profile) override;
    std::uint64_t query_count() const override { return count_; }
    void reseed(std::uint64_t seed) override;

    const Scenario& scenario() const { return scenario_; }

  private:
    Scenario scenario_;
    std::vector<cxd> element_gains_;
    cxd static_field_;  ///< direct + scatterers
    std::uint64_t count_ = 0;
    GaussianStream noise_;
};

std::unique_ptr<PowerOracle> make_oracle(const Scenario& sc);

}  // namespace risbeam

#endif
