#ifndef RISBEAM_PATTERN_HPP
#define RISBEAM_PATTERN_HPP

#include <string>
#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/geometry.hpp"

namespace risbeam {

/// Plane-wave incidence direction, same zenith/azimuth convention as the
/// steering vectors; broadside (normal) incidence is (pi/2, 0).
struct Incidence {
    double theta = 1.5707963267948966;
    double phi = 0.0;

    static Incidence normal() { return {}; }
};

enum class CutAxis { azimuth, zenith };

struct CutSpec {
    CutAxis axis = CutAxis::azimuth;
    double fixed_deg = 90.0;   ///< the angle held constant (theta for azimuth cuts)
    double start_deg = -90.0;
    double stop_deg = 90.0;
    double step_deg = 0.05;
};

struct PatternSample {
    double angle_deg = 0.0;
    double gain_db = 0.0;  ///< normalized, peak = 0 dB
};

struct RadiationPattern {
    CutSpec cut;
    Incidence incidence;
    std::vector<PatternSample> samples;
    double peak_magnitude = 0.0;  ///< unnormalized |AF| at the peak sample
};

struct PatternMetrics {
    double peak_angle_deg = 0.0;
    double beamwidth_3db_deg = 0.0;
    double sidelobe_level_db = 0.0;  ///< strongest lobe outside the main lobe, <= 0
    double scan_range_deg = 0.0;     ///< filled when aggregating over commands
};

/// Far-field re-radiation sum for observation direction (theta, phi) under
/// plane-wave `incidence`:
///   AF = sum r_mn * exp(+j*k*(m*dz*(cos th - cos th_in)
///                            + n*dy*(sin th sin ph - sin th_in sin ph_in)))
/// optionally scaled by the per-element factor
/// (cos_inc * cos_obs)^element_cos_exponent measured from the surface normal.
cxd array_factor(const RisGeometry& geom, const PhaseProfile& profile, double theta,
                 double phi, const Incidence& incidence, bool element_factor = false,
                 double element_cos_exponent = default_element_cos_exponent);

/// Sampled, peak-normalized cut. Throws on an empty span or a step above
/// 0.1 degrees (metric extraction needs the fine grid).
RadiationPattern compute_cut(const RisGeometry& geom, const PhaseProfile& profile,
                             const CutSpec& cut, const Incidence& incidence,
                             bool element_factor = false,
                             double element_cos_exponent = default_element_cos_exponent);

/// Peak via argmax, 3 dB width via linear interpolation of the -3 dB
/// crossings, sidelobe level relative to the main lobe bounded by the first
/// local minima below -10 dB. Throws std::runtime_error when no -3 dB
/// crossing exists (pattern too flat).
PatternMetrics extract_metrics(const RadiationPattern& pattern);

/// Pattern CSV: header `angle_deg,gain_db`, %.4f values, LF endings.
std::string pattern_to_csv(const RadiationPattern& pattern);

}  // namespace risbeam

#endif
