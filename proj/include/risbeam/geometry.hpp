#ifndef RISBEAM_GEOMETRY_HPP
#define RISBEAM_GEOMETRY_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace risbeam {

using cxd = std::complex<double>;

/// Uniform planar array layout. rows_z elements run along the local z-axis
/// with spacing spacing_z, cols_y along the local y-axis with spacing
/// spacing_y. Element (0,0) sits at the local origin, element (m,n) at
/// (0, n*spacing_y, m*spacing_z).
struct RisGeometry {
    std::size_t rows_z = 1;   ///< element count along z (vertical)
    std::size_t cols_y = 1;   ///< element count along y (horizontal)
    double spacing_z = 0.0;   ///< meters
    double spacing_y = 0.0;   ///< meters
    double wavelength = 0.0;  ///< meters

    /// Geometry with half-wavelength spacing on both axes.
    static RisGeometry half_wavelength(std::size_t rows_z, std::size_t cols_y,
                                       double wavelength);

    std::size_t element_count() const { return rows_z * cols_y; }

    /// Flat index of element (m,n) in the Kronecker order a_y (x) a_z,
    /// i.e. k = n*rows_z + m.
    std::size_t flat_index(std::size_t m, std::size_t n) const {
        return n * rows_z + m;
    }

    /// Throws std::invalid_argument when counts are zero or lengths are
    /// not positive finite numbers.
    void validate() const;

    bool operator==(const RisGeometry&) const = default;
};

/// One realizable reflection coefficient of the hardware.
struct PhaseState {
    double amplitude = 1.0;  ///< in [0, 1]
    double phase = 0.0;      ///< radians in [0, 2*pi)

    cxd coefficient() const { return std::polar(amplitude, phase); }
};

/// The set of reflection states an element can take. Continuous mode means
/// any unit-or-less amplitude coefficient is realizable; discrete mode
/// restricts coefficients to the listed states.
class PhaseStateSet {
  public:
    enum class Mode { continuous, discrete };

    /// Continuous (ideal) phase control.
    static PhaseStateSet continuous();
    /// The canonical 1-bit set {(1, 0), (1, pi)}.
    static PhaseStateSet one_bit();
    /// 2^bits unit-amplitude states with phases 2*pi*i/2^bits.
    static PhaseStateSet uniform(unsigned bits);
    /// Discrete set from explicit states. Throws on fewer than two states
    /// or phases outside [0, 2*pi).
    static PhaseStateSet discrete(std::vector<PhaseState> states);

    Mode mode() const { return mode_; }
    bool is_discrete() const { return mode_ == Mode::discrete; }
    const std::vector<PhaseState>& states() const { return states_; }
    std::size_t state_count() const { return states_.size(); }

    /// Bits needed to address a state index (discrete mode only).
    unsigned bits_per_index() const;

    /// Index of the state whose phase is angularly closest to `phase`;
    /// ties break toward the lower index.
    std::size_t nearest_state(double phase) const;

  private:
    Mode mode_ = Mode::continuous;
    std::vector<PhaseState> states_;
};

/// Array response vector for one (zenith, azimuth) direction, flat in the
/// Kronecker order k = n*rows_z + m.
struct SteeringVector {
    RisGeometry geometry;
    double theta = 0.0;  ///< zenith, radians
    double phi = 0.0;    ///< azimuth, radians
    std::vector<cxd> entries;
};

/// M x N matrix of per-element reflection coefficients, stored column-major
/// (flat index n*rows_z + m) so that reshaping to/from the Kronecker-ordered
/// vector is an identity on storage.
struct PhaseProfile {
    RisGeometry geometry;
    std::vector<cxd> coefficients;

    cxd at(std::size_t m, std::size_t n) const {
        return coefficients[geometry.flat_index(m, n)];
    }
    cxd& at(std::size_t m, std::size_t n) {
        return coefficients[geometry.flat_index(m, n)];
    }

    /// Profile with every coefficient equal to `value` (default 1+0j).
    static PhaseProfile uniform(const RisGeometry& geom, cxd value = cxd(1.0, 0.0));
    /// Profile with every element in state `index` of `states`.
    static PhaseProfile uniform_state(const RisGeometry& geom,
                                      const PhaseStateSet& states,
                                      std::size_t index = 0);
};

/// Full-surface array response for direction (theta, phi), Eq.-(2) phases in
/// Kronecker order. Throws std::invalid_argument on non-finite angles.
SteeringVector steering_vector(const RisGeometry& geom, double theta, double phi);

/// z-axis linear-array response: entry m = exp(-j*2*pi/lambda * m*d_z*cos(theta)).
std::vector<cxd> steering_vector_z(const RisGeometry& geom, double theta);

/// y-axis linear-array response:
/// entry n = exp(-j*2*pi/lambda * n*d_y*sin(theta)*sin(phi)).
std::vector<cxd> steering_vector_y(const RisGeometry& geom, double theta, double phi);

/// Kronecker product a_y (x) a_z: entry n*M + m = a_y[n] * a_z[m].
/// Throws when the lengths do not match the geometry.
SteeringVector kronecker_compose(const RisGeometry& geom,
                                 const std::vector<cxd>& a_y,
                                 const std::vector<cxd>& a_z,
                                 double theta = 0.0, double phi = 0.0);

/// Snap every coefficient to the discrete state with the nearest phase
/// (ties toward the lower state index); the state's amplitude is adopted.
PhaseProfile quantize_profile(const PhaseProfile& profile, const PhaseStateSet& states);

/// Column n of the profile <- entries [n*M, (n+1)*M) of the vector.
PhaseProfile profile_from_vector(const SteeringVector& v);

/// Inverse of profile_from_vector; angle metadata is not recoverable and is
/// reported as (0, 0).
SteeringVector vector_from_profile(const PhaseProfile& p);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double radians);

}  // namespace risbeam

#endif
