#ifndef RISBEAM_CODEBOOK_HPP
#define RISBEAM_CODEBOOK_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "risbeam/geometry.hpp"

namespace risbeam {

/// Scan grid: q zenith angles x p azimuth angles, radians, strictly increasing.
struct AngleGrid {
    std::vector<double> zeniths;
    std::vector<double> azimuths;

    /// Regular grid from degree bounds (inclusive ends where the step lands).
    static AngleGrid regular_deg(double zenith_start, double zenith_stop, double zenith_step,
                                 double azimuth_start, double azimuth_stop, double azimuth_step);
    /// 2-degree grid over zenith 50..130, azimuth -80..80.
    static AngleGrid default_grid();

    void validate() const;
};

enum class CodebookKind { angle2d, z_stage, y_stage, composed, dft };

std::string to_string(CodebookKind kind);
CodebookKind codebook_kind_from_string(const std::string& s);

/// Per-codeword metadata. For angle kinds `a` is the zenith and `b` the
/// azimuth (radians); for the DFT kind they are the (k_z, k_y) bin indices.
struct CodewordLabel {
    double a = 0.0;
    double b = 0.0;
};

/// An ordered set of candidate configurations. Full-surface kinds (angle2d,
/// composed, dft) store length rows*cols codewords in Kronecker order;
/// z_stage stores length-rows columns (cols = 1) and y_stage length-cols
/// rows (rows = 1).
struct Codebook {
    CodebookKind kind = CodebookKind::angle2d;
    std::size_t rows = 1;  ///< codeword matrix row count (along z)
    std::size_t cols = 1;  ///< codeword matrix column count (along y)
    std::vector<std::vector<cxd>> codewords;
    std::vector<CodewordLabel> labels;

    std::size_t size() const { return codewords.size(); }
    bool full_surface() const {
        return kind == CodebookKind::angle2d || kind == CodebookKind::composed ||
               kind == CodebookKind::dft;
    }

    /// Codeword i as a phase profile (full-surface kinds only).
    PhaseProfile profile(std::size_t i, const RisGeometry& geom) const;

    /// Human-readable, comma-free label for traces: "th/ph" in degrees for
    /// angle kinds, "dft:kz/ky" for the DFT kind.
    std::string label_string(std::size_t i) const;
};

/// Eq.-(3) codebook: all azimuths for the first zenith, then the second
/// zenith, and so on. With compensate_incidence set, each codeword is
/// multiplied by the conjugate response of the incidence direction.
Codebook build_angle_codebook(const RisGeometry& geom, const AngleGrid& grid,
                              bool compensate_incidence = false,
                              double incidence_theta = 0.0, double incidence_phi = 0.0);

/// First-stage column codebook: one a_z per zenith.
Codebook build_z_codebook(const RisGeometry& geom, const std::vector<double>& zeniths);

/// Second-stage row codebook at the selected zenith: one a_y per azimuth.
Codebook build_y_codebook(const RisGeometry& geom, double theta_selected,
                          const std::vector<double>& azimuths);

/// F_y (x) a_z(theta_selected): p full-surface codewords.
Codebook compose_second_stage(const RisGeometry& geom, const Codebook& y_stage,
                              const std::vector<cxd>& a_z_selected, double theta_selected);

/// Separable 2-D DFT codebook with integer oversampling per axis. Codeword
/// (k_z, k_y) gives element (m,n) the phase
/// 2*pi*(m*k_z/(O_z*M) + n*k_y/(O_y*N)); codewords are ordered k_z-major.
Codebook build_dft_codebook(const RisGeometry& geom, unsigned oversampling_z,
                            unsigned oversampling_y);

/// Text export, bit-exact per the RISCB v1 format. With a discrete state
/// set, codewords are quantized and written as hex-packed state indices;
/// otherwise phases are written as %.9f radians, row-major by (m,n).
std::string export_codebook(const Codebook& cb, const PhaseStateSet& states);
void export_codebook(std::ostream& out, const Codebook& cb, const PhaseStateSet& states);

/// Inverse of export_codebook. Discrete payloads are rebuilt with the
/// uniform k-bit state set, so re-export is byte-identical. Malformed input
/// raises std::runtime_error naming the offending line.
Codebook import_codebook(const std::string& text);
Codebook import_codebook(std::istream& in);

/// Hex packing used by discrete codebook payloads and by the wire protocol:
/// state indices row-major by (m,n), little-endian bit order, zero-padded to
/// a byte boundary, uppercase hex.
std::string pack_state_indices(const std::vector<std::size_t>& indices, unsigned bits);
std::vector<std::size_t> unpack_state_indices(const std::string& hex, std::size_t count,
                                              unsigned bits);

}  // namespace risbeam

#endif
