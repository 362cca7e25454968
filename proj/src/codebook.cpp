#include "risbeam/codebook.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace risbeam {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;

std::vector<double> regular_range(double start, double stop, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("AngleGrid: step must be positive");
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back((start + i * step) * deg);
    return out;
}

void check_increasing(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string("AngleGrid: empty ") + what);
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw std::invalid_argument(std::string("AngleGrid: ") + what +
                                        " must be strictly increasing");
}

std::string format_num(const char* fmt, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, value);
    return buf;
}
}  // namespace

AngleGrid AngleGrid::regular_deg(double zs, double zt, double zstep,
                                 double as, double at, double astep) {
    AngleGrid g{regular_range(zs, zt, zstep), regular_range(as, at, astep)};
    g.validate();
    return g;
}

AngleGrid AngleGrid::default_grid() {
    return regular_deg(50.0, 130.0, 2.0, -80.0, 80.0, 2.0);
}

void AngleGrid::validate() const {
    check_increasing(zeniths, "zeniths");
    check_increasing(azimuths, "azimuths");
}

std::string to_string(CodebookKind kind) {
    switch (kind) {
        case CodebookKind::angle2d: return "angle2d";
        case CodebookKind::z_stage: return "z-stage";
        case CodebookKind::y_stage: return "y-stage";
        case CodebookKind::composed: return "composed";
        case CodebookKind::dft: return "dft";
    }
    return "angle2d";
}

CodebookKind codebook_kind_from_string(const std::string& s) {
    if (s == "angle2d") return CodebookKind::angle2d;
    if (s == "z-stage") return CodebookKind::z_stage;
    if (s == "y-stage") return CodebookKind::y_stage;
    if (s == "composed") return CodebookKind::composed;
    if (s == "dft") return CodebookKind::dft;
    throw std::runtime_error("unknown codebook kind '" + s + "'");
}

PhaseProfile Codebook::profile(std::size_t i, const RisGeometry& geom) const {
    if (!full_surface())
        throw std::logic_error("Codebook::profile: not a full-surface codebook");
    if (i >= codewords.size()) throw std::out_of_range("Codebook::profile: index");
    if (geom.rows_z != rows || geom.cols_y != cols)
        throw std::invalid_argument("Codebook::profile: geometry does not match codebook");
    return PhaseProfile{geom, codewords[i]};
}

std::string Codebook::label_string(std::size_t i) const {
    const CodewordLabel& l = labels.at(i);
    if (kind == CodebookKind::dft) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "dft:%d/%d", static_cast<int>(l.a),
                      static_cast<int>(l.b));
        return buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f/%.2f", l.a / deg, l.b / deg);
    return buf;
}

Codebook build_angle_codebook(const RisGeometry& geom, const AngleGrid& grid,
                              bool compensate_incidence,
                              double incidence_theta, double incidence_phi) {
    geom.validate();
    grid.validate();
    Codebook cb;
    cb.kind = CodebookKind::angle2d;
    cb.rows = geom.rows_z;
    cb.cols = geom.cols_y;
    cb.codewords.reserve(grid.zeniths.size() * grid.azimuths.size());
    std::vector<cxd> incidence;
    if (compensate_incidence)
        incidence = steering_vector(geom, incidence_theta, incidence_phi).entries;
    for (double th : grid.zeniths) {
        for (double ph : grid.azimuths) {
            auto v = steering_vector(geom, th, ph).entries;
            if (compensate_incidence)
                for (std::size_t k = 0; k < v.size(); ++k) v[k] *= std::conj(incidence[k]);
            cb.codewords.push_back(std::move(v));
            cb.labels.push_back({th, ph});
        }
    }
    return cb;
}

Codebook build_z_codebook(const RisGeometry& geom, const std::vector<double>& zeniths) {
    geom.validate();
    if (zeniths.empty()) throw std::invalid_argument("build_z_codebook: empty zenith list");
    Codebook cb;
    cb.kind = CodebookKind::z_stage;
    cb.rows = geom.rows_z;
    cb.cols = 1;
    for (double th : zeniths) {
        cb.codewords.push_back(steering_vector_z(geom, th));
        cb.labels.push_back({th, 0.0});
    }
    return cb;
}

Codebook build_y_codebook(const RisGeometry& geom, double theta_selected,
                          const std::vector<double>& azimuths) {
    geom.validate();
    if (azimuths.empty()) throw std::invalid_argument("build_y_codebook: empty azimuth list");
    Codebook cb;
    cb.kind = CodebookKind::y_stage;
    cb.rows = 1;
    cb.cols = geom.cols_y;
    for (double ph : azimuths) {
        cb.codewords.push_back(steering_vector_y(geom, theta_selected, ph));
        cb.labels.push_back({theta_selected, ph});
    }
    return cb;
}

Codebook compose_second_stage(const RisGeometry& geom, const Codebook& y_stage,
                              const std::vector<cxd>& a_z_selected, double theta_selected) {
    if (y_stage.kind != CodebookKind::y_stage)
        throw std::invalid_argument("compose_second_stage: expected a y-stage codebook");
    if (a_z_selected.size() != geom.rows_z || y_stage.cols != geom.cols_y)
        throw std::invalid_argument("compose_second_stage: dimension mismatch");
    Codebook cb;
    cb.kind = CodebookKind::composed;
    cb.rows = geom.rows_z;
    cb.cols = geom.cols_y;
    for (std::size_t j = 0; j < y_stage.size(); ++j) {
        cb.codewords.push_back(
            kronecker_compose(geom, y_stage.codewords[j], a_z_selected).entries);
        cb.labels.push_back({theta_selected, y_stage.labels[j].b});
    }
    return cb;
}

Codebook build_dft_codebook(const RisGeometry& geom, unsigned oversampling_z,
                            unsigned oversampling_y) {
    geom.validate();
    if (oversampling_z < 1 || oversampling_y < 1)
        throw std::invalid_argument("build_dft_codebook: oversampling must be >= 1");
    const std::size_t nz = oversampling_z * geom.rows_z;
    const std::size_t ny = oversampling_y * geom.cols_y;
    Codebook cb;
    cb.kind = CodebookKind::dft;
    cb.rows = geom.rows_z;
    cb.cols = geom.cols_y;
    cb.codewords.reserve(nz * ny);
    for (std::size_t kz = 0; kz < nz; ++kz) {
        for (std::size_t ky = 0; ky < ny; ++ky) {
            std::vector<cxd> w(geom.element_count());
            for (std::size_t n = 0; n < geom.cols_y; ++n) {
                for (std::size_t m = 0; m < geom.rows_z; ++m) {
                    double phase = 2.0 * pi *
                                   (static_cast<double>(m * kz) / static_cast<double>(nz) +
                                    static_cast<double>(n * ky) / static_cast<double>(ny));
                    w[geom.flat_index(m, n)] = std::polar(1.0, phase);
                }
            }
            cb.codewords.push_back(std::move(w));
            cb.labels.push_back({static_cast<double>(kz), static_cast<double>(ky)});
        }
    }
    return cb;
}

std::string pack_state_indices(const std::vector<std::size_t>& indices, unsigned bits) {
    if (bits == 0 || bits > 16) throw std::invalid_argument("pack_state_indices: bad bit width");
    const std::size_t total_bits = indices.size() * bits;
    std::vector<unsigned char> bytes((total_bits + 7) / 8, 0);
    std::size_t t = 0;
    for (std::size_t idx : indices) {
        for (unsigned b = 0; b < bits; ++b, ++t) {
            if ((idx >> b) & 1u) bytes[t / 8] |= static_cast<unsigned char>(1u << (t % 8));
        }
    }
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char byte : bytes) {
        out.push_back(hex[byte >> 4]);
        out.push_back(hex[byte & 0xF]);
    }
    return out;
}

std::vector<std::size_t> unpack_state_indices(const std::string& hex, std::size_t count,
                                              unsigned bits) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw std::runtime_error("hex payload has odd length");
    std::vector<unsigned char> bytes(hex.size() / 2);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::runtime_error("hex payload has non-hex characters");
        bytes[i] = static_cast<unsigned char>((hi << 4) | lo);
    }
    if (bytes.size() != (count * bits + 7) / 8)
        throw std::runtime_error("hex payload length does not match element count");
    std::vector<std::size_t> indices(count, 0);
    std::size_t t = 0;
    for (std::size_t k = 0; k < count; ++k) {
        for (unsigned b = 0; b < bits; ++b, ++t) {
            if ((bytes[t / 8] >> (t % 8)) & 1u) indices[k] |= std::size_t{1} << b;
        }
    }
    return indices;
}

void export_codebook(std::ostream& out, const Codebook& cb, const PhaseStateSet& states) {
    if (cb.codewords.empty()) throw std::invalid_argument("export_codebook: empty codebook");
    const bool discrete = states.is_discrete();
    out << "RISCB v1 kind=" << to_string(cb.kind) << " M=" << cb.rows << " N=" << cb.cols
        << " states=";
    if (discrete)
        out << states.bits_per_index() << "-bit";
    else
        out << "continuous";
    out << "\n";

    const std::size_t len = cb.rows * cb.cols;
    for (std::size_t i = 0; i < cb.size(); ++i) {
        const auto& w = cb.codewords[i];
        if (w.size() != len) throw std::invalid_argument("export_codebook: codeword size mismatch");
        double la = cb.labels[i].a;
        double lb = cb.labels[i].b;
        if (cb.kind != CodebookKind::dft) {
            la /= deg;
            lb /= deg;
        }
        out << i << ',' << format_num("%.6f", la) << ',' << format_num("%.6f", lb) << ',';
        if (discrete) {
            std::vector<std::size_t> indices(len);
            std::size_t k = 0;
            for (std::size_t m = 0; m < cb.rows; ++m)
                for (std::size_t n = 0; n < cb.cols; ++n)
                    indices[k++] = states.nearest_state(std::arg(w[n * cb.rows + m]));
            out << pack_state_indices(indices, states.bits_per_index());
        } else {
            bool first = true;
            for (std::size_t m = 0; m < cb.rows; ++m) {
                for (std::size_t n = 0; n < cb.cols; ++n) {
                    if (!first) out << ',';
                    first = false;
                    out << format_num("%.9f", std::arg(w[n * cb.rows + m]));
                }
            }
        }
        out << "\n";
    }
}

std::string export_codebook(const Codebook& cb, const PhaseStateSet& states) {
    std::ostringstream oss;
    export_codebook(oss, cb, states);
    return oss.str();
}

namespace {
std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& why) {
    throw std::runtime_error("codebook import: line " + std::to_string(line) + ": " + why);
}
}  // namespace

Codebook import_codebook(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("codebook import: empty input");
    auto fields = split(header, ' ');
    if (fields.size() != 6 || fields[0] != "RISCB" || fields[1] != "v1")
        parse_fail(1, "bad header, expected 'RISCB v1 kind=... M=... N=... states=...'");
    auto field_value = [&](std::size_t i, const char* key) {
        std::string prefix = std::string(key) + "=";
        if (fields[i].rfind(prefix, 0) != 0)
            parse_fail(1, "expected '" + prefix + "...' in header");
        return fields[i].substr(prefix.size());
    };

    Codebook cb;
    cb.kind = codebook_kind_from_string(field_value(2, "kind"));
    try {
        cb.rows = std::stoul(field_value(3, "M"));
        cb.cols = std::stoul(field_value(4, "N"));
    } catch (const std::exception&) {
        parse_fail(1, "M/N are not integers");
    }
    if (cb.rows < 1 || cb.cols < 1) parse_fail(1, "M/N must be >= 1");

    std::string states_field = field_value(5, "states");
    bool discrete = false;
    unsigned bits = 0;
    PhaseStateSet state_set = PhaseStateSet::continuous();
    if (states_field != "continuous") {
        auto pos = states_field.find("-bit");
        if (pos == std::string::npos || pos == 0) parse_fail(1, "bad states field");
        try {
            bits = static_cast<unsigned>(std::stoul(states_field.substr(0, pos)));
        } catch (const std::exception&) {
            parse_fail(1, "bad states bit width");
        }
        if (bits == 0 || bits > 16) parse_fail(1, "states bit width out of range");
        discrete = true;
        state_set = PhaseStateSet::uniform(bits);
    }

    const std::size_t len = cb.rows * cb.cols;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto parts = split(line, ',');
        if (parts.size() < 4) parse_fail(line_no, "expected index,theta,phi,payload");
        std::size_t index;
        double la, lb;
        try {
            index = std::stoul(parts[0]);
            la = std::stod(parts[1]);
            lb = std::stod(parts[2]);
        } catch (const std::exception&) {
            parse_fail(line_no, "bad index or label");
        }
        if (index != cb.codewords.size()) parse_fail(line_no, "record index out of order");
        CodewordLabel label{la, lb};
        if (cb.kind != CodebookKind::dft) {
            label.a *= deg;
            label.b *= deg;
        }

        std::vector<cxd> w(len);
        if (discrete) {
            if (parts.size() != 4) parse_fail(line_no, "discrete payload must be one hex field");
            std::vector<std::size_t> indices;
            try {
                indices = unpack_state_indices(parts[3], len, bits);
            } catch (const std::exception& e) {
                parse_fail(line_no, e.what());
            }
            std::size_t k = 0;
            for (std::size_t m = 0; m < cb.rows; ++m)
                for (std::size_t n = 0; n < cb.cols; ++n) {
                    if (indices[k] >= state_set.state_count())
                        parse_fail(line_no, "state index out of range");
                    w[n * cb.rows + m] = state_set.states()[indices[k]].coefficient();
                    ++k;
                }
        } else {
            if (parts.size() != 3 + len)
                parse_fail(line_no, "expected " + std::to_string(len) + " phase values, got " +
                                        std::to_string(parts.size() - 3));
            std::size_t k = 3;
            for (std::size_t m = 0; m < cb.rows; ++m)
                for (std::size_t n = 0; n < cb.cols; ++n) {
                    double phase;
                    try {
                        phase = std::stod(parts[k]);
                    } catch (const std::exception&) {
                        parse_fail(line_no, "bad phase value in field " + std::to_string(k + 1));
                    }
                    w[n * cb.rows + m] = std::polar(1.0, phase);
                    ++k;
                }
        }
        cb.codewords.push_back(std::move(w));
        cb.labels.push_back(label);
    }
    if (cb.codewords.empty()) throw std::runtime_error("codebook import: no codeword records");
    return cb;
}

Codebook import_codebook(const std::string& text) {
    std::istringstream iss(text);
    return import_codebook(iss);
}

}  // namespace risbeam
