#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tactx/errors.hpp"
#include "tactx/field.hpp"
#include "tactx/geometry.hpp"
#include "tactx/mlp.hpp"
#include "tactx/pipeline.hpp"
#include "tactx/render.hpp"
#include "tactx/vae.hpp"

// Binary carriers for datasets (TDS1), networks (TNET), calibration tables
// (TCAL), height maps (THMP), and deformation fields (DFLD). Every file
// starts with a 4-byte magic and a u32 format version; all integers and
// floats are little-endian, floats 32-bit IEEE-754. Values live as f64 in
// memory and quantize to f32 exactly once, at write.
namespace tactx::io {

inline constexpr std::uint32_t kFormatVersion = 1;

namespace detail {

inline void put_u8(std::ostream& os, std::uint8_t v) {
  os.put(char(v));
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void put_f32(std::ostream& os, double x) {
  put_u32(os, std::bit_cast<std::uint32_t>(float(x)));
}

inline void read_exact(std::istream& is, char* p, std::size_t n, const char* what) {
  is.read(p, std::streamsize(n));
  if (std::size_t(is.gcount()) != n) {
    throw TruncatedFileError(std::string("truncated file: ran out of bytes reading ") + what);
  }
}

inline std::uint8_t get_u8(std::istream& is, const char* what) {
  char b;
  read_exact(is, &b, 1, what);
  return std::uint8_t(b);
}

inline std::uint32_t get_u32(std::istream& is, const char* what) {
  char b[4];
  read_exact(is, b, 4, what);
  return std::uint32_t(std::uint8_t(b[0])) | std::uint32_t(std::uint8_t(b[1])) << 8 |
         std::uint32_t(std::uint8_t(b[2])) << 16 | std::uint32_t(std::uint8_t(b[3])) << 24;
}

inline double get_f32(std::istream& is, const char* what) {
  return double(std::bit_cast<float>(get_u32(is, what)));
}

inline void write_header(std::ostream& os, std::string_view magic) {
  os.write(magic.data(), 4);
  put_u32(os, kFormatVersion);
}

inline void read_header(std::istream& is, std::string_view magic) {
  char m[4];
  read_exact(is, m, 4, "magic");
  if (std::string_view(m, 4) != magic) {
    throw BadMagicError("bad magic: expected '" + std::string(magic) + "', found '" +
                        std::string(m, 4) + "'");
  }
  const std::uint32_t version = get_u32(is, "version");
  if (version != kFormatVersion) {
    throw VersionError("unsupported format version " + std::to_string(version) + ", expected " +
                       std::to_string(kFormatVersion));
  }
}

// No payload may follow the last documented byte of a file.
inline void expect_eof(std::istream& is, const std::filesystem::path& path) {
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after the end of '" + path.string() + "'");
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  return is;
}

// Writes via a sibling temp file renamed into place on success, so the
// destination never holds a partial file.
template <typename Body>
void write_file_atomic(const std::filesystem::path& path, Body&& body) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  auto discard = [&tmp] {
    std::error_code ec;
    fs::remove(tmp, ec);
  };
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    try {
      body(os);
    } catch (...) {
      os.close();
      discard();
      throw;
    }
    os.flush();
    if (!os.good()) {
      os.close();
      discard();
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    discard();
    throw IoError("cannot move '" + tmp.string() + "' onto '" + path.string() +
                  "': " + ec.message());
  }
}

}  // namespace detail

// TDS1 layout: header; u32 sample count; per sample the 5 contact values
// (u, v, force, radius, angle), the 19 electrode values, then the BioTac and
// DIGIT fields in row-major node order. 32864 bytes per sample.
inline void write_dataset(const std::filesystem::path& path,
                          const std::vector<PairedSample>& samples) {
  if (samples.size() > 0xffffffffu) throw DomainError("write_dataset: too many samples");
  detail::write_file_atomic(path, [&samples](std::ostream& os) {
    detail::write_header(os, "TDS1");
    detail::put_u32(os, std::uint32_t(samples.size()));
    for (const PairedSample& s : samples) {
      detail::put_f32(os, s.spec.u);
      detail::put_f32(os, s.spec.v);
      detail::put_f32(os, s.spec.force);
      detail::put_f32(os, s.spec.indenter_radius);
      detail::put_f32(os, s.spec.angle);
      for (double e : s.signal) detail::put_f32(os, e);
      require_kind(s.biotac_field, SensorKind::biotac, "write_dataset");
      require_kind(s.digit_field, SensorKind::digit, "write_dataset");
      for (std::size_t i = 0; i < s.biotac_field.values.size(); ++i) {
        detail::put_f32(os, s.biotac_field.values.data()[i]);
      }
      for (std::size_t i = 0; i < s.digit_field.values.size(); ++i) {
        detail::put_f32(os, s.digit_field.values.data()[i]);
      }
    }
  });
}

inline std::vector<PairedSample> read_dataset(const std::filesystem::path& path) {
  std::ifstream is = detail::open_input(path);
  detail::read_header(is, "TDS1");
  const std::uint32_t n = detail::get_u32(is, "sample count");
  std::vector<PairedSample> out(n);
  for (PairedSample& s : out) {
    s.spec.u = detail::get_f32(is, "contact u");
    s.spec.v = detail::get_f32(is, "contact v");
    s.spec.force = detail::get_f32(is, "contact force");
    s.spec.indenter_radius = detail::get_f32(is, "indenter radius");
    s.spec.angle = detail::get_f32(is, "contact angle");
    for (double& e : s.signal) e = detail::get_f32(is, "electrode value");
    s.biotac_field = {SensorKind::biotac, num::Matrix(kFieldGrid, kFieldGrid)};
    s.digit_field = {SensorKind::digit, num::Matrix(kFieldGrid, kFieldGrid)};
    for (std::size_t i = 0; i < s.biotac_field.values.size(); ++i) {
      s.biotac_field.values.data()[i] = detail::get_f32(is, "BioTac field value");
    }
    for (std::size_t i = 0; i < s.digit_field.values.size(); ++i) {
      s.digit_field.values.data()[i] = detail::get_f32(is, "DIGIT field value");
    }
  }
  detail::expect_eof(is, path);
  return out;
}

namespace detail {

inline constexpr std::size_t kMaxLayerDim = 1u << 20;

inline std::uint8_t activation_code(nn::Activation a) {
  return std::uint8_t(a);
}

inline void write_mlp_section(std::ostream& os, const nn::MlpModel& m) {
  put_u32(os, std::uint32_t(m.layers.size()));
  for (const nn::DenseLayer& l : m.layers) {
    put_u32(os, std::uint32_t(l.w.cols()));
    put_u32(os, std::uint32_t(l.w.rows()));
    put_u8(os, activation_code(l.act));
    for (std::size_t i = 0; i < l.w.size(); ++i) put_f32(os, l.w.data()[i]);
    for (std::size_t i = 0; i < l.b.size(); ++i) put_f32(os, l.b.data()[i]);
  }
}

inline nn::MlpModel read_mlp_section(std::istream& is) {
  const std::uint32_t count = get_u32(is, "layer count");
  if (count == 0) throw FormatError("network section with zero layers");
  nn::MlpModel m;
  std::size_t prev_out = 0;
  for (std::uint32_t li = 0; li < count; ++li) {
    const std::uint32_t in = get_u32(is, "layer input dim");
    const std::uint32_t out = get_u32(is, "layer output dim");
    if (in == 0 || out == 0 || in > kMaxLayerDim || out > kMaxLayerDim) {
      throw FormatError("implausible layer dims " + std::to_string(in) + "x" +
                        std::to_string(out));
    }
    if (li > 0 && in != prev_out) {
      throw FormatError("dimension chain violation: layer " + std::to_string(li) + " takes " +
                        std::to_string(in) + " values, previous layer emits " +
                        std::to_string(prev_out));
    }
    const std::uint8_t code = get_u8(is, "activation code");
    if (code > std::uint8_t(nn::Activation::tanh)) {
      throw FormatError("unknown activation code " + std::to_string(code));
    }
    nn::DenseLayer l;
    l.act = nn::Activation(code);
    l.w = num::Matrix(out, in);
    l.b = num::Matrix(out, 1);
    for (std::size_t i = 0; i < l.w.size(); ++i) l.w.data()[i] = get_f32(is, "weight");
    for (std::size_t i = 0; i < l.b.size(); ++i) l.b.data()[i] = get_f32(is, "bias");
    m.layers.push_back(std::move(l));
    prev_out = out;
  }
  return m;
}

inline pipeline::NetRole read_role(std::istream& is) {
  const std::uint32_t raw = get_u32(is, "network role");
  if (raw < std::uint32_t(pipeline::NetRole::svb) || raw > std::uint32_t(pipeline::NetRole::m2mpn)) {
    throw FormatError("unknown network role tag " + std::to_string(raw));
  }
  return pipeline::NetRole(raw);
}

inline void check_role(pipeline::NetRole found, pipeline::NetRole want) {
  if (found != want) {
    throw FormatError(std::string("network file holds '") + pipeline::to_string(found) +
                      "', expected '" + pipeline::to_string(want) + "'");
  }
}

}  // namespace detail

inline bool is_autoencoder_role(pipeline::NetRole r) {
  return r == pipeline::NetRole::svb || r == pipeline::NetRole::mvb ||
         r == pipeline::NetRole::mvd;
}

// TNET layout: header; u32 role tag; one network section per component. A
// projection net is a single section; an autoencoder stores trunk, mu head,
// logvar head, and decoder sections in that fixed order. Each section is a
// u32 layer count then per layer u32 input dim, u32 output dim, u8
// activation code, weights row-major, biases.
inline void write_network(const std::filesystem::path& path, pipeline::NetRole role,
                          const nn::MlpModel& m) {
  if (is_autoencoder_role(role)) {
    throw DomainError(std::string("write_network: role '") + pipeline::to_string(role) +
                      "' is an autoencoder, got a plain network");
  }
  nn::validate(m);
  detail::write_file_atomic(path, [&](std::ostream& os) {
    detail::write_header(os, "TNET");
    detail::put_u32(os, std::uint32_t(role));
    detail::write_mlp_section(os, m);
  });
}

inline void write_network(const std::filesystem::path& path, pipeline::NetRole role,
                          const nn::VaeModel& v) {
  if (!is_autoencoder_role(role)) {
    throw DomainError(std::string("write_network: role '") + pipeline::to_string(role) +
                      "' is a projection net, got an autoencoder");
  }
  nn::validate(v);
  detail::write_file_atomic(path, [&](std::ostream& os) {
    detail::write_header(os, "TNET");
    detail::put_u32(os, std::uint32_t(role));
    detail::write_mlp_section(os, v.encoder_trunk);
    detail::write_mlp_section(os, v.mu_head);
    detail::write_mlp_section(os, v.logvar_head);
    detail::write_mlp_section(os, v.decoder);
  });
}

inline nn::MlpModel read_projection(const std::filesystem::path& path, pipeline::NetRole want) {
  std::ifstream is = detail::open_input(path);
  detail::read_header(is, "TNET");
  detail::check_role(detail::read_role(is), want);
  nn::MlpModel m = detail::read_mlp_section(is);
  detail::expect_eof(is, path);
  try {
    nn::validate(m);
  } catch (const std::exception& e) {
    throw FormatError("invalid network in '" + path.string() + "': " + e.what());
  }
  return m;
}

inline nn::VaeModel read_autoencoder(const std::filesystem::path& path, pipeline::NetRole want) {
  std::ifstream is = detail::open_input(path);
  detail::read_header(is, "TNET");
  detail::check_role(detail::read_role(is), want);
  nn::VaeModel v;
  v.encoder_trunk = detail::read_mlp_section(is);
  v.mu_head = detail::read_mlp_section(is);
  v.logvar_head = detail::read_mlp_section(is);
  v.decoder = detail::read_mlp_section(is);
  v.latent_dim = v.mu_head.output_dim();
  detail::expect_eof(is, path);
  try {
    nn::validate(v);
  } catch (const std::exception& e) {
    throw FormatError("invalid network in '" + path.string() + "': " + e.what());
  }
  return v;
}

inline std::filesystem::path model_path(const std::filesystem::path& dir, pipeline::NetRole role) {
  return dir / (std::string(pipeline::to_string(role)) + ".tnet");
}

inline void write_models(const std::filesystem::path& dir, const pipeline::PipelineModels& m) {
  std::filesystem::create_directories(dir);
  write_network(model_path(dir, pipeline::NetRole::svb), pipeline::NetRole::svb, m.svb);
  write_network(model_path(dir, pipeline::NetRole::mvb), pipeline::NetRole::mvb, m.mvb);
  write_network(model_path(dir, pipeline::NetRole::mvd), pipeline::NetRole::mvd, m.mvd);
  write_network(model_path(dir, pipeline::NetRole::s2mpn), pipeline::NetRole::s2mpn, m.s2mpn);
  write_network(model_path(dir, pipeline::NetRole::m2mpn), pipeline::NetRole::m2mpn, m.m2mpn);
}

inline pipeline::PipelineModels read_models(const std::filesystem::path& dir) {
  pipeline::PipelineModels m;
  m.svb = read_autoencoder(model_path(dir, pipeline::NetRole::svb), pipeline::NetRole::svb);
  m.mvb = read_autoencoder(model_path(dir, pipeline::NetRole::mvb), pipeline::NetRole::mvb);
  m.mvd = read_autoencoder(model_path(dir, pipeline::NetRole::mvd), pipeline::NetRole::mvd);
  m.s2mpn = read_projection(model_path(dir, pipeline::NetRole::s2mpn), pipeline::NetRole::s2mpn);
  m.m2mpn = read_projection(model_path(dir, pipeline::NetRole::m2mpn), pipeline::NetRole::m2mpn);
  try {
    pipeline::validate(m);
  } catch (const std::exception& e) {
    throw FormatError("model files in '" + dir.string() + "' do not chain: " + e.what());
  }
  return m;
}

// TCAL layout: header; the 3x6 polynomial coefficients channel-major in the
// order 1, gx, gy, gx^2, gx*gy, gy^2. The background color is the constant
// column and is rebuilt on read.
inline void write_calibration(const std::filesystem::path& path,
                              const render::CalibrationTable& t) {
  detail::write_file_atomic(path, [&t](std::ostream& os) {
    detail::write_header(os, "TCAL");
    for (const auto& channel : t.coeffs) {
      for (double c : channel) detail::put_f32(os, c);
    }
  });
}

inline render::CalibrationTable read_calibration(const std::filesystem::path& path) {
  std::ifstream is = detail::open_input(path);
  detail::read_header(is, "TCAL");
  render::CalibrationTable t;
  for (auto& channel : t.coeffs) {
    for (double& c : channel) c = detail::get_f32(is, "calibration coefficient");
  }
  for (std::size_t c = 0; c < 3; ++c) t.background[c] = t.coeffs[c][0];
  detail::expect_eof(is, path);
  return t;
}

// THMP layout: header; u32 width, u32 height, f32 pitch, then width*height
// row-major pixel depths.
inline void write_heightmap(const std::filesystem::path& path, const geom::HeightMap& h) {
  detail::write_file_atomic(path, [&h](std::ostream& os) {
    detail::write_header(os, "THMP");
    detail::put_u32(os, std::uint32_t(h.width));
    detail::put_u32(os, std::uint32_t(h.height));
    detail::put_f32(os, h.pitch);
    for (double v : h.values) detail::put_f32(os, v);
  });
}

inline geom::HeightMap read_heightmap(const std::filesystem::path& path) {
  std::ifstream is = detail::open_input(path);
  detail::read_header(is, "THMP");
  geom::HeightMap h;
  h.width = detail::get_u32(is, "width");
  h.height = detail::get_u32(is, "height");
  if (h.width == 0 || h.height == 0 || h.width > 65536 || h.height > 65536) {
    throw FormatError("implausible height map dims " + std::to_string(h.width) + "x" +
                      std::to_string(h.height));
  }
  h.pitch = detail::get_f32(is, "pitch");
  if (!(h.pitch > 0.0) || !std::isfinite(h.pitch)) {
    throw FormatError("height map pitch must be positive and finite");
  }
  h.values.assign(h.width * h.height, 0.0);
  for (double& v : h.values) v = detail::get_f32(is, "pixel depth");
  detail::expect_eof(is, path);
  return h;
}

// DFLD layout: header; u32 sensor kind (0 BioTac, 1 DIGIT); the 64x64 node
// values row-major.
inline void write_field(const std::filesystem::path& path, const DeformationField& f) {
  detail::write_file_atomic(path, [&f](std::ostream& os) {
    detail::write_header(os, "DFLD");
    detail::put_u32(os, std::uint32_t(f.kind));
    for (std::size_t i = 0; i < f.values.size(); ++i) detail::put_f32(os, f.values.data()[i]);
  });
}

inline DeformationField read_field(const std::filesystem::path& path) {
  std::ifstream is = detail::open_input(path);
  detail::read_header(is, "DFLD");
  const std::uint32_t kind = detail::get_u32(is, "sensor kind");
  if (kind > std::uint32_t(SensorKind::digit)) {
    throw FormatError("unknown sensor kind tag " + std::to_string(kind));
  }
  DeformationField f{SensorKind(kind), num::Matrix(kFieldGrid, kFieldGrid)};
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.values.data()[i] = detail::get_f32(is, "field value");
  }
  detail::expect_eof(is, path);
  return f;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  detail::write_file_atomic(
      path, [&text](std::ostream& os) { os.write(text.data(), std::streamsize(text.size())); });
}

// Binary PPM (P6), 8 bits per channel.
inline void write_ppm(const std::filesystem::path& path, const render::TactileImage& img) {
  detail::write_file_atomic(path, [&img](std::ostream& os) {
    os << "P6\n" << img.width << " " << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()), std::streamsize(img.rgb.size()));
  });
}

// One conversion per line: 19 comma-separated electrode values. Blank lines
// and '#' comments are skipped.
inline std::vector<ElectrodeFrame> read_signal_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<ElectrodeFrame> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto where = [&] { return path.string() + " line " + std::to_string(lineno); };
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    ElectrodeFrame frame{};
    std::size_t field = 0;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      const std::size_t lo = cell.find_first_not_of(" \t\r");
      if (lo == std::string::npos) throw FormatError(where() + ": empty value");
      const std::size_t hi = cell.find_last_not_of(" \t\r");
      cell = cell.substr(lo, hi - lo + 1);
      if (field >= kElectrodeCount) {
        throw FormatError(where() + ": more than " + std::to_string(kElectrodeCount) +
                          " values");
      }
      try {
        std::size_t used = 0;
        frame[field] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError(where() + ": '" + cell + "' is not a number");
      }
      ++field;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (field != kElectrodeCount) {
      throw FormatError(where() + ": expected " + std::to_string(kElectrodeCount) +
                        " values, got " + std::to_string(field));
    }
    out.push_back(frame);
  }
  if (out.empty()) throw FormatError("no signal rows in '" + path.string() + "'");
  return out;
}

}  // namespace tactx::io
