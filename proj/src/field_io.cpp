#include "mmreg/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace mmreg {

namespace {

using nlohmann::json;

[[noreturn]] void io_error(const std::string& what) { throw std::runtime_error(what); }

std::string kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::image: return "image";
    case FieldKind::mask: return "mask";
    case FieldKind::scalar_field: return "scalar-field";
    case FieldKind::deformation: return "deformation";
  }
  io_error("unreachable field kind");
}

FieldKind kind_from_name(const std::string& s, const std::filesystem::path& p) {
  if (s == "image") return FieldKind::image;
  if (s == "mask") return FieldKind::mask;
  if (s == "scalar-field") return FieldKind::scalar_field;
  if (s == "deformation") return FieldKind::deformation;
  io_error(p.string() + ": unknown field kind '" + s + "'");
}

std::filesystem::path payload_path(const std::filesystem::path& header) {
  return std::filesystem::path(header.string() + ".bin");
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& p,
                                      std::size_t expected) {
  std::ifstream in(p, std::ios::binary);
  if (!in) io_error(p.string() + ": cannot open payload");
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() != expected)
    io_error(p.string() + ": payload is " + std::to_string(buf.size()) +
             " bytes, expected " + std::to_string(expected));
  return buf;
}

void write_bytes(const std::filesystem::path& p, const void* data, std::size_t len) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) io_error(p.string() + ": cannot open for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
  if (!out) io_error(p.string() + ": write failed");
}

// Payloads are little-endian on disk; every supported target here is
// little-endian, so the conversion is a straight copy.
static_assert(std::endian::native == std::endian::little,
              "field payloads assume a little-endian host");

Grid grid_from_header(const json& h, const std::filesystem::path& p) {
  if (!h.contains("dims") || !h["dims"].is_array())
    io_error(p.string() + ": header missing dims");
  const auto dims = h["dims"].get<std::vector<int>>();
  std::vector<double> sp(dims.size(), 1.0);
  if (h.contains("spacing_mm")) {
    sp = h["spacing_mm"].get<std::vector<double>>();
    if (sp.size() != dims.size())
      io_error(p.string() + ": spacing_mm length does not match dims");
  }
  if (dims.size() == 2) return Grid(dims[0], dims[1], sp[0], sp[1]);
  if (dims.size() == 3) return Grid(dims[0], dims[1], dims[2], sp[0], sp[1], sp[2]);
  io_error(p.string() + ": dims must have 2 or 3 entries");
}

json header_for(FieldKind kind, const Grid& g, const std::string& dtype) {
  json h;
  h["kind"] = kind_name(kind);
  json dims = json::array(), sp = json::array();
  for (int a = 0; a < g.ndim(); ++a) {
    dims.push_back(g.dim(a));
    sp.push_back(g.spacing(a));
  }
  h["dims"] = dims;
  h["spacing_mm"] = sp;
  h["dtype"] = dtype;
  h["order"] = "row-major";
  return h;
}

void write_header(const std::filesystem::path& p, const json& h) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) io_error(p.string() + ": cannot open for writing");
  out << h.dump(2) << "\n";
  if (!out) io_error(p.string() + ": write failed");
}

void write_f32_payload(const std::filesystem::path& header,
                       const std::vector<double>& values) {
  std::vector<float> f(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) f[i] = static_cast<float>(values[i]);
  write_bytes(payload_path(header), f.data(), f.size() * sizeof(float));
}

std::vector<double> read_f32_payload(const std::filesystem::path& header,
                                     std::size_t count) {
  const auto buf = read_bytes(payload_path(header), count * sizeof(float));
  std::vector<double> out(count);
  const float* f = reinterpret_cast<const float*>(buf.data());
  for (std::size_t i = 0; i < count; ++i) out[i] = f[i];
  return out;
}

}  // namespace

const Grid& FieldFile::grid() const {
  return std::visit([](const auto& v) -> const Grid& { return v.grid; }, value);
}

FieldFile read_field_file(const std::filesystem::path& header_path) {
  std::ifstream in(header_path);
  if (!in) io_error(header_path.string() + ": cannot open header");
  json h;
  try {
    in >> h;
  } catch (const json::exception& e) {
    io_error(header_path.string() + ": bad header JSON (" + e.what() + ")");
  }
  if (!h.contains("kind") || !h["kind"].is_string())
    io_error(header_path.string() + ": header missing kind");
  const FieldKind kind = kind_from_name(h["kind"].get<std::string>(), header_path);
  const Grid g = grid_from_header(h, header_path);
  const std::string dtype = h.value("dtype", std::string("f32"));
  if (h.value("order", std::string("row-major")) != "row-major")
    io_error(header_path.string() + ": unsupported element order");

  FieldFile out;
  out.kind = kind;
  switch (kind) {
    case FieldKind::image:
    case FieldKind::scalar_field: {
      if (dtype != "f32")
        io_error(header_path.string() + ": dtype '" + dtype + "' invalid for " +
                 kind_name(kind));
      out.value = ScalarField(g, read_f32_payload(header_path, g.size()));
      break;
    }
    case FieldKind::deformation: {
      if (dtype != "f32")
        io_error(header_path.string() + ": dtype '" + dtype + "' invalid for deformation");
      DeformationField phi(g);
      phi.targets = read_f32_payload(header_path, g.size() * g.ndim());
      out.value = std::move(phi);
      break;
    }
    case FieldKind::mask: {
      std::vector<std::uint16_t> labels(g.size());
      if (dtype == "u8") {
        const auto buf = read_bytes(payload_path(header_path), g.size());
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = buf[i];
      } else if (dtype == "u16") {
        const auto buf = read_bytes(payload_path(header_path), g.size() * 2);
        std::memcpy(labels.data(), buf.data(), buf.size());
      } else {
        io_error(header_path.string() + ": dtype '" + dtype + "' invalid for mask");
      }
      int count = 1;
      for (auto v : labels) count = std::max(count, static_cast<int>(v) + 1);
      out.value = Mask(g, std::move(labels), count);
      break;
    }
  }
  return out;
}

void write_image(const std::filesystem::path& header_path, const Image& img) {
  write_header(header_path, header_for(FieldKind::image, img.grid, "f32"));
  write_f32_payload(header_path, img.values);
}

void write_scalar_field(const std::filesystem::path& header_path,
                        const ScalarField& f) {
  write_header(header_path, header_for(FieldKind::scalar_field, f.grid, "f32"));
  write_f32_payload(header_path, f.values);
}

void write_mask(const std::filesystem::path& header_path, const Mask& m) {
  bool wide = false;
  for (auto v : m.labels) wide |= v > 0xff;
  write_header(header_path, header_for(FieldKind::mask, m.grid, wide ? "u16" : "u8"));
  if (wide) {
    write_bytes(payload_path(header_path), m.labels.data(), m.labels.size() * 2);
  } else {
    std::vector<unsigned char> buf(m.labels.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
      buf[i] = static_cast<unsigned char>(m.labels[i]);
    write_bytes(payload_path(header_path), buf.data(), buf.size());
  }
}

void write_deformation(const std::filesystem::path& header_path,
                       const DeformationField& phi) {
  write_header(header_path, header_for(FieldKind::deformation, phi.grid, "f32"));
  write_f32_payload(header_path, phi.targets);
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path.string() + ": cannot open");

  auto next_token = [&]() -> std::string {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {  // comment runs to end of line
        while (in.get(c) && c != '\n') {
        }
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(c);
    }
    return tok;
  };

  if (next_token() != "P5") io_error(path.string() + ": not a binary PGM (P5)");
  int cols = 0, rows = 0, maxval = 0;
  try {
    cols = std::stoi(next_token());
    rows = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    io_error(path.string() + ": malformed PGM header");
  }
  if (cols < 4 || rows < 4) io_error(path.string() + ": image smaller than 4x4");
  if (maxval < 1 || maxval > 65535) io_error(path.string() + ": bad maxval");

  const Grid g(rows, cols);
  Image img(g);
  const std::size_t n = g.size();
  if (maxval < 256) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      io_error(path.string() + ": truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) img[i] = buf[i] / double(maxval);
  } else {
    std::vector<unsigned char> buf(2 * n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n));
    if (static_cast<std::size_t>(in.gcount()) != 2 * n)
      io_error(path.string() + ": truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) {
      const int v = (buf[2 * i] << 8) | buf[2 * i + 1];  // PGM 16-bit is big-endian
      img[i] = v / double(maxval);
    }
  }
  return img;
}

FieldFile read_any(const std::filesystem::path& path) {
  if (path.extension() == ".pgm") {
    FieldFile f;
    f.kind = FieldKind::image;
    f.value = read_pgm(path);
    return f;
  }
  return read_field_file(path);
}

}  // namespace mmreg
