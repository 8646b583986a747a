#include "nlwlab/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>
#include "nlwlab/error.hpp"

namespace nlwlab {

namespace {

constexpr std::array<char, 4> kMagic{'N', 'L', 'W', 'P'};

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  require(static_cast<bool>(in), ErrorCode::io, "field file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

// Maps the ascending-frequency file order onto the FFT natural order.
template <class Visit>
void for_each_file_order(const Grid& grid, Visit visit) {
  const int d = grid.dim();
  const int n = grid.points();
  LatticeIndex k{};
  for (int a = 0; a < d; ++a) k[a] = -n / 2;
  for (std::size_t count = 0; count < grid.size(); ++count) {
    LatticeIndex axis{};
    for (int a = 0; a < d; ++a) axis[a] = grid.axis_index(k[a]);
    visit(grid.flatten(axis));
    for (int a = d - 1; a >= 0; --a) {
      if (++k[a] < n / 2) break;
      k[a] = -n / 2;
    }
  }
}

void write_coeffs(std::ostream& out, const SpectralField& field) {
  for_each_file_order(field.grid(), [&](std::size_t flat) {
    put_le(out, field[flat].real());
    put_le(out, field[flat].imag());
  });
}

SpectralField read_coeffs(std::istream& in, const Grid& grid) {
  SpectralField field(grid);
  for_each_file_order(grid, [&](std::size_t flat) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    field[flat] = Complex(re, im);
  });
  return field;
}

}  // namespace

void write_field_pair(std::ostream& out, const FieldPair& pair) {
  const Grid& g = pair.grid();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kFieldFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.points()));
  put_le<double>(out, g.length());
  write_coeffs(out, pair.pos);
  write_coeffs(out, pair.vel);
  require(static_cast<bool>(out), ErrorCode::io, "failed writing field pair");
}

FieldPair read_field_pair(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  require(static_cast<bool>(in) && magic == kMagic, ErrorCode::io, "not an NLWP field file");
  const auto version = get_le<std::uint32_t>(in);
  require(version == kFieldFormatVersion, ErrorCode::io,
          "unsupported NLWP format version " + std::to_string(version));
  const auto d = get_le<std::uint32_t>(in);
  const auto n = get_le<std::uint32_t>(in);
  const auto length = get_le<double>(in);
  require(d <= static_cast<std::uint32_t>(kMaxDim) && n <= (1u << 16), ErrorCode::io,
          "NLWP header holds an unsupported grid");
  Grid grid(static_cast<int>(d), static_cast<int>(n), length);
  SpectralField pos = read_coeffs(in, grid);
  SpectralField vel = read_coeffs(in, grid);
  return FieldPair(std::move(pos), std::move(vel));
}

std::filesystem::path sidecar_path(const std::filesystem::path& field_file) {
  auto p = field_file;
  p += ".json";
  return p;
}

void save_field_pair(const std::filesystem::path& path, const FieldPair& pair,
                     const FieldProvenance& provenance) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io, "cannot open " + path.string() + " for writing");
    write_field_pair(out, pair);
  }
  nlohmann::ordered_json side;
  side["format"] = "NLWP";
  side["format_version"] = kFieldFormatVersion;
  side["d"] = pair.grid().dim();
  side["n"] = pair.grid().points();
  side["L"] = pair.grid().length();
  side["seed"] = provenance.seed ? nlohmann::ordered_json(*provenance.seed) : nlohmann::ordered_json();
  side["cutoff_kind"] = provenance.cutoff_kind;
  side["s"] = provenance.s ? nlohmann::ordered_json(*provenance.s) : nlohmann::ordered_json();
  for (const auto& [k, v] : provenance.extra) side["extra"][k] = v;
  std::ofstream meta(sidecar_path(path), std::ios::trunc);
  require(static_cast<bool>(meta), ErrorCode::io, "cannot write sidecar for " + path.string());
  meta << side.dump(2) << '\n';
}

FieldPair load_field_pair(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open field file " + path.string());
  return read_field_pair(in);
}

FieldProvenance load_provenance(const std::filesystem::path& field_file) {
  std::ifstream in(sidecar_path(field_file));
  require(static_cast<bool>(in), ErrorCode::io, "missing sidecar for " + field_file.string());
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, std::string("malformed sidecar: ") + e.what());
  }
  FieldProvenance p;
  if (side.contains("seed") && !side["seed"].is_null()) p.seed = side["seed"].get<std::uint64_t>();
  p.cutoff_kind = side.value("cutoff_kind", "");
  if (side.contains("s") && !side["s"].is_null()) p.s = side["s"].get<double>();
  if (side.contains("extra")) {
    for (const auto& [k, v] : side["extra"].items()) p.extra[k] = v.get<std::string>();
  }
  return p;
}

}  // namespace nlwlab
