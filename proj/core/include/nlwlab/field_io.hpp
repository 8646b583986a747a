#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "nlwlab/field.hpp"

namespace nlwlab {

inline constexpr std::uint32_t kFieldFormatVersion = 1;

/// Binary field-pair file ("NLWP"):
///   magic "NLWP" | u32 version | u32 d | u32 n | f64 L |
///   pos coefficients | vel coefficients
/// All integers and doubles are little-endian. Each coefficient array is
/// written row-major over the axes with every axis in ascending frequency
/// order k = -n/2, ..., n/2 - 1, as interleaved (re, im) doubles.
void write_field_pair(std::ostream& out, const FieldPair& pair);
FieldPair read_field_pair(std::istream& in);

/// Provenance recorded in the JSON sidecar next to a field file.
struct FieldProvenance {
  std::optional<std::uint64_t> seed;
  std::string cutoff_kind;
  std::optional<double> s;
  std::map<std::string, std::string> extra;
};

std::filesystem::path sidecar_path(const std::filesystem::path& field_file);

void save_field_pair(const std::filesystem::path& path, const FieldPair& pair,
                     const FieldProvenance& provenance);
FieldPair load_field_pair(const std::filesystem::path& path);
FieldProvenance load_provenance(const std::filesystem::path& field_file);

}  // namespace nlwlab
