#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "mmreg/field.hpp"

namespace mmreg {

/// On-disk format: a JSON header file and a little-endian binary payload in
/// a companion file at <header path> + ".bin".
///
///   {"kind": "image" | "mask" | "scalar-field" | "deformation",
///    "dims": [..], "spacing_mm": [..],
///    "dtype": "f32" | "u8" | "u16", "order": "row-major"}
///
/// Images, scalar fields, and deformations are f32; masks are u8 or u16.
/// Deformation payloads store per-point target coordinates, axis-major.
enum class FieldKind { image, mask, scalar_field, deformation };

struct FieldFile {
  FieldKind kind = FieldKind::image;
  std::variant<ScalarField, Mask, DeformationField> value;

  const ScalarField& as_scalar() const { return std::get<ScalarField>(value); }
  const Mask& as_mask() const { return std::get<Mask>(value); }
  const DeformationField& as_deformation() const {
    return std::get<DeformationField>(value);
  }
  const Grid& grid() const;
};

FieldFile read_field_file(const std::filesystem::path& header_path);

void write_image(const std::filesystem::path& header_path, const Image& img);
void write_scalar_field(const std::filesystem::path& header_path, const ScalarField& f);
void write_mask(const std::filesystem::path& header_path, const Mask& m);
void write_deformation(const std::filesystem::path& header_path,
                       const DeformationField& phi);

/// Binary portable graymap (P5), 8- or 16-bit. Intensities are mapped to
/// [0, 1] by division by the declared maximum value. dims = [rows, cols].
Image read_pgm(const std::filesystem::path& path);

/// Reads a .pgm or a field-file header depending on the extension.
FieldFile read_any(const std::filesystem::path& path);

}  // namespace mmreg
