#pragma once

#include <filesystem>

#include "eigenseg/field.hpp"

namespace eigenseg {

/// Binary PGM (P5, maxval 255). Intensities are mapped to [0,1] on read by
/// dividing by 255; on write values are clamped to [0,1], scaled by 255 and
/// rounded half-up. Anything else in the header is a ParseError.
ScalarField read_image(const std::filesystem::path& path);
void write_image(const ScalarField& field, const std::filesystem::path& path);

/// Grayscale PFM: header "Pf\n<width> <height>\n-1.0\n" followed by
/// width*height little-endian 32-bit floats, bottom row first. Lossless for
/// values representable in 32 bits; non-finite values are rejected.
ScalarField read_field(const std::filesystem::path& path);
void write_field(const ScalarField& field, const std::filesystem::path& path);

}  // namespace eigenseg
