#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "splatseg/grid.hpp"

namespace splatseg {

// Reads a P2 (ASCII) or P5 (binary) PGM with maxval <= 65535. Samples are
// scaled to [0, 1] by dividing by maxval.
//
// Throws PgmHeaderError for an empty or malformed header, PgmMagicError for
// any magic other than P2/P5, PgmTruncatedError when the payload holds fewer
// samples than the header declares, and DataError if the file can't be opened.
ScalarField read_pgm(const std::filesystem::path& path);
ScalarField parse_pgm(std::string_view bytes);

// Reads a PGM and binarizes it at half of maxval (pixel = 1 iff value > 0.5).
BinaryMask read_mask_pgm(const std::filesystem::path& path);

// Writes a binary P5 PGM. Field values must lie in [0, 1]; they are quantized
// to round(v * maxval). The default maxval gives 16-bit big-endian samples.
void write_pgm(const ScalarField& field, const std::filesystem::path& path,
               int maxval = 65535);
std::string encode_pgm(const ScalarField& field, int maxval = 65535);

// Masks are written as 8-bit P5 with values {0, 255}.
void write_pgm(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace splatseg
