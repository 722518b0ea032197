#pragma once

#include <string>
#include <vector>

#include "lvae/field.hpp"

namespace lvae {

// PGM (binary P5, maxval 255): pixel = round(255 * clamp(value, 0, 1)).
// Round-trips within 1/255 quantization.
void write_pgm(const std::string& path, const Field2D& img);
Field2D read_pgm(const std::string& path);

// Raw dataset file, little-endian:
//   magic "LVAE", version u32, record count u32, height u32, width u32,
//   bytes-per-value u32 (4 = IEEE-754 binary32), then records back-to-back,
//   row-major. Bit-exact round trip.
inline constexpr uint32_t kDatasetVersion = 1;

void write_dataset(const std::string& path, const std::vector<Field2D>& records);
std::vector<Field2D> read_dataset(const std::string& path);

// Whole-file text helpers used for config snapshots and reports.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace lvae
