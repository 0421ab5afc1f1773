#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "openrect/dataset.hpp"

namespace openrect {

/// Reads an IDX image file (magic 0x803) and its label file (magic 0x801).
/// Either may be gzip-compressed. Pixels are scaled to [0, 1].
Dataset read_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Writes pixel columns p0..pN followed by `label`.
void convert_idx_to_csv(const std::filesystem::path& images, const std::filesystem::path& labels,
                        const std::filesystem::path& out_csv);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

/// 8-bit RGB PNG, deflate-compressed. pixels are row-major, top row first.
void write_png(const std::filesystem::path& path, int width, int height,
               const std::vector<Rgb>& pixels);

/// Distinct colors for class ids; `dummy` is drawn black.
Rgb class_color(Label label, Label dummy);

}  // namespace openrect
