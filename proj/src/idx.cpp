#include <zlib.h>

#include <fstream>
#include <memory>

#include "openrect/error.hpp"
#include "openrect/io.hpp"

namespace openrect {

namespace {

// gzread passes uncompressed files through unchanged.
std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw IoError("cannot open " + path.string());
  std::unique_ptr<gzFile_s, int (*)(gzFile)> guard(f, gzclose);
  std::vector<unsigned char> out;
  unsigned char buf[1 << 16];
  for (;;) {
    const int n = gzread(f, buf, sizeof buf);
    if (n < 0) throw FormatError(path.string() + ": corrupt compressed stream");
    if (n == 0) break;
    out.insert(out.end(), buf, buf + n);
  }
  return out;
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

}  // namespace

Dataset read_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto img = read_all(images);
  const auto lab = read_all(labels);
  if (img.size() < 16 || be32(img, 0) != 0x803)
    throw FormatError(images.string() + ": not an IDX image file (bad magic)");
  if (lab.size() < 8 || be32(lab, 0) != 0x801)
    throw FormatError(labels.string() + ": not an IDX label file (bad magic)");

  const std::size_t n = be32(img, 4), rows = be32(img, 8), cols = be32(img, 12);
  const std::size_t pixels = rows * cols;
  if (img.size() != 16 + n * pixels)
    throw FormatError(images.string() + ": truncated (expected " + std::to_string(16 + n * pixels) +
                      " bytes, found " + std::to_string(img.size()) + ")");
  if (be32(lab, 4) != n) throw FormatError("image and label files disagree on the item count");
  if (lab.size() != 8 + n) throw FormatError(labels.string() + ": truncated");

  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pixels));
  out.labels.resize(n);
  Label max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < pixels; ++p)
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          img[16 + i * pixels + p] / 255.0;
    out.labels[i] = lab[8 + i];
    max_label = std::max(max_label, out.labels[i]);
  }
  out.n_classes = max_label + 1;
  return out;
}

void convert_idx_to_csv(const std::filesystem::path& images, const std::filesystem::path& labels,
                        const std::filesystem::path& out_csv) {
  const Dataset data = read_idx(images, labels);
  std::vector<std::string> names;
  for (std::size_t p = 0; p < data.dim(); ++p) names.push_back("p" + std::to_string(p));
  write_csv(out_csv, data, nullptr, names);
}

}  // namespace openrect
