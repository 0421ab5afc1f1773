#include <zlib.h>

#include <array>
#include <fstream>

#include "openrect/error.hpp"
#include "openrect/io.hpp"

namespace openrect {

namespace {

void put32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

void chunk(std::ofstream& f, const char* type, const std::string& data) {
  std::string buf;
  put32(buf, static_cast<std::uint32_t>(data.size()));
  buf.append(type, 4);
  buf += data;
  const auto crc = crc32(0, reinterpret_cast<const Bytef*>(buf.data() + 4),
                         static_cast<uInt>(buf.size() - 4));
  put32(buf, static_cast<std::uint32_t>(crc));
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace

void write_png(const std::filesystem::path& path, int width, int height,
               const std::vector<Rgb>& pixels) {
  if (width < 1 || height < 1) throw ValidationError("png: size must be positive");
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ValidationError("png: pixel count does not match size");

  // Filter byte 0 (none) before every scanline.
  std::string raw;
  raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * static_cast<std::size_t>(width)));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    for (int x = 0; x < width; ++x) {
      const Rgb& p = pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                            static_cast<std::size_t>(x)];
      raw.push_back(static_cast<char>(p.r));
      raw.push_back(static_cast<char>(p.g));
      raw.push_back(static_cast<char>(p.b));
    }
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(packed_size, '\0');
  if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_size,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                Z_BEST_COMPRESSION) != Z_OK)
    throw IoError("png: deflate failed");
  packed.resize(packed_size);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  static const char signature[] = {'\x89', 'P', 'N', 'G', '\r', '\n', '\x1a', '\n'};
  f.write(signature, sizeof signature);
  std::string ihdr;
  put32(ihdr, static_cast<std::uint32_t>(width));
  put32(ihdr, static_cast<std::uint32_t>(height));
  ihdr += std::string{'\x08', '\x02', '\x00', '\x00', '\x00'};  // 8-bit RGB
  chunk(f, "IHDR", ihdr);
  chunk(f, "IDAT", packed);
  chunk(f, "IEND", "");
  if (!f) throw IoError("write failed: " + path.string());
}

Rgb class_color(Label label, Label dummy) {
  if (label == dummy) return {0, 0, 0};
  static const std::array<Rgb, 12> palette = {{{31, 119, 180},
                                               {255, 127, 14},
                                               {44, 160, 44},
                                               {214, 39, 40},
                                               {148, 103, 189},
                                               {140, 86, 75},
                                               {227, 119, 194},
                                               {127, 127, 127},
                                               {188, 189, 34},
                                               {23, 190, 207},
                                               {174, 199, 232},
                                               {255, 187, 120}}};
  return palette[static_cast<std::size_t>(label) % palette.size()];
}

}  // namespace openrect
