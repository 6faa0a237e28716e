#include "heartid/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "heartid/errors.hpp"

namespace heartid {

namespace {

std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t crc = 0) {
  static std::uint32_t table[256];
  static bool init = false;
  if (!init) {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      table[i] = c;
    }
    init = true;
  }
  crc ^= 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

std::uint32_t adler32(const std::uint8_t* data, std::size_t len) {
  std::uint32_t a = 1, b = 0;
  for (std::size_t i = 0; i < len; ++i) {
    a = (a + data[i]) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 24));
  v.push_back(static_cast<std::uint8_t>(x >> 16));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[5],
                  const std::vector<std::uint8_t>& payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  std::vector<std::uint8_t> body;
  body.insert(body.end(), type, type + 4);
  body.insert(body.end(), payload.begin(), payload.end());
  out.insert(out.end(), body.begin(), body.end());
  put_u32(out, crc32(body.data(), body.size()));
}

// zlib stream with stored deflate blocks (max 65535 bytes each)
std::vector<std::uint8_t> zlib_stored(const std::vector<std::uint8_t>& raw) {
  std::vector<std::uint8_t> z;
  z.push_back(0x78);
  z.push_back(0x01);
  std::size_t pos = 0;
  do {
    std::size_t chunk = std::min<std::size_t>(65535, raw.size() - pos);
    bool final = (pos + chunk == raw.size());
    z.push_back(final ? 1 : 0);
    z.push_back(static_cast<std::uint8_t>(chunk & 0xff));
    z.push_back(static_cast<std::uint8_t>(chunk >> 8));
    z.push_back(static_cast<std::uint8_t>(~chunk & 0xff));
    z.push_back(static_cast<std::uint8_t>((~chunk >> 8) & 0xff));
    z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + chunk);
    pos += chunk;
  } while (pos < raw.size());
  std::uint32_t ad = adler32(raw.data(), raw.size());
  put_u32(z, ad);
  return z;
}

}  // namespace

void write_png_gray(const std::string& path, const Scalogram& image) {
  if (image.height == 0 || image.width == 0)
    throw DataError("png: empty image");

  std::vector<std::uint8_t> raw;
  raw.reserve(image.height * (image.width + 1));
  for (std::size_t r = 0; r < image.height; ++r) {
    raw.push_back(0);  // filter type none
    std::size_t src_row = image.height - 1 - r;  // low frequency at bottom
    for (std::size_t c = 0; c < image.width; ++c) {
      double v = std::clamp(image.at(src_row, c), 0.0, 1.0);
      raw.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
  }

  std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(image.width));
  put_u32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", zlib_stored(raw));
  append_chunk(png, "IEND", {});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write png: " + path);
  out.write(reinterpret_cast<const char*>(png.data()),
            static_cast<std::streamsize>(png.size()));
}

}  // namespace heartid
