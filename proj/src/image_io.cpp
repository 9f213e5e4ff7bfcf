#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "nfr/image.hpp"

namespace nfr {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(0, out.data() + crc_start, static_cast<uInt>(4 + payload.size())));
  put_u32(out, crc);
}

std::vector<std::uint8_t> zlib_compress(const std::vector<std::uint8_t>& in) {
  uLongf bound = ::compressBound(static_cast<uLong>(in.size()));
  std::vector<std::uint8_t> out(bound);
  if (::compress2(out.data(), &bound, in.data(),
                  static_cast<uLong>(in.size()), 6) != Z_OK) {
    throw IntegrityError("png: zlib compression failed");
  }
  out.resize(bound);
  return out;
}

std::vector<std::uint8_t> zlib_decompress(const std::uint8_t* data,
                                          std::size_t size,
                                          std::size_t expected) {
  std::vector<std::uint8_t> out(expected);
  uLongf out_size = static_cast<uLongf>(expected);
  int rc = ::uncompress(out.data(), &out_size, data,
                        static_cast<uLong>(size));
  if (rc != Z_OK || out_size != expected) {
    throw IntegrityError("png: corrupt compressed stream");
  }
  return out;
}

std::uint8_t quantize(float x) {
  float v = x < 0.0f ? 0.0f : (x > 1.0f ? 1.0f : x);
  return static_cast<std::uint8_t>(std::lround(v * 255.0f));
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G',
                                           '\r', '\n', 0x1a, '\n'};

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageRgb& image) {
  const int w = image.width(), h = image.height();
  if (w < 1 || h < 1) throw UsageError("encode_png: empty image");

  // Filter type 0 on every scanline; zlib does the heavy lifting.
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(h) * (1 + 3 * w));
  for (int v = 0; v < h; ++v) {
    raw.push_back(0);
    for (int u = 0; u < w; ++u) {
      raw.push_back(quantize(image.r(v, u)));
      raw.push_back(quantize(image.g(v, u)));
      raw.push_back(quantize(image.b(v, u)));
    }
  }

  std::vector<std::uint8_t> png(kPngSignature, kPngSignature + 8);
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w));
  put_u32(ihdr, static_cast<std::uint32_t>(h));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", zlib_compress(raw));
  append_chunk(png, "IEND", {});
  return png;
}

void write_png(const std::string& path, const ImageRgb& image) {
  auto bytes = encode_png(image);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IntegrityError("write_png: cannot open '" + path + "'");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IntegrityError("write_png: short write to '" + path + "'");
}

ImageRgb decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 + 25 ||
      std::memcmp(bytes.data(), kPngSignature, 8) != 0) {
    throw IntegrityError("png: bad signature");
  }
  std::size_t pos = 8;
  int w = 0, h = 0, bit_depth = 0, color_type = 0;
  std::vector<std::uint8_t> idat;
  bool saw_ihdr = false, saw_iend = false;
  while (pos + 12 <= bytes.size()) {
    std::uint32_t len = get_u32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) {
      throw IntegrityError("png: truncated chunk");
    }
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const std::uint8_t* payload = &bytes[pos + 8];
    std::uint32_t expect_crc = get_u32(&bytes[pos + 8 + len]);
    std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0, &bytes[pos + 4], static_cast<uInt>(4 + len)));
    if (crc != expect_crc) throw IntegrityError("png: chunk crc mismatch");

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw IntegrityError("png: bad IHDR");
      w = static_cast<int>(get_u32(payload));
      h = static_cast<int>(get_u32(payload + 4));
      bit_depth = payload[8];
      color_type = payload[9];
      if (payload[10] != 0 || payload[11] != 0 || payload[12] != 0) {
        throw IntegrityError("png: unsupported compression/filter/interlace");
      }
      if (bit_depth != 8 ||
          (color_type != 0 && color_type != 2 && color_type != 6)) {
        throw IntegrityError("png: only 8-bit gray/RGB/RGBA supported");
      }
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), payload, payload + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
      break;
    }
    pos += 12 + len;
  }
  if (!saw_ihdr || !saw_iend || idat.empty() || w < 1 || h < 1) {
    throw IntegrityError("png: missing chunks");
  }

  const int channels = color_type == 0 ? 1 : (color_type == 2 ? 3 : 4);
  const std::size_t stride = static_cast<std::size_t>(w) * channels;
  std::vector<std::uint8_t> raw = zlib_decompress(
      idat.data(), idat.size(), static_cast<std::size_t>(h) * (stride + 1));

  // Undo per-scanline filters in place.
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(h) * stride);
  for (int v = 0; v < h; ++v) {
    const std::uint8_t* src = &raw[static_cast<std::size_t>(v) * (stride + 1)];
    std::uint8_t filter = src[0];
    const std::uint8_t* line = src + 1;
    std::uint8_t* dst = &pixels[static_cast<std::size_t>(v) * stride];
    const std::uint8_t* prev =
        v > 0 ? &pixels[static_cast<std::size_t>(v - 1) * stride] : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      int a = i >= static_cast<std::size_t>(channels) ? dst[i - channels] : 0;
      int b = prev ? prev[i] : 0;
      int c = (prev && i >= static_cast<std::size_t>(channels))
                  ? prev[i - channels]
                  : 0;
      int x = line[i];
      switch (filter) {
        case 0: break;
        case 1: x += a; break;
        case 2: x += b; break;
        case 3: x += (a + b) / 2; break;
        case 4: x += paeth(a, b, c); break;
        default: throw IntegrityError("png: unknown scanline filter");
      }
      dst[i] = static_cast<std::uint8_t>(x & 0xff);
    }
  }

  ImageRgb image(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::uint8_t* px =
          &pixels[(static_cast<std::size_t>(v) * w + u) * channels];
      float r, g, b;
      if (channels == 1) {
        r = g = b = px[0] / 255.0f;
      } else {
        r = px[0] / 255.0f;
        g = px[1] / 255.0f;
        b = px[2] / 255.0f;
      }
      image.set_pixel(u, v, r, g, b);
    }
  }
  return image;
}

ImageRgb read_png(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IntegrityError("read_png: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

void write_pfm(const std::string& path, const ScalarMap& map) {
  const int w = static_cast<int>(map.cols());
  const int h = static_cast<int>(map.rows());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IntegrityError("write_pfm: cannot open '" + path + "'");
  f << "Pf\n" << w << " " << h << "\n-1.0\n";  // -1: little-endian
  // PFM stores scanlines bottom to top.
  for (int v = h - 1; v >= 0; --v) {
    for (int u = 0; u < w; ++u) {
      float x = map(v, u);
      f.write(reinterpret_cast<const char*>(&x), sizeof(float));
    }
  }
  if (!f) throw IntegrityError("write_pfm: short write to '" + path + "'");
}

ScalarMap read_pfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IntegrityError("read_pfm: cannot open '" + path + "'");
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  f >> magic >> w >> h >> scale;
  if (magic != "Pf" || w < 1 || h < 1 || scale >= 0.0) {
    throw IntegrityError("read_pfm: unsupported header in '" + path + "'");
  }
  f.get();  // single whitespace after the scale
  ScalarMap map(h, w);
  for (int v = h - 1; v >= 0; --v) {
    for (int u = 0; u < w; ++u) {
      float x = 0.0f;
      f.read(reinterpret_cast<char*>(&x), sizeof(float));
      map(v, u) = x;
    }
  }
  if (!f) throw IntegrityError("read_pfm: truncated data in '" + path + "'");
  return map;
}

}  // namespace nfr
