#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nfr/errors.hpp"

namespace nfr {

// Planar float RGB image in [0,1]; channel arrays are (height x width),
// indexed (row = y = v, col = x = u).
struct ImageRgb {
  Eigen::ArrayXXf r, g, b;

  ImageRgb() = default;
  ImageRgb(int width, int height)
      : r(Eigen::ArrayXXf::Zero(height, width)),
        g(Eigen::ArrayXXf::Zero(height, width)),
        b(Eigen::ArrayXXf::Zero(height, width)) {}

  int width() const { return static_cast<int>(r.cols()); }
  int height() const { return static_cast<int>(r.rows()); }

  const Eigen::ArrayXXf& channel(int c) const {
    return c == 0 ? r : (c == 1 ? g : b);
  }
  Eigen::ArrayXXf& channel(int c) { return c == 0 ? r : (c == 1 ? g : b); }

  Eigen::Vector3f pixel(int u, int v) const {
    return {r(v, u), g(v, u), b(v, u)};
  }
  void set_pixel(int u, int v, float red, float green, float blue) {
    r(v, u) = red;
    g(v, u) = green;
    b(v, u) = blue;
  }

  ImageRgb clamped() const {
    ImageRgb out = *this;
    out.r = out.r.cwiseMax(0.0f).cwiseMin(1.0f);
    out.g = out.g.cwiseMax(0.0f).cwiseMin(1.0f);
    out.b = out.b.cwiseMax(0.0f).cwiseMin(1.0f);
    return out;
  }
};

// Single-channel float map (depth, distance), same (row = v, col = u)
// indexing as ImageRgb.
using ScalarMap = Eigen::ArrayXXf;

// --- PNG (8-bit, via zlib) --------------------------------------------------

// Encodes [0,1] floats to 8-bit RGB with round-to-nearest. Deterministic.
std::vector<std::uint8_t> encode_png(const ImageRgb& image);
void write_png(const std::string& path, const ImageRgb& image);

// Accepts 8-bit gray/RGB/RGBA non-interlaced PNGs; alpha is dropped.
ImageRgb decode_png(const std::vector<std::uint8_t>& bytes);
ImageRgb read_png(const std::string& path);

// --- PFM (32-bit float grayscale, little-endian) -----------------------------

void write_pfm(const std::string& path, const ScalarMap& map);
ScalarMap read_pfm(const std::string& path);

}  // namespace nfr
