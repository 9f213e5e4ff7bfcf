#pragma once

#include "nfr/image.hpp"

namespace nfr {

// Mean squared error over all pixels and channels, computed in double.
double mse(const ImageRgb& a, const ImageRgb& b);

// -10 log10(MSE) for [0,1] images, capped at 99 dB for (near-)identical
// inputs.
double psnr(const ImageRgb& a, const ImageRgb& b);

// Structural similarity: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, dynamic range 1, statistics over the fully-covered interior
// (the classic formulation), averaged over channels. Images must be at
// least 11x11.
double ssim(const ImageRgb& a, const ImageRgb& b);

}  // namespace nfr
