#include "nfr/metrics.hpp"

#include <cmath>

namespace nfr {

namespace {

void require_same_size(const char* op, const ImageRgb& a, const ImageRgb& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw UsageError(std::string(op) + ": image sizes differ");
  }
  if (a.width() < 1) throw UsageError(std::string(op) + ": empty image");
}

Eigen::VectorXd gaussian_kernel(int radius, double sigma) {
  Eigen::VectorXd k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) {
    k(i + radius) = std::exp(-0.5 * (i * i) / (sigma * sigma));
  }
  return k / k.sum();
}

// Separable valid-region convolution: output is (h-2r) x (w-2r).
Eigen::ArrayXXd filter_valid(const Eigen::ArrayXXd& img,
                             const Eigen::VectorXd& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  Eigen::ArrayXXd rows(h, w - 2 * r);
  for (int x = 0; x < w - 2 * r; ++x) {
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(h);
    for (int k = 0; k < 2 * r + 1; ++k) {
      acc += kernel(k) * img.col(x + k);
    }
    rows.col(x) = acc;
  }
  Eigen::ArrayXXd out(h - 2 * r, w - 2 * r);
  for (int y = 0; y < h - 2 * r; ++y) {
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(w - 2 * r);
    for (int k = 0; k < 2 * r + 1; ++k) {
      acc += kernel(k) * rows.row(y + k).transpose();
    }
    out.row(y) = acc.transpose();
  }
  return out;
}

double ssim_channel(const Eigen::ArrayXXd& x, const Eigen::ArrayXXd& y) {
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  Eigen::VectorXd kernel = gaussian_kernel(5, 1.5);

  Eigen::ArrayXXd mu_x = filter_valid(x, kernel);
  Eigen::ArrayXXd mu_y = filter_valid(y, kernel);
  Eigen::ArrayXXd var_x = filter_valid(x * x, kernel) - mu_x * mu_x;
  Eigen::ArrayXXd var_y = filter_valid(y * y, kernel) - mu_y * mu_y;
  Eigen::ArrayXXd cov = filter_valid(x * y, kernel) - mu_x * mu_y;

  Eigen::ArrayXXd num =
      (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2);
  Eigen::ArrayXXd den =
      (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2);
  return (num / den).mean();
}

}  // namespace

double mse(const ImageRgb& a, const ImageRgb& b) {
  require_same_size("mse", a, b);
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    acc += (a.channel(c).cast<double>() - b.channel(c).cast<double>())
               .square()
               .sum();
  }
  return acc / (3.0 * a.width() * a.height());
}

double psnr(const ImageRgb& a, const ImageRgb& b) {
  double err = mse(a, b);
  if (err < 1e-12) return 99.0;
  return std::min(99.0, -10.0 * std::log10(err));
}

double ssim(const ImageRgb& a, const ImageRgb& b) {
  require_same_size("ssim", a, b);
  if (a.width() < 11 || a.height() < 11) {
    throw UsageError("ssim: images must be at least 11x11");
  }
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    acc += ssim_channel(a.channel(c).cast<double>(),
                        b.channel(c).cast<double>());
  }
  return acc / 3.0;
}

}  // namespace nfr
