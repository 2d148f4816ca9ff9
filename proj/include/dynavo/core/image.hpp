// Row-major scalar image grid. Values are either intensities in [0,1] or
// depths in meters, where 0 or NaN marks a missing depth measurement.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace dynavo {

inline bool is_valid_depth(double d) { return std::isfinite(d) && d > 0.0; }

class Image2D {
 public:
  Image2D() = default;
  Image2D(int width, int height, double fill = 0.0)
      : width_(width), height_(height),
        values_(static_cast<size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("Image2D: non-positive size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return values_.empty(); }
  size_t size() const { return values_.size(); }

  double at(int x, int y) const { return values_[static_cast<size_t>(y) * width_ + x]; }
  double& at(int x, int y) { return values_[static_cast<size_t>(y) * width_ + x]; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  std::span<const double> data() const { return values_; }
  std::span<double> data() { return values_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

struct BilinearSample {
  double value;
  double dx;  // in-cell derivative of the interpolant wrt x
  double dy;
};

namespace detail {

// Corner indices and blend factors for subpixel (x, y); nullopt out of bounds.
struct CellRef {
  int x0, y0;
  double a, b;
};

inline std::optional<CellRef> locate_cell(const Image2D& img, double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0) || x > img.width() - 1 || y > img.height() - 1)
    return std::nullopt;
  int x0 = static_cast<int>(x);
  int y0 = static_cast<int>(y);
  if (x0 > img.width() - 2) x0 = img.width() - 2;
  if (y0 > img.height() - 2) y0 = img.height() - 2;
  if (img.width() == 1) x0 = 0;
  if (img.height() == 1) y0 = 0;
  return CellRef{x0, y0, x - x0, y - y0};
}

}  // namespace detail

// Plain bilinear interpolation; exact at integer coordinates.
inline std::optional<double> sample_bilinear(const Image2D& img, double x, double y) {
  auto c = detail::locate_cell(img, x, y);
  if (!c) return std::nullopt;
  if (img.width() == 1 || img.height() == 1) {
    // degenerate 1-wide strips fall back to nearest along the flat axis
    int xi = std::min(static_cast<int>(x + 0.5), img.width() - 1);
    int yi = std::min(static_cast<int>(y + 0.5), img.height() - 1);
    return img.at(xi, yi);
  }
  const double f00 = img.at(c->x0, c->y0), f10 = img.at(c->x0 + 1, c->y0);
  const double f01 = img.at(c->x0, c->y0 + 1), f11 = img.at(c->x0 + 1, c->y0 + 1);
  const double a = c->a, b = c->b;
  return (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
}

// Bilinear with the exact derivative of the interpolant inside the cell.
inline std::optional<BilinearSample> sample_bilinear_grad(const Image2D& img, double x, double y) {
  auto c = detail::locate_cell(img, x, y);
  if (!c || img.width() < 2 || img.height() < 2) return std::nullopt;
  const double f00 = img.at(c->x0, c->y0), f10 = img.at(c->x0 + 1, c->y0);
  const double f01 = img.at(c->x0, c->y0 + 1), f11 = img.at(c->x0 + 1, c->y0 + 1);
  const double a = c->a, b = c->b;
  BilinearSample s;
  s.value = (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
  s.dx = (1 - b) * (f10 - f00) + b * (f11 - f01);
  s.dy = (1 - a) * (f01 - f00) + a * (f11 - f10);
  return s;
}

// Depth-aware variants: any invalid corner invalidates the sample.
inline std::optional<double> sample_bilinear_depth(const Image2D& img, double x, double y) {
  auto c = detail::locate_cell(img, x, y);
  if (!c || img.width() < 2 || img.height() < 2) return std::nullopt;
  const double f00 = img.at(c->x0, c->y0), f10 = img.at(c->x0 + 1, c->y0);
  const double f01 = img.at(c->x0, c->y0 + 1), f11 = img.at(c->x0 + 1, c->y0 + 1);
  if (!is_valid_depth(f00) || !is_valid_depth(f10) || !is_valid_depth(f01) ||
      !is_valid_depth(f11))
    return std::nullopt;
  const double a = c->a, b = c->b;
  return (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
}

inline std::optional<BilinearSample> sample_bilinear_depth_grad(const Image2D& img,
                                                                double x, double y) {
  auto c = detail::locate_cell(img, x, y);
  if (!c || img.width() < 2 || img.height() < 2) return std::nullopt;
  const double f00 = img.at(c->x0, c->y0), f10 = img.at(c->x0 + 1, c->y0);
  const double f01 = img.at(c->x0, c->y0 + 1), f11 = img.at(c->x0 + 1, c->y0 + 1);
  if (!is_valid_depth(f00) || !is_valid_depth(f10) || !is_valid_depth(f01) ||
      !is_valid_depth(f11))
    return std::nullopt;
  const double a = c->a, b = c->b;
  BilinearSample s;
  s.value = (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
  s.dx = (1 - b) * (f10 - f00) + b * (f11 - f01);
  s.dy = (1 - a) * (f01 - f00) + a * (f11 - f10);
  return s;
}

// Central differences in the interior, one-sided at the borders.
inline std::pair<Image2D, Image2D> gradient(const Image2D& img) {
  const int w = img.width(), h = img.height();
  if (w < 3 || h < 3) throw std::invalid_argument("gradient: image smaller than 3x3");
  Image2D gx(w, h), gy(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x == 0)
        gx.at(x, y) = img.at(1, y) - img.at(0, y);
      else if (x == w - 1)
        gx.at(x, y) = img.at(w - 1, y) - img.at(w - 2, y);
      else
        gx.at(x, y) = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
      if (y == 0)
        gy.at(x, y) = img.at(x, 1) - img.at(x, 0);
      else if (y == h - 1)
        gy.at(x, y) = img.at(x, h - 1) - img.at(x, h - 2);
      else
        gy.at(x, y) = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
    }
  }
  return {std::move(gx), std::move(gy)};
}

// Binary image-sized grid, used for dynamic-object masks.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, uint8_t fill = 0)
      : width_(width), height_(height),
        bits_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return bits_.empty(); }

  uint8_t at(int x, int y) const { return bits_[static_cast<size_t>(y) * width_ + x]; }
  void set(int x, int y, uint8_t v = 1) { bits_[static_cast<size_t>(y) * width_ + x] = v; }

  bool test(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_ && at(x, y) != 0;
  }

  size_t count() const {
    size_t n = 0;
    for (uint8_t b : bits_) n += (b != 0);
    return n;
  }

  const std::vector<uint8_t>& bits() const { return bits_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> bits_;
};

}  // namespace dynavo
