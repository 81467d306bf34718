#pragma once

// Equirectangular conventions and the value types shared by every module.
//
// Pixel (c, r) has its center at (c + 0.5, r + 0.5). Longitude grows with
// the column and is 0 at the image center, which faces +z. Latitude is
// positive above the horizon; row 0 is on the zenith side. +y is up.

#include <array>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "panomix/error.hpp"

namespace panomix {

using Color = std::array<double, 3>;
using Label = std::uint8_t;

inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Angles
// ---------------------------------------------------------------------------

/// Longitude in (-pi, pi] of real column `col` for an image `width` wide.
inline double col_to_lon(double col, int width) {
  return 2.0 * kPi * (col + 0.5) / width - kPi;
}

inline double lon_to_col(double lon, int width) {
  return (lon + kPi) * width / (2.0 * kPi) - 0.5;
}

/// Latitude in (-pi/2, pi/2) of real row `row` for an image `height` tall.
inline double row_to_lat(double row, int height) {
  return kPi / 2.0 - kPi * (row + 0.5) / height;
}

inline double lat_to_row(double lat, int height) {
  return (kPi / 2.0 - lat) * height / kPi - 0.5;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Unit viewing direction for (lon, lat): (cos v sin u, sin v, cos v cos u).
Vec3 direction(double lon, double lat);

/// Wraps a real column into [0, width).
double wrap_column(double col, int width);

/// Integer modulo with a non-negative result.
inline int wrap_index(int index, int size) {
  const int m = index % size;
  return m < 0 ? m + size : m;
}

int round_half_up(double value);

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

/// H x W RGB equirectangular image with channels in [0, 1]. W must equal 2H.
class Panorama {
 public:
  Panorama() = default;
  Panorama(int height, int width, Color fill = {0.0, 0.0, 0.0});

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }

  const Color& at(int row, int col) const {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  Color& at(int row, int col) {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }

  std::span<const Color> pixels() const noexcept { return pixels_; }
  std::span<Color> pixels() noexcept { return pixels_; }

  bool operator==(const Panorama&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Color> pixels_;
};

/// H x W class-index image. Index form of a one-hot mask: every pixel holds
/// exactly one class, so mixed labels cannot be represented.
class SemanticMask {
 public:
  SemanticMask() = default;
  SemanticMask(int height, int width, std::vector<std::string> class_names,
               Label fill = 0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int class_count() const noexcept {
    return static_cast<int>(class_names_.size());
  }
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }

  Label at(int row, int col) const {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  Label& at(int row, int col) {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }

  std::span<const Label> labels() const noexcept { return labels_; }
  std::span<Label> labels() noexcept { return labels_; }

  /// Index of `name` in the vocabulary, or -1.
  int find_class(const std::string& name) const;

  /// Sorted set of labels that actually occur.
  std::vector<Label> present_labels() const;

  bool operator==(const SemanticMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::string> class_names_;
  std::vector<Label> labels_;
};

/// One wall-wall junction: its column plus the ceiling and floor rows.
struct Corner {
  double column = 0.0;
  double ceil_row = 0.0;
  double floor_row = 0.0;

  bool operator==(const Corner&) const = default;
};

/// Room layout as T corners sorted by column in [0, W). Wall i runs from
/// corner i to corner (i + 1) mod T.
struct Layout {
  std::vector<Corner> corners;

  std::size_t size() const noexcept { return corners.size(); }
  bool operator==(const Layout&) const = default;
};

struct Sample {
  Panorama image;
  SemanticMask mask;
  Layout layout;

  int height() const noexcept { return image.height(); }
  int width() const noexcept { return image.width(); }
};

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

/// Bilinear lookup; x wraps around the seam, y clamps to [0, H-1].
Color sample_bilinear(const Panorama& image, double x, double y);

/// Round-half-up nearest lookup with the same wrap/clamp rules.
Label sample_nearest(const SemanticMask& mask, double x, double y);

/// Bilinear lookup restricted to the taps that share the nearest tap's
/// label, so colors never bleed across a class edge. Returns the color and
/// that label.
std::pair<Color, Label> sample_class_consistent(const Panorama& image,
                                                const SemanticMask& mask,
                                                double x, double y);

/// Same, but restricted to taps carrying `label`. Falls back to plain
/// bilinear when no tap does.
Color sample_class_consistent(const Panorama& image, const SemanticMask& mask,
                              double x, double y, Label label);

// ---------------------------------------------------------------------------
// Whole-sample transforms and checks
// ---------------------------------------------------------------------------

/// Output column c holds input column (c - k) mod W; corners move by +k.
Sample roll_columns(const Sample& sample, int k);

/// Horizontal mirror; longitude u maps to -u.
Sample flip_columns(const Sample& sample);

Layout sorted_layout(std::vector<Corner> corners);

/// Empty iff the sample satisfies every structural invariant, including a
/// ceiling height that agrees across corners within 2%.
std::vector<std::string> validate_sample(const Sample& sample);

/// Layout-only subset of the above.
std::vector<std::string> validate_layout(const Layout& layout, int height,
                                         int width);

}  // namespace panomix
