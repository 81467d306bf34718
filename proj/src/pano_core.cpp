#include "panomix/pano_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace panomix {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_coordinate: return "invalid_coordinate";
    case ErrorCode::degenerate_layout: return "degenerate_layout";
    case ErrorCode::inconsistent_layout: return "inconsistent_layout";
    case ErrorCode::unsupported_layout: return "unsupported_layout";
    case ErrorCode::degenerate_point: return "degenerate_point";
    case ErrorCode::degenerate_wall: return "degenerate_wall";
    case ErrorCode::degenerate_boundary: return "degenerate_boundary";
    case ErrorCode::invalid_factor: return "invalid_factor";
    case ErrorCode::geometry: return "geometry";
    case ErrorCode::incompatible_samples: return "incompatible_samples";
    case ErrorCode::empty_style_region: return "empty_style_region";
    case ErrorCode::config: return "config";
    case ErrorCode::empty_dataset: return "empty_dataset";
    case ErrorCode::parse: return "parse";
    case ErrorCode::load: return "load";
    case ErrorCode::adapter: return "adapter";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Vec3 direction(double lon, double lat) {
  const double cv = std::cos(lat);
  return {cv * std::sin(lon), std::sin(lat), cv * std::cos(lon)};
}

double wrap_column(double col, int width) {
  double c = std::fmod(col, static_cast<double>(width));
  if (c < 0.0) c += width;
  // fmod of a tiny negative value can round up to exactly `width`.
  if (c >= width) c -= width;
  return c;
}

int round_half_up(double value) {
  return static_cast<int>(std::floor(value + 0.5));
}

Panorama::Panorama(int height, int width, Color fill)
    : height_(height), width_(width) {
  if (height < 8 || width != 2 * height) {
    std::ostringstream msg;
    msg << "panorama must be W = 2H with H >= 8, got " << height << "x"
        << width;
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  pixels_.assign(static_cast<std::size_t>(height) * width, fill);
}

SemanticMask::SemanticMask(int height, int width,
                           std::vector<std::string> class_names, Label fill)
    : height_(height), width_(width), class_names_(std::move(class_names)) {
  if (height < 8 || width != 2 * height) {
    std::ostringstream msg;
    msg << "mask must be W = 2H with H >= 8, got " << height << "x" << width;
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  if (class_names_.empty() || class_names_.size() > 255) {
    throw Error(ErrorCode::invalid_argument,
                "mask vocabulary must hold 1..255 classes");
  }
  labels_.assign(static_cast<std::size_t>(height) * width, fill);
}

int SemanticMask::find_class(const std::string& name) const {
  const auto it = std::find(class_names_.begin(), class_names_.end(), name);
  return it == class_names_.end()
             ? -1
             : static_cast<int>(it - class_names_.begin());
}

std::vector<Label> SemanticMask::present_labels() const {
  std::array<bool, 256> seen{};
  for (Label l : labels_) seen[l] = true;
  std::vector<Label> out;
  for (int i = 0; i < 256; ++i) {
    if (seen[i]) out.push_back(static_cast<Label>(i));
  }
  return out;
}

namespace {

void require_finite(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    std::ostringstream msg;
    msg << "non-finite sample coordinate (" << x << ", " << y << ")";
    throw Error(ErrorCode::invalid_coordinate, msg.str());
  }
}

// Four taps around (x, y) with wrap in x and clamp in y.
struct Taps {
  int x0, x1, y0, y1;
  double fx, fy;
};

Taps make_taps(int height, int width, double x, double y) {
  const double yc = std::clamp(y, 0.0, static_cast<double>(height - 1));
  const double xf = std::floor(x);
  const double yf = std::floor(yc);
  Taps t;
  t.fx = x - xf;
  t.fy = yc - yf;
  const long long xi = static_cast<long long>(xf);
  t.x0 = static_cast<int>(((xi % width) + width) % width);
  t.x1 = t.x0 + 1 == width ? 0 : t.x0 + 1;
  t.y0 = static_cast<int>(yf);
  t.y1 = std::min(t.y0 + 1, height - 1);
  return t;
}

// lerp form: exact when both ends are equal.
inline Color lerp(const Color& a, const Color& b, double t) {
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]),
          a[2] + t * (b[2] - a[2])};
}

}  // namespace

Color sample_bilinear(const Panorama& image, double x, double y) {
  require_finite(x, y);
  const Taps t = make_taps(image.height(), image.width(), x, y);
  const Color top = lerp(image.at(t.y0, t.x0), image.at(t.y0, t.x1), t.fx);
  const Color bottom = lerp(image.at(t.y1, t.x0), image.at(t.y1, t.x1), t.fx);
  return lerp(top, bottom, t.fy);
}

Label sample_nearest(const SemanticMask& mask, double x, double y) {
  require_finite(x, y);
  const double yc =
      std::clamp(y, 0.0, static_cast<double>(mask.height() - 1));
  const long long xi = static_cast<long long>(std::floor(x + 0.5));
  const int col = static_cast<int>(((xi % mask.width()) + mask.width()) %
                                   mask.width());
  const int row =
      std::min(static_cast<int>(std::floor(yc + 0.5)), mask.height() - 1);
  return mask.at(row, col);
}

Color sample_class_consistent(const Panorama& image, const SemanticMask& mask,
                              double x, double y, Label label) {
  require_finite(x, y);
  const Taps t = make_taps(image.height(), image.width(), x, y);
  const int xs[4] = {t.x0, t.x1, t.x0, t.x1};
  const int ys[4] = {t.y0, t.y0, t.y1, t.y1};
  const double ws[4] = {(1 - t.fx) * (1 - t.fy), t.fx * (1 - t.fy),
                        (1 - t.fx) * t.fy, t.fx * t.fy};

  // Accumulate relative to the first kept tap so a uniform neighbourhood
  // returns its color bit-exactly.
  const Color* base = nullptr;
  Color acc{0.0, 0.0, 0.0};
  double wsum = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (mask.at(ys[i], xs[i]) != label) continue;
    const Color& c = image.at(ys[i], xs[i]);
    if (base == nullptr) base = &c;
    for (int k = 0; k < 3; ++k) acc[k] += ws[i] * (c[k] - (*base)[k]);
    wsum += ws[i];
  }
  if (base == nullptr || wsum <= 0.0) return sample_bilinear(image, x, y);
  Color out;
  for (int k = 0; k < 3; ++k) out[k] = (*base)[k] + acc[k] / wsum;
  return out;
}

std::pair<Color, Label> sample_class_consistent(const Panorama& image,
                                                const SemanticMask& mask,
                                                double x, double y) {
  const Label label = sample_nearest(mask, x, y);
  // The nearest tap always carries the label with weight >= 1/4.
  return {sample_class_consistent(image, mask, x, y, label), label};
}

Layout sorted_layout(std::vector<Corner> corners) {
  std::stable_sort(corners.begin(), corners.end(),
                   [](const Corner& a, const Corner& b) {
                     return a.column < b.column;
                   });
  return Layout{std::move(corners)};
}

Sample roll_columns(const Sample& sample, int k) {
  const int w = sample.width();
  const int h = sample.height();
  const int shift = wrap_index(k, w);
  if (shift == 0) return sample;

  Sample out{Panorama(h, w),
             SemanticMask(h, w, sample.mask.class_names()), Layout{}};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int src = wrap_index(c - shift, w);
      out.image.at(r, c) = sample.image.at(r, src);
      out.mask.at(r, c) = sample.mask.at(r, src);
    }
  }
  std::vector<Corner> corners = sample.layout.corners;
  for (Corner& corner : corners) {
    corner.column = wrap_column(corner.column + shift, w);
  }
  out.layout = sorted_layout(std::move(corners));
  return out;
}

Sample flip_columns(const Sample& sample) {
  const int w = sample.width();
  const int h = sample.height();
  Sample out{Panorama(h, w),
             SemanticMask(h, w, sample.mask.class_names()), Layout{}};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      out.image.at(r, c) = sample.image.at(r, w - 1 - c);
      out.mask.at(r, c) = sample.mask.at(r, w - 1 - c);
    }
  }
  std::vector<Corner> corners = sample.layout.corners;
  for (Corner& corner : corners) {
    corner.column = wrap_column(w - 1 - corner.column, w);
  }
  out.layout = sorted_layout(std::move(corners));
  return out;
}

std::vector<std::string> validate_layout(const Layout& layout, int height,
                                         int width) {
  std::vector<std::string> issues;
  const auto& corners = layout.corners;
  if (corners.size() < 3) {
    issues.push_back("layout has " + std::to_string(corners.size()) +
                     " corners, need at least 3");
  }
  bool rows_ok = true;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Corner& c = corners[i];
    const std::string name = "corner " + std::to_string(i);
    if (!std::isfinite(c.column) || !std::isfinite(c.ceil_row) ||
        !std::isfinite(c.floor_row)) {
      issues.push_back(name + ": non-finite coordinate");
      rows_ok = false;
      continue;
    }
    if (c.column < 0.0 || c.column >= width) {
      issues.push_back(name + ": column outside [0, W)");
    }
    if (i > 0 && !(corners[i - 1].column < c.column)) {
      issues.push_back(name + ": columns not strictly increasing");
    }
    if (!(c.ceil_row >= 0.0 && c.ceil_row < c.floor_row &&
          c.floor_row < height)) {
      issues.push_back(name + ": need 0 <= ceil_row < floor_row < H");
      rows_ok = false;
      continue;
    }
    const double horizon = height / 2.0 - 0.5;
    if (!(c.ceil_row < horizon && c.floor_row > horizon)) {
      issues.push_back(name + ": ceiling and floor rows must straddle the horizon");
      rows_ok = false;
    }
  }

  // Per-corner ceiling height with the camera 1 unit above the floor.
  if (rows_ok && corners.size() >= 3) {
    std::vector<double> heights;
    for (const Corner& c : corners) {
      const double floor_lat = row_to_lat(c.floor_row, height);
      const double ceil_lat = row_to_lat(c.ceil_row, height);
      heights.push_back(std::tan(ceil_lat) / std::tan(-floor_lat));
    }
    std::vector<double> sorted = heights;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2]
                                : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    for (std::size_t i = 0; i < heights.size(); ++i) {
      const double rel = std::abs(heights[i] - median) / median;
      if (rel > 0.02) {
        std::ostringstream msg;
        msg << "corner " << i << ": ceiling height " << heights[i]
            << " deviates " << rel * 100.0 << "% from median " << median;
        issues.push_back(msg.str());
      }
    }
  }
  return issues;
}

std::vector<std::string> validate_sample(const Sample& sample) {
  std::vector<std::string> issues;
  const int h = sample.image.height();
  const int w = sample.image.width();
  if (h < 8 || w != 2 * h) {
    issues.push_back("image must be W = 2H with H >= 8");
    return issues;
  }
  if (sample.mask.height() != h || sample.mask.width() != w) {
    issues.push_back("mask dimensions differ from image");
    return issues;
  }

  std::size_t bad_pixels = 0;
  for (const Color& c : sample.image.pixels()) {
    for (double v : c) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        ++bad_pixels;
        break;
      }
    }
  }
  if (bad_pixels > 0) {
    issues.push_back(std::to_string(bad_pixels) +
                     " image pixels outside [0, 1]");
  }

  const int classes = sample.mask.class_count();
  std::size_t bad_labels = 0;
  for (Label l : sample.mask.labels()) {
    if (l >= classes) ++bad_labels;
  }
  if (bad_labels > 0) {
    issues.push_back(std::to_string(bad_labels) + " mask pixels hold a class >= " +
                     std::to_string(classes));
  }

  auto layout_issues = validate_layout(sample.layout, h, w);
  issues.insert(issues.end(), layout_issues.begin(), layout_issues.end());
  return issues;
}

}  // namespace panomix
