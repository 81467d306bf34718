#include "panomix/layout_geom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace panomix {

namespace {

inline double cross(PlanPoint a, PlanPoint b) { return a.x * b.z - a.z * b.x; }

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void require_factor(double k, const char* name) {
  if (!std::isfinite(k) || k <= 0.0) {
    std::ostringstream msg;
    msg << "stretch factor " << name << " must be positive, got " << k;
    throw Error(ErrorCode::invalid_factor, msg.str());
  }
}

}  // namespace

std::size_t PlanModel::wall_at(double lon) const {
  const auto it = std::upper_bound(azimuths.begin(), azimuths.end(), lon);
  if (it == azimuths.begin()) return azimuths.size() - 1;
  return static_cast<std::size_t>(it - azimuths.begin()) - 1;
}

PlanModel layout_to_plan(const Layout& layout, int height, int width) {
  const std::size_t count = layout.size();
  if (count < 3) {
    throw Error(ErrorCode::degenerate_layout,
                "layout needs at least 3 corners, got " + std::to_string(count));
  }

  PlanModel plan;
  std::vector<double> heights;
  for (std::size_t i = 0; i < count; ++i) {
    const Corner& c = layout.corners[i];
    const double lon = col_to_lon(c.column, width);
    const double floor_lat = row_to_lat(c.floor_row, height);
    const double ceil_lat = row_to_lat(c.ceil_row, height);
    if (!(floor_lat < 0.0) || !(ceil_lat > 0.0)) {
      throw Error(ErrorCode::degenerate_layout,
                  "corner " + std::to_string(i) +
                      " does not straddle the horizon (floor row must be "
                      "below it, ceiling row above it)");
    }
    const double dist = 1.0 / std::tan(-floor_lat);
    plan.corners.push_back({dist * std::sin(lon), dist * std::cos(lon)});
    plan.azimuths.push_back(lon);
    heights.push_back(dist * std::tan(ceil_lat));
  }

  plan.ceiling_height = median_of(heights);
  const auto [lo, hi] = std::minmax_element(heights.begin(), heights.end());
  if ((*hi - *lo) / plan.ceiling_height > 0.05) {
    std::ostringstream msg;
    msg << "per-corner ceiling heights disagree: min " << *lo << ", max "
        << *hi << ", median " << plan.ceiling_height;
    throw Error(ErrorCode::inconsistent_layout, msg.str());
  }

  for (std::size_t i = 0; i < count; ++i) {
    double span = (i + 1 < count ? plan.azimuths[i + 1]
                                 : plan.azimuths[0] + 2.0 * kPi) -
                  plan.azimuths[i];
    if (!(span > 0.0) || !(span < kPi)) {
      std::ostringstream msg;
      msg << "wall " << i << " spans " << span
          << " rad of azimuth; walls must be seen within (0, pi)";
      throw Error(ErrorCode::unsupported_layout, msg.str());
    }
  }
  return plan;
}

double wall_distance(const PlanModel& plan, std::size_t wall, double lon) {
  const PlanPoint p = plan.wall_start(wall);
  const PlanPoint q = plan.wall_end(wall);
  const PlanPoint e{q.x - p.x, q.z - p.z};
  const PlanPoint d{std::sin(lon), std::cos(lon)};
  const double denom = cross(d, e);
  if (std::abs(denom) < 1e-15) {
    throw Error(ErrorCode::unsupported_layout,
                "view ray parallel to wall " + std::to_string(wall));
  }
  const double t = cross(p, e) / denom;
  const double s = cross(d, p) / cross(e, d);
  if (!(t > 0.0) || s < -1e-6 || s > 1.0 + 1e-6) {
    std::ostringstream msg;
    msg << "view ray at azimuth " << lon << " misses wall " << wall
        << " (s = " << s << ", t = " << t << ")";
    throw Error(ErrorCode::unsupported_layout, msg.str());
  }
  return t;
}

BoundaryRows boundary_at(const PlanModel& plan, double lon, int height) {
  const double dist = wall_distance(plan, plan.wall_at(lon), lon);
  return {lat_to_row(std::atan(plan.ceiling_height / dist), height),
          lat_to_row(-std::atan(1.0 / dist), height)};
}

BoundaryMap plan_to_boundaries(const PlanModel& plan, int height, int width) {
  BoundaryMap map;
  map.height = height;
  map.ceil_rows.resize(width);
  map.floor_rows.resize(width);
  for (int c = 0; c < width; ++c) {
    const BoundaryRows rows = boundary_at(plan, col_to_lon(c, width), height);
    map.ceil_rows[c] = rows.ceil_row;
    map.floor_rows[c] = rows.floor_row;
  }
  return map;
}

PixelCoord project_corner(PlanPoint point, double height, int image_height,
                          int image_width) {
  const double range = std::hypot(point.x, point.z);
  if (!(range > 1e-12)) {
    throw Error(ErrorCode::degenerate_point,
                "cannot project a point at the camera's plan position");
  }
  const double lon = std::atan2(point.x, point.z);
  const double lat = std::atan(height / range);
  return {wrap_column(lon_to_col(lon, image_width), image_width),
          lat_to_row(lat, image_height)};
}

std::vector<int> group_boundaries(const Layout& layout, int width) {
  std::vector<int> bounds;
  bounds.reserve(layout.size());
  for (const Corner& c : layout.corners) {
    bounds.push_back(std::clamp(round_half_up(c.column), 0, width));
  }
  return bounds;
}

namespace {

// Rounded boundaries shifted so that corner 0 sits at 0, plus the roll.
struct RolledBounds {
  int roll = 0;
  std::vector<int> starts;  // size T + 1, last == width
};

RolledBounds rolled_bounds(const Layout& layout, int width) {
  if (layout.size() < 3) {
    throw Error(ErrorCode::degenerate_layout,
                "layout needs at least 3 corners to split into walls");
  }
  const std::vector<int> bounds = group_boundaries(layout, width);
  RolledBounds rb;
  rb.roll = -bounds.front();
  for (int b : bounds) rb.starts.push_back(b - bounds.front());
  rb.starts.push_back(width);
  for (std::size_t i = 0; i + 1 < rb.starts.size(); ++i) {
    if (rb.starts[i + 1] <= rb.starts[i]) {
      throw Error(ErrorCode::degenerate_wall,
                  "corners " + std::to_string(i) + " and " +
                      std::to_string((i + 1) % layout.size()) +
                      " round to the same column");
    }
  }
  return rb;
}

}  // namespace

std::vector<int> wall_of_columns(const Layout& layout, int width) {
  const RolledBounds rb = rolled_bounds(layout, width);
  std::vector<int> walls(width);
  for (std::size_t wall = 0; wall + 1 < rb.starts.size(); ++wall) {
    for (int c = rb.starts[wall]; c < rb.starts[wall + 1]; ++c) {
      walls[wrap_index(c - rb.roll, width)] = static_cast<int>(wall);
    }
  }
  return walls;
}

ColumnGrouping split_column_groups(const Sample& sample) {
  const int width = sample.width();
  const RolledBounds rb = rolled_bounds(sample.layout, width);
  ColumnGrouping out;
  out.roll = rb.roll;
  out.rolled = roll_columns(sample, rb.roll);
  for (std::size_t wall = 0; wall + 1 < rb.starts.size(); ++wall) {
    out.groups.push_back(
        {static_cast<int>(wall), rb.starts[wall], rb.starts[wall + 1]});
  }
  return out;
}

SphericalDir panostretch_dir(double lon, double lat, double kx, double kz) {
  require_factor(kx, "kx");
  require_factor(kz, "kz");
  const double su = std::sin(lon);
  const double cu = std::cos(lon);
  const double scale = std::hypot(kx * su, kz * cu);
  return {std::atan2(kx * su, kz * cu), std::atan(std::tan(lat) / scale)};
}

Layout panostretch_layout(const Layout& layout, int height, int width,
                          double kx, double kz) {
  std::vector<Corner> corners;
  corners.reserve(layout.size());
  for (const Corner& c : layout.corners) {
    const double lon = col_to_lon(c.column, width);
    const SphericalDir ceil =
        panostretch_dir(lon, row_to_lat(c.ceil_row, height), kx, kz);
    const SphericalDir floor =
        panostretch_dir(lon, row_to_lat(c.floor_row, height), kx, kz);
    corners.push_back({wrap_column(lon_to_col(ceil.lon, width), width),
                       lat_to_row(ceil.lat, height),
                       lat_to_row(floor.lat, height)});
  }
  return sorted_layout(std::move(corners));
}

Sample panostretch_image(const Sample& sample, double kx, double kz) {
  require_factor(kx, "kx");
  require_factor(kz, "kz");
  const int h = sample.height();
  const int w = sample.width();
  Sample out{Panorama(h, w), SemanticMask(h, w, sample.mask.class_names()),
             panostretch_layout(sample.layout, h, w, kx, kz)};

  // Backward map: a destination direction came from the source direction
  // obtained by undoing the scaling. The longitude map and the tan(lat)
  // divisor depend on the column only.
  const double inv_kx = 1.0 / kx;
  const double inv_kz = 1.0 / kz;
  for (int c = 0; c < w; ++c) {
    const double lon = col_to_lon(c, w);
    const double su = std::sin(lon);
    const double cu = std::cos(lon);
    const double src_lon = std::atan2(inv_kx * su, inv_kz * cu);
    const double scale = std::hypot(inv_kx * su, inv_kz * cu);
    const double src_col = lon_to_col(src_lon, w);
    for (int r = 0; r < h; ++r) {
      const double src_lat = std::atan(std::tan(row_to_lat(r, h)) / scale);
      const double src_row = lat_to_row(src_lat, h);
      out.image.at(r, c) = sample_bilinear(sample.image, src_col, src_row);
      out.mask.at(r, c) = sample_nearest(sample.mask, src_col, src_row);
    }
  }
  return out;
}

}  // namespace panomix
