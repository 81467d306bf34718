#pragma once

#include <vector>

#include "panomix/pano_core.hpp"

namespace panomix {

/// Point on the floor plan, camera at the origin. x is right, z is forward.
struct PlanPoint {
  double x = 0.0;
  double z = 0.0;
};

/// A layout lifted to 3D with the camera 1 unit above the floor.
///
/// Corners are ordered by increasing azimuth, so wall i spans the azimuth
/// range [azimuths[i], azimuths[i+1]) and the polygon is counter-clockwise
/// in (z, x). Every wall must subtend less than pi radians, which makes the
/// room star-shaped around the camera.
struct PlanModel {
  std::vector<PlanPoint> corners;
  std::vector<double> azimuths;
  double ceiling_height = 0.0;

  std::size_t wall_count() const noexcept { return corners.size(); }
  PlanPoint wall_start(std::size_t wall) const { return corners[wall]; }
  PlanPoint wall_end(std::size_t wall) const {
    return corners[(wall + 1) % corners.size()];
  }

  /// Wall whose azimuth range contains `lon`.
  std::size_t wall_at(double lon) const;
};

/// Ceiling-wall and floor-wall intersection rows for every column.
struct BoundaryMap {
  int height = 0;
  std::vector<double> ceil_rows;
  std::vector<double> floor_rows;
};

struct BoundaryRows {
  double ceil_row = 0.0;
  double floor_row = 0.0;
};

/// Contiguous column range of one wall in the rolled frame.
struct ColumnGroup {
  int wall_index = 0;
  int col_start = 0;
  int col_end = 0;  // exclusive

  int width() const noexcept { return col_end - col_start; }
};

/// Result of split_column_groups. `rolled` is the input rolled by `roll`
/// columns so that corner 0's group starts at column 0; rolling by -roll
/// restores the original. Group ranges index into `rolled`. Wall indices
/// refer to the original sorted layout.
struct ColumnGrouping {
  int roll = 0;
  Sample rolled;
  std::vector<ColumnGroup> groups;
};

PlanModel layout_to_plan(const Layout& layout, int height, int width);

/// Distance from the camera to `wall` along azimuth `lon`. Throws
/// unsupported_layout when the ray misses the wall.
double wall_distance(const PlanModel& plan, std::size_t wall, double lon);

/// Boundary rows at an arbitrary (real) azimuth.
BoundaryRows boundary_at(const PlanModel& plan, double lon, int height);

BoundaryMap plan_to_boundaries(const PlanModel& plan, int height, int width);

struct PixelCoord {
  double col = 0.0;
  double row = 0.0;
};

/// Image position of the 3D point at plan position `point` and `height`
/// relative to the camera. The column is wrapped into [0, W).
PixelCoord project_corner(PlanPoint point, double height, int image_height,
                          int image_width);

/// Rounded (half-up) corner columns, in layout order. Values lie in [0, W].
std::vector<int> group_boundaries(const Layout& layout, int width);

/// Wall index of every integer column under the rounded grouping.
std::vector<int> wall_of_columns(const Layout& layout, int width);

ColumnGrouping split_column_groups(const Sample& sample);

// ---------------------------------------------------------------------------
// PanoStretch: scale the room by kx along x and kz along z about the camera.
// ---------------------------------------------------------------------------

struct SphericalDir {
  double lon = 0.0;
  double lat = 0.0;
};

SphericalDir panostretch_dir(double lon, double lat, double kx, double kz);

/// Forward-transforms every corner and re-sorts by column.
Layout panostretch_layout(const Layout& layout, int height, int width,
                          double kx, double kz);

Sample panostretch_image(const Sample& sample, double kx, double kz);

}  // namespace panomix
