#include "panomix/furniture_fuser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace panomix {

namespace {

inline double cross(PlanPoint a, PlanPoint b) { return a.x * b.z - a.z * b.x; }

double circular_span(double from, double to, int width) {
  const double span = wrap_column(to - from, width);
  return span == 0.0 ? width : span;
}

// Signed offset of `col` from `origin`, folded into [-W/2, W/2).
double circular_offset(double col, double origin, int width) {
  double d = wrap_column(col - origin, width);
  if (d >= width / 2.0) d -= width;
  return d;
}

std::vector<int> resolve_permutation(const std::vector<int>& perm,
                                     std::size_t walls) {
  if (perm.empty()) {
    std::vector<int> identity(walls);
    std::iota(identity.begin(), identity.end(), 0);
    return identity;
  }
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  bool ok = sorted.size() == walls;
  for (std::size_t i = 0; ok && i < walls; ++i) {
    ok = sorted[i] == static_cast<int>(i);
  }
  if (!ok) {
    throw Error(ErrorCode::config,
                "wall_permutation must be a permutation of 0.." +
                    std::to_string(walls - 1));
  }
  return perm;
}

// Ceiling, wall and floor labels of a vocabulary; -1 where absent.
struct StructureLabels {
  int ceiling, wall, floor;
  bool complete() const { return ceiling >= 0 && wall >= 0 && floor >= 0; }
  int region(double row, const BoundaryRows& b) const {
    if (row < b.ceil_row) return ceiling;
    return row > b.floor_row ? floor : wall;
  }
};

// Nearest-row label, moved to the structure class on the far side of the
// source layout boundary when the mapped row has crossed it but still rounds
// to a pixel on the near side. Only fires where the raster agrees with the
// layout, so the mask's own transitions are kept.
Label refined_label(const SemanticMask& mask, int col, double row,
                    const BoundaryRows& src, const StructureLabels& s) {
  const int h = mask.height();
  const double yc = std::clamp(row, 0.0, h - 1.0);
  const int rn = std::min(round_half_up(yc), h - 1);
  const Label near = mask.at(rn, col);
  if (!s.complete()) return near;
  const int want = s.region(yc, src);
  if (want == near || s.region(rn, src) != near) return near;
  const int step = yc > rn ? 1 : -1;
  const int other = rn + step;
  if (other < 0 || other >= h || mask.at(other, col) != want) return near;
  return static_cast<Label>(want);
}

}  // namespace

WallPair make_wall_pair(const PlanModel& src, std::size_t src_wall,
                        const Layout& src_layout, const PlanModel& dst,
                        std::size_t dst_wall, const Layout& dst_layout) {
  WallPair pair;
  pair.src_start = src.wall_start(src_wall);
  pair.src_end = src.wall_end(src_wall);
  pair.dst_start = dst.wall_start(dst_wall);
  pair.dst_end = dst.wall_end(dst_wall);
  pair.src_col_start = src_layout.corners[src_wall].column;
  pair.src_col_end = src_layout.corners[(src_wall + 1) % src_layout.size()].column;
  pair.dst_col_start = dst_layout.corners[dst_wall].column;
  pair.dst_col_end = dst_layout.corners[(dst_wall + 1) % dst_layout.size()].column;
  for (const auto& [a, b] : {std::pair{pair.src_start, pair.src_end},
                             std::pair{pair.dst_start, pair.dst_end}}) {
    if (std::hypot(b.x - a.x, b.z - a.z) <= 1e-9) {
      throw Error(ErrorCode::geometry, "wall segment has zero length");
    }
  }
  return pair;
}

double horizontal_map(double dst_col, const WallPair& pair, int width) {
  const double lon = col_to_lon(dst_col, width);
  const PlanPoint d{std::sin(lon), std::cos(lon)};
  const PlanPoint e{pair.dst_end.x - pair.dst_start.x,
                    pair.dst_end.z - pair.dst_start.z};
  const double denom = cross(e, d);
  double s = std::abs(denom) < 1e-15
                 ? std::numeric_limits<double>::quiet_NaN()
                 : cross(d, pair.dst_start) / denom;
  const double t = cross(pair.dst_start, e) / cross(d, e);
  if (!std::isfinite(s) || !(t > 0.0) || s < -1e-6 || s > 1.0 + 1e-6) {
    std::ostringstream msg;
    msg << "column " << dst_col << " does not view the destination wall (s = "
        << s << ")";
    throw Error(ErrorCode::geometry, msg.str());
  }
  s = std::clamp(s, 0.0, 1.0);
  const PlanPoint src{pair.src_start.x + s * (pair.src_end.x - pair.src_start.x),
                      pair.src_start.z + s * (pair.src_end.z - pair.src_start.z)};
  return wrap_column(lon_to_col(std::atan2(src.x, src.z), width), width);
}

double horizontal_map_linear(double dst_col, const WallPair& pair, int width) {
  const double dst_span = circular_span(pair.dst_col_start, pair.dst_col_end, width);
  const double src_span = circular_span(pair.src_col_start, pair.src_col_end, width);
  const double offset = circular_offset(dst_col, pair.dst_col_start, width);
  return wrap_column(pair.src_col_start + offset * (src_span / dst_span), width);
}

double vertical_source_row(double r, double a_src, double b_src, double a_dst,
                           double b_dst, const VerticalPolicy& policy,
                           int height) {
  if (!(a_dst < b_dst)) {
    std::ostringstream msg;
    msg << "destination ceiling row " << a_dst
        << " is not above floor row " << b_dst;
    throw Error(ErrorCode::degenerate_boundary, msg.str());
  }
  const double last = height - 1.0;
  double alpha = policy.alpha;
  double beta = policy.beta;
  if (policy.mode == VerticalPolicy::Mode::bijective) {
    // A boundary on the image edge leaves nothing to stretch; fall back to 1.
    alpha = a_dst > 0.0 ? a_src / a_dst : 1.0;
    beta = last - b_dst > 0.0 ? (last - b_src) / (last - b_dst) : 1.0;
  } else if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorCode::config, "fixed vertical policy needs alpha, beta > 0");
  }

  double src;
  if (r < a_dst) {
    src = a_src - alpha * (a_dst - r);
  } else if (r > b_dst) {
    src = b_src + beta * (r - b_dst);
  } else {
    // std::lerp is exact at both ends and monotone in between.
    src = std::lerp(a_src, b_src, (r - a_dst) / (b_dst - a_dst));
  }
  return std::clamp(src, 0.0, last);
}

AlignedSample align_sample(const Sample& furniture,
                           const Layout& structure_layout,
                           const AlignOptions& options) {
  const int h = furniture.height();
  const int w = furniture.width();
  const std::size_t walls = furniture.layout.size();
  if (structure_layout.size() != walls) {
    throw Error(ErrorCode::incompatible_samples,
                "wall count mismatch: source has " + std::to_string(walls) +
                    ", target layout has " +
                    std::to_string(structure_layout.size()));
  }
  const std::vector<int> perm =
      resolve_permutation(options.wall_permutation, walls);

  const PlanModel src_plan = layout_to_plan(furniture.layout, h, w);
  const PlanModel dst_plan = layout_to_plan(structure_layout, h, w);
  std::vector<WallPair> pairs;
  for (std::size_t i = 0; i < walls; ++i) {
    pairs.push_back(make_wall_pair(src_plan, perm[i], furniture.layout,
                                   dst_plan, i, structure_layout));
  }

  const StructureLabels structure{furniture.mask.find_class("ceiling"),
                                  furniture.mask.find_class("wall"),
                                  furniture.mask.find_class("floor")};

  AlignedSample out{Panorama(h, w),
                    SemanticMask(h, w, furniture.mask.class_names())};
  for (int c = 0; c < w; ++c) {
    // The wall is picked by the column's exact azimuth, so the map never
    // extrapolates past a corner.
    const double lon = col_to_lon(c, w);
    const WallPair& pair = pairs[dst_plan.wall_at(lon)];
    const double src_col = options.horizontal == HorizontalMode::linear
                               ? horizontal_map_linear(c, pair, w)
                               : horizontal_map(c, pair, w);

    const BoundaryRows dst_rows = boundary_at(dst_plan, lon, h);
    // Labels come from the nearest source column, so the source boundary is
    // read there too; otherwise steep boundaries pick up slope * 0.5 px.
    const int nearest_col = wrap_index(round_half_up(src_col), w);
    const BoundaryRows src_rows =
        boundary_at(src_plan, col_to_lon(nearest_col, w), h);
    for (int r = 0; r < h; ++r) {
      const double src_row = vertical_source_row(
          r, src_rows.ceil_row, src_rows.floor_row, dst_rows.ceil_row,
          dst_rows.floor_row, options.vertical, h);
      const Label label =
          refined_label(furniture.mask, nearest_col, src_row, src_rows, structure);
      out.image.at(r, c) = sample_class_consistent(
          furniture.image, furniture.mask, src_col, src_row, label);
      out.mask.at(r, c) = label;
    }
  }
  return out;
}

std::vector<std::string> default_foreground_classes(
    const std::vector<std::string>& vocabulary) {
  std::vector<std::string> out;
  for (const std::string& name : vocabulary) {
    if (name != "ceiling" && name != "floor" && name != "wall") {
      out.push_back(name);
    }
  }
  return out;
}

std::vector<bool> class_set(const std::vector<std::string>& vocabulary,
                            const std::vector<std::string>& names) {
  std::vector<bool> member(vocabulary.size(), false);
  for (const std::string& name : names) {
    const auto it = std::find(vocabulary.begin(), vocabulary.end(), name);
    if (it == vocabulary.end()) {
      throw Error(ErrorCode::config, "unknown class name '" + name + "'");
    }
    member[it - vocabulary.begin()] = true;
  }
  return member;
}

Sample composite(const Panorama& aligned_image,
                 const SemanticMask& aligned_mask,
                 const Panorama& styled_structure,
                 const Layout& structure_layout,
                 const std::vector<std::string>& foreground_classes) {
  const int h = aligned_image.height();
  const int w = aligned_image.width();
  if (aligned_mask.height() != h || aligned_mask.width() != w ||
      styled_structure.height() != h || styled_structure.width() != w) {
    throw Error(ErrorCode::invalid_argument,
                "composite inputs have mismatched dimensions");
  }
  const std::vector<bool> foreground =
      class_set(aligned_mask.class_names(), foreground_classes);

  Sample out{styled_structure, aligned_mask, structure_layout};
  auto dst = out.image.pixels();
  const auto src = aligned_image.pixels();
  const auto labels = aligned_mask.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < foreground.size() && foreground[labels[i]]) dst[i] = src[i];
  }
  return out;
}

}  // namespace panomix
