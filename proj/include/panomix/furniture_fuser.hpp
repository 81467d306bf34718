#pragma once

#include <optional>
#include <string>
#include <vector>

#include "panomix/layout_geom.hpp"
#include "panomix/pano_core.hpp"

namespace panomix {

/// How rows above the ceiling boundary and below the floor boundary are
/// mapped. `bijective` derives alpha/beta so the full ceiling and floor
/// strips map onto each other with the image edges fixed; `fixed` uses the
/// given values. Source rows outside [0, H-1] are always clamped.
struct VerticalPolicy {
  enum class Mode { bijective, fixed };

  Mode mode = Mode::bijective;
  double alpha = 1.0;
  double beta = 1.0;
};

enum class HorizontalMode { plan_fraction, linear };

/// Wall i of the source (furniture) layout paired with wall i of the
/// destination (structure) layout.
struct WallPair {
  PlanPoint src_start, src_end;
  PlanPoint dst_start, dst_end;
  double src_col_start = 0.0, src_col_end = 0.0;  // corner columns
  double dst_col_start = 0.0, dst_col_end = 0.0;
};

WallPair make_wall_pair(const PlanModel& src, std::size_t src_wall,
                        const Layout& src_layout, const PlanModel& dst,
                        std::size_t dst_wall, const Layout& dst_layout);

/// Source column for destination column `dst_col` by matching the fraction
/// along the destination wall to the same fraction along the source wall.
double horizontal_map(double dst_col, const WallPair& pair, int width);

/// Uniform column rescaling between the corner columns of the two walls.
double horizontal_map_linear(double dst_col, const WallPair& pair, int width);

/// Source row for destination row `r` given the ceiling (a) and floor (b)
/// boundary rows of the source and destination columns:
///
///   r < a_dst:  a_src - alpha * (a_dst - r)
///   r > b_dst:  b_src + beta * (r - b_dst)
///   otherwise:  a_src + (b_src - a_src) * (r - a_dst) / (b_dst - a_dst)
double vertical_source_row(double r, double a_src, double b_src, double a_dst,
                           double b_dst, const VerticalPolicy& policy,
                           int height);

struct AlignOptions {
  VerticalPolicy vertical;
  HorizontalMode horizontal = HorizontalMode::plan_fraction;
  /// Destination wall i reads source wall permutation[i]; empty = identity.
  std::vector<int> wall_permutation;
};

struct AlignedSample {
  Panorama image;
  SemanticMask mask;
};

/// Backward-warps `furniture` so its walls, ceiling and floor line up with
/// `structure_layout`. Colors are resampled without crossing class edges;
/// labels use nearest lookup, with ceiling/wall/floor transitions placed at
/// sub-pixel accuracy where the source mask agrees with its layout.
AlignedSample align_sample(const Sample& furniture,
                           const Layout& structure_layout,
                           const AlignOptions& options = {});

/// Every class except ceiling, floor and wall.
std::vector<std::string> default_foreground_classes(
    const std::vector<std::string>& vocabulary);

/// Per-label membership table for `names`; unknown names are config errors.
std::vector<bool> class_set(const std::vector<std::string>& vocabulary,
                            const std::vector<std::string>& names);

/// Pixel-wise selection: foreground pixels of the aligned furniture over
/// the styled structure image. Mask and layout are carried through as-is.
Sample composite(const Panorama& aligned_image,
                 const SemanticMask& aligned_mask,
                 const Panorama& styled_structure,
                 const Layout& structure_layout,
                 const std::vector<std::string>& foreground_classes);

}  // namespace panomix
