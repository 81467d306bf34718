#include "panomix/style_fuser.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "panomix/layout_geom.hpp"
#include "panomix/seed.hpp"

namespace panomix {

RegionMask::RegionMask(int height, int width, int walls)
    : height_(height), width_(width), walls_(walls),
      labels_(static_cast<std::size_t>(height) * width, kCeiling) {}

std::string RegionMask::region_name(std::uint16_t label) const {
  if (label == kCeiling) return "ceiling";
  if (label == kFloor) return "floor";
  if (label == others()) return "others";
  return "wall_" + std::to_string(label - 2);
}

std::size_t RegionMask::count(std::uint16_t label) const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), label));
}

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
const double kInvSqrt6 = 1.0 / std::sqrt(6.0);

}  // namespace

Color to_color_space(const Color& rgb, ColorSpace space) {
  if (space == ColorSpace::linear_rgb) return rgb;
  const auto [r, g, b] = rgb;
  return {(r + g + b) * kInvSqrt3, (r - g) * kInvSqrt2,
          (r + g - 2.0 * b) * kInvSqrt6};
}

Color from_color_space(const Color& value, ColorSpace space) {
  if (space == ColorSpace::linear_rgb) return value;
  const auto [l, c1, c2] = value;
  return {l * kInvSqrt3 + c1 * kInvSqrt2 + c2 * kInvSqrt6,
          l * kInvSqrt3 - c1 * kInvSqrt2 + c2 * kInvSqrt6,
          l * kInvSqrt3 - 2.0 * c2 * kInvSqrt6};
}

RegionMask build_structure_mask(const Layout& layout, int height, int width) {
  const PlanModel plan = layout_to_plan(layout, height, width);
  const BoundaryMap bounds = plan_to_boundaries(plan, height, width);
  const std::vector<int> walls = wall_of_columns(layout, width);

  RegionMask mask(height, width, static_cast<int>(layout.size()));
  for (int c = 0; c < width; ++c) {
    const std::uint16_t wall = mask.wall(walls[c]);
    for (int r = 0; r < height; ++r) {
      if (r < bounds.ceil_rows[c]) {
        mask.at(r, c) = RegionMask::kCeiling;
      } else if (r > bounds.floor_rows[c]) {
        mask.at(r, c) = RegionMask::kFloor;
      } else {
        mask.at(r, c) = wall;
      }
    }
  }
  return mask;
}

RegionMask build_reference_mask(const Sample& style,
                                const std::vector<std::string>& others_classes) {
  const std::vector<bool> covered =
      class_set(style.mask.class_names(), others_classes);
  RegionMask mask =
      build_structure_mask(style.layout, style.height(), style.width());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (covered[style.mask.at(r, c)]) mask.at(r, c) = mask.others();
    }
  }
  return mask;
}

RegionStats extract_region_stats(const Panorama& image,
                                 const RegionMask& regions, ColorSpace space) {
  if (image.height() != regions.height() || image.width() != regions.width()) {
    throw Error(ErrorCode::invalid_argument,
                "region mask and image dimensions differ");
  }
  RegionStats stats;
  stats.space = space;
  stats.regions.resize(regions.region_count());
  const auto pixels = image.pixels();
  const auto& labels = regions.labels();
  const std::uint16_t others = regions.others();

  // Sums are taken relative to each region's first pixel, so a constant
  // region has an exact mean and a zero deviation.
  std::vector<Color> base(regions.region_count(), Color{0, 0, 0});
  std::vector<Color> sums(regions.region_count(), Color{0, 0, 0});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == others) continue;
    const Color v = to_color_space(pixels[i], space);
    RegionStat& s = stats.regions[labels[i]];
    if (s.count++ == 0) base[labels[i]] = v;
    for (int k = 0; k < 3; ++k) sums[labels[i]][k] += v[k] - base[labels[i]][k];
  }
  for (std::size_t l = 0; l < stats.regions.size(); ++l) {
    RegionStat& s = stats.regions[l];
    s.empty = s.count == 0;
    if (s.empty) continue;
    for (int k = 0; k < 3; ++k) s.mean[k] = base[l][k] + sums[l][k] / s.count;
  }

  std::vector<Color> sq(regions.region_count(), Color{0, 0, 0});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == others) continue;
    const Color v = to_color_space(pixels[i], space);
    const Color& m = stats.regions[labels[i]].mean;
    for (int k = 0; k < 3; ++k) sq[labels[i]][k] += (v[k] - m[k]) * (v[k] - m[k]);
  }
  for (std::size_t l = 0; l < stats.regions.size(); ++l) {
    RegionStat& s = stats.regions[l];
    if (s.empty) continue;
    for (int k = 0; k < 3; ++k) s.stddev[k] = std::sqrt(sq[l][k] / s.count);
  }
  return stats;
}

namespace {

// Structure region label -> style region label, honouring the permutation.
std::vector<std::uint16_t> region_mapping(const RegionMask& structure,
                                          const std::vector<int>& perm) {
  std::vector<std::uint16_t> map(structure.region_count());
  map[RegionMask::kCeiling] = RegionMask::kCeiling;
  map[RegionMask::kFloor] = RegionMask::kFloor;
  for (int i = 0; i < structure.walls(); ++i) {
    map[structure.wall(i)] = structure.wall(perm.empty() ? i : perm[i]);
  }
  map[structure.others()] = structure.others();
  return map;
}

void require_compatible(const Sample& style, const Layout& structure_layout,
                        const std::vector<int>& perm) {
  if (style.layout.size() != structure_layout.size()) {
    throw Error(ErrorCode::incompatible_samples,
                "style sample has " + std::to_string(style.layout.size()) +
                    " walls but the structure layout has " +
                    std::to_string(structure_layout.size()));
  }
  if (!perm.empty()) {
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expected(structure_layout.size());
    std::iota(expected.begin(), expected.end(), 0);
    if (sorted != expected) {
      throw Error(ErrorCode::config, "wall_permutation is not a permutation");
    }
  }
}

void require_nonempty(const RegionStats& stats, const RegionMask& reference,
                      const std::vector<std::uint16_t>& mapping) {
  for (std::size_t l = 0; l + 1 < mapping.size(); ++l) {
    if (stats.regions[mapping[l]].empty) {
      throw Error(ErrorCode::empty_style_region,
                  "style region " + reference.region_name(mapping[l]) +
                      " has no background pixels");
    }
  }
}

// Seeded Gaussian fill around a region's statistics. One stream per
// structure region, so results do not depend on visiting order across
// regions.
class RegionNoise {
 public:
  RegionNoise(std::uint64_t seed, const RegionStats& stats,
              std::vector<std::uint16_t> mapping)
      : stats_(stats), mapping_(std::move(mapping)) {
    for (std::size_t l = 0; l < mapping_.size(); ++l) {
      engines_.emplace_back(mix_seed(seed, l));
    }
  }

  Color draw(std::uint16_t region) {
    const RegionStat& s = stats_.regions[mapping_[region]];
    std::normal_distribution<double> normal(0.0, 1.0);
    Color v;
    for (int k = 0; k < 3; ++k) {
      v[k] = s.mean[k] + (s.stddev[k] > 0.0 ? s.stddev[k] * normal(engines_[region]) : 0.0);
    }
    Color rgb = from_color_space(v, stats_.space);
    for (double& x : rgb) x = std::clamp(x, 0.0, 1.0);
    return rgb;
  }

 private:
  const RegionStats& stats_;
  std::vector<std::uint16_t> mapping_;
  std::vector<std::mt19937_64> engines_;
};

class FlatStatFuser final : public StyleFuser {
 public:
  FlatStatFuser(StyleFuserConfig config, std::vector<std::string> others)
      : config_(std::move(config)), others_(std::move(others)) {}

  Panorama fuse(const Sample& style,
                const Layout& structure_layout) const override {
    require_compatible(style, structure_layout, config_.wall_permutation);
    const int h = style.height();
    const int w = style.width();
    const RegionMask reference = build_reference_mask(style, others_);
    const RegionStats stats =
        extract_region_stats(style.image, reference, config_.color_space);
    const RegionMask structure = build_structure_mask(structure_layout, h, w);
    const auto mapping = region_mapping(structure, config_.wall_permutation);
    require_nonempty(stats, reference, mapping);

    RegionNoise noise(config_.noise_seed, stats, mapping);
    Panorama out(h, w);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) out.at(r, c) = noise.draw(structure.at(r, c));
    }
    return out;
  }

 private:
  StyleFuserConfig config_;
  std::vector<std::string> others_;
};

class WarpAlignFuser final : public StyleFuser {
 public:
  WarpAlignFuser(StyleFuserConfig config, std::vector<std::string> others,
                 AlignOptions align)
      : config_(std::move(config)), others_(std::move(others)),
        align_(std::move(align)) {
    align_.wall_permutation = config_.wall_permutation;
  }

  Panorama fuse(const Sample& style,
                const Layout& structure_layout) const override {
    require_compatible(style, structure_layout, config_.wall_permutation);
    const int h = style.height();
    const int w = style.width();
    const RegionMask reference = build_reference_mask(style, others_);
    const RegionStats stats =
        extract_region_stats(style.image, reference, config_.color_space);
    const RegionMask structure = build_structure_mask(structure_layout, h, w);
    const auto mapping = region_mapping(structure, config_.wall_permutation);
    require_nonempty(stats, reference, mapping);

    AlignedSample aligned = align_sample(style, structure_layout, align_);
    const std::vector<bool> covered =
        class_set(style.mask.class_names(), others_);
    auto occluded = [&](int r, int c) { return covered[aligned.mask.at(r, c)]; };

    RegionNoise noise(config_.noise_seed, stats, mapping);
    Panorama& out = aligned.image;
    for (int c = 0; c < w; ++c) {
      int r = 0;
      while (r < h) {
        if (!occluded(r, c)) {
          ++r;
          continue;
        }
        const int run_start = r;
        const std::uint16_t region = structure.at(r, c);
        while (r < h && occluded(r, c) && structure.at(r, c) == region) ++r;
        fill_run(out, structure, noise, c, run_start, r, region);
      }
    }
    return out;
  }

 private:
  // Fills rows [begin, end) of column c, all occluded and in one region.
  void fill_run(Panorama& out, const RegionMask& structure, RegionNoise& noise,
                int c, int begin, int end, std::uint16_t region) const {
    const int h = out.height();
    if (config_.fill_policy == FillPolicy::region_stat_fill) {
      for (int r = begin; r < end; ++r) out.at(r, c) = noise.draw(region);
      return;
    }
    // Runs are maximal, so a same-region neighbour is a visible pixel.
    const bool has_above = begin > 0 && structure.at(begin - 1, c) == region;
    const bool has_below = end < h && structure.at(end, c) == region;
    if (has_above && has_below) {
      const Color top = out.at(begin - 1, c);
      const Color bottom = out.at(end, c);
      const double span = end - begin + 1;
      for (int r = begin; r < end; ++r) {
        const double t = (r - begin + 1) / span;
        for (int k = 0; k < 3; ++k) {
          out.at(r, c)[k] = top[k] + t * (bottom[k] - top[k]);
        }
      }
    } else if (has_above || has_below) {
      const Color edge = has_above ? out.at(begin - 1, c) : out.at(end, c);
      for (int r = begin; r < end; ++r) out.at(r, c) = edge;
    } else {
      for (int r = begin; r < end; ++r) out.at(r, c) = noise.draw(region);
    }
  }

  StyleFuserConfig config_;
  std::vector<std::string> others_;
  AlignOptions align_;
};

}  // namespace

std::unique_ptr<StyleFuser> make_style_fuser(
    const StyleFuserConfig& config, std::vector<std::string> others_classes,
    AlignOptions align) {
  if (config.strategy == StyleStrategy::flat_stat) {
    return std::make_unique<FlatStatFuser>(config, std::move(others_classes));
  }
  return std::make_unique<WarpAlignFuser>(config, std::move(others_classes),
                                          std::move(align));
}

Panorama fuse_style(const Sample& style, const Layout& structure_layout,
                    const StyleFuserConfig& config,
                    const std::vector<std::string>& others_classes,
                    const AlignOptions& align) {
  return make_style_fuser(config, others_classes, align)
      ->fuse(style, structure_layout);
}

}  // namespace panomix
