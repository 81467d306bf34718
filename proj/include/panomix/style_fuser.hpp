#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "panomix/furniture_fuser.hpp"
#include "panomix/pano_core.hpp"

namespace panomix {

/// Per-pixel region labels over {ceiling, floor, wall_0 .. wall_{T-1},
/// others}. Unlike SemanticMask, every wall gets its own label.
class RegionMask {
 public:
  static constexpr std::uint16_t kCeiling = 0;
  static constexpr std::uint16_t kFloor = 1;

  RegionMask() = default;
  RegionMask(int height, int width, int walls);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int walls() const noexcept { return walls_; }

  std::uint16_t wall(int index) const {
    return static_cast<std::uint16_t>(2 + index);
  }
  std::uint16_t others() const { return static_cast<std::uint16_t>(2 + walls_); }
  /// Number of labels including `others`.
  int region_count() const noexcept { return walls_ + 3; }
  std::string region_name(std::uint16_t label) const;

  std::uint16_t at(int row, int col) const {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint16_t& at(int row, int col) {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  const std::vector<std::uint16_t>& labels() const noexcept { return labels_; }

  std::size_t count(std::uint16_t label) const;

 private:
  int height_ = 0;
  int width_ = 0;
  int walls_ = 0;
  std::vector<std::uint16_t> labels_;
};

enum class ColorSpace { linear_rgb, decorrelated_luma_chroma };

/// Orthonormal transforms between RGB and the chosen statistics space.
Color to_color_space(const Color& rgb, ColorSpace space);
Color from_color_space(const Color& value, ColorSpace space);

struct RegionStat {
  std::size_t count = 0;
  Color mean{0.0, 0.0, 0.0};
  Color stddev{0.0, 0.0, 0.0};
  bool empty = true;
};

/// Indexed by region label; the `others` entry is always empty.
struct RegionStats {
  ColorSpace space = ColorSpace::linear_rgb;
  std::vector<RegionStat> regions;
};

enum class StyleStrategy { warp_align, flat_stat };
enum class FillPolicy { column_interpolate, region_stat_fill };

struct StyleFuserConfig {
  StyleStrategy strategy = StyleStrategy::warp_align;
  ColorSpace color_space = ColorSpace::linear_rgb;
  std::uint64_t noise_seed = 0;
  FillPolicy fill_policy = FillPolicy::column_interpolate;
  /// Structure wall i takes the style of style wall permutation[i].
  std::vector<int> wall_permutation;
};

RegionMask build_structure_mask(const Layout& layout, int height, int width);

/// Structure mask of the style sample's own layout with every pixel whose
/// semantic class is in `others_classes` relabelled `others`.
RegionMask build_reference_mask(const Sample& style,
                                const std::vector<std::string>& others_classes);

/// Population mean and standard deviation per region, `others` excluded.
RegionStats extract_region_stats(const Panorama& image,
                                 const RegionMask& regions,
                                 ColorSpace space = ColorSpace::linear_rgb);

/// Produces a foreground-free image with the structure layout and the
/// background appearance of the style sample.
class StyleFuser {
 public:
  virtual ~StyleFuser() = default;
  virtual Panorama fuse(const Sample& style,
                        const Layout& structure_layout) const = 0;
};

std::unique_ptr<StyleFuser> make_style_fuser(
    const StyleFuserConfig& config, std::vector<std::string> others_classes,
    AlignOptions align = {});

Panorama fuse_style(const Sample& style, const Layout& structure_layout,
                    const StyleFuserConfig& config,
                    const std::vector<std::string>& others_classes,
                    const AlignOptions& align = {});

}  // namespace panomix
