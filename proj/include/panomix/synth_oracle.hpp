#pragma once

// Procedural cuboid rooms rendered by ray casting. Colors are unshaded, so
// every pixel's color names the surface it came from.

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "panomix/pano_core.hpp"

namespace panomix {

struct FlatTexture {
  Color color;
  bool operator==(const FlatTexture&) const = default;
};

/// Axis-aligned checkerboard in the surface's own 2D coordinates.
struct CheckerTexture {
  double period = 0.5;
  Color first;
  Color second;
  bool operator==(const CheckerTexture&) const = default;
};

/// Linear blend by height: `bottom` at the floor, `top` at the ceiling.
struct GradientTexture {
  Color top;
  Color bottom;
  bool operator==(const GradientTexture&) const = default;
};

using Texture = std::variant<FlatTexture, CheckerTexture, GradientTexture>;

/// Axis-aligned box in room coordinates; heights measured from the floor.
struct FurnitureBox {
  double x_min = 0.0, x_max = 0.0;
  double z_min = 0.0, z_max = 0.0;
  double base = 0.0, top = 0.0;
  Color color{0.0, 0.0, 0.0};
  std::string class_name;
  bool operator==(const FurnitureBox&) const = default;
};

/// Room spanning [-half_x, half_x] x [-half_z, half_z] in plan, floor at
/// y = 0 and ceiling at y = 1 + ceiling_height. The camera sits 1 unit
/// above the floor at (camera_x, camera_z).
struct SceneSpec {
  double half_x = 2.0;
  double half_z = 2.0;
  double camera_x = 0.0;
  double camera_z = 0.0;
  double ceiling_height = 1.5;
  Texture ceiling = FlatTexture{{0.9, 0.9, 0.9}};
  Texture floor = FlatTexture{{0.4, 0.3, 0.2}};
  std::array<Texture, 4> walls = {  // +x, -x, +z, -z
      FlatTexture{{0.8, 0.2, 0.2}}, FlatTexture{{0.2, 0.8, 0.2}},
      FlatTexture{{0.2, 0.2, 0.8}}, FlatTexture{{0.8, 0.8, 0.2}}};
  std::vector<FurnitureBox> boxes;
  std::vector<std::string> classes = {"ceiling", "floor", "wall"};
  bool operator==(const SceneSpec&) const = default;
};

struct SceneParams {
  double half_extent_min = 1.5;
  double half_extent_max = 4.0;
  /// Camera offset as a fraction of each half extent.
  double camera_offset_max = 0.5;
  double ceiling_min = 1.2;
  double ceiling_max = 2.0;
  int boxes_min = 0;
  int boxes_max = 4;
  double box_size_min = 0.3;
  double box_size_max = 1.2;
  double box_top_min = 0.3;
  double box_top_max = 1.6;
  /// Chance that a wall gets a checker or gradient instead of a flat color.
  double textured_probability = 0.0;
};

/// ceiling, floor, wall, then the furniture vocabulary used by random_scene.
std::vector<std::string> default_scene_classes();

/// Empty iff the spec is renderable.
std::vector<std::string> validate_scene(const SceneSpec& spec);

/// Analytic layout: room corners projected through project_corner.
Layout scene_layout(const SceneSpec& spec, int height, int width);

Sample render_scene(const SceneSpec& spec, int height, int width);

SceneSpec random_scene(std::uint64_t seed, const SceneParams& params = {});

/// Every color a flat-textured surface or box of the scene can produce.
std::vector<Color> scene_palette(const SceneSpec& spec);
std::vector<Color> furniture_palette(const SceneSpec& spec);

}  // namespace panomix
