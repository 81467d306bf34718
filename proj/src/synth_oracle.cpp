#include "panomix/synth_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "panomix/layout_geom.hpp"

namespace panomix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kFurnitureClasses = {"bed",   "chair",   "sofa",
                                                     "table", "cabinet", "shelf"};

Color evaluate(const Texture& texture, double u, double v, double height_frac) {
  return std::visit(
      [&](const auto& t) -> Color {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, FlatTexture>) {
          return t.color;
        } else if constexpr (std::is_same_v<T, CheckerTexture>) {
          const long long parity =
              static_cast<long long>(std::floor(u / t.period)) +
              static_cast<long long>(std::floor(v / t.period));
          return (parity & 1) ? t.second : t.first;
        } else {
          const double f = std::clamp(height_frac, 0.0, 1.0);
          return {t.bottom[0] + f * (t.top[0] - t.bottom[0]),
                  t.bottom[1] + f * (t.top[1] - t.bottom[1]),
                  t.bottom[2] + f * (t.top[2] - t.bottom[2])};
        }
      },
      texture);
}

void collect_colors(const Texture& texture, std::vector<Color>& out) {
  if (const auto* f = std::get_if<FlatTexture>(&texture)) {
    out.push_back(f->color);
  } else if (const auto* c = std::get_if<CheckerTexture>(&texture)) {
    out.push_back(c->first);
    out.push_back(c->second);
  }
}

// Nearest positive entry distance of a ray into a box, or +inf.
double hit_box(const FurnitureBox& box, const Vec3& origin, const Vec3& dir) {
  double t_near = -kInf;
  double t_far = kInf;
  const double lo[3] = {box.x_min, box.base, box.z_min};
  const double hi[3] = {box.x_max, box.top, box.z_max};
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return kInf;
      continue;
    }
    double t0 = (lo[k] - o[k]) / d[k];
    double t1 = (hi[k] - o[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  return (t_near <= t_far && t_near > 0.0) ? t_near : kInf;
}

void require_range(double lo, double hi, const char* name, bool positive) {
  if (!(lo <= hi) || (positive && !(lo > 0.0))) {
    std::ostringstream msg;
    msg << "infeasible scene parameter range for " << name << ": [" << lo
        << ", " << hi << "]";
    throw Error(ErrorCode::config, msg.str());
  }
}

}  // namespace

std::vector<std::string> default_scene_classes() {
  std::vector<std::string> classes = {"ceiling", "floor", "wall"};
  classes.insert(classes.end(), kFurnitureClasses.begin(), kFurnitureClasses.end());
  return classes;
}

std::vector<std::string> validate_scene(const SceneSpec& spec) {
  std::vector<std::string> issues;
  if (!(spec.half_x > 0.0 && spec.half_z > 0.0)) {
    issues.push_back("room half extents must be positive");
  }
  if (!(std::abs(spec.camera_x) < spec.half_x &&
        std::abs(spec.camera_z) < spec.half_z)) {
    issues.push_back("camera must be strictly inside the room");
  }
  if (!(spec.ceiling_height > 0.0)) {
    issues.push_back("ceiling height must be positive");
  }
  for (const char* name : {"ceiling", "floor", "wall"}) {
    if (std::find(spec.classes.begin(), spec.classes.end(), name) ==
        spec.classes.end()) {
      issues.push_back(std::string("class vocabulary lacks '") + name + "'");
    }
  }
  if (spec.classes.size() > 255) issues.push_back("too many classes");

  const double room_top = 1.0 + spec.ceiling_height;
  for (std::size_t i = 0; i < spec.boxes.size(); ++i) {
    const FurnitureBox& b = spec.boxes[i];
    const std::string name = "box " + std::to_string(i);
    if (!(b.x_min < b.x_max && b.z_min < b.z_max && b.base < b.top)) {
      issues.push_back(name + ": empty extent");
    }
    if (!(b.x_min > -spec.half_x && b.x_max < spec.half_x &&
          b.z_min > -spec.half_z && b.z_max < spec.half_z && b.base >= 0.0 &&
          b.top < room_top)) {
      issues.push_back(name + ": not strictly inside the room");
    }
    if (spec.camera_x >= b.x_min && spec.camera_x <= b.x_max &&
        spec.camera_z >= b.z_min && spec.camera_z <= b.z_max &&
        1.0 >= b.base && 1.0 <= b.top) {
      issues.push_back(name + ": contains the camera");
    }
    if (std::find(spec.classes.begin(), spec.classes.end(), b.class_name) ==
        spec.classes.end()) {
      issues.push_back(name + ": class '" + b.class_name + "' not in vocabulary");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const FurnitureBox& o = spec.boxes[j];
      if (b.x_min < o.x_max && o.x_min < b.x_max && b.z_min < o.z_max &&
          o.z_min < b.z_max && b.base < o.top && o.base < b.top) {
        issues.push_back(name + ": overlaps box " + std::to_string(j));
      }
    }
  }
  return issues;
}

Layout scene_layout(const SceneSpec& spec, int height, int width) {
  std::vector<Corner> corners;
  for (const double x : {spec.half_x, -spec.half_x}) {
    for (const double z : {spec.half_z, -spec.half_z}) {
      const PlanPoint p{x - spec.camera_x, z - spec.camera_z};
      const PixelCoord ceil = project_corner(p, spec.ceiling_height, height, width);
      const PixelCoord floor = project_corner(p, -1.0, height, width);
      corners.push_back({ceil.col, ceil.row, floor.row});
    }
  }
  return sorted_layout(std::move(corners));
}

Sample render_scene(const SceneSpec& spec, int height, int width) {
  if (const auto issues = validate_scene(spec); !issues.empty()) {
    throw Error(ErrorCode::config, "invalid scene: " + issues.front());
  }
  auto class_of = [&](const std::string& name) {
    return static_cast<Label>(
        std::find(spec.classes.begin(), spec.classes.end(), name) -
        spec.classes.begin());
  };
  const Label ceiling_class = class_of("ceiling");
  const Label floor_class = class_of("floor");
  const Label wall_class = class_of("wall");
  std::vector<Label> box_classes;
  for (const FurnitureBox& b : spec.boxes) box_classes.push_back(class_of(b.class_name));

  Sample out{Panorama(height, width), SemanticMask(height, width, spec.classes),
             scene_layout(spec, height, width)};
  const Vec3 origin{spec.camera_x, 1.0, spec.camera_z};
  const double room_top = 1.0 + spec.ceiling_height;

  for (int r = 0; r < height; ++r) {
    const double lat = row_to_lat(r, height);
    for (int c = 0; c < width; ++c) {
      const Vec3 d = direction(col_to_lon(c, width), lat);

      // Exit distance through each bounding plane of the room.
      const double tx = d.x > 0 ? (spec.half_x - origin.x) / d.x
                        : d.x < 0 ? (-spec.half_x - origin.x) / d.x : kInf;
      const double tz = d.z > 0 ? (spec.half_z - origin.z) / d.z
                        : d.z < 0 ? (-spec.half_z - origin.z) / d.z : kInf;
      const double ty = d.y > 0 ? (room_top - origin.y) / d.y
                        : d.y < 0 ? -origin.y / d.y : kInf;
      double t = std::min({tx, ty, tz});

      const Vec3 p{origin.x + t * d.x, origin.y + t * d.y, origin.z + t * d.z};
      Color color;
      Label label;
      if (t == ty) {
        const Texture& tex = d.y > 0 ? spec.ceiling : spec.floor;
        color = evaluate(tex, p.x, p.z, d.y > 0 ? 1.0 : 0.0);
        label = d.y > 0 ? ceiling_class : floor_class;
      } else if (t == tx) {
        color = evaluate(spec.walls[d.x > 0 ? 0 : 1], p.z, p.y, p.y / room_top);
        label = wall_class;
      } else {
        color = evaluate(spec.walls[d.z > 0 ? 2 : 3], p.x, p.y, p.y / room_top);
        label = wall_class;
      }

      for (std::size_t b = 0; b < spec.boxes.size(); ++b) {
        const double tb = hit_box(spec.boxes[b], origin, d);
        if (tb < t) {
          t = tb;
          color = spec.boxes[b].color;
          label = box_classes[b];
        }
      }
      out.image.at(r, c) = color;
      out.mask.at(r, c) = label;
    }
  }
  return out;
}

SceneSpec random_scene(std::uint64_t seed, const SceneParams& params) {
  require_range(params.half_extent_min, params.half_extent_max, "half_extent", true);
  require_range(params.ceiling_min, params.ceiling_max, "ceiling", true);
  require_range(params.box_size_min, params.box_size_max, "box_size", true);
  require_range(params.box_top_min, params.box_top_max, "box_top", true);
  if (!(params.camera_offset_max >= 0.0 && params.camera_offset_max < 1.0)) {
    throw Error(ErrorCode::config, "camera_offset_max must be in [0, 1)");
  }
  if (params.boxes_min < 0 || params.boxes_min > params.boxes_max ||
      params.boxes_max > static_cast<int>(kFurnitureClasses.size())) {
    throw Error(ErrorCode::config, "box count range must lie in [0, " +
                                       std::to_string(kFurnitureClasses.size()) +
                                       "]");
  }
  if (params.box_top_max >= 1.0 + params.ceiling_min) {
    throw Error(ErrorCode::config, "boxes may reach the ceiling");
  }

  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  SceneSpec spec;
  spec.classes = default_scene_classes();
  spec.half_x = uniform(params.half_extent_min, params.half_extent_max);
  spec.half_z = uniform(params.half_extent_min, params.half_extent_max);
  spec.camera_x = uniform(-1.0, 1.0) * params.camera_offset_max * spec.half_x;
  spec.camera_z = uniform(-1.0, 1.0) * params.camera_offset_max * spec.half_z;
  spec.ceiling_height = uniform(params.ceiling_min, params.ceiling_max);

  // Colors on the 8-bit lattice, pairwise at least 24 levels apart in some
  // channel so they survive quantization and stay decodable.
  std::vector<Color> used;
  auto fresh_color = [&]() {
    std::uniform_int_distribution<int> level(16, 239);
    for (;;) {
      const Color c{level(rng) / 255.0, level(rng) / 255.0, level(rng) / 255.0};
      const bool distinct = std::all_of(used.begin(), used.end(), [&](const Color& o) {
        return std::max({std::abs(c[0] - o[0]), std::abs(c[1] - o[1]),
                         std::abs(c[2] - o[2])}) >= 24.0 / 255.0;
      });
      if (distinct) {
        used.push_back(c);
        return c;
      }
    }
  };
  auto fresh_texture = [&]() -> Texture {
    if (uniform(0.0, 1.0) >= params.textured_probability) {
      return FlatTexture{fresh_color()};
    }
    if (uniform(0.0, 1.0) < 0.5) {
      const double period = uniform(0.25, 0.75);
      const Color a = fresh_color();
      return CheckerTexture{period, a, fresh_color()};
    }
    const Color top = fresh_color();
    return GradientTexture{top, fresh_color()};
  };

  spec.ceiling = FlatTexture{fresh_color()};
  spec.floor = FlatTexture{fresh_color()};
  for (Texture& wall : spec.walls) wall = fresh_texture();

  std::vector<std::string> names = kFurnitureClasses;
  std::shuffle(names.begin(), names.end(), rng);
  const int box_count =
      std::uniform_int_distribution<int>(params.boxes_min, params.boxes_max)(rng);
  const double margin = 0.05;
  const double camera_clearance = 0.5;
  for (int i = 0; i < box_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
      const double sx = uniform(params.box_size_min, params.box_size_max);
      const double sz = uniform(params.box_size_min, params.box_size_max);
      if (sx / 2 + margin >= spec.half_x || sz / 2 + margin >= spec.half_z) continue;
      const double cx = uniform(-spec.half_x + sx / 2 + margin, spec.half_x - sx / 2 - margin);
      const double cz = uniform(-spec.half_z + sz / 2 + margin, spec.half_z - sz / 2 - margin);
      FurnitureBox box{cx - sx / 2, cx + sx / 2, cz - sz / 2, cz + sz / 2, 0.0,
                       uniform(params.box_top_min, params.box_top_max),
                       {0, 0, 0}, names[i]};
      if (spec.camera_x > box.x_min - camera_clearance &&
          spec.camera_x < box.x_max + camera_clearance &&
          spec.camera_z > box.z_min - camera_clearance &&
          spec.camera_z < box.z_max + camera_clearance) {
        continue;
      }
      const bool clear = std::none_of(
          spec.boxes.begin(), spec.boxes.end(), [&](const FurnitureBox& o) {
            return box.x_min < o.x_max + margin && o.x_min < box.x_max + margin &&
                   box.z_min < o.z_max + margin && o.z_min < box.z_max + margin;
          });
      if (!clear) continue;
      box.color = fresh_color();
      spec.boxes.push_back(box);
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::config,
                  "could not place box " + std::to_string(i) +
                      " within the given parameter ranges");
    }
  }
  return spec;
}

std::vector<Color> scene_palette(const SceneSpec& spec) {
  std::vector<Color> out;
  collect_colors(spec.ceiling, out);
  collect_colors(spec.floor, out);
  for (const Texture& wall : spec.walls) collect_colors(wall, out);
  for (const FurnitureBox& b : spec.boxes) out.push_back(b.color);
  return out;
}

std::vector<Color> furniture_palette(const SceneSpec& spec) {
  std::vector<Color> out;
  for (const FurnitureBox& b : spec.boxes) out.push_back(b.color);
  return out;
}

}  // namespace panomix
