// JSON (de)serialization of AugmentConfig. Every key is optional on read;
// unknown keys and bad enum spellings are config errors naming the key.

#include <cstdio>
#include <set>

#include <json.hpp>

#include "panomix/pipeline.hpp"

namespace panomix {

using nlohmann::json;

namespace {

template <typename E>
struct EnumNames;

template <>
struct EnumNames<StyleStrategy> {
  static constexpr std::pair<StyleStrategy, const char*> values[] = {
      {StyleStrategy::warp_align, "warp_align"},
      {StyleStrategy::flat_stat, "flat_stat"}};
};
template <>
struct EnumNames<ColorSpace> {
  static constexpr std::pair<ColorSpace, const char*> values[] = {
      {ColorSpace::linear_rgb, "linear_rgb"},
      {ColorSpace::decorrelated_luma_chroma, "decorrelated_luma_chroma"}};
};
template <>
struct EnumNames<FillPolicy> {
  static constexpr std::pair<FillPolicy, const char*> values[] = {
      {FillPolicy::column_interpolate, "column_interpolate"},
      {FillPolicy::region_stat_fill, "region_stat_fill"}};
};
template <>
struct EnumNames<VerticalPolicy::Mode> {
  static constexpr std::pair<VerticalPolicy::Mode, const char*> values[] = {
      {VerticalPolicy::Mode::bijective, "bijective"},
      {VerticalPolicy::Mode::fixed, "fixed"}};
};
template <>
struct EnumNames<HorizontalMode> {
  static constexpr std::pair<HorizontalMode, const char*> values[] = {
      {HorizontalMode::plan_fraction, "plan_fraction"},
      {HorizontalMode::linear, "linear"}};
};

template <typename E>
std::string enum_name(E value) {
  for (const auto& [v, name] : EnumNames<E>::values) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E>
E enum_value(const json& j, const std::string& key) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    for (const auto& [v, name] : EnumNames<E>::values) {
      if (s == name) return v;
    }
  }
  std::string allowed;
  for (const auto& [v, name] : EnumNames<E>::values) {
    allowed += allowed.empty() ? name : std::string(" | ") + name;
  }
  throw Error(ErrorCode::config,
              "config key '" + key + "' must be one of: " + allowed);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::config, "config '" + where + "' must be an object");
  }
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::config, "unknown config key '" + where +
                                         (where.empty() ? "" : ".") + key + "'");
    }
  }
}

template <typename T>
T typed(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::config, "config key '" + key + "' has the wrong type");
  }
}

json to_json(const AugmentConfig& c) {
  json style = {{"strategy", enum_name(c.style.strategy)},
                {"color_space", enum_name(c.style.color_space)},
                {"noise_seed", c.style.noise_seed},
                {"fill_policy", enum_name(c.style.fill_policy)},
                {"wall_permutation", c.style.wall_permutation}};
  json vertical = {{"mode", enum_name(c.vertical.mode)},
                   {"alpha", c.vertical.alpha},
                   {"beta", c.vertical.beta},
                   {"out_of_range", "clamp"}};
  json j = {{"style", style},
            {"vertical", vertical},
            {"foreground_classes", nullptr},
            {"horizontal", enum_name(c.horizontal)},
            {"extra", {{"roll", c.extra.roll}, {"flip", c.extra.flip}}},
            {"relabel_background", c.relabel_background},
            {"seed", c.seed}};
  if (c.foreground_classes) j["foreground_classes"] = *c.foreground_classes;
  return j;
}

}  // namespace

std::string config_to_json(const AugmentConfig& config) {
  return to_json(config).dump(2);
}

AugmentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, std::string("malformed config JSON: ") + e.what());
  }
  reject_unknown(j, "", {"style", "vertical", "foreground_classes", "horizontal",
                         "extra", "relabel_background", "seed"});
  AugmentConfig c;
  if (j.contains("style")) {
    const json& s = j["style"];
    reject_unknown(s, "style", {"strategy", "color_space", "noise_seed",
                                "fill_policy", "wall_permutation"});
    if (s.contains("strategy")) c.style.strategy = enum_value<StyleStrategy>(s["strategy"], "style.strategy");
    if (s.contains("color_space")) c.style.color_space = enum_value<ColorSpace>(s["color_space"], "style.color_space");
    if (s.contains("noise_seed")) c.style.noise_seed = typed<std::uint64_t>(s["noise_seed"], "style.noise_seed");
    if (s.contains("fill_policy")) c.style.fill_policy = enum_value<FillPolicy>(s["fill_policy"], "style.fill_policy");
    if (s.contains("wall_permutation")) c.style.wall_permutation = typed<std::vector<int>>(s["wall_permutation"], "style.wall_permutation");
  }
  if (j.contains("vertical")) {
    const json& v = j["vertical"];
    reject_unknown(v, "vertical", {"mode", "alpha", "beta", "out_of_range"});
    if (v.contains("mode")) c.vertical.mode = enum_value<VerticalPolicy::Mode>(v["mode"], "vertical.mode");
    if (v.contains("alpha")) c.vertical.alpha = typed<double>(v["alpha"], "vertical.alpha");
    if (v.contains("beta")) c.vertical.beta = typed<double>(v["beta"], "vertical.beta");
    if (v.contains("out_of_range") && v["out_of_range"] != "clamp") {
      throw Error(ErrorCode::config, "config key 'vertical.out_of_range' must be: clamp");
    }
    if (!(c.vertical.alpha > 0.0) || !(c.vertical.beta > 0.0)) {
      throw Error(ErrorCode::config, "vertical.alpha and vertical.beta must be > 0");
    }
  }
  if (j.contains("foreground_classes") && !j["foreground_classes"].is_null()) {
    c.foreground_classes = typed<std::vector<std::string>>(j["foreground_classes"], "foreground_classes");
  }
  if (j.contains("horizontal")) c.horizontal = enum_value<HorizontalMode>(j["horizontal"], "horizontal");
  if (j.contains("extra")) {
    const json& e = j["extra"];
    reject_unknown(e, "extra", {"roll", "flip"});
    if (e.contains("roll")) c.extra.roll = typed<bool>(e["roll"], "extra.roll");
    if (e.contains("flip")) c.extra.flip = typed<bool>(e["flip"], "extra.flip");
  }
  if (j.contains("relabel_background")) c.relabel_background = typed<bool>(j["relabel_background"], "relabel_background");
  if (j.contains("seed")) c.seed = typed<std::uint64_t>(j["seed"], "seed");
  return c;
}

std::string config_hash(const AugmentConfig& config) {
  // The seed is reported next to the hash, so it is left out of it.
  AugmentConfig unseeded = config;
  unseeded.seed = 0;
  const std::string canonical = to_json(unseeded).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace panomix
