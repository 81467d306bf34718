#include "panomix/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace panomix {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::parse, "manifest " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> known) {
  if (!obj.is_object()) parse_fail(where, "expected an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) parse_fail(where, "unknown field '" + key + "'");
  }
}

const json& required(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) parse_fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

template <typename T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    parse_fail(where, "wrong type");
  }
}

Layout parse_layout(const json& j, const std::string& where, int height,
                    int width) {
  if (!j.is_array()) parse_fail(where, "layout must be an array");
  Layout layout;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const auto row = get_as<std::vector<double>>(j[i], at);
    if (row.size() != 3) parse_fail(at, "expected [column, ceil_row, floor_row]");
    layout.corners.push_back({row[0], row[1], row[2]});
  }
  if (layout.size() < 3) parse_fail(where, "need at least 3 corners");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const Corner& c = layout.corners[i];
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!(c.column >= 0.0 && c.column < width)) parse_fail(at, "column outside [0, width)");
    if (i > 0 && !(layout.corners[i - 1].column < c.column)) {
      parse_fail(at, "columns must be strictly increasing");
    }
    if (!(c.ceil_row >= 0.0 && c.ceil_row < c.floor_row && c.floor_row < height)) {
      parse_fail(at, "need 0 <= ceil_row < floor_row < height");
    }
  }
  return layout;
}

json layout_to_json(const Layout& layout) {
  json arr = json::array();
  for (const Corner& c : layout.corners) {
    arr.push_back({c.column, c.ceil_row, c.floor_row});
  }
  return arr;
}

TripleSpec parse_sources(const json& j, const std::string& where) {
  check_keys(j, where, {"structure", "style", "furniture"});
  return {get_as<std::string>(required(j, where, "structure"), where + ".structure"),
          get_as<std::string>(required(j, where, "style"), where + ".style"),
          get_as<std::string>(required(j, where, "furniture"), where + ".furniture")};
}

json sources_to_json(const TripleSpec& s) {
  return {{"structure", s.structure_id}, {"style", s.style_id},
          {"furniture", s.furniture_id}};
}

cv::Mat read_png(const fs::path& path, int flags) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::io, "missing file " + path.string());
  }
  cv::Mat mat = cv::imread(path.string(), flags);
  if (mat.empty()) {
    throw Error(ErrorCode::io, "cannot decode image " + path.string());
  }
  return mat;
}

void write_png(const fs::path& path, const cv::Mat& mat) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception&) {
    ok = false;
  }
  if (!ok) throw Error(ErrorCode::io, "cannot write " + path.string());
}

}  // namespace

const ManifestSample& DatasetManifest::find(const std::string& id) const {
  const auto it = std::find_if(samples.begin(), samples.end(),
                               [&](const ManifestSample& s) { return s.id == id; });
  if (it == samples.end()) {
    throw Error(ErrorCode::load, "sample id '" + id + "' not in manifest");
  }
  return *it;
}

DatasetManifest parse_manifest(const std::string& text, fs::path base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, std::string("malformed manifest JSON: ") + e.what());
  }
  check_keys(j, "root", {"width", "height", "classes", "unlabeled_class",
                         "samples", "provenance"});
  DatasetManifest m;
  m.base_dir = std::move(base_dir);
  m.width = get_as<int>(required(j, "root", "width"), "width");
  m.height = get_as<int>(required(j, "root", "height"), "height");
  if (m.height < 8 || m.width != 2 * m.height) {
    parse_fail("root", "need width = 2 * height and height >= 8");
  }
  m.classes = get_as<std::vector<std::string>>(required(j, "root", "classes"), "classes");
  if (m.classes.empty() || m.classes.size() > 255) {
    parse_fail("classes", "need 1..255 class names");
  }
  if (j.contains("unlabeled_class")) {
    m.unlabeled_class = get_as<std::string>(j["unlabeled_class"], "unlabeled_class");
    if (std::find(m.classes.begin(), m.classes.end(), *m.unlabeled_class) ==
        m.classes.end()) {
      parse_fail("unlabeled_class", "'" + *m.unlabeled_class + "' is not a class");
    }
  }

  const json& samples = required(j, "root", "samples");
  if (!samples.is_array()) parse_fail("samples", "must be an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string where = "samples[" + std::to_string(i) + "]";
    const json& s = samples[i];
    check_keys(s, where, {"id", "image", "mask", "layout", "sources"});
    ManifestSample entry;
    entry.id = get_as<std::string>(required(s, where, "id"), where + ".id");
    if (!seen.insert(entry.id).second) {
      parse_fail(where, "duplicate id '" + entry.id + "'");
    }
    entry.image = get_as<std::string>(required(s, where, "image"), where + ".image");
    entry.mask = get_as<std::string>(required(s, where, "mask"), where + ".mask");
    entry.layout = parse_layout(required(s, where, "layout"), where + ".layout",
                                m.height, m.width);
    if (s.contains("sources")) entry.sources = parse_sources(s["sources"], where + ".sources");
    m.samples.push_back(std::move(entry));
  }

  if (j.contains("provenance")) {
    const json& p = j["provenance"];
    check_keys(p, "provenance", {"config_hash", "seed", "failures", "aborted"});
    ManifestProvenance prov;
    prov.config_hash = get_as<std::string>(required(p, "provenance", "config_hash"),
                                           "provenance.config_hash");
    prov.seed = get_as<std::uint64_t>(required(p, "provenance", "seed"), "provenance.seed");
    if (p.contains("aborted")) prov.aborted = get_as<bool>(p["aborted"], "provenance.aborted");
    if (p.contains("failures")) {
      const json& fl = p["failures"];
      if (!fl.is_array()) parse_fail("provenance.failures", "must be an array");
      for (std::size_t i = 0; i < fl.size(); ++i) {
        const std::string where = "provenance.failures[" + std::to_string(i) + "]";
        check_keys(fl[i], where, {"index", "sources", "error"});
        prov.failures.push_back(
            {get_as<std::size_t>(required(fl[i], where, "index"), where + ".index"),
             parse_sources(required(fl[i], where, "sources"), where + ".sources"),
             get_as<std::string>(required(fl[i], where, "error"), where + ".error")});
      }
    }
    m.provenance = std::move(prov);
  }
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  json j;
  j["width"] = m.width;
  j["height"] = m.height;
  j["classes"] = m.classes;
  if (m.unlabeled_class) j["unlabeled_class"] = *m.unlabeled_class;
  json samples = json::array();
  for (const ManifestSample& s : m.samples) {
    json e = {{"id", s.id}, {"image", s.image}, {"mask", s.mask},
              {"layout", layout_to_json(s.layout)}};
    if (s.sources) e["sources"] = sources_to_json(*s.sources);
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  if (m.provenance) {
    json failures = json::array();
    for (const FailureRecord& f : m.provenance->failures) {
      failures.push_back({{"index", f.index},
                          {"sources", sources_to_json(f.sources)},
                          {"error", f.error}});
    }
    j["provenance"] = {{"config_hash", m.provenance->config_hash},
                       {"seed", m.provenance->seed},
                       {"failures", std::move(failures)},
                       {"aborted", m.provenance->aborted}};
  }
  return j.dump(2) + "\n";
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw Error(ErrorCode::io, "cannot write " + path.string());
  }
}

DatasetManifest read_manifest(const fs::path& path) {
  return parse_manifest(read_text_file(path), path.parent_path());
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_text_file(path, manifest_to_json(manifest));
}

Sample load_sample(const DatasetManifest& manifest, const std::string& id) {
  const ManifestSample& entry = manifest.find(id);
  const int h = manifest.height;
  const int w = manifest.width;

  const cv::Mat bgr = read_png(manifest.base_dir / entry.image, cv::IMREAD_UNCHANGED);
  if (bgr.type() != CV_8UC3) {
    throw Error(ErrorCode::load, "sample '" + id + "': image must be 8-bit RGB");
  }
  if (bgr.rows != h || bgr.cols != w) {
    throw Error(ErrorCode::load, "sample '" + id + "': image is " +
                                     std::to_string(bgr.cols) + "x" + std::to_string(bgr.rows) +
                                     ", manifest says " + std::to_string(w) + "x" +
                                     std::to_string(h));
  }
  const cv::Mat gray = read_png(manifest.base_dir / entry.mask, cv::IMREAD_UNCHANGED);
  if (gray.type() != CV_8UC1) {
    throw Error(ErrorCode::load, "sample '" + id + "': mask must be 8-bit single-channel");
  }
  if (gray.rows != h || gray.cols != w) {
    throw Error(ErrorCode::load, "sample '" + id + "': mask size differs from manifest");
  }

  Sample sample{Panorama(h, w), SemanticMask(h, w, manifest.classes), entry.layout};
  for (int r = 0; r < h; ++r) {
    const auto* px = bgr.ptr<cv::Vec3b>(r);
    for (int c = 0; c < w; ++c) {
      sample.image.at(r, c) = {px[c][2] / 255.0, px[c][1] / 255.0, px[c][0] / 255.0};
    }
  }

  int unlabeled = -1;
  if (manifest.unlabeled_class) {
    unlabeled = static_cast<int>(
        std::find(manifest.classes.begin(), manifest.classes.end(),
                  *manifest.unlabeled_class) -
        manifest.classes.begin());
  }
  const int classes = static_cast<int>(manifest.classes.size());
  std::size_t bad = 0;
  for (int r = 0; r < h; ++r) {
    const auto* px = gray.ptr<std::uint8_t>(r);
    for (int c = 0; c < w; ++c) {
      int v = px[c];
      if (v == kUnlabeledValue && unlabeled >= 0) v = unlabeled;
      if (v >= classes) {
        ++bad;
        v = 0;
      }
      sample.mask.at(r, c) = static_cast<Label>(v);
    }
  }
  if (bad > 0) {
    throw Error(ErrorCode::load, "sample '" + id + "': " + std::to_string(bad) +
                                     " mask pixels hold a class index >= " +
                                     std::to_string(classes));
  }
  return sample;
}

ManifestSample store_sample(const Sample& sample, const fs::path& dir,
                            const std::string& id) {
  const int h = sample.height();
  const int w = sample.width();
  cv::Mat bgr(h, w, CV_8UC3);
  cv::Mat gray(h, w, CV_8UC1);
  auto quantize = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  for (int r = 0; r < h; ++r) {
    auto* px = bgr.ptr<cv::Vec3b>(r);
    auto* lx = gray.ptr<std::uint8_t>(r);
    for (int c = 0; c < w; ++c) {
      const Color& v = sample.image.at(r, c);
      px[c] = cv::Vec3b(quantize(v[2]), quantize(v[1]), quantize(v[0]));
      lx[c] = sample.mask.at(r, c);
    }
  }
  ManifestSample entry;
  entry.id = id;
  entry.image = "images/" + id + ".png";
  entry.mask = "masks/" + id + ".png";
  entry.layout = sample.layout;
  write_png(dir / entry.image, bgr);
  write_png(dir / entry.mask, gray);
  return entry;
}

Layout parse_corner_txt(const std::string& text) {
  std::vector<std::pair<double, double>> points;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double x = 0.0;
    double y = 0.0;
    std::string rest;
    if (!(ls >> x >> y) || (ls >> rest)) {
      throw Error(ErrorCode::adapter,
                  "line " + std::to_string(line_no) + ": expected 'x y'");
    }
    points.emplace_back(x, y);
  }
  if (points.empty() || points.size() % 2 != 0) {
    throw Error(ErrorCode::adapter, "corner file needs an even, non-zero number of lines, got " +
                                        std::to_string(points.size()));
  }

  const std::size_t corners = points.size() / 2;
  std::vector<Corner> out;
  for (std::size_t i = 0; i < corners; ++i) {
    const auto& ceil = points[2 * i];
    const auto& floor = points[2 * i + 1];
    if (ceil.first != floor.first) {
      // All ceilings first, then all floors, is a common alternative.
      bool blocked = true;
      for (std::size_t k = 0; k < corners && blocked; ++k) {
        blocked = points[k].first == points[k + corners].first;
      }
      throw Error(ErrorCode::adapter,
                  "corner " + std::to_string(i) + ": ceiling and floor x differ" +
                      (blocked ? " (file looks like all-ceilings-then-all-floors "
                                 "ordering; interleaved pairs expected)"
                               : ""));
    }
    if (!(floor.second > ceil.second)) {
      throw Error(ErrorCode::adapter, "corner " + std::to_string(i) +
                                          ": floor y must be below ceiling y");
    }
    out.push_back({ceil.first, ceil.second, floor.second});
  }
  Layout layout = sorted_layout(std::move(out));
  for (std::size_t i = 1; i < layout.size(); ++i) {
    if (!(layout.corners[i - 1].column < layout.corners[i].column)) {
      throw Error(ErrorCode::adapter, "corner columns are not strictly increasing");
    }
  }
  return layout;
}

std::string corner_txt(const Layout& layout) {
  std::ostringstream out;
  out.precision(17);
  for (const Corner& c : layout.corners) {
    out << c.column << ' ' << c.ceil_row << '\n';
    out << c.column << ' ' << c.floor_row << '\n';
  }
  return out.str();
}

ManifestSample adapt_corner_txt(const fs::path& txt, const std::string& image,
                                const std::string& mask, std::string id) {
  ManifestSample entry;
  entry.id = std::move(id);
  entry.image = image;
  entry.mask = mask;
  entry.layout = parse_corner_txt(read_text_file(txt));
  return entry;
}

void DirectorySink::write(const std::string& id, const Sample& sample,
                          const TripleSpec& sources) {
  ManifestSample entry = store_sample(sample, dir_, id);
  entry.sources = sources;
  std::lock_guard lock(mutex_);
  entries_.push_back(std::move(entry));
}

std::optional<ManifestSample> DirectorySink::entry(const std::string& id) const {
  std::lock_guard lock(mutex_);
  for (const ManifestSample& e : entries_) {
    if (e.id == id) return e;
  }
  return std::nullopt;
}

DatasetManifest batch_output_manifest(const BatchManifest& batch,
                                      const DirectorySink& sink, int width,
                                      int height,
                                      std::vector<std::string> classes) {
  DatasetManifest m;
  m.width = width;
  m.height = height;
  m.classes = std::move(classes);
  ManifestProvenance prov;
  prov.config_hash = batch.config_hash;
  prov.seed = batch.seed;
  prov.aborted = batch.aborted;
  for (const BatchRecord& rec : batch.records) {
    if (rec.ok) {
      if (auto e = sink.entry(rec.output_id)) m.samples.push_back(std::move(*e));
    } else {
      prov.failures.push_back({rec.index, rec.sources, rec.error});
    }
  }
  m.provenance = std::move(prov);
  return m;
}

DatasetManifest concat_manifests(const DatasetManifest& original,
                                 const DatasetManifest& augmented,
                                 const fs::path& out_dir) {
  if (original.width != augmented.width || original.height != augmented.height ||
      original.classes != augmented.classes) {
    throw Error(ErrorCode::incompatible_samples,
                "manifests differ in image size or class vocabulary");
  }
  DatasetManifest m = original;
  m.base_dir = out_dir;
  m.provenance.reset();
  m.samples.clear();
  std::set<std::string> seen;
  for (const DatasetManifest* src : {&original, &augmented}) {
    const fs::path rel = fs::relative(src->base_dir.empty() ? fs::path(".") : src->base_dir,
                                      out_dir.empty() ? fs::path(".") : out_dir);
    for (ManifestSample s : src->samples) {
      if (!seen.insert(s.id).second) {
        throw Error(ErrorCode::parse, "duplicate id '" + s.id + "' across manifests");
      }
      s.image = (rel / s.image).lexically_normal().generic_string();
      s.mask = (rel / s.mask).lexically_normal().generic_string();
      m.samples.push_back(std::move(s));
    }
  }
  return m;
}

}  // namespace panomix
