// panomix command-line tool. Every failure prints one JSON object on stderr.
//
// Exit codes: 0 success, 1 validation or config error, 2 I/O error,
// 3 batch finished with per-sample failures.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panomix/cli_io.hpp"
#include "panomix/layout_geom.hpp"
#include "panomix/pipeline.hpp"
#include "panomix/seed.hpp"
#include "panomix/synth_oracle.hpp"

namespace {

using namespace panomix;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;
constexpr int kExitPartial = 3;

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::io ? kExitIo : kExitInvalid;
}

void report(int exit_code, const std::string& code, const std::string& message,
            json extra = json::object()) {
  json j = {{"status", exit_code == kExitPartial ? "partial" : "error"},
            {"exit_code", exit_code},
            {"error", {{"code", code}, {"message", message}}}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  std::cerr << j.dump() << '\n';
}

AugmentConfig load_config(const std::string& path, std::uint64_t seed) {
  AugmentConfig cfg = config_from_json(read_text_file(path));
  cfg.seed = seed;
  return cfg;
}

json sources_json(const TripleSpec& s) {
  return {{"structure", s.structure_id}, {"style", s.style_id},
          {"furniture", s.furniture_id}};
}

struct AugmentArgs {
  std::string manifest, structure, style, furniture, config, out;
  std::uint64_t seed = 0;
};

int run_augment(const AugmentArgs& a) {
  const DatasetManifest manifest = read_manifest(a.manifest);
  const AugmentConfig cfg = load_config(a.config, a.seed);
  const ManifestSource source(manifest);
  const TripleSpec spec{a.structure, a.style, a.furniture};

  DatasetManifest out;
  out.width = manifest.width;
  out.height = manifest.height;
  out.classes = manifest.classes;
  ManifestSample entry =
      store_sample(augment_spec(source, spec, cfg, 0), a.out, output_id_for(0));
  entry.sources = spec;
  out.samples.push_back(std::move(entry));
  out.provenance = ManifestProvenance{config_hash(cfg), cfg.seed, {}, false};
  write_manifest(out, fs::path(a.out) / "manifest.json");
  std::cout << "wrote " << out.samples.front().id << " to " << a.out << '\n';
  return kExitOk;
}

struct BatchArgs {
  std::string manifest, config, out;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  int workers = 1;
};

int run_batch(const BatchArgs& a) {
  const DatasetManifest manifest = read_manifest(a.manifest);
  const AugmentConfig cfg = load_config(a.config, a.seed);

  std::vector<std::string> ids;
  std::vector<int> walls;
  for (const ManifestSample& s : manifest.samples) {
    ids.push_back(s.id);
    walls.push_back(static_cast<int>(s.layout.size()));
  }
  const std::vector<TripleSpec> specs = select_triples(ids, a.count, cfg.seed, walls);

  const ManifestSource source(manifest);
  DirectorySink sink(a.out);
  const BatchManifest batch = batch_augment(source, specs, cfg, sink, a.workers);
  write_manifest(batch_output_manifest(batch, sink, manifest.width, manifest.height,
                                       manifest.classes),
                 fs::path(a.out) / "manifest.json");

  const std::size_t failed = batch.failures();
  std::cout << "wrote " << batch.records.size() - failed << " of " << specs.size()
            << " samples to " << a.out << '\n';
  if (batch.aborted) {
    report(kExitIo, "io", batch.abort_reason,
           {{"written", batch.records.size() - failed}, {"requested", specs.size()}});
    return kExitIo;
  }
  if (failed > 0) {
    json failures = json::array();
    for (const BatchRecord& r : batch.records) {
      if (!r.ok) {
        failures.push_back(
            {{"index", r.index}, {"sources", sources_json(r.sources)}, {"error", r.error}});
      }
    }
    report(kExitPartial, "partial_batch",
           std::to_string(failed) + " of " + std::to_string(specs.size()) +
               " samples failed",
           {{"failures", failures}});
    return kExitPartial;
  }
  return kExitOk;
}

struct StretchArgs {
  std::string manifest, id, out;
  double kx = 1.0, kz = 1.0;
};

int run_stretch(const StretchArgs& a) {
  const DatasetManifest manifest = read_manifest(a.manifest);
  const Sample stretched = panostretch_image(load_sample(manifest, a.id), a.kx, a.kz);
  if (const auto issues = validate_sample(stretched); !issues.empty()) {
    throw Error(ErrorCode::geometry, "stretched sample: " + issues.front());
  }
  DatasetManifest out;
  out.width = manifest.width;
  out.height = manifest.height;
  out.classes = manifest.classes;
  out.samples.push_back(store_sample(stretched, a.out, a.id + "_stretch"));
  write_manifest(out, fs::path(a.out) / "manifest.json");
  std::cout << "wrote " << out.samples.front().id << " to " << a.out << '\n';
  return kExitOk;
}

struct SynthArgs {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  int height = 256;
  int width = 0;  // 0: twice the height
  std::string out;
};

int run_synth(SynthArgs a) {
  if (a.width == 0) a.width = 2 * a.height;
  if (a.height < 8 || a.width != 2 * a.height) {
    throw Error(ErrorCode::invalid_argument, "need width = 2 * height and height >= 8");
  }
  DatasetManifest out;
  out.width = a.width;
  out.height = a.height;
  out.classes = default_scene_classes();
  for (std::size_t i = 0; i < a.count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "synth_%06zu", i);
    const Sample sample = render_scene(random_scene(mix_seed(a.seed, i)), a.height, a.width);
    out.samples.push_back(store_sample(sample, a.out, id));
    write_text_file(fs::path(a.out) / "layouts" / (std::string(id) + ".txt"),
                    corner_txt(sample.layout));
  }
  write_manifest(out, fs::path(a.out) / "manifest.json");
  std::cout << "wrote " << a.count << " samples to " << a.out << '\n';
  return kExitOk;
}

int run_validate(const std::string& path) {
  const DatasetManifest manifest = read_manifest(path);
  json problems = json::array();
  for (const ManifestSample& s : manifest.samples) {
    try {
      for (const std::string& issue : validate_sample(load_sample(manifest, s.id))) {
        problems.push_back({{"id", s.id}, {"issue", issue}});
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::io) throw;
      problems.push_back({{"id", s.id}, {"issue", e.what()}});
    }
  }
  if (!problems.empty()) {
    report(kExitInvalid, "validation",
           std::to_string(problems.size()) + " problems in " + path,
           {{"problems", problems}});
    return kExitInvalid;
  }
  std::cout << manifest.samples.size() << " samples OK\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Panorama augmentation by swapping structure, style and furniture"};
  app.require_subcommand(1);

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Augment one (structure, style, furniture) triple");
  augment->add_option("--manifest", aug.manifest)->required();
  augment->add_option("--structure", aug.structure)->required();
  augment->add_option("--style", aug.style)->required();
  augment->add_option("--furniture", aug.furniture)->required();
  augment->add_option("--config", aug.config)->required();
  augment->add_option("--seed", aug.seed)->required();
  augment->add_option("--out", aug.out)->required();

  BatchArgs bat;
  auto* batch = app.add_subcommand("batch", "Generate an augmented dataset offline");
  batch->add_option("--manifest", bat.manifest)->required();
  batch->add_option("--count", bat.count)->required();
  batch->add_option("--config", bat.config)->required();
  batch->add_option("--seed", bat.seed)->required();
  batch->add_option("--out", bat.out)->required();
  batch->add_option("--workers", bat.workers, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  StretchArgs str;
  auto* stretch = app.add_subcommand("stretch", "Stretch one sample along x and z");
  stretch->add_option("--manifest", str.manifest)->required();
  stretch->add_option("--id", str.id)->required();
  stretch->add_option("--kx", str.kx)->required();
  stretch->add_option("--kz", str.kz)->required();
  stretch->add_option("--out", str.out)->required();

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Render random cuboid rooms");
  synth->add_option("--count", syn.count)->required();
  synth->add_option("--seed", syn.seed)->required();
  synth->add_option("--height", syn.height)->capture_default_str();
  synth->add_option("--width", syn.width, "defaults to twice the height");
  synth->add_option("--out", syn.out)->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check every sample of a manifest");
  validate->add_option("--manifest", validate_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report(kExitInvalid, "usage", e.what());
    return kExitInvalid;
  }

  try {
    if (augment->parsed()) return run_augment(aug);
    if (batch->parsed()) return run_batch(bat);
    if (stretch->parsed()) return run_stretch(str);
    if (synth->parsed()) return run_synth(syn);
    if (validate->parsed()) return run_validate(validate_path);
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    report(code, std::string(to_string(e.code())), e.what());
    return code;
  } catch (const std::exception& e) {
    report(kExitIo, "internal", e.what());
    return kExitIo;
  }
  return kExitInvalid;
}
