#include "wepadim/manifest.hpp"

#include <fstream>

#include "json_include.hpp"
#include "wepadim/error.hpp"
#include "wepadim/npy.hpp"
#include "wepadim/pgm.hpp"

namespace wepadim {

using nlohmann::json;

std::string to_string(Split split) { return split == Split::train ? "train" : "test"; }
std::string to_string(Label label) { return label == Label::normal ? "normal" : "anomalous"; }

void validate_feature_stack(const FeatureStack& stack) {
  if (stack.layers.empty()) fail(ErrorKind::manifest, stack.image_id + ": feature stack has no layers");
  const DType dtype = stack.layers.front().tensor.dtype();
  for (std::size_t i = 0; i < stack.layers.size(); ++i) {
    const auto& layer = stack.layers[i];
    if (layer.tensor.rank() != 3) {
      fail(ErrorKind::manifest, stack.image_id + ": layer '" + layer.name + "' is not rank 3");
    }
    if (layer.tensor.dtype() != dtype) {
      fail(ErrorKind::manifest, stack.image_id + ": layers do not share one dtype");
    }
    if (i > 0) {
      const auto& prev = stack.layers[i - 1].tensor;
      if (layer.tensor.extent(1) > prev.extent(1) || layer.tensor.extent(2) > prev.extent(2)) {
        fail(ErrorKind::manifest, stack.image_id + ": layer '" + layer.name +
                                      "' is spatially larger than the layer before it");
      }
    }
  }
}

const ManifestEntry& CorpusManifest::entry(const std::string& image_id) const {
  for (const auto& e : entries) {
    if (e.id == image_id) return e;
  }
  fail(ErrorKind::manifest, "image id '" + image_id + "' not present in manifest");
}

void validate_manifest(const CorpusManifest& m) {
  if (m.layers.empty()) fail(ErrorKind::manifest, "manifest lists no layers");
  for (const auto& e : m.entries) {
    if (m.split == Split::train && e.label != Label::normal) {
      fail(ErrorKind::manifest, "train split contains anomalous entry '" + e.id + "'");
    }
    if (e.label == Label::anomalous && !e.mask) {
      fail(ErrorKind::manifest, "anomalous entry '" + e.id + "' has no mask");
    }
    for (const auto& layer : m.layers) {
      if (!e.files.contains(layer)) {
        fail(ErrorKind::manifest, "entry '" + e.id + "' has no file for layer '" + layer + "'");
      }
    }
  }
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open manifest " + path.string());
  CorpusManifest m;
  try {
    const json j = json::parse(in);
    m.corpus_root = path.parent_path();
    m.class_name = j.at("class").get<std::string>();
    const auto split = j.at("split").get<std::string>();
    if (split == "train") m.split = Split::train;
    else if (split == "test") m.split = Split::test;
    else fail(ErrorKind::manifest, "unknown split '" + split + "'");
    const auto size = j.at("input_size").get<std::vector<std::size_t>>();
    if (size.size() != 2) fail(ErrorKind::manifest, "input_size must be [H, W]");
    m.input_size = {size[0], size[1]};
    m.layers = j.at("layers").get<std::vector<std::string>>();
    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.id = je.at("id").get<std::string>();
      e.files = je.at("files").get<std::map<std::string, std::string>>();
      const auto label = je.at("label").get<std::string>();
      if (label == "normal") e.label = Label::normal;
      else if (label == "anomalous") e.label = Label::anomalous;
      else fail(ErrorKind::manifest, "unknown label '" + label + "'");
      if (je.contains("mask") && !je.at("mask").is_null()) e.mask = je.at("mask").get<std::string>();
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& ex) {
    fail(ErrorKind::manifest, path.string() + ": " + ex.what());
  }
  validate_manifest(m);
  return m;
}

void write_manifest(const CorpusManifest& m, const std::filesystem::path& path) {
  json j;
  j["class"] = m.class_name;
  j["split"] = to_string(m.split);
  j["input_size"] = {m.input_size.height, m.input_size.width};
  j["layers"] = m.layers;
  json entries = json::array();
  for (const auto& e : m.entries) {
    json je;
    je["id"] = e.id;
    je["files"] = e.files;
    je["label"] = to_string(e.label);
    je["mask"] = e.mask ? json(*e.mask) : json(nullptr);
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::io, "failed writing " + path.string());
}

FeatureStack load_feature_stack(const CorpusManifest& m, const std::string& image_id) {
  const ManifestEntry& e = m.entry(image_id);
  FeatureStack stack;
  stack.image_id = image_id;
  stack.input_size = m.input_size;
  for (const auto& layer : m.layers) {
    const auto it = e.files.find(layer);
    if (it == e.files.end()) {
      fail(ErrorKind::manifest, "entry '" + e.id + "' has no file for layer '" + layer + "'");
    }
    stack.layers.push_back({layer, read_tensor(m.corpus_root / it->second)});
  }
  validate_feature_stack(stack);
  return stack;
}

Tensor load_mask(const CorpusManifest& m, const std::string& image_id) {
  const ManifestEntry& e = m.entry(image_id);
  if (!e.mask) {
    return Tensor::zeros({m.input_size.height, m.input_size.width});
  }
  const Greymap g = read_pgm(m.corpus_root / *e.mask);
  if (g.height != m.input_size.height || g.width != m.input_size.width) {
    fail(ErrorKind::manifest, "mask of '" + e.id + "' does not match input_size");
  }
  Tensor mask = Tensor::zeros({g.height, g.width});
  for (std::size_t i = 0; i < g.pixels.size(); ++i) mask.values()[i] = g.pixels[i] ? 1.0 : 0.0;
  return mask;
}

}  // namespace wepadim
