#include "wepadim/model_io.hpp"

#include <fstream>

#include "json_include.hpp"
#include "wepadim/error.hpp"
#include "wepadim/npy.hpp"

namespace wepadim {

using nlohmann::json;

ChannelLayout layout_for(const ModelConfig& config, const std::vector<LayerChannels>& layers) {
  if (config.method == EmbeddingMethod::random) return random_channel_layout(layers, config.random);
  return wavelet_channel_layout(layers, config.wavelet.subbands);
}

void save_model(const PatchGaussianModel& model, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create model directory " + dir.string() + ": " + ec.message());

  const auto& cfg = model.config;
  json j;
  j["format_version"] = kModelFormatVersion;
  j["method"] = cfg.method == EmbeddingMethod::wavelet ? "wavelet" : "random";
  j["wavelet"] = cfg.wavelet.wavelet;
  j["level"] = cfg.wavelet.level;
  j["subbands"] = cfg.wavelet.subbands.key();
  j["sigma"] = cfg.wavelet.sigma;
  j["cov_reg"] = cfg.wavelet.cov_reg;
  if (cfg.method == EmbeddingMethod::random) {
    j["random"] = {{"seed", cfg.random.seed}, {"dims", cfg.random.dims}, {"indices", cfg.random.indices}};
  }
  json layers = json::array();
  for (const auto& l : model.layers) layers.push_back({{"name", l.name}, {"channels", l.channels}});
  j["layers"] = std::move(layers);
  j["input_size"] = {model.input_size.height, model.input_size.width};
  j["grid"] = {model.gaussians.grid.height, model.gaussians.grid.width};
  j["dims"] = model.gaussians.dims;
  j["layout_hash"] = layout_hash(model.channel_layout);
  j["sample_count"] = model.gaussians.sample_count;
  j["epsilon"] = model.gaussians.epsilon;

  std::ofstream out(dir / "model.json", std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + (dir / "model.json").string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::io, "failed writing " + (dir / "model.json").string());

  write_tensor(model.gaussians.means, dir / "means.npy");
  write_tensor(model.gaussians.chol, dir / "chol.npy");
}

PatchGaussianModel load_model(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) fail(ErrorKind::io, "cannot open " + (dir / "model.json").string());
  PatchGaussianModel model;
  std::string stored_hash;
  std::size_t stored_dims = 0;
  try {
    const json j = json::parse(in);
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      fail(ErrorKind::model_compatibility, "model format version " + std::to_string(version) +
                                               " is not supported (expected " +
                                               std::to_string(kModelFormatVersion) + ")");
    }
    auto& cfg = model.config;
    const auto method = j.at("method").get<std::string>();
    if (method == "wavelet") cfg.method = EmbeddingMethod::wavelet;
    else if (method == "random") cfg.method = EmbeddingMethod::random;
    else fail(ErrorKind::model_compatibility, "unknown embedding method '" + method + "'");
    cfg.wavelet.wavelet = j.at("wavelet").get<std::string>();
    cfg.wavelet.level = j.at("level").get<int>();
    cfg.wavelet.subbands = SubbandSet::parse(j.at("subbands").get<std::string>());
    cfg.wavelet.sigma = j.at("sigma").get<double>();
    cfg.wavelet.cov_reg = j.at("cov_reg").get<double>();
    if (cfg.method == EmbeddingMethod::random) {
      const auto& r = j.at("random");
      cfg.random.seed = r.at("seed").get<std::uint64_t>();
      cfg.random.dims = r.at("dims").get<std::size_t>();
      cfg.random.indices = r.at("indices").get<std::vector<std::size_t>>();
    }
    for (const auto& l : j.at("layers")) {
      model.layers.push_back({l.at("name").get<std::string>(), l.at("channels").get<std::size_t>()});
      cfg.wavelet.layers.push_back(model.layers.back().name);
    }
    const auto input = j.at("input_size").get<std::vector<std::size_t>>();
    const auto grid = j.at("grid").get<std::vector<std::size_t>>();
    if (input.size() != 2 || grid.size() != 2) fail(ErrorKind::model_compatibility, "bad size fields");
    model.input_size = {input[0], input[1]};
    model.gaussians.grid = {grid[0], grid[1]};
    stored_dims = j.at("dims").get<std::size_t>();
    stored_hash = j.at("layout_hash").get<std::string>();
    model.gaussians.sample_count = j.at("sample_count").get<std::size_t>();
    model.gaussians.epsilon = j.at("epsilon").get<double>();
  } catch (const json::exception& ex) {
    fail(ErrorKind::model_compatibility, (dir / "model.json").string() + ": " + ex.what());
  } catch (const Error& ex) {
    if (ex.kind() == ErrorKind::model_compatibility) throw;
    fail(ErrorKind::model_compatibility, (dir / "model.json").string() + ": " + ex.what());
  }

  model.channel_layout = layout_for(model.config, model.layers);
  if (layout_hash(model.channel_layout) != stored_hash) {
    fail(ErrorKind::model_compatibility, "stored channel layout hash " + stored_hash +
                                             " does not match the current layout algorithm");
  }
  if (stored_dims != model.channel_layout.size()) {
    fail(ErrorKind::model_compatibility, "stored dims " + std::to_string(stored_dims) +
                                             " disagree with layout dimension " +
                                             std::to_string(model.channel_layout.size()));
  }
  auto& g = model.gaussians;
  g.dims = stored_dims;
  g.means = read_tensor(dir / "means.npy");
  g.chol = read_tensor(dir / "chol.npy");
  const std::size_t p = g.locations();
  if (g.means.shape() != Shape{p, g.dims} || g.chol.shape() != Shape{p, g.dims, g.dims}) {
    fail(ErrorKind::model_compatibility, "model payload shapes do not match model.json");
  }
  return model;
}

}  // namespace wepadim
