#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "test_util.hpp"
#include "wepadim/model_io.hpp"
#include "wepadim/npy.hpp"
#include "wepadim/pipeline.hpp"

namespace wepadim {
namespace {

std::vector<MemorySample> normal_samples(std::size_t n, std::uint64_t seed) {
  std::vector<MemorySample> out;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureStack s = test::random_stack({{3, 8}, {4, 4}}, seed + i, {32, 32});
    s.image_id = "img" + std::to_string(i);
    out.push_back({std::move(s), Label::normal, {}});
  }
  return out;
}

PatchGaussianModel small_model(EmbeddingMethod method = EmbeddingMethod::wavelet) {
  const MemorySource train("c", {32, 32}, normal_samples(6, 100));
  ModelConfig cfg;
  cfg.method = method;
  cfg.wavelet.wavelet = "db2";
  cfg.wavelet.subbands = SubbandSet::parse("LL,HH");
  cfg.random = make_random_selection(5, 7, 4);
  return fit_model(train, cfg);
}

void rewrite_json(const std::filesystem::path& dir, const std::function<void(nlohmann::json&)>& edit) {
  nlohmann::json j = nlohmann::json::parse(test::read_text(dir / "model.json"));
  edit(j);
  std::ofstream(dir / "model.json") << j.dump(2);
}

TEST(ModelIo, RoundTripPreservesEverything) {
  for (const auto method : {EmbeddingMethod::wavelet, EmbeddingMethod::random}) {
    test::TempDir dir("model");
    const PatchGaussianModel m = small_model(method);
    save_model(m, dir.path());
    const PatchGaussianModel back = load_model(dir.path());
    EXPECT_EQ(back.config.method, method);
    EXPECT_EQ(back.config.wavelet, m.config.wavelet);
    EXPECT_EQ(back.channel_layout, m.channel_layout);
    EXPECT_EQ(back.input_size, m.input_size);
    EXPECT_EQ(back.gaussians.grid, m.gaussians.grid);
    EXPECT_EQ(back.gaussians.means, m.gaussians.means);
    EXPECT_EQ(back.gaussians.chol, m.gaussians.chol);
    EXPECT_EQ(back.gaussians.sample_count, 6u);
    EXPECT_EQ(back.gaussians.epsilon, m.gaussians.epsilon);
    if (method == EmbeddingMethod::random) EXPECT_EQ(back.config.random.indices, m.config.random.indices);

    const FeatureStack probe = test::random_stack({{3, 8}, {4, 4}}, 999, {32, 32});
    EXPECT_EQ(score_image(back, probe).full_map, score_image(m, probe).full_map);
  }
}

TEST(ModelIo, TamperingIsDetected) {
  test::TempDir dir("model_tamper");
  save_model(small_model(), dir.path());
  const auto reload = [&] { return test::error_kind([&] { load_model(dir.path()); }); };

  rewrite_json(dir.path(), [](auto& j) { j["layout_hash"] = "0000"; });
  EXPECT_EQ(reload(), ErrorKind::model_compatibility);

  save_model(small_model(), dir.path());
  rewrite_json(dir.path(), [](auto& j) { j["format_version"] = 99; });
  EXPECT_EQ(reload(), ErrorKind::model_compatibility);

  save_model(small_model(), dir.path());
  rewrite_json(dir.path(), [](auto& j) { j["layers"][0]["channels"] = 5; });
  EXPECT_EQ(reload(), ErrorKind::model_compatibility);

  save_model(small_model(), dir.path());
  write_tensor(Tensor::zeros({2, 2}), dir / "means.npy");
  EXPECT_EQ(reload(), ErrorKind::model_compatibility);

  EXPECT_EQ(test::error_kind([] { load_model("/nonexistent/model"); }), ErrorKind::io);
}

TEST(ModelIo, ScoringRejectsMismatchedFeatures) {
  const PatchGaussianModel m = small_model();
  const FeatureStack more_channels = test::random_stack({{4, 8}, {4, 4}}, 1, {32, 32});
  EXPECT_EQ(test::error_kind([&] { score_image(m, more_channels); }), ErrorKind::model_compatibility);
  const FeatureStack bigger = test::random_stack({{3, 16}, {4, 8}}, 1, {64, 64});
  EXPECT_EQ(test::error_kind([&] { score_image(m, bigger); }), ErrorKind::model_compatibility);
}

}  // namespace
}  // namespace wepadim
