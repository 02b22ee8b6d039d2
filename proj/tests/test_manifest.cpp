#include <gtest/gtest.h>

#include "test_util.hpp"
#include "wepadim/manifest.hpp"
#include "wepadim/npy.hpp"
#include "wepadim/pgm.hpp"
#include "wepadim/sample_source.hpp"

namespace wepadim {
namespace {

using test::error_kind;

// Writes a two-layer test corpus with one normal and one anomalous image.
CorpusManifest write_small_corpus(const std::filesystem::path& root) {
  std::filesystem::create_directories(root / "feat");
  CorpusManifest m;
  m.corpus_root = root;
  m.class_name = "widget";
  m.split = Split::test;
  m.input_size = {8, 8};
  m.layers = {"a", "b"};
  for (int i = 0; i < 2; ++i) {
    ManifestEntry e;
    e.id = "img" + std::to_string(i);
    e.label = i == 0 ? Label::normal : Label::anomalous;
    write_tensor(test::random_tensor({3, 4, 4}, 10 + i), root / "feat" / (e.id + "_a.npy"));
    write_tensor(test::random_tensor({5, 2, 2}, 20 + i), root / "feat" / (e.id + "_b.npy"));
    e.files = {{"a", "feat/" + e.id + "_a.npy"}, {"b", "feat/" + e.id + "_b.npy"}};
    if (i == 1) {
      Greymap g{8, 8, 255, std::vector<std::uint16_t>(64, 0)};
      g.pixels[9] = 255;
      g.pixels[10] = 3;
      write_pgm(g, root / "mask1.pgm");
      e.mask = "mask1.pgm";
    }
    m.entries.push_back(e);
  }
  write_manifest(m, root / "manifest.json");
  return m;
}

TEST(Manifest, RoundTripAndLoad) {
  test::TempDir dir("manifest");
  const CorpusManifest written = write_small_corpus(dir.path());
  const CorpusManifest m = read_manifest(dir / "manifest.json");
  EXPECT_EQ(m.class_name, "widget");
  EXPECT_EQ(m.split, Split::test);
  EXPECT_EQ(m.input_size, (ImageSize{8, 8}));
  EXPECT_EQ(m.layers, written.layers);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[1].mask, written.entries[1].mask);
  EXPECT_EQ(m.corpus_root, dir.path());

  const FeatureStack s = load_feature_stack(m, "img1");
  ASSERT_EQ(s.layers.size(), 2u);
  EXPECT_EQ(s.layers[0].tensor, test::random_tensor({3, 4, 4}, 11));
  EXPECT_EQ(s.input_size, (ImageSize{8, 8}));

  const Tensor mask = load_mask(m, "img1");
  double total = 0.0;
  for (const double v : mask.values()) total += v;
  EXPECT_EQ(total, 2.0);  // any nonzero pixel counts
  EXPECT_EQ(mask(1, 1), 1.0);
  EXPECT_EQ(load_mask(m, "img0").values()[0], 0.0);

  const ManifestSource src(m);
  EXPECT_EQ(src.size(), 2u);
  EXPECT_EQ(src.label(1), Label::anomalous);
  EXPECT_EQ(src.mask(1), mask);
}

TEST(Manifest, ProtocolViolations) {
  CorpusManifest m;
  m.split = Split::train;
  m.layers = {"a"};
  ManifestEntry e{"x", {{"a", "x.npy"}}, Label::anomalous, std::string("m.pgm")};
  m.entries = {e};
  EXPECT_EQ(error_kind([&] { validate_manifest(m); }), ErrorKind::manifest);

  m.split = Split::test;
  m.entries[0].mask.reset();
  EXPECT_EQ(error_kind([&] { validate_manifest(m); }), ErrorKind::manifest);

  m.entries[0].mask = "m.pgm";
  m.entries[0].files.clear();
  EXPECT_EQ(error_kind([&] { validate_manifest(m); }), ErrorKind::manifest);

  m.entries[0].files = {{"a", "x.npy"}};
  EXPECT_NO_THROW(validate_manifest(m));
  EXPECT_EQ(error_kind([&] { m.entry("missing"); }), ErrorKind::manifest);
}

TEST(Manifest, MaskSizeMustMatchInput) {
  test::TempDir dir("mask_size");
  CorpusManifest m = write_small_corpus(dir.path());
  m.input_size = {8, 9};
  EXPECT_EQ(error_kind([&] { load_mask(m, "img1"); }), ErrorKind::manifest);
}

TEST(Manifest, MalformedJsonIsManifestError) {
  test::TempDir dir("bad_json");
  {
    std::ofstream out(dir / "manifest.json");
    out << "{\"class\": \"x\", \"split\": \"train\"}";
  }
  EXPECT_EQ(error_kind([&] { read_manifest(dir / "manifest.json"); }), ErrorKind::manifest);
  EXPECT_EQ(error_kind([&] { read_manifest(dir / "absent.json"); }), ErrorKind::io);
}

TEST(FeatureStack, Validation) {
  FeatureStack s = test::random_stack({{4, 8}, {8, 4}}, 1);
  EXPECT_NO_THROW(validate_feature_stack(s));

  FeatureStack equal = test::random_stack({{4, 8}, {8, 8}}, 1);
  EXPECT_NO_THROW(validate_feature_stack(equal));

  FeatureStack grows = test::random_stack({{4, 4}, {8, 8}}, 1);
  EXPECT_EQ(error_kind([&] { validate_feature_stack(grows); }), ErrorKind::manifest);

  FeatureStack mixed = s;
  mixed.layers[1].tensor.set_dtype(DType::f32);
  EXPECT_EQ(error_kind([&] { validate_feature_stack(mixed); }), ErrorKind::manifest);

  FeatureStack flat = s;
  flat.layers[0].tensor = Tensor::zeros({8, 8});
  EXPECT_EQ(error_kind([&] { validate_feature_stack(flat); }), ErrorKind::manifest);

  EXPECT_EQ(error_kind([] { validate_feature_stack(FeatureStack{}); }), ErrorKind::manifest);
}

TEST(MemorySource, AnomaliesNeedMasks) {
  MemorySample normal{test::random_stack({{2, 4}}, 1), Label::normal, {}};
  MemorySample anomalous{test::random_stack({{2, 4}}, 2), Label::anomalous, {}};
  EXPECT_EQ(error_kind([&] { MemorySource("c", {16, 16}, {normal, anomalous}); }), ErrorKind::manifest);
  anomalous.mask = Tensor::zeros({16, 15});
  EXPECT_EQ(error_kind([&] { MemorySource("c", {16, 16}, {normal, anomalous}); }), ErrorKind::manifest);
  anomalous.mask = Tensor::zeros({16, 16});
  const MemorySource src("c", {16, 16}, {normal, anomalous});
  EXPECT_EQ(src.mask(0), Tensor::zeros({16, 16}));
}

}  // namespace
}  // namespace wepadim
