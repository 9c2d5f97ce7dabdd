#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "specmet/errors.hpp"
#include "specmet/model_store.hpp"

using namespace specmet;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "specmet_store_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream(p) << body;
}

Tensor filled(std::vector<std::int64_t> shape, double start = 0.0, double step = 1.0) {
  Tensor t;
  t.shape = std::move(shape);
  t.data.reserve(static_cast<std::size_t>(t.size()));
  double v = start;
  for (std::int64_t i = 0; i < t.size(); ++i, v += step) t.data.push_back(v);
  return t;
}

ModelBundle tiny_bundle() {
  ModelBundle b;
  b.model_id = "tiny";
  b.group = "g0";
  b.subgroup = "lr=0.1";
  b.hyperparams = {{"lr", 0.1}, {"batch_size", 32.0}};
  b.train_acc = 0.91;
  // test_acc deliberately absent

  LayerSpec fc;
  fc.name = "fc1";
  fc.kind = LayerKind::dense;
  fc.shape = {4, 3};
  fc.weight_file = "fc1.npy";
  fc.bias_file = "fc1_bias.npy";
  fc.activation = Activation::relu;
  b.layers.push_back(fc);

  LayerData d;
  d.weights = filled({4, 3}, 0.25, 0.5);
  d.bias = filled({3}, -1.0, 1.0);
  b.data.push_back(d);
  return b;
}

}  // namespace

TEST_CASE("write/load round trip reproduces every field and byte") {
  const fs::path dir = fresh_dir("roundtrip");
  ModelBundle b = tiny_bundle();
  LayerSpec conv;
  conv.name = "conv1";
  conv.kind = LayerKind::conv2d;
  conv.shape = {3, 3, 4, 5};
  conv.weight_file = "conv1.npy";
  conv.init_file = "conv1_init.npy";
  b.layers.push_back(conv);
  LayerData cd;
  cd.weights = filled({3, 3, 4, 5}, -2.0, 0.125);
  cd.init = filled({3, 3, 4, 5}, 0.0, 0.0625);
  b.data.push_back(cd);

  write_model(b, dir);
  const ModelBundle back = load_model(dir);

  CHECK(back.model_id == "tiny");
  CHECK(back.group == "g0");
  CHECK(back.subgroup == "lr=0.1");
  CHECK(back.hyperparams == b.hyperparams);
  REQUIRE(back.train_acc.has_value());
  CHECK(*back.train_acc == 0.91);
  CHECK(!back.test_acc.has_value());
  REQUIRE(back.depth() == 2);

  CHECK(back.layers[0].kind == LayerKind::dense);
  CHECK(back.layers[0].activation == Activation::relu);
  CHECK(!back.layers[0].init_file.has_value());
  CHECK(back.layers[1].kind == LayerKind::conv2d);
  REQUIRE(back.data[1].init.has_value());

  for (std::size_t l = 0; l < 2; ++l) {
    const auto& a = b.data[l].weights.data;
    const auto& c = back.data[l].weights.data;
    REQUIRE(a.size() == c.size());
    CHECK(std::memcmp(a.data(), c.data(), a.size() * sizeof(double)) == 0);
  }
  REQUIRE(back.data[0].bias.has_value());
  CHECK(back.data[0].bias->data == b.data[0].bias->data);
}

TEST_CASE("missing manifest, missing tensor, and shape mismatch all fail to load") {
  const fs::path none = fresh_dir("no_manifest");
  CHECK_THROWS_AS(load_model(none), LoadError);

  ModelBundle b = tiny_bundle();
  const fs::path gone = fresh_dir("missing_tensor");
  write_model(b, gone);
  fs::remove(gone / "fc1.npy");
  CHECK_THROWS_AS(load_model(gone), LoadError);

  const fs::path mism = fresh_dir("shape_mismatch");
  write_model(b, mism);
  Tensor wrong = filled({5, 3});
  write_array_file(mism / "fc1.npy", wrong);
  CHECK_THROWS_AS(load_model(mism), LoadError);
}

TEST_CASE("manifest validation rejects structural problems") {
  const fs::path dir = fresh_dir("manifest_validation");
  write_array_file(dir / "w.npy", filled({4, 3}));

  SUBCASE("unparseable JSON") {
    write_text(dir / "manifest.json", "{not json");
    CHECK_THROWS_AS(load_model(dir), FormatError);
  }
  SUBCASE("empty model_id") {
    write_text(dir / "manifest.json",
               R"({"model_id": "", "layers": [{"name": "a", "kind": "dense",)"
               R"( "shape": [4, 3], "weight_file": "w.npy"}]})");
    CHECK_THROWS_AS(load_model(dir), LoadError);
  }
  SUBCASE("duplicate layer names") {
    write_text(dir / "manifest.json",
               R"({"model_id": "m", "layers": [)"
               R"({"name": "a", "kind": "dense", "shape": [4, 3], "weight_file": "w.npy"},)"
               R"({"name": "a", "kind": "dense", "shape": [4, 3], "weight_file": "w.npy"}]})");
    CHECK_THROWS_AS(load_model(dir), LoadError);
  }
  SUBCASE("dense shape must have two dims") {
    write_text(dir / "manifest.json",
               R"({"model_id": "m", "layers": [{"name": "a", "kind": "dense",)"
               R"( "shape": [4, 3, 2], "weight_file": "w.npy"}]})");
    CHECK_THROWS_AS(load_model(dir), LoadError);
  }
  SUBCASE("conv kernel must be square") {
    write_array_file(dir / "c.npy", filled({2, 3, 4, 5}));
    write_text(dir / "manifest.json",
               R"({"model_id": "m", "layers": [{"name": "c", "kind": "conv2d",)"
               R"( "shape": [2, 3, 4, 5], "weight_file": "c.npy"}]})");
    CHECK_THROWS_AS(load_model(dir), LoadError);
  }
  SUBCASE("unknown kind") {
    write_text(dir / "manifest.json",
               R"({"model_id": "m", "layers": [{"name": "a", "kind": "sparse",)"
               R"( "shape": [4, 3], "weight_file": "w.npy"}]})");
    CHECK_THROWS_AS(load_model(dir), FormatError);
  }
  SUBCASE("bias shape must be the layer's output width") {
    write_array_file(dir / "b.npy", filled({4}));
    write_text(dir / "manifest.json",
               R"({"model_id": "m", "layers": [{"name": "a", "kind": "dense",)"
               R"( "shape": [4, 3], "weight_file": "w.npy", "bias_file": "b.npy"}]})");
    CHECK_THROWS_AS(load_model(dir), LoadError);
  }
}

TEST_CASE("null and absent optional fields load as empty optionals") {
  const fs::path dir = fresh_dir("nulls");
  write_array_file(dir / "w.npy", filled({4, 3}));
  write_text(dir / "manifest.json",
             R"({"model_id": "m", "group": null, "test_acc": null, "layers":)"
             R"( [{"name": "a", "kind": "dense", "shape": [4, 3],)"
             R"( "weight_file": "w.npy", "activation": null}]})");
  const ModelBundle b = load_model(dir);
  CHECK(b.group.empty());
  CHECK(!b.test_acc.has_value());
  CHECK(!b.train_acc.has_value());
  CHECK(!b.layers[0].activation.has_value());
  CHECK(b.hyperparams.empty());
}

TEST_CASE("dense extraction maps row-major storage onto the matrix") {
  LayerSpec spec;
  spec.name = "fc";
  spec.kind = LayerKind::dense;
  spec.shape = {2, 3};
  const Tensor t = filled({2, 3}, 0.0, 1.0);  // rows (0,1,2) and (3,4,5)

  const auto mats = extract_matrices(spec, t);
  REQUIRE(mats.size() == 1);
  CHECK(mats[0].owner_layer == "fc");
  CHECK(mats[0].slice_index == 0);
  REQUIRE(mats[0].rows() == 2);
  REQUIRE(mats[0].cols() == 3);
  CHECK(mats[0].values(0, 0) == 0.0);
  CHECK(mats[0].values(0, 2) == 2.0);
  CHECK(mats[0].values(1, 0) == 3.0);
  CHECK(mats[0].values(1, 2) == 5.0);
}

TEST_CASE("conv extraction slices the kernel grid row-major") {
  LayerSpec spec;
  spec.name = "conv";
  spec.kind = LayerKind::conv2d;
  spec.shape = {3, 3, 8, 16};
  const Tensor t = filled({3, 3, 8, 16}, 0.0, 1.0);

  const auto mats = extract_matrices(spec, t);
  REQUIRE(mats.size() == 9);
  for (int s = 0; s < 9; ++s) {
    CHECK(mats[static_cast<std::size_t>(s)].slice_index == s);
    CHECK(mats[static_cast<std::size_t>(s)].rows() == 8);
    CHECK(mats[static_cast<std::size_t>(s)].cols() == 16);
  }
  // T[i, j, n, m] = ((i*3 + j)*8 + n)*16 + m in C order
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto& m = mats[static_cast<std::size_t>(i * 3 + j)].values;
      for (int n = 0; n < 8; ++n)
        for (int c = 0; c < 16; ++c)
          CHECK(m(n, c) == ((i * 3 + j) * 8 + n) * 16 + c);
    }
}

TEST_CASE("1x1 conv yields exactly one slice") {
  LayerSpec spec;
  spec.name = "conv1x1";
  spec.kind = LayerKind::conv2d;
  spec.shape = {1, 1, 512, 512};
  Tensor t;
  t.shape = {1, 1, 512, 512};
  t.data.assign(512 * 512, 0.5);
  const auto mats = extract_matrices(spec, t);
  REQUIRE(mats.size() == 1);
  CHECK(mats[0].rows() == 512);
  CHECK(mats[0].cols() == 512);
  CHECK(mats[0].values(511, 511) == 0.5);
}

TEST_CASE("extraction refuses non-finite weights") {
  LayerSpec spec;
  spec.name = "fc";
  spec.kind = LayerKind::dense;
  spec.shape = {2, 2};
  Tensor t = filled({2, 2});
  t.data[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(extract_matrices(spec, t), DataError);
}

TEST_CASE("replace_matrices inverts extract_matrices") {
  LayerSpec spec;
  spec.name = "conv";
  spec.kind = LayerKind::conv2d;
  spec.shape = {2, 2, 5, 7};
  const Tensor original = filled({2, 2, 5, 7}, -3.0, 0.25);

  auto mats = extract_matrices(spec, original);
  Tensor rebuilt;
  rebuilt.shape = spec.shape;
  rebuilt.data.assign(static_cast<std::size_t>(original.size()), 0.0);
  replace_matrices(spec, mats, rebuilt);
  CHECK(rebuilt.data == original.data);

  // and a targeted edit lands in the right place
  mats[3].values(4, 6) = 99.0;
  replace_matrices(spec, mats, rebuilt);
  CHECK(rebuilt.data[static_cast<std::size_t>(((1 * 2 + 1) * 5 + 4) * 7 + 6)] == 99.0);
}

TEST_CASE("activation names round trip") {
  for (auto a : {Activation::relu, Activation::identity, Activation::softmax})
    CHECK(parse_activation(activation_name(a)) == a);
  CHECK_THROWS_AS(parse_activation("tanh"), FormatError);
}
