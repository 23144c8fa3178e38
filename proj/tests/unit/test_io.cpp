#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lgd/checkpoint.hpp"
#include "lgd/dataset.hpp"
#include "lgd/errors.hpp"
#include "lgd/image.hpp"
#include "lgd/tensor_io.hpp"

namespace fs = std::filesystem;
using lgd::Tensor;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("lgd_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("LGDT byte layout") {
  const auto bytes = lgd::io::encode_lgdt(Tensor({2, 1}, {1.0f, -2.0f}));
  const std::vector<unsigned char> expected{'L', 'G', 'D', 'T', 2, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0,
                                            0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0xC0};
  CHECK(bytes == expected);
}

TEST_CASE("LGDT round trip, truncation and trailing bytes") {
  const auto dir = scratch("lgdt");
  Tensor t({2, 3, 1}, {0.5f, -1, 3.25f, 1e-7f, -0.0f, 42});
  lgd::io::write_lgdt(dir / "t.lgdt", t);
  Tensor back = lgd::io::read_lgdt(dir / "t.lgdt");
  CHECK(back.shape() == t.shape());
  for (std::size_t i = 0; i < t.numel(); ++i) CHECK(back.data()[i] == t.data()[i]);

  auto bytes = lgd::io::read_file(dir / "t.lgdt");
  auto cut = bytes;
  cut.resize(cut.size() - 2);
  lgd::io::write_file(dir / "cut.lgdt", cut);
  CHECK_THROWS_AS(lgd::io::read_lgdt(dir / "cut.lgdt"), lgd::IoError);
  bytes.push_back(0);
  lgd::io::write_file(dir / "long.lgdt", bytes);
  CHECK_THROWS_AS(lgd::io::read_lgdt(dir / "long.lgdt"), lgd::IoError);
  bytes[0] = 'X';
  lgd::io::write_file(dir / "magic.lgdt", bytes);
  CHECK_THROWS_AS(lgd::io::read_lgdt(dir / "magic.lgdt"), lgd::IoError);
  CHECK_THROWS_AS(lgd::io::read_lgdt(dir / "missing.lgdt"), lgd::IoError);
}

TEST_CASE("checkpoint round trip with name-ordered index") {
  const auto dir = scratch("ckpt");
  lgd::NamedTensors named{{"student.conv1.weight", Tensor({1, 2}, {1, 2})},
                          {"classifier.bias", Tensor({3}, {0, -1, 5})},
                          {"teacher.head.weight", Tensor::scalar(7)}};
  lgd::save_checkpoint(dir / "m.ckpt", named);
  const auto back = lgd::load_checkpoint(dir / "m.ckpt");
  REQUIRE(back.size() == 3);
  for (const auto& [name, t] : named) {
    REQUIRE(back.contains(name));
    CHECK(back.at(name).shape() == t.shape());
    for (std::size_t i = 0; i < t.numel(); ++i) CHECK(back.at(name).data()[i] == t.data()[i]);
  }

  std::ifstream idx(lgd::checkpoint_index_path(dir / "m.ckpt"));
  std::string header, first;
  std::getline(idx, header);
  std::getline(idx, first);
  CHECK(header == "name,offset,length");
  CHECK(first.rfind("classifier.bias,0,", 0) == 0);
}

TEST_CASE("checkpoint index mismatches are rejected") {
  const auto dir = scratch("ckpt_bad");
  lgd::save_checkpoint(dir / "m.ckpt", {{"a", Tensor({2}, {1, 2})}});
  lgd::io::write_text(lgd::checkpoint_index_path(dir / "m.ckpt"), "name,offset,length\na,0,9\n");
  CHECK_THROWS_AS(lgd::load_checkpoint(dir / "m.ckpt"), lgd::IoError);
  lgd::io::write_text(lgd::checkpoint_index_path(dir / "m.ckpt"), "nope\n");
  CHECK_THROWS_AS(lgd::load_checkpoint(dir / "m.ckpt"), lgd::IoError);
}

TEST_CASE("strip_prefixes drops teacher and decoder entries") {
  lgd::NamedTensors named{{"teacher.conv1.weight", Tensor::scalar(1)},
                          {"decoder.nuclei.bias", Tensor::scalar(2)},
                          {"student.conv1.weight", Tensor::scalar(3)}};
  const auto kept = lgd::strip_prefixes(named, {"teacher.", "decoder."});
  CHECK(kept.size() == 1);
  CHECK(kept.contains("student.conv1.weight"));
}

TEST_CASE("PPM round trip and corrupt input") {
  const auto dir = scratch("ppm");
  lgd::RgbPatch p(3, 2);
  for (std::size_t i = 0; i < p.pixels.size(); ++i) p.pixels[i] = static_cast<std::uint8_t>(i * 13);
  lgd::write_ppm(dir / "p.ppm", p);
  CHECK(lgd::read_ppm(dir / "p.ppm") == p);

  lgd::io::write_text(dir / "bad.ppm", "P3\n3 2\n255\n");
  CHECK_THROWS_AS(lgd::read_ppm(dir / "bad.ppm"), lgd::IoError);
  lgd::io::write_text(dir / "short.ppm", "P6\n3 2\n255\nabc");
  CHECK_THROWS_AS(lgd::read_ppm(dir / "short.ppm"), lgd::IoError);
}

TEST_CASE("manifest round trip") {
  const auto dir = scratch("manifest");
  lgd::DatasetManifest m;
  m.seed = 17;
  m.entries.push_back({"he/a.ppm", "ihc/a.ppm", "density/a.lgdt", "mask/a.lgdt", 2, lgd::Split::train});
  m.entries.push_back({"he/b.ppm", "ihc/b.ppm", "density/b.lgdt", "mask/b.lgdt", 0, lgd::Split::test});
  lgd::write_manifest(dir / "manifest.csv", m);
  const auto back = lgd::read_manifest(dir / "manifest.csv");
  CHECK(back.seed == 17);
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].label == 2);
  CHECK(back.entries[1].split == lgd::Split::test);
  CHECK(back.resolve(back.entries[0].he) == dir / "he/a.ppm");
  CHECK(back.class_counts(lgd::Split::train)[2] == 1);

  lgd::io::write_text(dir / "broken.csv", "he,ihc\n");
  CHECK_THROWS_AS(lgd::read_manifest(dir / "broken.csv"), lgd::IoError);
}
