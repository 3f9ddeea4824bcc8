#include <doctest.h>

#include <array>
#include <map>
#include <random>

#include "oracles.hpp"
#include "texshuffle/pipeline.hpp"
#include "texshuffle/transforms.hpp"

using namespace texshuffle;

TEST_CASE("make_patch_grid") {
  const PatchGrid exact = make_patch_grid(224, 224, 56);
  CHECK(exact.rows == 4);
  CHECK(exact.cols == 4);
  CHECK(exact.crop_top == 0);
  CHECK(exact.crop_left == 0);

  const PatchGrid tall = make_patch_grid(230, 224, 56);
  CHECK(tall.rows == 4);
  CHECK(tall.cols == 4);
  CHECK(tall.fitted_height == 224);
  CHECK(tall.fitted_width == 224);
  CHECK(tall.crop_top == 3);
  CHECK(tall.crop_left == 0);

  const PatchGrid odd = make_patch_grid(10, 17, 4);
  CHECK(odd.rows == 2);
  CHECK(odd.cols == 4);
  CHECK(odd.crop_top == 1);  // floor(2 / 2)
  CHECK(odd.crop_left == 0);  // floor(1 / 2)

  CHECK_THROWS_AS(make_patch_grid(10, 10, 11), std::invalid_argument);
  CHECK_THROWS_AS(make_patch_grid(10, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_patch_grid(10, 10, -3), std::invalid_argument);
}

TEST_CASE("patch_and_shuffle identity cases") {
  std::mt19937_64 engine(1);
  SUBCASE("single patch") {
    const Image img = oracle::random_image(2, 2, engine);
    RandomStream rng(5);
    CHECK(patch_and_shuffle(img, 2, rng) == img);
  }
  SUBCASE("constant image") {
    const Image img = make_rgb(64, 64, 133);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      RandomStream rng(seed);
      CHECK(patch_and_shuffle(img, 16, rng) == img);
    }
  }
  SUBCASE("patch equal to the side of a square image") {
    const Image img = oracle::random_image(24, 24, engine);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      RandomStream rng(seed);
      CHECK(patch_and_shuffle(img, 24, rng) == img);
    }
  }
}

TEST_CASE("patch_and_shuffle on a 4x4 image matches the Fisher-Yates oracle") {
  Image img = make_rgb(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<std::uint8_t>(16 * y + 4 * x + c);
    }
  }
  const Image before = img;
  constexpr std::uint64_t kSeed = 42;
  const std::vector<int> perm = oracle::fisher_yates(4, kSeed);
  // Frozen from the oracle for this seed.
  CHECK(perm == std::vector<int>{1, 0, 3, 2});

  RandomStream rng(kSeed);
  const Image out = patch_and_shuffle(img, 2, rng);
  CHECK(img == before);  // input untouched

  const auto in_patches = oracle::patches(img, 2);
  const auto out_patches = oracle::patches(out, 2);
  REQUIRE(out_patches.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(out_patches[k] == in_patches[perm[k]]);
  CHECK(oracle::sorted_patches(out, 2) == oracle::sorted_patches(img, 2));
}

TEST_CASE("patch multiset is preserved for random images, sizes and seeds") {
  std::mt19937_64 engine(77);
  for (int trial = 0; trial < 250; ++trial) {
    const int h = 1 + static_cast<int>(engine() % 40);
    const int w = 1 + static_cast<int>(engine() % 40);
    const int p = 1 + static_cast<int>(engine() % std::min(h, w));
    const Image img = oracle::random_image(h, w, engine);
    RandomStream rng(engine());
    const Image out = patch_and_shuffle(img, p, rng);
    CHECK(out.height == (h / p) * p);
    CHECK(out.width == (w / p) * p);
    CHECK(oracle::sorted_patches(out, p) == oracle::sorted_patches(img, p));

    // Shuffling again keeps the multiset.
    RandomStream rng2(engine());
    const Image twice = patch_and_shuffle(out, p, rng2);
    CHECK(oracle::sorted_patches(twice, p) == oracle::sorted_patches(img, p));

    // Same seed, same output.
    RandomStream a(trial);
    RandomStream b(trial);
    CHECK(patch_and_shuffle(img, p, a) == patch_and_shuffle(img, p, b));
  }
}

TEST_CASE("patch_and_shuffle works on normalized float images") {
  std::mt19937_64 engine(3);
  const FloatImage img = normalize_for_backbone(oracle::random_image(32, 32, engine), 32, 32);
  RandomStream rng(9);
  const FloatImage out = patch_and_shuffle(img, 8, rng);
  CHECK(oracle::sorted_patches(out, 8) == oracle::sorted_patches(img, 8));
}

TEST_CASE("extract_patches agrees with the oracle") {
  std::mt19937_64 engine(8);
  const Image img = oracle::random_image(13, 11, engine);
  CHECK(extract_patches(img, 3) == oracle::patches(img, 3));
}

TEST_CASE("all 24 layouts of a 2x2 grid are equally likely") {
  Image img = make_rgb(2, 2);
  for (int i = 0; i < 4; ++i) img.data[static_cast<std::size_t>(i) * 3] = static_cast<std::uint8_t>(i);
  std::map<std::array<int, 4>, int> counts;
  RandomStream rng(123);
  constexpr int kTrials = 10000;
  for (int t = 0; t < kTrials; ++t) {
    const Image out = patch_and_shuffle(img, 1, rng);
    counts[{out.data[0], out.data[3], out.data[6], out.data[9]}] += 1;
  }
  CHECK(counts.size() == 24);
  for (const auto& [layout, n] : counts) {
    CHECK(std::abs(static_cast<double>(n) / kTrials - 1.0 / 24.0) <= 0.02);
  }
}

TEST_CASE("augment") {
  std::mt19937_64 engine(4);
  const Image img = oracle::random_image(20, 30, engine);

  SUBCASE("degenerate ranges leave the image unchanged") {
    RandomStream rng(1);
    CHECK(augment(img, AugmentConfig::identity(), rng) == img);
  }
  SUBCASE("brightness clamps") {
    AugmentConfig config = AugmentConfig::identity();
    config.illumination_min = config.illumination_max = 2.0;
    RandomStream rng(1);
    const Image out = augment(make_rgb(8, 8, 200), config, rng);
    for (const auto v : out.data) CHECK(v == 255);
  }
  SUBCASE("deterministic and size preserving") {
    const AugmentConfig config;
    RandomStream a(99);
    RandomStream b(99);
    const Image x = augment(img, config, a);
    CHECK(x == augment(img, config, b));
    CHECK(x.height == img.height);
    CHECK(x.width == img.width);
  }
  SUBCASE("reflection padding leaves a rotated constant image constant") {
    AugmentConfig config = AugmentConfig::identity();
    config.max_rotation_deg = 45;
    config.zoom_min = 0.5;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RandomStream rng(seed);
      CHECK(augment(make_rgb(17, 23, 77), config, rng) == make_rgb(17, 23, 77));
    }
  }
  SUBCASE("a 180 degree turn reverses the pixel order") {
    AugmentConfig config = AugmentConfig::identity();
    config.max_rotation_deg = 180;
    // Find a seed whose draw is within a hair of +/-180.
    const Image square = oracle::random_image(9, 9, engine);
    std::uint64_t seed = 0;
    for (;; ++seed) {
      RandomStream r(seed);
      if (std::abs(std::abs(r.uniform(-180, 180)) - 180) < 0.01) break;
    }
    RandomStream rng(seed);
    const Image out = augment(square, config, rng);
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 9; ++x) {
        CHECK(std::abs(out.at(y, x, 0) - square.at(8 - y, 8 - x, 0)) <= 2);
      }
    }
  }
  SUBCASE("invalid configs") {
    AugmentConfig bad;
    bad.zoom_min = 1.2;
    bad.zoom_max = 1.1;
    RandomStream rng(1);
    CHECK_THROWS_AS(augment(img, bad, rng), std::invalid_argument);
    bad = AugmentConfig{};
    bad.expansion_factor = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("expand_dataset") {
  const Dataset d = generate_synthetic_textures(1, 16, 16, 2);

  SUBCASE("factor 16") {
    const Dataset e = expand_dataset(d, AugmentConfig{}, 5);
    CHECK(e.size() == 64);
    CHECK(e.class_counts() == ClassCounts{16, 16, 16, 16});
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(e[i * 16].image == d[i].image);  // variant 0 is the original
      CHECK(e[i * 16 + 5].label == d[i].label);
      CHECK(e[i * 16 + 5].source_id == d[i].source_id + "#aug5");
    }
  }
  SUBCASE("factor 1 is the identity") {
    AugmentConfig config;
    config.expansion_factor = 1;
    const Dataset e = expand_dataset(d, config, 5);
    CHECK(dataset_checksum(e) == dataset_checksum(d));
  }
  SUBCASE("deterministic") {
    CHECK(dataset_checksum(expand_dataset(d, AugmentConfig{}, 5)) ==
          dataset_checksum(expand_dataset(d, AugmentConfig{}, 5)));
    CHECK(dataset_checksum(expand_dataset(d, AugmentConfig{}, 5)) !=
          dataset_checksum(expand_dataset(d, AugmentConfig{}, 6)));
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(expand_dataset(Dataset{}, AugmentConfig{}, 1), std::invalid_argument);
  }
}

TEST_CASE("normalize_for_backbone") {
  std::mt19937_64 engine(6);

  SUBCASE("same size only scales and standardizes") {
    const Image img = oracle::random_image(224, 224, engine);
    const FloatImage out = normalize_for_backbone(img);
    REQUIRE(out.height == 224);
    for (std::size_t i = 0; i < img.data.size(); i += 997) {
      const std::size_t c = i % 3;
      const float expected = (img.data[i] / 255.0F - kBackboneMean[c]) / kBackboneStd[c];
      CHECK(out.data[i] == doctest::Approx(expected).epsilon(1e-6));
    }
  }
  SUBCASE("the pretraining mean maps to zero") {
    FloatImage unit(5, 5, 3);
    for (std::size_t i = 0; i < unit.data.size(); ++i) unit.data[i] = kBackboneMean[i % 3];
    for (const float v : standardize(unit).data) CHECK(v == 0.0F);

    // Closest 8-bit image: within half a quantization step.
    Image img = make_rgb(4, 4);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      img.data[i] = static_cast<std::uint8_t>(std::lround(kBackboneMean[i % 3] * 255));
    }
    for (const float v : normalize_for_backbone(img, 4, 4).data) {
      CHECK(std::abs(v) <= 0.5F / 255.0F / 0.224F + 1e-6F);
    }
  }
  SUBCASE("upsampling shape") {
    const FloatImage out = normalize_for_backbone(oracle::random_image(64, 64, engine));
    CHECK(out.height == 224);
    CHECK(out.width == 224);
    CHECK(out.channels == 3);
  }
  SUBCASE("bilinear weights with half-pixel centers") {
    FloatImage ramp(1, 2, 3);
    for (int c = 0; c < 3; ++c) {
      ramp.at(0, 0, c) = 0.0F;
      ramp.at(0, 1, c) = 1.0F;
    }
    const FloatImage up = resize_bilinear(ramp, 1, 4);
    CHECK(up.at(0, 0) == doctest::Approx(0.0));
    CHECK(up.at(0, 1) == doctest::Approx(0.25));
    CHECK(up.at(0, 2) == doctest::Approx(0.75));
    CHECK(up.at(0, 3) == doctest::Approx(1.0));
  }
}

TEST_CASE("pipeline stages") {
  std::mt19937_64 engine(10);
  const Image img = oracle::random_image(40, 40, engine);
  PipelineConfig config;
  config.input_height = config.input_width = 32;
  config.patch_size = 8;
  config.seed = 1234;

  SUBCASE("toggling the shuffle stage only permutes patches") {
    for (std::uint64_t epoch = 1; epoch <= 3; ++epoch) {
      config.shuffle_enabled = false;
      const FloatImage plain = prepare_input(img, config, PipelineStage::train, epoch, 5);
      config.shuffle_enabled = true;
      const FloatImage shuffled = prepare_input(img, config, PipelineStage::train, epoch, 5);
      CHECK(oracle::sorted_patches(plain, 8) == oracle::sorted_patches(shuffled, 8));
    }
  }
  SUBCASE("evaluation skips augmentation") {
    config.shuffle_enabled = false;
    CHECK(prepare_input(img, config, PipelineStage::eval, 1, 0) ==
          normalize_for_backbone(img, 32, 32));
  }
  SUBCASE("fresh permutation per epoch, fixed per (epoch, sample)") {
    config.shuffle_enabled = true;
    config.augment_enabled = false;
    const FloatImage a = prepare_input(img, config, PipelineStage::eval, 1, 0);
    CHECK(a == prepare_input(img, config, PipelineStage::eval, 1, 0));
    bool changed = false;
    for (std::uint64_t epoch = 2; epoch < 6; ++epoch) {
      changed = changed || !(a == prepare_input(img, config, PipelineStage::eval, epoch, 0));
    }
    CHECK(changed);
  }
}

TEST_CASE("training augment configs must contain the identity") {
  AugmentConfig config;
  CHECK_NOTHROW(config.validate_for_training());
  config.illumination_min = config.illumination_max = 2.0;
  CHECK_NOTHROW(config.validate());
  CHECK_THROWS_AS(config.validate_for_training(), std::invalid_argument);
}
