#include <catch2/catch_amalgamated.hpp>

#include "celforge/chamfer.hpp"
#include "celforge/distance.hpp"
#include "celforge/sketch.hpp"
#include "oracles.hpp"

using namespace celforge;

namespace {

// White canvas with a one-pixel black vertical line.
ImageF32 line_image(int h, int w, int col) {
  ImageF32 img = ImageF32::constant(h, w, 3, 1.0f);
  for (int y = 0; y < h; ++y)
    for (int c = 0; c < 3; ++c) img.at(y, col, c) = 0.0f;
  return img;
}

// Dense DoG evaluation: grayscale, two dense Gaussian blurs, response
// threshold; independent of the separable production path.
BinaryMask dense_dog_sketch(const ImageF32& img, double sigma, double k_ratio,
                            double t_gain, double epsilon) {
  ImageF32 gray(img.height, img.width, 1);
  for (std::size_t i = 0; i < gray.data.size(); ++i)
    gray.data[i] = 0.299f * img.plane(0)[i] + 0.587f * img.plane(1)[i] +
                   0.114f * img.plane(2)[i];
  ImageF32 narrow = oracle::dense_gaussian(gray, sigma);
  ImageF32 wide = oracle::dense_gaussian(gray, k_ratio * sigma);
  BinaryMask sketch(img.height, img.width);
  for (std::size_t i = 0; i < gray.data.size(); ++i) {
    const double response =
        0.5 + t_gain * (static_cast<double>(wide.data[i]) - narrow.data[i]) - epsilon;
    sketch.bits[i] = response > 0.5 ? 1 : 0;
  }
  return sketch;
}

}  // namespace

TEST_CASE("extract_sketch of a constant image is empty") {
  ImageF32 img = ImageF32::constant(16, 16, 3, 0.8f);
  BinarySketch s = extract_sketch(img, 1.0, 1.6, 2.0, 0.01);
  CHECK(s.count_true() == 0);
}

TEST_CASE("extract_sketch finds a dark line and matches the dense oracle") {
  ImageF32 img = line_image(24, 24, 12);
  BinarySketch s = extract_sketch(img, 1.0, 1.6, 2.0, 0.01);
  BinarySketch ref = dense_dog_sketch(img, 1.0, 1.6, 2.0, 0.01);
  CHECK(s == ref);
  bool line_covered = true;
  for (int y = 0; y < img.height; ++y)
    if (!s.at(y, 12)) line_covered = false;
  CHECK(line_covered);
}

TEST_CASE("extract_sketch sign symmetry: negated gain flips responses across the pivot") {
  // Negating the gain negates every response offset, so no pixel can be
  // detected under both signs, and the dark stroke detected with +t drops
  // out entirely with -t.
  ImageF32 img = line_image(16, 16, 8);
  BinarySketch pos = extract_sketch(img, 1.0, 1.6, 2.0, 0.01);
  BinarySketch neg = extract_sketch(img, 1.0, 1.6, -2.0, 0.01);
  REQUIRE(pos.count_true() > 0);
  for (std::size_t i = 0; i < pos.bits.size(); ++i)
    CHECK(!(pos.bits[i] && neg.bits[i]));
  for (int y = 0; y < 16; ++y) {
    CHECK(pos.at(y, 8));
    CHECK(!neg.at(y, 8));
  }
}

TEST_CASE("extract_sketch matches the dense oracle on random images") {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 5; ++trial) {
    ImageF32 img = oracle::random_image(gen, 20, 15, 3);
    BinarySketch s = extract_sketch(img, 0.9, 1.6, 2.0, 0.01);
    BinarySketch ref = dense_dog_sketch(img, 0.9, 1.6, 2.0, 0.01);
    // Responses sitting exactly on the threshold could flip between the
    // two summation orders; random inputs keep them clear of 0.5.
    CHECK(s == ref);
  }
}

TEST_CASE("extract_sketch parameter validation") {
  ImageF32 img = ImageF32::constant(8, 8, 3, 0.5f);
  CHECK_THROWS_AS(extract_sketch(img, 0.0, 1.6, 2.0, 0.01), InvalidParameter);
  CHECK_THROWS_AS(extract_sketch(img, 1.0, 1.0, 2.0, 0.01), InvalidParameter);
}

TEST_CASE("edt of an all-true sketch is zero") {
  BinarySketch s(6, 9, true);
  DistanceField d = edt(s);
  for (float v : d.values) CHECK(v == 0.0f);
}

TEST_CASE("edt of a single center pixel on 3x3") {
  BinarySketch s(3, 3);
  s.at(1, 1) = 1;
  DistanceField d = edt(s);
  CHECK(d.at(1, 1) == 0.0f);
  CHECK(d.at(0, 1) == 1.0f);
  CHECK(d.at(1, 0) == 1.0f);
  CHECK(d.at(1, 2) == 1.0f);
  CHECK(d.at(2, 1) == 1.0f);
  const float diag = std::sqrt(2.0f);
  CHECK(d.at(0, 0) == diag);
  CHECK(d.at(0, 2) == diag);
  CHECK(d.at(2, 0) == diag);
  CHECK(d.at(2, 2) == diag);
}

TEST_CASE("edt of an empty sketch is all infinity") {
  BinarySketch s(4, 4);
  DistanceField d = edt(s);
  for (float v : d.values) CHECK(std::isinf(v));
  const auto sq = edt_squared(s);
  for (auto v : sq) CHECK(v == kEdtInf);
}

TEST_CASE("edt_squared equals brute force on random sketches") {
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> dens(0.01, 0.5);
  std::uniform_int_distribution<int> size(1, 40);
  for (int trial = 0; trial < 60; ++trial) {
    const int h = size(gen), w = size(gen);
    BinarySketch s = oracle::random_sketch(gen, h, w, dens(gen));
    CHECK(edt_squared(s) == oracle::brute_edt_squared(s));
  }
}

TEST_CASE("edt_squared equals brute force under parallel execution") {
  std::mt19937 gen(29);
  Parallel par(4);
  for (int trial = 0; trial < 10; ++trial) {
    BinarySketch s = oracle::random_sketch(gen, 33, 27, 0.1);
    CHECK(edt_squared(s, par) == oracle::brute_edt_squared(s));
  }
}

TEST_CASE("edt is 1-Lipschitz across 4-neighbors") {
  std::mt19937 gen(31);
  BinarySketch s = oracle::random_sketch(gen, 24, 24, 0.05);
  if (s.empty_mask()) s.at(12, 12) = 1;
  DistanceField d = edt(s);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x + 1 < 24; ++x)
      CHECK(std::abs(d.at(y, x) - d.at(y, x + 1)) <= 1.0f + 1e-6f);
  for (int y = 0; y + 1 < 24; ++y)
    for (int x = 0; x < 24; ++x)
      CHECK(std::abs(d.at(y, x) - d.at(y + 1, x)) <= 1.0f + 1e-6f);
}

TEST_CASE("nedt analytic values") {
  // Line pixels map to 0; a constant (blank) frame maps to all ones.
  // The default sigma scales with height, so size it up for a 32px image.
  ImageF32 img = line_image(32, 32, 16);
  DogParams dog;
  dog.sigma_base = 540.0 / 32.0;
  DistanceField n = nedt(img, 15.0 / 540.0, dog);
  BinarySketch s = extract_sketch(img, dog);
  bool any_line = false;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      CHECK(n.at(y, x) >= 0.0f);
      CHECK(n.at(y, x) <= 1.0f);
      if (s.at(y, x)) {
        CHECK(n.at(y, x) == 0.0f);
        any_line = true;
      }
    }
  CHECK(any_line);

  ImageF32 blank = ImageF32::constant(16, 16, 3, 0.5f);
  DistanceField nb = nedt(blank, 15.0 / 540.0);
  for (float v : nb.values) CHECK(v == 1.0f);
}

TEST_CASE("nedt hits 1 - 1/e at distance tau*d") {
  // Height 540 and tau 15/540 put the knee at exactly 15px; a sketch with
  // a single line pixel gives that distance 15px away along the row.
  BinarySketch s(540, 64);
  s.at(270, 10) = 1;
  DistanceField d = edt(s);
  REQUIRE(d.at(270, 25) == 15.0f);
  const double tau = 15.0 / 540.0;
  const double expected = 1.0 - std::exp(-1.0);
  DistanceField n(540, 64);
  for (std::size_t i = 0; i < d.values.size(); ++i)
    n.values[i] = static_cast<float>(1.0 - std::exp(-d.values[i] / (tau * 540)));
  CHECK(n.at(270, 25) == Catch::Approx(expected).margin(1e-6));
}

TEST_CASE("nedt is monotone in the underlying distance") {
  std::mt19937 gen(37);
  BinarySketch s = oracle::random_sketch(gen, 20, 20, 0.05);
  if (s.empty_mask()) s.at(3, 3) = 1;
  DistanceField d = edt(s);
  const double scale = (15.0 / 540.0) * 20;
  std::vector<std::pair<float, float>> pairs;
  for (float v : d.values)
    pairs.emplace_back(v, static_cast<float>(1.0 - std::exp(-v / scale)));
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i)
    CHECK(pairs[i].second >= pairs[i - 1].second);
}

TEST_CASE("nedt rejects non-positive tau") {
  ImageF32 img = ImageF32::constant(8, 8, 3, 0.5f);
  CHECK_THROWS_AS(nedt(img, 0.0), InvalidParameter);
}

TEST_CASE("chamfer of identical sketches is zero") {
  std::mt19937 gen(41);
  BinarySketch s = oracle::random_sketch(gen, 16, 16, 0.2);
  if (s.empty_mask()) s.at(8, 8) = 1;
  CHECK(chamfer(s, s) == 0.0);
}

TEST_CASE("chamfer single-pixel hand case") {
  BinarySketch x0(8, 8), x1(8, 8);
  x0.at(0, 0) = 1;
  x1.at(0, 4) = 1;
  const double expected = 8.0 / (2.0 * 8.0 * 8.0 * std::sqrt(128.0));
  CHECK(chamfer(x0, x1) == Catch::Approx(expected).margin(1e-9));
  CHECK(expected == Catch::Approx(5.524e-3).margin(1e-6));
}

TEST_CASE("chamfer symmetry and positivity on random pairs") {
  std::mt19937 gen(43);
  for (int trial = 0; trial < 20; ++trial) {
    BinarySketch a = oracle::random_sketch(gen, 12, 12, 0.15);
    BinarySketch b = oracle::random_sketch(gen, 12, 12, 0.15);
    if (a.empty_mask()) a.at(0, 0) = 1;
    if (b.empty_mask()) b.at(5, 5) = 1;
    const double ab = chamfer(a, b), ba = chamfer(b, a);
    CHECK(ab == ba);
    if (a == b)
      CHECK(ab == 0.0);
    else
      CHECK(ab > 0.0);
  }
}

TEST_CASE("chamfer errors: mismatched dims and empty sketches") {
  BinarySketch a(8, 8), b(8, 9), c(8, 8);
  a.at(1, 1) = 1;
  c.at(2, 2) = 1;
  CHECK_THROWS_AS(chamfer(a, b), InvalidInput);
  CHECK_THROWS_AS(chamfer(a, BinarySketch(8, 8)), EmptySketchError);
  CHECK_THROWS_AS(chamfer(BinarySketch(8, 8), c), EmptySketchError);
}

TEST_CASE("chamfer approximate scale invariance under integer upscaling") {
  std::mt19937 gen(47);
  for (int trial = 0; trial < 10; ++trial) {
    BinarySketch a = oracle::random_line_sketch(gen, 32, 32, 3);
    BinarySketch b = oracle::random_line_sketch(gen, 32, 32, 3);
    const double base = chamfer(a, b);
    if (base == 0.0) continue;
    for (int s : {2, 3}) {
      const double scaled = chamfer(oracle::upscale_nearest(a, s), oracle::upscale_nearest(b, s));
      CHECK(std::abs(scaled - base) / base < 0.20);
    }
  }
}

TEST_CASE("chamfer maxside diameter option") {
  BinarySketch x0(8, 8), x1(8, 8);
  x0.at(0, 0) = 1;
  x1.at(0, 4) = 1;
  ChamferOptions opts;
  opts.diameter = ChamferDiameter::MaxSide;
  CHECK(chamfer(x0, x1, opts) == Catch::Approx(8.0 / (2.0 * 8.0 * 8.0 * 8.0)).margin(1e-12));
}
