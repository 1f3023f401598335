#include <catch2/catch_amalgamated.hpp>

#include "celforge/warp.hpp"
#include "oracles.hpp"

using namespace celforge;

namespace {

ImageF32 ramp_image(int h, int w) {
  ImageF32 img(h, w, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(y, x) = static_cast<float>(x);
  return img;
}

// Smoothly varying canvas with a solid rectangle, sampled at a horizontal
// offset; lets rigid-translation pairs share exact content.
ImageF32 canvas_crop(int h, int w, int offset) {
  ImageF32 img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int cx = x + offset;
      float r = 0.1f + 0.7f * cx / (w + 16.0f);
      float g = 0.2f + 0.6f * y / (h + 1.0f);
      float b = 0.5f;
      if (cx >= 20 && cx < 34 && y >= 18 && y < 40) {
        r = 0.9f;
        g = 0.15f;
        b = 0.2f;
      }
      img.at(y, x, 0) = r;
      img.at(y, x, 1) = g;
      img.at(y, x, 2) = b;
    }
  return img;
}

}  // namespace

TEST_CASE("backward_warp with zero flow is the identity") {
  std::mt19937 gen(51);
  ImageF32 img = oracle::random_image(gen, 9, 13, 3);
  FlowField zero(9, 13);
  ImageF32 out = backward_warp(img, zero);
  CHECK(out.data == img.data);
}

TEST_CASE("backward_warp shifts a ramp by a uniform flow") {
  ImageF32 img = ramp_image(6, 10);
  FlowField flow = oracle::uniform_flow(6, 10, 1.0f, 0.0f);
  ImageF32 out = backward_warp(img, flow);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 10; ++x) {
      const float expected = static_cast<float>(std::min(x + 1, 9));
      CHECK(out.at(y, x) == Catch::Approx(expected).margin(1e-6));
    }
}

TEST_CASE("backward_warp clamps far out-of-bounds samples to the border") {
  ImageF32 img = ramp_image(4, 5);
  FlowField flow = oracle::uniform_flow(4, 5, 1000.0f, -1000.0f);
  ImageF32 out = backward_warp(img, flow);
  for (float v : out.data) CHECK(v == 4.0f);  // top-right corner value
}

TEST_CASE("backward_warp rejects mismatched dimensions") {
  ImageF32 img(4, 4, 1);
  FlowField flow(4, 5);
  CHECK_THROWS_AS(backward_warp(img, flow), InvalidInput);
}

TEST_CASE("z_metric is zero for a perfectly consistent pair") {
  std::mt19937 gen(53);
  ImageF32 img = oracle::random_image(gen, 8, 8, 3);
  FlowField zero(8, 8);
  ImageF32 z = z_metric(img, img, zero);
  for (float v : z.data) CHECK(v == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("z_metric scales LAB distance by -0.1") {
  // Black vs white: L* differs by exactly 100, a*=b*=0, so z = -10.
  ImageF32 black = ImageF32::constant(4, 4, 3, 0.0f);
  ImageF32 white = ImageF32::constant(4, 4, 3, 1.0f);
  FlowField zero(4, 4);
  ImageF32 z = z_metric(black, white, zero);
  for (float v : z.data) CHECK(v == Catch::Approx(-10.0).margin(1e-4));
}

TEST_CASE("z_metric is non-positive on random pairs") {
  std::mt19937 gen(59);
  ImageF32 a = oracle::random_image(gen, 7, 9, 3);
  ImageF32 b = oracle::random_image(gen, 7, 9, 3);
  FlowField flow = oracle::uniform_flow(7, 9, 0.5f, -0.25f);
  ImageF32 z = z_metric(a, b, flow);
  for (float v : z.data) CHECK(v <= 0.0f);
}

TEST_CASE("softmax_splat with zero flow reproduces the input at unit coverage") {
  std::mt19937 gen(61);
  ImageF32 img = oracle::random_image(gen, 5, 6, 3);
  ImageF32 z(5, 6, 1);
  std::uniform_real_distribution<float> zd(-3.0f, 0.0f);
  for (auto& v : z.data) v = zd(gen);
  FlowField zero(5, 6);
  SplatResult sr = softmax_splat(img, zero, z);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(sr.values.data[i] == Catch::Approx(img.data[i]).margin(1e-6));
  for (float v : sr.coverage.data) CHECK(v == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("softmax_splat of a constant under uniform shift") {
  ImageF32 img = ImageF32::constant(4, 4, 1, 0.7f);
  ImageF32 z(4, 4, 1);
  FlowField flow = oracle::uniform_flow(4, 4, 1.0f, 0.0f);
  SplatResult sr = softmax_splat(img, flow, z);
  for (int y = 0; y < 4; ++y) {
    CHECK(sr.coverage.at(y, 0) == 0.0f);
    CHECK(sr.values.at(y, 0) == 0.0f);
    for (int x = 1; x < 4; ++x) {
      CHECK(sr.coverage.at(y, x) == Catch::Approx(1.0).margin(1e-6));
      CHECK(sr.values.at(y, x) == Catch::Approx(0.7).margin(1e-6));
    }
  }
}

TEST_CASE("softmax_splat matches the brute-force oracle on random cases") {
  std::mt19937 gen(67);
  std::uniform_real_distribution<float> fd(-2.5f, 2.5f);
  std::uniform_int_distribution<int> zlevel(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    ImageF32 img = oracle::random_image(gen, 4, 4, 2);
    FlowField flow(4, 4);
    for (auto& v : flow.img.data) v = fd(gen);
    ImageF32 z(4, 4, 1);
    for (auto& v : z.data) v = zlevel(gen) ? -1.5f : 0.0f;
    SplatResult sr = softmax_splat(img, flow, z);
    oracle::BruteSplat ref = oracle::brute_softmax_splat(img, flow, z);
    for (std::size_t i = 0; i < sr.values.data.size(); ++i)
      CHECK(sr.values.data[i] == Catch::Approx(ref.values.data[i]).margin(1e-5));
    for (std::size_t i = 0; i < sr.coverage.data.size(); ++i)
      CHECK(sr.coverage.data[i] == Catch::Approx(ref.coverage.data[i]).margin(1e-5));
  }
}

TEST_CASE("softmax_splat is bit-identical across worker counts") {
  std::mt19937 gen(71);
  ImageF32 img = oracle::random_image(gen, 300, 40, 3);
  FlowField flow(300, 40);
  std::uniform_real_distribution<float> fd(-6.0f, 6.0f);
  for (auto& v : flow.img.data) v = fd(gen);
  ImageF32 z(300, 40, 1);
  std::uniform_real_distribution<float> zd(-2.0f, 0.0f);
  for (auto& v : z.data) v = zd(gen);
  SplatResult a = softmax_splat(img, flow, z, Parallel(1));
  SplatResult b = softmax_splat(img, flow, z, Parallel(4));
  SplatResult c = softmax_splat(img, flow, z, Parallel(8));
  CHECK(a.values.data == b.values.data);
  CHECK(a.values.data == c.values.data);
  CHECK(a.coverage.data == b.coverage.data);
  CHECK(a.coverage.data == c.coverage.data);
}

TEST_CASE("softmax_splat validates inputs") {
  ImageF32 img(4, 4, 1);
  ImageF32 z(4, 4, 1);
  CHECK_THROWS_AS(softmax_splat(img, FlowField(4, 5), z), InvalidInput);
  ImageF32 bad_z(4, 4, 1);
  bad_z.at(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(softmax_splat(img, FlowField(4, 4), bad_z), InvalidInput);
}

TEST_CASE("occlusion_mask with zero flow is all true") {
  FlowField zero(16, 16);
  ImageF32 z(16, 16, 1);
  BinaryMask m = occlusion_mask(zero, z);
  CHECK(m.count_true() == m.bits.size());
}

TEST_CASE("occlusion_mask of a uniform shift matches the brute-force pipeline") {
  FlowField flow = oracle::uniform_flow(16, 16, 8.0f, 0.0f);
  ImageF32 z(16, 16, 1);
  BinaryMask m = occlusion_mask(flow, z);

  ImageF32 ones = ImageF32::constant(16, 16, 1, 1.0f);
  oracle::BruteSplat ref = oracle::brute_softmax_splat(ones, flow, z);
  BinaryMask cov_mask(16, 16);
  for (std::size_t i = 0; i < cov_mask.bits.size(); ++i)
    cov_mask.bits[i] = ref.coverage.data[i] > 0.5f ? 1 : 0;
  CHECK(m == oracle::brute_open(cov_mask, 5));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 8; ++x) CHECK(!m.at(y, x));
}

TEST_CASE("occlusion_mask is all false when the flow leaves the frame") {
  FlowField flow = oracle::uniform_flow(8, 8, 100.0f, 100.0f);
  ImageF32 z(8, 8, 1);
  BinaryMask m = occlusion_mask(flow, z);
  CHECK(m.count_true() == 0);
}

TEST_CASE("infilled_warp static fixed point") {
  std::mt19937 gen(73);
  ImageF32 img = oracle::random_image(gen, 12, 12, 3);
  FlowField zero(12, 12);
  ImageF32 z(12, 12, 1);
  InfillResult res = infilled_warp(img, img, zero, zero, z, z);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(res.values.data[i] == Catch::Approx(img.data[i]).margin(1e-6));
  CHECK(res.holes.count_true() == 0);
}

TEST_CASE("infilled_warp of constants under zero flow averages them") {
  ImageF32 a = ImageF32::constant(8, 8, 1, 0.2f);
  ImageF32 b = ImageF32::constant(8, 8, 1, 0.6f);
  FlowField zero(8, 8);
  ImageF32 z(8, 8, 1);
  InfillResult res = infilled_warp(a, b, zero, zero, z, z);
  for (float v : res.values.data) CHECK(v == Catch::Approx(0.4).margin(1e-6));
}

TEST_CASE("infilled_warp with all-true masks averages the two warps") {
  std::mt19937 gen(79);
  ImageF32 a = oracle::random_image(gen, 10, 10, 3);
  ImageF32 b = oracle::random_image(gen, 10, 10, 3);
  FlowField zero(10, 10);
  ImageF32 z(10, 10, 1);
  InfillResult res = infilled_warp(a, b, zero, zero, z, z);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    CHECK(res.values.data[i] == Catch::Approx(0.5 * (a.data[i] + b.data[i])).margin(1e-6));
}

TEST_CASE("infilled_warp fills one-sided occlusion from the other warp") {
  // flow_0t shifts right by 4 on an 8x8 frame: the 4-wide coverage band
  // cannot survive a k=5 opening, so mask 0 is empty and the formula
  // reduces to warp 1 everywhere.  Cross-checked against a direct
  // evaluation with brute-force splats and masks.
  std::mt19937 gen(83);
  ImageF32 f0 = oracle::random_image(gen, 8, 8, 1);
  ImageF32 f1 = oracle::random_image(gen, 8, 8, 1);
  FlowField flow0 = oracle::uniform_flow(8, 8, 4.0f, 0.0f);
  FlowField flow1(8, 8);
  ImageF32 z(8, 8, 1);
  InfillResult res = infilled_warp(f0, f1, flow0, flow1, z, z);

  oracle::BruteSplat w0 = oracle::brute_softmax_splat(f0, flow0, z);
  oracle::BruteSplat w1 = oracle::brute_softmax_splat(f1, flow1, z);
  auto mask_of = [](const ImageF32& cov) {
    BinaryMask m(cov.height, cov.width);
    for (std::size_t i = 0; i < m.bits.size(); ++i) m.bits[i] = cov.data[i] > 0.5f;
    return oracle::brute_open(m, 5);
  };
  BinaryMask m0 = mask_of(w0.coverage), m1 = mask_of(w1.coverage);
  CHECK(m0.count_true() == 0);
  CHECK(m1.count_true() == m1.bits.size());
  for (std::size_t i = 0; i < res.values.data.size(); ++i) {
    const float a = m0.bits[i] ? 1.0f : 0.0f;
    const float b = m1.bits[i] ? 1.0f : 0.0f;
    const float expected = 0.5f * (a * w0.values.data[i] + (1 - a) * w1.values.data[i]) +
                           0.5f * (b * w1.values.data[i] + (1 - b) * w0.values.data[i]);
    CHECK(res.values.data[i] == Catch::Approx(expected).margin(1e-5));
    CHECK(res.values.data[i] == Catch::Approx(w1.values.data[i]).margin(1e-5));
  }
}

TEST_CASE("infilled_warp reports residual holes") {
  ImageF32 a = ImageF32::constant(8, 8, 1, 0.3f);
  FlowField out_flow = oracle::uniform_flow(8, 8, 50.0f, 0.0f);
  ImageF32 z(8, 8, 1);
  InfillResult res = infilled_warp(a, a, out_flow, out_flow, z, z);
  CHECK(res.holes.count_true() == res.holes.bits.size());
  for (float v : res.values.data) CHECK(v == 0.0f);
}

TEST_CASE("halfway static scene reproduces the input") {
  std::mt19937 gen(89);
  ImageF32 img = oracle::random_image(gen, 16, 16, 3);
  FlowField zero(16, 16);
  ImageF32 out = halfway_guess(img, img, zero, zero, 0.5);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(out.data[i] == Catch::Approx(img.data[i]).margin(1e-6));
}

TEST_CASE("halfway endpoints with zero flows average the frames") {
  std::mt19937 gen(97);
  ImageF32 a = oracle::random_image(gen, 8, 8, 3);
  ImageF32 b = oracle::random_image(gen, 8, 8, 3);
  FlowField zero(8, 8);
  for (double t : {0.0, 1.0}) {
    ImageF32 out = halfway_guess(a, b, zero, zero, t);
    for (std::size_t i = 0; i < a.data.size(); ++i)
      CHECK(out.data[i] == Catch::Approx(0.5 * (a.data[i] + b.data[i])).margin(1e-6));
  }
}

TEST_CASE("halfway reproduces a rigid translation at t = 0.5") {
  const int h = 64, w = 64, shift = 6;
  ImageF32 i0 = canvas_crop(h, w, shift);  // content at +6 relative to i1
  ImageF32 i1 = canvas_crop(h, w, 0);
  ImageF32 gt = canvas_crop(h, w, shift / 2);
  FlowField flow01 = oracle::uniform_flow(h, w, static_cast<float>(shift), 0.0f);
  FlowField flow10 = oracle::uniform_flow(h, w, static_cast<float>(-shift), 0.0f);
  ImageF32 out = halfway_guess(i0, i1, flow01, flow10, 0.5);
  // Compare away from the disocclusion bands at the vertical frame edges.
  for (int y = 5; y < h - 5; ++y)
    for (int x = 8; x < w - 8; ++x)
      for (int c = 0; c < 3; ++c)
        CHECK(out.at(y, x, c) == Catch::Approx(gt.at(y, x, c)).margin(1e-3));
}

TEST_CASE("halfway is symmetric under frame swap with mirrored t") {
  std::mt19937 gen(101);
  ImageF32 a = oracle::random_image(gen, 12, 12, 3);
  ImageF32 b = oracle::random_image(gen, 12, 12, 3);
  FlowField fab(12, 12), fba(12, 12);
  std::uniform_real_distribution<float> fd(-1.5f, 1.5f);
  for (auto& v : fab.img.data) v = fd(gen);
  for (auto& v : fba.img.data) v = fd(gen);
  ImageF32 fwd = halfway_guess(a, b, fab, fba, 0.3);
  ImageF32 rev = halfway_guess(b, a, fba, fab, 0.7);
  for (std::size_t i = 0; i < fwd.data.size(); ++i)
    CHECK(fwd.data[i] == Catch::Approx(rev.data[i]).margin(1e-6));
}

TEST_CASE("halfway rejects t outside [0,1]") {
  ImageF32 img = ImageF32::constant(4, 4, 3, 0.5f);
  FlowField zero(4, 4);
  CHECK_THROWS_AS(halfway_guess(img, img, zero, zero, -0.1), InvalidParameter);
  CHECK_THROWS_AS(halfway_guess(img, img, zero, zero, 1.1), InvalidParameter);
}
