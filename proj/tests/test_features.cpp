#include <gtest/gtest.h>

#include <random>

#include "fakery/features.hpp"
#include "oracles.hpp"

using namespace fakery;

namespace {

ImageRecord solid(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  ImageRecord img;
  for (std::size_t i = 0; i < kImagePixels; ++i) {
    img.pixels[3 * i] = r;
    img.pixels[3 * i + 1] = g;
    img.pixels[3 * i + 2] = b;
  }
  return img;
}

GrayImage gray_const(double v) {
  GrayImage g;
  g.fill(v);
  return g;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Grayscale, KnownValues) {
  const auto white = to_grayscale(solid(255, 255, 255));
  for (double v : white) ASSERT_NEAR(v, 255.0, 1e-12);
  const auto red = to_grayscale(solid(255, 0, 0));
  for (double v : red) ASSERT_DOUBLE_EQ(v, 76.245);
}

TEST(Grayscale, MatchesPerPixelOracle) {
  std::mt19937_64 rng(1);
  const auto img = oracle::random_image(rng);
  const auto g = to_grayscale(img);
  const auto ref = oracle::gray(img);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) ASSERT_EQ(g[r * 32 + c], ref[r][c]);
}

TEST(Raw, ScalingAndOrder) {
  auto zeros = extract_raw(solid(0, 0, 0));
  EXPECT_EQ(zeros, std::vector<double>(3072, 0.0));
  auto ones = extract_raw(solid(255, 255, 255));
  EXPECT_EQ(ones, std::vector<double>(3072, 1.0));
  ImageRecord img;
  img.at(0, 0, 0) = 51;
  img.at(0, 0, 1) = 102;
  img.at(0, 0, 2) = 204;
  const auto v = extract_raw(img);
  EXPECT_DOUBLE_EQ(v[0], 0.2);
  EXPECT_DOUBLE_EQ(v[1], 0.4);
  EXPECT_DOUBLE_EQ(v[2], 0.8);
}

TEST(Hist, BlackImageAndUniformFill) {
  const auto h = extract_hist(solid(0, 0, 0));
  ASSERT_EQ(h.size(), 48u);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t b = 0; b < 16; ++b) EXPECT_EQ(h[c * 16 + b], b == 0 ? 1.0 : 0.0);

  ImageRecord img;
  for (std::size_t i = 0; i < kImagePixels; ++i) img.pixels[3 * i] = static_cast<std::uint8_t>(i % 256);
  const auto u = extract_hist(img);
  for (std::size_t b = 0; b < 16; ++b) EXPECT_DOUBLE_EQ(u[b], 1.0 / 16.0);
}

TEST(Hist, MatchesCountingOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto img = oracle::random_image(rng);
    const auto h = extract_hist(img);
    for (std::size_t c = 0; c < 3; ++c) {
      double sum = 0.0;
      for (std::size_t b = 0; b < 16; ++b) {
        int count = 0;
        for (std::size_t i = 0; i < kImagePixels; ++i) {
          const int v = img.pixels[3 * i + c];
          count += (v >= static_cast<int>(16 * b) && v < static_cast<int>(16 * (b + 1)));
        }
        ASSERT_NEAR(h[c * 16 + b], count / 1024.0, 1e-15);
        sum += h[c * 16 + b];
      }
      ASSERT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Dct, ConstantGridIsDcOnly) {
  SquareGrid<32> ones;
  ones.fill(1.0);
  const auto X = dct2<32>(ones);
  EXPECT_NEAR(X[0], 32.0, 1e-12);
  for (std::size_t i = 1; i < X.size(); ++i) ASSERT_NEAR(X[i], 0.0, 1e-12) << i;
}

TEST(Dct, SingleCosineHitsOneCoefficient) {
  SquareGrid<32> x;
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c)
      x[r * 32 + c] = std::cos(std::numbers::pi * (2.0 * c + 1.0) * 3.0 / 64.0);
  const auto X = dct2<32>(x);
  const auto ref = oracle::dct2_direct(oracle::to_grid(x, 32));
  for (std::size_t u = 0; u < 32; ++u)
    for (std::size_t v = 0; v < 32; ++v) {
      ASSERT_NEAR(X[u * 32 + v], ref[u][v], 1e-9);
      if (!(u == 0 && v == 3)) { ASSERT_NEAR(X[u * 32 + v], 0.0, 1e-9); }
    }
  EXPECT_GT(std::abs(X[3]), 1.0);
}

TEST(Dct, RandomMatchesDirectAndParseval) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 3; ++t) {
    const auto g = oracle::random_grid(rng, 32);
    const auto X = dct2<32>(oracle::from_grid<SquareGrid<32>>(g));
    const auto ref = oracle::dct2_direct(g);
    double ex = 0.0, eX = 0.0;
    for (std::size_t u = 0; u < 32; ++u)
      for (std::size_t v = 0; v < 32; ++v) {
        ASSERT_NEAR(X[u * 32 + v], ref[u][v], 1e-9);
        eX += X[u * 32 + v] * X[u * 32 + v];
        ex += g[u][v] * g[u][v];
      }
    EXPECT_NEAR(ex, eX, 1e-9 * ex);
  }
}

TEST(Dct, ExtractorBlocks) {
  const auto white = extract_dct(solid(255, 255, 255));
  ASSERT_EQ(white.size(), 192u);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    EXPECT_NEAR(white[ch * 64], 32.0, 1e-12);
    for (std::size_t k = 1; k < 64; ++k) ASSERT_NEAR(white[ch * 64 + k], 0.0, 1e-12);
  }
  EXPECT_EQ(extract_dct(solid(0, 0, 0)), std::vector<double>(192, 0.0));

  std::mt19937_64 rng(4);
  const auto img = oracle::random_image(rng);
  const auto v = extract_dct(img);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    oracle::Grid g(32, std::vector<double>(32));
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c) g[r][c] = img.at(r, c, ch) / 255.0;
    const auto ref = oracle::dct2_direct(g);
    for (std::size_t u = 0; u < 8; ++u)
      for (std::size_t w = 0; w < 8; ++w) ASSERT_NEAR(v[ch * 64 + u * 8 + w], ref[u][w], 1e-9);
  }
}

TEST(Hog, ConstantImageIsAllZero) {
  const auto h = extract_hog(gray_const(123.0));
  ASSERT_EQ(h.size(), 324u);
  for (double v : h) ASSERT_EQ(v, 0.0);
}

TEST(Hog, VerticalStepEdgeVotesAtNinetyDegrees) {
  GrayImage g{};
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 16; c < 32; ++c) g[r * 32 + c] = 255.0;
  const auto h = extract_hog(g);
  const auto cells = hog_cell_histograms(g);
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (i % 9 != 4) { ASSERT_EQ(cells[i], 0.0) << "cell bin " << i; }
  EXPECT_GT(cells[1 * 9 + 4], 0.0);  // cell (0,1) holds column 15

  const auto ref = oracle::hog(oracle::to_grid(g, 32));
  EXPECT_LE(max_abs_diff(h, ref), 1e-9);
  for (std::size_t b = 0; b < 9; ++b) {
    double ss = 0.0;
    for (std::size_t k = 0; k < 36; ++k) ss += h[b * 36 + k] * h[b * 36 + k];
    const double norm = std::sqrt(ss);
    EXPECT_LE(norm, std::sqrt(36.0) * 0.2);
    if (norm > 0.0) { EXPECT_NEAR(norm, 1.0, 1e-9); }
  }
}

TEST(Hog, OrientationConvention) {
  EXPECT_DOUBLE_EQ(hog_orientation(1.0, 0.0), 90.0);
  EXPECT_DOUBLE_EQ(hog_orientation(-1.0, 0.0), 90.0);
  EXPECT_DOUBLE_EQ(hog_orientation(0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(hog_orientation(0.0, -1.0), 0.0);
  EXPECT_NEAR(hog_orientation(1.0, 1.0), 45.0, 1e-12);
}

TEST(Hog, RandomMatchesVotingOracleAndBounds) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    const auto img = oracle::random_image(rng);
    const auto g = to_grayscale(img);
    const auto h = extract_hog(g);
    ASSERT_EQ(h.size(), 324u);
    EXPECT_LE(max_abs_diff(h, oracle::hog(oracle::gray(img))), 1e-9);
    for (std::size_t b = 0; b < 9; ++b) {
      double ss = 0.0;
      for (std::size_t k = 0; k < 36; ++k) {
        const double v = h[b * 36 + k];
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        ss += v * v;
      }
      EXPECT_NEAR(std::sqrt(ss), 1.0, 1e-9);
    }
  }
}

TEST(Hog, ClippingBoundBeforeRenormalization) {
  std::vector<double> block(36, 0.0);
  block[0] = 10.0;
  block[1] = 1.0;
  l2_hys(block);
  // After clipping both survivors are at most 0.2; renormalizing rescales to
  // unit length, so the dominant bin ends up above 0.2.
  double ss = 0.0;
  for (double v : block) ss += v * v;
  EXPECT_NEAR(ss, 1.0, 1e-9);
  EXPECT_GT(block[0], block[1]);
}

TEST(Lbp, ConstantImage) {
  const auto codes = lbp_codes(gray_const(7.0));
  for (auto c : codes) ASSERT_EQ(c, 255);
  const auto h = extract_lbp(gray_const(7.0));
  ASSERT_EQ(h.size(), 16u);
  for (std::size_t b = 0; b < 16; ++b) EXPECT_EQ(h[b], b == 8 ? 1.0 : 0.0);
}

TEST(Lbp, BrightCentreOnDarkGround) {
  GrayImage g{};
  g[5 * 32 + 5] = 255.0;
  const auto codes = lbp_codes(g);
  EXPECT_EQ(codes[4 * 30 + 4], 0);
}

TEST(Lbp, UniformMapping) {
  EXPECT_EQ(uniform_lbp(0b01010101), kLbpNonUniform);
  EXPECT_EQ(uniform_lbp(0), 0);
  EXPECT_EQ(uniform_lbp(255), 8);
  EXPECT_EQ(uniform_lbp(0b00001110), 3);
  EXPECT_EQ(uniform_lbp(0b10000001), 2);
  for (int c = 0; c < 256; ++c) ASSERT_EQ(uniform_lbp(static_cast<std::uint8_t>(c)), oracle::uniform_code(c));
}

TEST(Lbp, CheckerboardSplitsBetweenEightAndNonUniform) {
  GrayImage g{};
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) g[r * 32 + c] = (r + c) % 2 == 0 ? 200.0 : 10.0;
  // Bright centres see dark orthogonal and equal diagonal neighbours (code
  // 0b10101010, non-uniform); dark centres see everything >= themselves.
  const auto h = extract_lbp(g);
  EXPECT_DOUBLE_EQ(h[8], 0.5);
  EXPECT_DOUBLE_EQ(h[9], 0.5);
}

TEST(Lbp, RandomMatchesOracle) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const auto img = oracle::random_image(rng);
    const auto g = to_grayscale(img);
    const auto codes = lbp_codes(g);
    const auto ref = oracle::gray(img);
    for (int r = 1; r < 31; ++r)
      for (int c = 1; c < 31; ++c) ASSERT_EQ(codes[(r - 1) * 30 + (c - 1)], oracle::lbp_code(ref, r, c));
    const auto h = extract_lbp(g);
    EXPECT_LE(max_abs_diff(h, oracle::lbp_hist(ref)), 1e-12);
    double sum = 0.0;
    for (double v : h) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (std::size_t b = 10; b < 16; ++b) EXPECT_EQ(h[b], 0.0);
  }
}

TEST(Glcm, ConstantImage) {
  const auto v = extract_glcm(gray_const(100.0));
  ASSERT_EQ(v.size(), 16u);
  for (std::size_t a = 0; a < 4; ++a) {
    EXPECT_EQ(v[a * 4 + 0], 0.0);
    EXPECT_EQ(v[a * 4 + 1], 1.0);
    EXPECT_EQ(v[a * 4 + 2], 1.0);
    EXPECT_EQ(v[a * 4 + 3], 1.0);
  }
}

TEST(Glcm, AlternatingStripes) {
  GrayImage g{};
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) g[r * 32 + c] = c % 2 == 0 ? 0.0 : 255.0;
  const auto v = extract_glcm(g);
  EXPECT_NEAR(v[0], 961.0, 1e-12);
  EXPECT_NEAR(v[1], 1.0 / 962.0, 1e-12);
  EXPECT_NEAR(v[2], std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(v[3], -1.0, 1e-12);
}

TEST(Glcm, RandomMatchesOracleAndRanges) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto img = oracle::random_image(rng);
    const auto g = to_grayscale(img);
    const auto q = glcm_quantize(g);
    for (const auto& [dr, dc] : kGlcmOffsets) {
      const auto p = glcm_matrix(q, dr, dc);
      double sum = 0.0;
      for (double x : p) sum += x;
      ASSERT_NEAR(sum, 1.0, 1e-12);
    }
    const auto v = extract_glcm(g);
    EXPECT_LE(max_abs_diff(v, oracle::glcm(oracle::gray(img))), 1e-9);
    for (std::size_t a = 0; a < 4; ++a) {
      EXPECT_GE(v[a * 4], 0.0);
      EXPECT_GT(v[a * 4 + 1], 0.0);
      EXPECT_LE(v[a * 4 + 1], 1.0);
      EXPECT_GT(v[a * 4 + 2], 0.0);
      EXPECT_LE(v[a * 4 + 2], 1.0);
      EXPECT_GE(v[a * 4 + 3], -1.0);
      EXPECT_LE(v[a * 4 + 3], 1.0);
    }
  }
}

TEST(Wavelet, FilterPair) {
  const auto f = db2_filters();
  double sum = 0.0, nl = 0.0, nh = 0.0, dot = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    sum += f.low[k];
    nl += f.low[k] * f.low[k];
    nh += f.high[k] * f.high[k];
    dot += f.low[k] * f.high[k];
  }
  EXPECT_NEAR(sum, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(nl, 1.0, 1e-12);
  EXPECT_NEAR(nh, 1.0, 1e-12);
  EXPECT_NEAR(dot, 0.0, 1e-12);
  // Even shifts are orthogonal too.
  EXPECT_NEAR(f.low[0] * f.low[2] + f.low[1] * f.low[3], 0.0, 1e-12);
}

TEST(Wavelet, ConstantImage) {
  const auto bands = dwt2<32>(gray_const(3.5), db2_filters());
  for (std::size_t i = 0; i < 256; ++i) {
    ASSERT_NEAR(bands.a[i], 7.0, 1e-12);
    ASSERT_NEAR(bands.lh[i], 0.0, 1e-12);
    ASSERT_NEAR(bands.hl[i], 0.0, 1e-12);
    ASSERT_NEAR(bands.hh[i], 0.0, 1e-12);
  }
  const auto v = extract_wavelet(gray_const(100.0));
  const std::vector<double> expected{0, 0, 0, 200, 0};
  EXPECT_LE(max_abs_diff(v, expected), 1e-12);
  EXPECT_EQ(extract_wavelet(gray_const(0.0)), std::vector<double>(5, 0.0));
}

TEST(Wavelet, RandomEnergyAndConvolutionOracle) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    const auto img = oracle::random_image(rng);
    const auto g = to_grayscale(img);
    const auto bands = dwt2<32>(g, db2_filters());
    const auto ref = oracle::dwt2(oracle::gray(img));
    const double in = oracle::sum_sq(oracle::to_grid(g, 32));
    double out = 0.0;
    for (std::size_t i = 0; i < 256; ++i)
      out += bands.a[i] * bands.a[i] + bands.lh[i] * bands.lh[i] + bands.hl[i] * bands.hl[i] +
             bands.hh[i] * bands.hh[i];
    EXPECT_NEAR(out, in, 1e-9 * in);
    for (std::size_t r = 0; r < 16; ++r)
      for (std::size_t c = 0; c < 16; ++c) {
        ASSERT_NEAR(bands.a[r * 16 + c], ref.a[r][c], 1e-9);
        ASSERT_NEAR(bands.lh[r * 16 + c], ref.lh[r][c], 1e-9);
        ASSERT_NEAR(bands.hl[r * 16 + c], ref.hl[r][c], 1e-9);
        ASSERT_NEAR(bands.hh[r * 16 + c], ref.hh[r][c], 1e-9);
      }
    const auto v = extract_wavelet(g);
    double mean = 0.0;
    for (const auto& row : ref.a)
      for (double x : row) mean += x / 256.0;
    double var = 0.0;
    for (const auto& row : ref.a)
      for (double x : row) var += (x - mean) * (x - mean) / 256.0;
    EXPECT_NEAR(v[0], oracle::sum_sq(ref.lh) / 256.0, 1e-9);
    EXPECT_NEAR(v[1], oracle::sum_sq(ref.hl) / 256.0, 1e-9);
    EXPECT_NEAR(v[2], oracle::sum_sq(ref.hh) / 256.0, 1e-9);
    EXPECT_NEAR(v[3], mean, 1e-9);
    EXPECT_NEAR(v[4], std::sqrt(var), 1e-9);
  }
}

TEST(FeatureSpecTags, ParseAndDimensions) {
  EXPECT_EQ(FeatureSpec::baseline().dimension(), 3312u);
  EXPECT_EQ(FeatureSpec::advanced().dimension(), 361u);
  EXPECT_EQ(FeatureSpec::mixed().dimension(), 3673u);
  EXPECT_EQ(FeatureSpec::parse("dct+raw").tag(), "raw+dct");
  EXPECT_EQ(FeatureSpec::parse("wavelet+glcm+lbp+hog").tag(), "advanced");
  EXPECT_EQ(FeatureSpec::parse("raw+dct").dimension(), 3072u + 192u);
  EXPECT_EQ(FeatureSpec::parse("mixed").offset_of(Family::hog), 3312u);
  EXPECT_THROW(FeatureSpec::parse("raw+sift"), ConfigError);
  EXPECT_THROW(FeatureSpec::parse(""), ConfigError);
}

TEST(Assemble, ConcatenationOrderAndLength) {
  std::mt19937_64 rng(9);
  const auto img = oracle::random_image(rng);
  const auto mixed = assemble_features(img, FeatureSpec::mixed());
  ASSERT_EQ(mixed.values.size(), 3673u);
  EXPECT_EQ(mixed.spec_tag, "mixed");
  const auto raw = extract_raw(img);
  EXPECT_TRUE(std::equal(raw.begin(), raw.end(), mixed.values.begin()));
  EXPECT_EQ(assemble_features(img, FeatureSpec::baseline()).values.size(), 3312u);
  EXPECT_EQ(assemble_features(img, FeatureSpec::advanced()).values.size(), 361u);

  const auto gray = to_grayscale(img);
  const auto wav = extract_wavelet(gray);
  EXPECT_TRUE(std::equal(wav.begin(), wav.end(), mixed.values.end() - 5));
  const auto order_free = assemble_features(img, FeatureSpec::parse("hog+raw"));
  const auto hog = extract_hog(gray);
  EXPECT_TRUE(std::equal(hog.begin(), hog.end(), order_free.values.begin() + 3072));
}

TEST(Assemble, FuzzFiniteAndPure) {
  std::mt19937_64 rng(10);
  std::vector<ImageRecord> images;
  for (int t = 0; t < 1000; ++t) {
    // Mix of noise, constants and sparse images to hit degenerate paths.
    ImageRecord img = oracle::random_image(rng);
    if (t % 10 == 1) img.pixels.fill(static_cast<std::uint8_t>(rng()));
    if (t % 10 == 2)
      for (auto& v : img.pixels) v = (rng() % 17 == 0) ? 255 : 0;
    images.push_back(img);
  }
  const auto m = extract_matrix<double>(images, FeatureSpec::mixed());
  for (double v : m.data()) ASSERT_TRUE(std::isfinite(v));
  // Same image in a different batch gives the same bits.
  const std::vector<ImageRecord> one{images[17]};
  const auto single = extract_matrix<double>(one, FeatureSpec::mixed());
  const auto row = m.row(17);
  EXPECT_TRUE(std::equal(row.begin(), row.end(), single.row(0).begin()));
}
