// Copyright 2026 The CCST Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ccst/errors.h"
#include "ccst/fft.h"
#include "ccst/style.h"
#include "test_util.h"

namespace ccst {
namespace {

using testing::constant_image;
using testing::from_values;
using testing::random_image;

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

StyleVector random_style(Rng& rng, std::size_t channels) {
  StyleVector s;
  for (std::size_t c = 0; c < channels; ++c) {
    s.mu.push_back(rng.uniform(-1.0, 2.0));
    s.sigma.push_back(rng.uniform(0.01, 1.5));
  }
  return s;
}

TEST(FeatureSpaceTest, DecodeInvertsEncode) {
  Rng rng(1, {0, 0, "space"});
  IdentitySpace identity;
  OpponentColorSpace opponent;
  for (int t = 0; t < 20; ++t) {
    const auto img = random_image(rng, 3, 6, 5);
    EXPECT_EQ(identity.decode(identity.encode(img)), img);
    EXPECT_LT(max_abs_diff(opponent.decode(opponent.encode(img)), img), 1e-9);
    EXPECT_TRUE(opponent.encode(img).same_shape(img));
  }
  EXPECT_THROW(make_feature_space("vgg"), InvalidArgument);
}

TEST(ExtractStyleTest, Examples) {
  IdentitySpace space(1);
  const auto s = extract_style(from_values(1, 2, 2, {1, 3, 5, 7}), space);
  EXPECT_DOUBLE_EQ(s.mu[0], 4.0);
  EXPECT_NEAR(s.sigma[0], std::sqrt(5.0), 1e-15);
  EXPECT_EQ(s.kind, StyleKind::kSingle);
  EXPECT_EQ(extract_style(constant_image(1, 3, 3, 0.3), space).sigma[0], 0.0);
  // A reversed image is a pixel permutation.
  EXPECT_EQ(extract_style(from_values(1, 2, 2, {7, 5, 3, 1}), space), s);
}

TEST(ExtractOverallStyleTest, PooledStatistics) {
  IdentitySpace space(1);
  const std::vector<ImageTensor> imgs{from_values(1, 1, 2, {0, 2}),
                                      from_values(1, 1, 2, {4, 6})};
  const auto s = extract_overall_style(imgs, space);
  EXPECT_DOUBLE_EQ(s.mu[0], 3.0);
  EXPECT_NEAR(s.sigma[0], std::sqrt(5.0), 1e-15);
  EXPECT_EQ(s.kind, StyleKind::kOverall);
  EXPECT_THROW(extract_overall_style({}, space), InvalidArgument);
}

TEST(ExtractOverallStyleTest, CopiesAndSingletonsMatchSingleStyle) {
  Rng rng(2, {0, 0, "overall"});
  IdentitySpace space;
  const auto img = random_image(rng, 3, 4, 4);
  const std::vector<ImageTensor> copies(5, img);
  const std::vector<ImageTensor> one{img};
  const auto single = extract_style(img, space);
  auto overall = extract_overall_style(copies, space);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_NEAR(overall.mu[c], single.mu[c], 1e-12);
    EXPECT_NEAR(overall.sigma[c], single.sigma[c], 1e-12);
  }
  overall = extract_overall_style(one, space);
  EXPECT_EQ(overall.mu, single.mu);
  EXPECT_EQ(overall.sigma, single.sigma);
}

TEST(ExtractOverallStyleTest, EqualsBruteForceConcatenation) {
  Rng rng(3, {0, 0, "concat"});
  OpponentColorSpace space;
  for (int t = 0; t < 10; ++t) {
    std::vector<ImageTensor> imgs;
    const std::size_t m = 1 + rng.below(8);
    for (std::size_t i = 0; i < m; ++i) imgs.push_back(random_image(rng, 3, 3, 4));
    const auto s = extract_overall_style(imgs, space);
    for (std::size_t c = 0; c < 3; ++c) {
      // Oracle: naive two-pass statistics over the explicit concatenation.
      std::vector<double> all;
      for (const auto& img : imgs) {
        const auto feat = space.encode(img);
        auto ch = feat.channel(c);
        all.insert(all.end(), ch.begin(), ch.end());
      }
      double mean = 0;
      for (double v : all) mean += v;
      mean /= all.size();
      double var = 0;
      for (double v : all) var += (v - mean) * (v - mean);
      var /= all.size();
      EXPECT_NEAR(s.mu[c], mean, 1e-12);
      EXPECT_NEAR(s.sigma[c], std::sqrt(var), 1e-12);
    }
  }
}

TEST(AdainTest, HandComputedExample) {
  StyleVector style{{5.0}, {3.0}, StyleKind::kSingle, {}};
  const auto out = adain(from_values(1, 1, 2, {0, 2}), style);
  EXPECT_NEAR(out.data()[0], 2.0, 1e-4);
  EXPECT_NEAR(out.data()[1], 7.9999, 1e-4);
  // Without the floor the transform is exactly Eq. (2).
  const auto exact = adain(from_values(1, 1, 2, {0, 2}), style, 0.0);
  EXPECT_EQ(exact.data()[0], 2.0);
  EXPECT_EQ(exact.data()[1], 8.0);
}

TEST(AdainTest, SelfStyleIsIdentity) {
  Rng rng(4, {0, 0, "self"});
  IdentitySpace space;
  for (int t = 0; t < 20; ++t) {
    const auto img = random_image(rng, 3, 5, 5);
    const auto out = adain(img, extract_style(img, space));
    EXPECT_LT(max_abs_diff(out, img), 1e-12);
  }
}

TEST(AdainTest, ConstantContentBecomesStyleMean) {
  StyleVector style{{0.7, -0.2}, {0.4, 2.0}, StyleKind::kOverall, {}};
  const auto out = adain(constant_image(2, 3, 3, 0.1), style);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_NEAR(out.channel(0)[i], 0.7, 1e-9);
    EXPECT_NEAR(out.channel(1)[i], -0.2, 1e-9);
  }
}

TEST(AdainTest, ChannelMismatchThrows) {
  StyleVector style{{0.0}, {1.0}, StyleKind::kSingle, {}};
  EXPECT_THROW(adain(constant_image(3, 2, 2, 0.0), style), InvalidArgument);
}

TEST(GenerateTest, MatchesTargetStatisticsAndIsIdempotent) {
  Rng rng(5, {0, 0, "generate"});
  IdentitySpace space;
  for (int t = 0; t < 200; ++t) {
    const auto img = random_image(rng, 3, 6, 6, -0.5, 1.5);
    const auto style = random_style(rng, 3);
    const auto out = generate(img, style, space);
    EXPECT_EQ(out, adain(img, style));
    const auto stats = channel_mean_std(out);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(stats.mu[c], style.mu[c], 1e-6);
      EXPECT_NEAR(stats.sigma[c], style.sigma[c], 1e-6);
    }
    EXPECT_LT(max_abs_diff(generate(out, style, space), out), 1e-4);
    EXPECT_LT(max_abs_diff(generate(img, extract_style(img, space), space), img),
              1e-4);
  }
}

TEST(GenerateTest, NonIdentitySpaceMatchesFeatureStatistics) {
  Rng rng(6, {0, 0, "generate-opp"});
  OpponentColorSpace space;
  const auto img = random_image(rng, 3, 8, 8);
  const auto style = random_style(rng, 3);
  const auto feats = channel_mean_std(space.encode(generate(img, style, space)));
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_NEAR(feats.mu[c], style.mu[c], 1e-9);
    EXPECT_NEAR(feats.sigma[c], style.sigma[c], 1e-9);
  }
}

// Independent oracle: direct 2-D DFT by the defining double sum.
std::vector<Complex> dft2_oracle(std::span<const double> x, std::size_t h,
                                 std::size_t w) {
  std::vector<Complex> out(h * w);
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      Complex acc = 0;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t xx = 0; xx < w; ++xx) {
          const double ang = -2.0 * std::numbers::pi *
                             (static_cast<double>(u * y) / h +
                              static_cast<double>(v * xx) / w);
          acc += x[y * w + xx] * std::polar(1.0, ang);
        }
      }
      out[u * w + v] = acc;
    }
  }
  return out;
}

TEST(FftTest, MatchesDirectDftOracle) {
  Rng rng(7, {0, 0, "fft"});
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {4, 6},
                      {5, 3}, {1, 2}, {16, 4}}) {
    const auto img = random_image(rng, 1, h, w);
    std::vector<Complex> grid(img.data().begin(), img.data().end());
    fft2d(grid, h, w, false);
    const auto expect = dft2_oracle(img.data(), h, w);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_LT(std::abs(grid[i] - expect[i]), 1e-10) << h << "x" << w;
    }
    fft2d(grid, h, w, true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_NEAR(grid[i].real(), img.data()[i], 1e-12);
      EXPECT_NEAR(grid[i].imag(), 0.0, 1e-12);
    }
  }
}

TEST(FftTest, ConstantContentTakesTargetLevel) {
  const auto out = fft_amplitude_exchange(constant_image(3, 8, 8, 0.2),
                                          amplitude(constant_image(3, 8, 8, 0.8)));
  for (double v : out.data()) EXPECT_NEAR(v, 0.8, 1e-9);
}

TEST(FftTest, SelfExchangeIsIdentity) {
  Rng rng(8, {0, 0, "fft-self"});
  for (int t = 0; t < 10; ++t) {
    const auto img = random_image(rng, 3, 8, 6);
    EXPECT_LT(max_abs_diff(fft_amplitude_exchange(img, amplitude(img)), img),
              1e-9);
  }
}

TEST(FftTest, TwoPointHandExample) {
  const auto out = fft_amplitude_exchange(
      from_values(1, 1, 2, {0, 1}), amplitude(from_values(1, 1, 2, {0, 3})));
  EXPECT_NEAR(out.data()[0], 0.0, 1e-12);
  EXPECT_NEAR(out.data()[1], 3.0, 1e-12);
  const auto a = amplitude(from_values(1, 1, 2, {0, 1}));
  EXPECT_NEAR(a.magnitude[0], 1.0, 1e-15);
  EXPECT_NEAR(a.magnitude[1], 1.0, 1e-15);
}

TEST(FftTest, ExchangedOutputCarriesTargetAmplitude) {
  Rng rng(9, {0, 0, "fft-amp"});
  for (int t = 0; t < 10; ++t) {
    const auto content = random_image(rng, 3, 8, 8);
    const auto target = amplitude(random_image(rng, 3, 8, 8));
    const auto out = amplitude(fft_amplitude_exchange(content, target));
    for (std::size_t i = 0; i < out.magnitude.size(); ++i) {
      EXPECT_NEAR(out.magnitude[i], target.magnitude[i], 1e-6);
    }
  }
}

TEST(FftTest, AmplitudeInvariantToCircularShift) {
  Rng rng(10, {0, 0, "fft-shift"});
  const auto img = random_image(rng, 1, 8, 8);
  std::vector<double> shifted(64);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      shifted[((y + 3) % 8) * 8 + (x + 5) % 8] = img.at(0, y, x);
    }
  }
  const auto a = amplitude(img);
  const auto b = amplitude(from_values(1, 8, 8, shifted));
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_NEAR(a.magnitude[i], b.magnitude[i], 1e-12);
  }
}

TEST(FftTest, LowFrequencyWindowKeepsHighFrequencies) {
  Rng rng(11, {0, 0, "fft-window"});
  const auto content = random_image(rng, 1, 8, 8);
  const auto target = amplitude(random_image(rng, 1, 8, 8));
  const auto out = amplitude(fft_amplitude_exchange(content, target, 0.25));
  const auto own = amplitude(content);
  // reach = floor(0.25 * 8 / 2) = 1: frequencies with |f| <= 1 on both axes.
  auto in_window = [](std::size_t k) { return k <= 1 || k >= 7; };
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      const std::size_t i = y * 8 + x;
      const double expect = in_window(y) && in_window(x) ? target.magnitude[i]
                                                         : own.magnitude[i];
      EXPECT_NEAR(out.magnitude[i], expect, 1e-9);
    }
  }
  EXPECT_THROW(fft_amplitude_exchange(content, target, 0.0), InvalidArgument);
  EXPECT_THROW(fft_amplitude_exchange(content, target, 1.5), InvalidArgument);
}

TEST(OverallAmplitudeTest, AveragesSpectra) {
  Rng rng(12, {0, 0, "overall-amp"});
  const auto img = random_image(rng, 3, 4, 4);
  const std::vector<ImageTensor> same{img, img, img};
  const auto o = overall_amplitude(same);
  const auto a = amplitude(img);
  for (std::size_t i = 0; i < a.magnitude.size(); ++i) {
    EXPECT_NEAR(o.magnitude[i], a.magnitude[i], 1e-12);
  }
  EXPECT_EQ(o.channels, 3u);
  EXPECT_EQ(o.height, 4u);
  EXPECT_EQ(o.width, 4u);

  const std::vector<ImageTensor> levels{constant_image(3, 4, 4, 0.2),
                                        constant_image(3, 4, 4, 0.6)};
  const auto out =
      fft_amplitude_exchange(constant_image(3, 4, 4, 0.9), overall_amplitude(levels));
  for (double v : out.data()) EXPECT_NEAR(v, 0.4, 1e-9);
  EXPECT_THROW(overall_amplitude({}), InvalidArgument);
  EXPECT_THROW(fft_amplitude_exchange(constant_image(1, 4, 4, 0), o),
               InvalidArgument);
}

}  // namespace
}  // namespace ccst
