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

#include "ccst/data.h"
#include "ccst/errors.h"
#include "ccst/privacy.h"
#include "test_util.h"

namespace ccst {
namespace {

using testing::constant_image;
using testing::from_values;

TEST(InvertStyleTest, ConstantTargetIsRecovered) {
  IdentitySpace space;
  const auto truth = constant_image(3, 16, 16, 0.37);
  const auto target = extract_style(truth, space);
  Rng rng(1, {0, 0, "attack"});
  const auto recon = invert_style(target, {3, 16, 16}, space, {}, rng);
  EXPECT_EQ(recon.iterations, 2000u);
  const std::vector<ImageTensor> gt{truth};
  const auto report = score_attack(recon, gt, constant_image(3, 16, 16, 0.5));
  EXPECT_GE(report.best_psnr, 60.0);
}

TEST(InvertStyleTest, TexturedTargetMatchesStyleButNotPixels) {
  GenerateOptions opts;
  opts.num_domains = 1;
  opts.per_domain = 32;
  opts.image_size = 16;
  opts.seed = 8;
  const auto data = generate_domains(opts, default_domain_specs(1));
  std::vector<ImageTensor> pool;
  for (const auto& s : data.at(ClientId{0})) pool.push_back(s.image);
  const auto mean = mean_image(pool);
  IdentitySpace space;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& truth = pool[i];
    Rng rng(2, {0, 0, "attack", i});
    const auto recon =
        invert_style(extract_style(truth, space), {3, 16, 16}, space, {}, rng);
    EXPECT_LT(recon.residual, 1e-6);
    const std::vector<ImageTensor> gt{truth};
    const auto report = score_attack(recon, gt, mean);
    EXPECT_LE(report.best_psnr, report.best_baseline_psnr + 3.0)
        << "image " << i << " psnr " << report.best_psnr << " baseline "
        << report.best_baseline_psnr;
  }
}

TEST(InvertStyleTest, ShapeMustMatchSpace) {
  IdentitySpace space;
  const auto target = extract_style(constant_image(3, 4, 4, 0.5), space);
  Rng rng(3, {0, 0, "attack"});
  EXPECT_THROW(invert_style(target, {2, 4, 4}, space, {}, rng), InvalidArgument);
  EXPECT_THROW(invert_style(target, {3, 4, 4}, space, {0, 0.1}, rng),
               InvalidArgument);
}

TEST(ScoreAttackTest, ReportsPerCandidate) {
  const Reconstruction recon{constant_image(1, 2, 2, 0.5), 0.0, 1};
  const std::vector<ImageTensor> gt{constant_image(1, 2, 2, 0.5),
                                    constant_image(1, 2, 2, 0.6)};
  const auto report = score_attack(recon, gt, constant_image(1, 2, 2, 0.6));
  ASSERT_EQ(report.candidate_psnr.size(), 2u);
  EXPECT_EQ(report.candidate_psnr[0], kPsnrCapDb);
  EXPECT_NEAR(report.candidate_psnr[1], 20.0, 1e-9);
  EXPECT_EQ(report.best_psnr, kPsnrCapDb);
  EXPECT_NEAR(report.baseline_psnr[0], 20.0, 1e-9);
  EXPECT_EQ(report.best_baseline_psnr, kPsnrCapDb);
}

TEST(MeanImageTest, ElementWiseMean) {
  const std::vector<ImageTensor> imgs{from_values(1, 1, 2, {0, 1}),
                                      from_values(1, 1, 2, {1, 3})};
  EXPECT_EQ(mean_image(imgs), from_values(1, 1, 2, {0.5, 2}));
  EXPECT_THROW(mean_image({}), InvalidArgument);
}

TEST(WitnessTest, SameStyleDifferentPixels) {
  IdentitySpace space(1);
  Rng rng(4, {0, 0, "witness"});
  const auto img = from_values(1, 2, 2, {1, 3, 5, 7});
  for (int t = 0; t < 50; ++t) {
    const auto [a, b] = non_injectivity_witness(img, rng);
    EXPECT_EQ(a, img);
    EXPECT_NE(a, b);
    const auto sa = extract_style(a, space);
    const auto sb = extract_style(b, space);
    EXPECT_EQ(sa.mu, sb.mu);
    EXPECT_EQ(sa.sigma, sb.sigma);
    EXPECT_GT(mean_squared_error(a, b), 0.0);
  }
  const auto reversed = from_values(1, 2, 2, {7, 5, 3, 1});
  EXPECT_EQ(extract_style(reversed, space), extract_style(img, space));
}

TEST(WitnessTest, RandomImagesAndDegenerateCases) {
  IdentitySpace space;
  Rng rng(5, {0, 0, "witness"});
  for (int t = 0; t < 20; ++t) {
    const auto img = testing::random_image(rng, 3, 5, 5);
    const auto [a, b] = non_injectivity_witness(img, rng);
    EXPECT_NE(a, b);
    EXPECT_EQ(channel_mean_std(a), channel_mean_std(b));
  }
  // Two distinct values only: the fallback transposition must still work.
  const auto two = from_values(1, 1, 3, {0, 0, 1});
  const auto [a, b] = non_injectivity_witness(two, rng);
  EXPECT_NE(a, b);
  EXPECT_THROW(non_injectivity_witness(constant_image(3, 4, 4, 0.2), rng),
               InvalidArgument);
}

}  // namespace
}  // namespace ccst
