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

#include <fstream>
#include <set>
#include <sstream>

#include "ccst/augment.h"
#include "ccst/errors.h"
#include "ccst/io.h"
#include "test_util.h"

namespace ccst {
namespace {

using testing::random_image;

struct Federation {
  std::map<ClientId, std::vector<LabeledImage>> data;
  GlobalStyleBank single;
  GlobalStyleBank overall;
  AmplitudeBank amp_single;
  AmplitudeBank amp_overall;
};

std::vector<ImageTensor> pixels(const std::vector<LabeledImage>& imgs) {
  std::vector<ImageTensor> out;
  for (const auto& s : imgs) out.push_back(s.image);
  return out;
}

Federation make_federation(std::size_t n, std::size_t m, std::size_t j) {
  IdentitySpace space;
  std::map<ClientId, std::vector<LabeledImage>> data;
  std::vector<LocalStyleBank> single, overall;
  AmplitudeBank amp_single{StyleKind::kSingle, {}};
  AmplitudeBank amp_overall{StyleKind::kOverall, {}};
  for (std::uint16_t c = 0; c < n; ++c) {
    Rng rng(11, {c, 0, "data"});
    auto& imgs = data[ClientId{c}];
    for (std::size_t i = 0; i < m; ++i) {
      const double shift = 0.3 * c;
      imgs.push_back({random_image(rng, 3, 4, 4, shift, shift + 0.5),
                      static_cast<int>(i % 3), ClientId{c},
                      (std::uint64_t{c} << 32) | i});
    }
    const auto px = pixels(imgs);
    Rng pub(11, {c, 0, "publish"});
    single.push_back(publish_styles(ClientId{c}, px, {StyleKind::kSingle, j, {}},
                                    space, pub));
    overall.push_back(publish_styles(ClientId{c}, px, {}, space, pub));
    amp_single.entries[ClientId{c}] =
        publish_amplitudes(px, {StyleKind::kSingle, j, {}}, pub);
    amp_overall.entries[ClientId{c}] = publish_amplitudes(px, {}, pub);
  }
  return {std::move(data), assemble_bank(single), assemble_bank(overall),
          std::move(amp_single), std::move(amp_overall)};
}

TEST(AugmentTest, SizeLawAndSelfCopyLaw) {
  const auto fed = make_federation(3, 7, 2);
  IdentitySpace space;
  for (auto mode : {StyleKind::kSingle, StyleKind::kOverall}) {
    const auto& bank = mode == StyleKind::kSingle ? fed.single : fed.overall;
    for (std::size_t k = 1; k <= 3; ++k) {
      for (std::uint16_t c = 0; c < 3; ++c) {
        const auto& imgs = fed.data.at(ClientId{c});
        const AugmentConfig cfg{k, mode, TransferBackend::kAdain, 5, 1.0};
        const auto out = augment_client(imgs, bank, cfg, ClientId{c}, space);
        ASSERT_EQ(out.size(), k * imgs.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
          const auto& src = imgs[i / k];
          EXPECT_EQ(out.entries[i].sample.label, src.label);
          EXPECT_EQ(out.entries[i].sample.domain, src.domain);
          EXPECT_EQ(out.entries[i].sample.id, src.id);
          if (out.entries[i].origin == EntryOrigin::kOriginal) {
            EXPECT_EQ(out.entries[i].sample, src);
            EXPECT_EQ(out.entries[i].style_source, ClientId{c});
          } else {
            EXPECT_NE(out.entries[i].style_source, ClientId{c});
          }
        }
        // Each image's K slots name K distinct clients.
        for (std::size_t i = 0; i < imgs.size(); ++i) {
          std::set<ClientId> sources;
          for (std::size_t s = 0; s < k; ++s) {
            sources.insert(out.entries[i * k + s].style_source);
          }
          EXPECT_EQ(sources.size(), k);
        }
        if (k == 3) {
          EXPECT_EQ(out.original_count(), imgs.size());
        }
      }
    }
  }
}

TEST(AugmentTest, SelfOnlyBankIsIdentity) {
  const auto fed = make_federation(1, 5, 2);
  IdentitySpace space;
  const auto& imgs = fed.data.at(ClientId{0});
  const auto out = augment_client(imgs, fed.overall,
                                  {1, StyleKind::kOverall, TransferBackend::kAdain, 1, 1.0},
                                  ClientId{0}, space);
  EXPECT_EQ(out.samples(), imgs);
}

TEST(AugmentTest, DeterministicPerSeed) {
  const auto fed = make_federation(3, 12, 4);
  IdentitySpace space;
  const auto& imgs = fed.data.at(ClientId{1});
  AugmentConfig cfg{2, StyleKind::kSingle, TransferBackend::kAdain, 42, 1.0};
  const auto a = augment_client(imgs, fed.single, cfg, ClientId{1}, space);
  const auto b = augment_client(imgs, fed.single, cfg, ClientId{1}, space);
  EXPECT_EQ(a, b);
  cfg.seed = 43;
  const auto c = augment_client(imgs, fed.single, cfg, ClientId{1}, space);
  EXPECT_NE(a, c);
}

TEST(AugmentTest, StatisticLawOverallAdain) {
  const auto fed = make_federation(3, 10, 2);
  IdentitySpace space;
  const auto& imgs = fed.data.at(ClientId{0});
  const auto out = augment_client(imgs, fed.overall,
                                  {3, StyleKind::kOverall, TransferBackend::kAdain, 3, 1.0},
                                  ClientId{0}, space);
  std::size_t stylized = 0;
  for (const auto& e : out.entries) {
    if (e.origin != EntryOrigin::kStylized) continue;
    ++stylized;
    const auto& style = fed.overall.at(e.style_source).styles.front();
    const auto stats = channel_mean_std(e.sample.image);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(stats.mu[c], style.mu[c], 1e-6);
      EXPECT_NEAR(stats.sigma[c], style.sigma[c], 1e-6);
    }
  }
  EXPECT_EQ(stylized, 2 * imgs.size());
}

TEST(AugmentTest, SingleModeAppliesAPublishedStyle) {
  const auto fed = make_federation(2, 6, 3);
  IdentitySpace space;
  const auto out = augment_client(fed.data.at(ClientId{0}), fed.single,
                                  {2, StyleKind::kSingle, TransferBackend::kAdain, 9, 1.0},
                                  ClientId{0}, space);
  for (const auto& e : out.entries) {
    if (e.origin != EntryOrigin::kStylized) continue;
    const auto stats = channel_mean_std(e.sample.image);
    bool matched = false;
    for (const auto& s : fed.single.at(e.style_source).styles) {
      bool all = true;
      for (std::size_t c = 0; c < 3; ++c) {
        all = all && std::abs(stats.mu[c] - s.mu[c]) < 1e-6 &&
              std::abs(stats.sigma[c] - s.sigma[c]) < 1e-6;
      }
      matched = matched || all;
    }
    EXPECT_TRUE(matched);
  }
}

TEST(AugmentTest, FftBackend) {
  const auto fed = make_federation(3, 5, 2);
  for (const auto* bank : {&fed.amp_single, &fed.amp_overall}) {
    const AugmentConfig cfg{3, bank->mode, TransferBackend::kFft, 4, 1.0};
    const auto& imgs = fed.data.at(ClientId{2});
    const auto out = augment_client(imgs, *bank, cfg, ClientId{2});
    ASSERT_EQ(out.size(), 15u);
    EXPECT_EQ(out.original_count(), 5u);
    for (const auto& e : out.entries) {
      if (e.origin != EntryOrigin::kStylized) continue;
      const auto a = amplitude(e.sample.image);
      bool matched = false;
      for (const auto& t : bank->entries.at(e.style_source)) {
        double m = 0;
        for (std::size_t i = 0; i < a.magnitude.size(); ++i) {
          m = std::max(m, std::abs(a.magnitude[i] - t.magnitude[i]));
        }
        matched = matched || m < 1e-6;
      }
      EXPECT_TRUE(matched);
    }
  }
}

TEST(AugmentTest, PreconditionErrors) {
  const auto fed = make_federation(3, 4, 2);
  IdentitySpace space;
  const auto& imgs = fed.data.at(ClientId{0});
  AugmentConfig cfg{4, StyleKind::kOverall, TransferBackend::kAdain, 1, 1.0};
  EXPECT_THROW(augment_client(imgs, fed.overall, cfg, ClientId{0}, space),
               InvalidArgument);
  cfg.k = 0;
  EXPECT_THROW(augment_client(imgs, fed.overall, cfg, ClientId{0}, space),
               InvalidArgument);
  cfg.k = 2;
  EXPECT_THROW(augment_client(imgs, fed.single, cfg, ClientId{0}, space),
               InvalidArgument);
  EXPECT_THROW(augment_client(imgs, fed.overall, cfg, ClientId{7}, space),
               InvalidArgument);
  EXPECT_THROW(augment_client(imgs, fed.amp_overall, cfg, ClientId{0}),
               InvalidArgument);
  EXPECT_THROW(parse_backend("gan"), InvalidArgument);
  EXPECT_EQ(parse_backend("fft"), TransferBackend::kFft);
}

TEST(SweepGridTest, SixCellsWithSizeLaw) {
  const auto fed = make_federation(3, 8, 2);
  IdentitySpace space;
  const auto& imgs = fed.data.at(ClientId{1});
  const auto cells = sweep_grid(imgs, fed.single, fed.overall,
                                {1, StyleKind::kOverall, TransferBackend::kAdain, 2, 1.0},
                                ClientId{1}, space);
  ASSERT_EQ(cells.size(), 6u);
  for (const auto& cell : cells) {
    EXPECT_EQ(cell.data.size(), cell.k * imgs.size());
    if (cell.k == 3) {
      EXPECT_EQ(cell.data.original_count(), imgs.size());
    }
  }
}

TEST(WriteAugmentedTest, ManifestRecordsProvenance) {
  const auto fed = make_federation(3, 4, 2);
  IdentitySpace space;
  const auto& imgs = fed.data.at(ClientId{0});
  const auto out = augment_client(imgs, fed.overall,
                                  {3, StyleKind::kOverall, TransferBackend::kAdain, 7, 1.0},
                                  ClientId{0}, space);
  const auto dir = testing::scratch_dir("write_augmented");
  write_augmented(dir, out);
  const auto entries = read_manifest(dir / "manifest.tsv");
  ASSERT_EQ(entries.size(), 12u);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    EXPECT_EQ(load_tensor(dir / entries[i].path), out.entries[i].sample.image);
    EXPECT_EQ(entries[i].label, out.entries[i].sample.label);
    ASSERT_GE(entries[i].extra.size(), 2u);
    EXPECT_EQ(entries[i].extra[0],
              out.entries[i].origin == EntryOrigin::kOriginal ? "original"
                                                              : "stylized");
  }
}

}  // namespace
}  // namespace ccst
