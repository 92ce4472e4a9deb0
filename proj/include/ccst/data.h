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
#ifndef CCST_DATA_H_
#define CCST_DATA_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ccst/tensor.h"

namespace ccst {

/// How one synthetic domain renders class content: a per-channel affine
/// colour map, an oriented sinusoidal texture and additive Gaussian noise.
struct DomainSpec {
  ClientId id;
  std::array<double, 3> gain{1.0, 1.0, 1.0};
  std::array<double, 3> bias{0.0, 0.0, 0.0};
  double texture_frequency = 0.0;  // cycles per image width
  double texture_amplitude = 0.0;
  double texture_angle = 0.0;  // radians
  double noise_sigma = 0.0;

  void validate() const;
  bool operator==(const DomainSpec&) const = default;
};

/// Hand-tuned looks for the first four domains (a photo-like, a warm
/// painted, a saturated flat and a faint sketch-like domain); further
/// domains are drawn from `seed`.
std::vector<DomainSpec> default_domain_specs(std::size_t num_domains,
                                             std::uint64_t seed = 0);

/// Key-value text: a "domain = <id>" line opens each block, followed by
/// "gain = r g b", "bias = r g b", "texture_frequency = f",
/// "texture_amplitude = a", "texture_angle = t", "noise_sigma = s".
/// '#' starts a comment.
std::string format_domain_specs(const std::vector<DomainSpec>& specs);
std::vector<DomainSpec> parse_domain_specs(std::string_view text);

inline constexpr std::size_t kMaxClasses = 8;

struct GenerateOptions {
  std::size_t num_domains = 4;
  std::size_t num_classes = 4;
  std::size_t per_domain = 400;
  std::size_t image_size = 32;
  std::uint64_t seed = 0;
};

using DomainImages = std::map<ClientId, std::vector<LabeledImage>>;

/// Renders class-balanced images for every domain. Each class is a distinct
/// geometric pattern at a random position and scale; each domain restyles
/// it per its spec. Image i of domain d has label i % num_classes and id
/// (d << 32) | i.
DomainImages generate_domains(const GenerateOptions& options,
                              const std::vector<DomainSpec>& specs);

/// Binary class mask used by the renderer, exposed for tests.
ImageTensor render_class_mask(int label, std::size_t size, double cx, double cy,
                              double scale);

struct SourceClient {
  ClientId id;
  std::vector<LabeledImage> train;
  std::vector<LabeledImage> validation;
};

/// Leave-one-domain-out federation: every non-target domain is a source
/// client with a stratified train/validation split; the target domain's whole
/// data is the test set.
struct FederatedDataset {
  std::vector<SourceClient> sources;
  ClientId target;
  std::vector<LabeledImage> test;
  std::size_t num_classes = 0;
};

inline constexpr double kDefaultTrainFraction = 0.9;

/// Stratified, seeded train/validation split of one source client. The split
/// depends only on (seed, id, images), so it is the same whether or not other
/// domains are present.
SourceClient split_client(ClientId id, const std::vector<LabeledImage>& images,
                          std::size_t num_classes, double train_fraction,
                          std::uint64_t seed);

FederatedDataset split_leave_one_out(const DomainImages& domains,
                                     ClientId target, std::size_t num_classes,
                                     double train_fraction,
                                     std::uint64_t seed);

/// Writes every image as a .cct file plus manifest.tsv (path, label, domain,
/// id) under `dir`.
void save_domains(const std::filesystem::path& dir, const DomainImages& domains);

/// Loads a directory written by save_domains. Tensor files of domains that
/// `wanted` rejects are never opened; a null filter loads everything.
DomainImages load_domains(
    const std::filesystem::path& dir,
    const std::function<bool(ClientId)>& wanted = nullptr);

/// Drops `target` and splits the remaining domains.
std::vector<SourceClient> split_sources(const DomainImages& domains,
                                        ClientId target,
                                        std::size_t num_classes,
                                        double train_fraction,
                                        std::uint64_t seed);

}  // namespace ccst

#endif  // CCST_DATA_H_
