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
#ifndef CCST_ANALYSIS_H_
#define CCST_ANALYSIS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ccst/tensor.h"

namespace ccst {

/// A client's mean grey-level histogram ("average pixel count per image").
struct ClientHistogramProfile {
  ClientId client;
  std::vector<double> histogram;
  std::size_t image_count = 0;
};

ClientHistogramProfile client_profile(ClientId client,
                                      std::span<const ImageTensor> images,
                                      std::size_t bins = kDefaultHistogramBins);

struct PairDistance {
  ClientId a;
  ClientId b;
  double distance = 0.0;
};

/// L1 distance between unit-mass normalized profiles, one entry per
/// unordered pair (a < b in input order).
std::vector<PairDistance> pairwise_distances(
    std::span<const ClientHistogramProfile> profiles);

/// Mean pairwise L1 distance between normalized profiles, in [0, 2].
double uniformity_distance(std::span<const ClientHistogramProfile> profiles);

struct BeforeAfterReport {
  std::vector<ClientHistogramProfile> before;
  std::vector<ClientHistogramProfile> after;
  std::vector<PairDistance> before_pairs;
  std::vector<PairDistance> after_pairs;
  double before_distance = 0.0;
  double after_distance = 0.0;

  double margin() const { return before_distance - after_distance; }
};

/// `before` and `after` must list the same clients in the same order.
BeforeAfterReport before_after_report(
    std::vector<ClientHistogramProfile> before,
    std::vector<ClientHistogramProfile> after);

/// client_a,client_b,before_l1,after_l1 -- one row per pair.
std::string format_pair_table(const BeforeAfterReport& report);
/// bin,<client>... with one column per profile.
std::string format_profiles(std::span<const ClientHistogramProfile> profiles);
/// Two-line summary with both distances and their difference.
std::string format_uniformity_summary(const BeforeAfterReport& report);

}  // namespace ccst

#endif  // CCST_ANALYSIS_H_
