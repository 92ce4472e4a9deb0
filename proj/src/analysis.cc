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
#include "ccst/analysis.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccst/errors.h"

namespace ccst {
namespace {

std::vector<double> normalized(const std::vector<double>& h) {
  double total = 0.0;
  for (double v : h) total += v;
  std::vector<double> out(h.size(), 0.0);
  if (total <= 0.0) return out;
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] / total;
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

ClientHistogramProfile client_profile(ClientId client,
                                      std::span<const ImageTensor> images,
                                      std::size_t bins) {
  if (images.empty()) throw InvalidArgument("client_profile: no images");
  ClientHistogramProfile p{client, std::vector<double>(bins, 0.0),
                           images.size()};
  for (const auto& img : images) {
    const auto h = grayscale_histogram(img, bins);
    for (std::size_t b = 0; b < bins; ++b) p.histogram[b] += h[b];
  }
  for (double& v : p.histogram) v /= static_cast<double>(images.size());
  return p;
}

std::vector<PairDistance> pairwise_distances(
    std::span<const ClientHistogramProfile> profiles) {
  if (profiles.size() < 2) {
    throw InvalidArgument("uniformity: need at least two profiles");
  }
  const std::size_t bins = profiles.front().histogram.size();
  std::vector<std::vector<double>> norm;
  for (const auto& p : profiles) {
    if (p.histogram.size() != bins) {
      throw InvalidArgument("uniformity: profiles have different bin counts");
    }
    norm.push_back(normalized(p.histogram));
  }
  std::vector<PairDistance> out;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    for (std::size_t j = i + 1; j < profiles.size(); ++j) {
      double d = 0.0;
      for (std::size_t b = 0; b < bins; ++b) d += std::abs(norm[i][b] - norm[j][b]);
      out.push_back({profiles[i].client, profiles[j].client, d});
    }
  }
  return out;
}

double uniformity_distance(std::span<const ClientHistogramProfile> profiles) {
  const auto pairs = pairwise_distances(profiles);
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.distance;
  return sum / static_cast<double>(pairs.size());
}

BeforeAfterReport before_after_report(
    std::vector<ClientHistogramProfile> before,
    std::vector<ClientHistogramProfile> after) {
  if (before.size() != after.size()) {
    throw InvalidArgument("before_after_report: client lists differ");
  }
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i].client != after[i].client) {
      throw InvalidArgument("before_after_report: client order differs");
    }
  }
  BeforeAfterReport r;
  r.before_pairs = pairwise_distances(before);
  r.after_pairs = pairwise_distances(after);
  r.before_distance = uniformity_distance(before);
  r.after_distance = uniformity_distance(after);
  r.before = std::move(before);
  r.after = std::move(after);
  return r;
}

std::string format_pair_table(const BeforeAfterReport& report) {
  std::ostringstream out;
  out << "client_a,client_b,before_l1,after_l1\n";
  for (std::size_t i = 0; i < report.before_pairs.size(); ++i) {
    const auto& b = report.before_pairs[i];
    out << b.a.value << ',' << b.b.value << ',' << fmt(b.distance) << ','
        << fmt(report.after_pairs[i].distance) << '\n';
  }
  return out.str();
}

std::string format_profiles(std::span<const ClientHistogramProfile> profiles) {
  std::ostringstream out;
  out << "bin";
  for (const auto& p : profiles) out << ",client" << p.client.value;
  out << '\n';
  const std::size_t bins = profiles.empty() ? 0 : profiles.front().histogram.size();
  for (std::size_t b = 0; b < bins; ++b) {
    out << b;
    for (const auto& p : profiles) out << ',' << fmt(p.histogram[b]);
    out << '\n';
  }
  return out.str();
}

std::string format_uniformity_summary(const BeforeAfterReport& report) {
  std::ostringstream out;
  out << "before_distance,after_distance,margin\n"
      << fmt(report.before_distance) << ',' << fmt(report.after_distance) << ','
      << fmt(report.margin()) << '\n';
  return out.str();
}

}  // namespace ccst
