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
#include "ccst/data.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "ccst/errors.h"
#include "ccst/io.h"
#include "ccst/rng.h"

namespace ccst {
namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<double> parse_numbers(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) {
    throw FormatError("domain spec line " + std::to_string(line) +
                      ": bad number in '" + text + "'");
  }
  return out;
}

// Soft inside-test helpers; coordinates are in pixels.
double band(double d, double half_width) {
  return std::clamp(half_width + 0.5 - std::abs(d), 0.0, 1.0);
}

}  // namespace

void DomainSpec::validate() const {
  for (int c = 0; c < 3; ++c) {
    if (!(gain[c] > 0.0) || !std::isfinite(gain[c])) {
      throw InvalidArgument("domain " + std::to_string(id.value) +
                            ": gains must be positive and finite");
    }
    if (!std::isfinite(bias[c])) {
      throw InvalidArgument("domain " + std::to_string(id.value) +
                            ": bias must be finite");
    }
  }
  if (!std::isfinite(texture_frequency) || !std::isfinite(texture_amplitude) ||
      !std::isfinite(texture_angle) || !std::isfinite(noise_sigma) ||
      noise_sigma < 0.0 || texture_frequency < 0.0) {
    throw InvalidArgument("domain " + std::to_string(id.value) +
                          ": texture/noise parameters invalid");
  }
}

std::vector<DomainSpec> default_domain_specs(std::size_t num_domains,
                                             std::uint64_t seed) {
  std::vector<DomainSpec> specs = {
      {ClientId{0}, {0.60, 0.55, 0.50}, {0.20, 0.22, 0.25}, 0.0, 0.0, 0.0, 0.05},
      {ClientId{1}, {0.65, 0.35, 0.15}, {0.15, 0.35, 0.55}, 3.0, 0.10, 0.6, 0.03},
      {ClientId{2}, {0.20, 0.70, 0.55}, {0.60, 0.10, 0.25}, 0.0, 0.0, 0.0, 0.02},
      {ClientId{3}, {0.25, 0.25, 0.25}, {0.70, 0.70, 0.70}, 7.0, 0.06, 2.2, 0.04},
  };
  if (num_domains <= specs.size()) {
    specs.resize(num_domains);
    return specs;
  }
  for (std::size_t d = specs.size(); d < num_domains; ++d) {
    Rng rng(seed, {d, 0, "domain-spec", 0});
    DomainSpec s;
    s.id = ClientId{static_cast<std::uint16_t>(d)};
    for (int c = 0; c < 3; ++c) {
      s.gain[c] = rng.uniform(0.15, 0.75);
      s.bias[c] = rng.uniform(0.0, 1.0 - s.gain[c]);
    }
    s.texture_frequency = rng.uniform() < 0.5 ? 0.0 : rng.uniform(2.0, 8.0);
    s.texture_amplitude = s.texture_frequency > 0 ? rng.uniform(0.03, 0.1) : 0;
    s.texture_angle = rng.uniform(0.0, kPi);
    s.noise_sigma = rng.uniform(0.01, 0.06);
    specs.push_back(s);
  }
  return specs;
}

std::string format_domain_specs(const std::vector<DomainSpec>& specs) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& s : specs) {
    out << "domain = " << s.id.value << '\n';
    out << "gain = " << s.gain[0] << ' ' << s.gain[1] << ' ' << s.gain[2]
        << '\n';
    out << "bias = " << s.bias[0] << ' ' << s.bias[1] << ' ' << s.bias[2]
        << '\n';
    out << "texture_frequency = " << s.texture_frequency << '\n';
    out << "texture_amplitude = " << s.texture_amplitude << '\n';
    out << "texture_angle = " << s.texture_angle << '\n';
    out << "noise_sigma = " << s.noise_sigma << '\n';
  }
  return out.str();
}

std::vector<DomainSpec> parse_domain_specs(std::string_view text) {
  std::vector<DomainSpec> specs;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("domain spec line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::vector<double> vals =
        parse_numbers(trim(line.substr(eq + 1)), line_no);
    const std::size_t want = (key == "gain" || key == "bias") ? 3 : 1;
    if (vals.size() != want) {
      throw FormatError("domain spec line " + std::to_string(line_no) + ": '" +
                        key + "' takes " + std::to_string(want) + " value(s)");
    }
    if (key == "domain") {
      if (vals[0] < 0 || vals[0] > 65535 || vals[0] != std::floor(vals[0])) {
        throw FormatError("domain spec line " + std::to_string(line_no) +
                          ": bad domain id");
      }
      specs.emplace_back();
      specs.back().id = ClientId{static_cast<std::uint16_t>(vals[0])};
      continue;
    }
    if (specs.empty()) {
      throw FormatError("domain spec line " + std::to_string(line_no) +
                        ": '" + key + "' before any 'domain =' line");
    }
    DomainSpec& s = specs.back();
    if (key == "gain") {
      std::copy(vals.begin(), vals.end(), s.gain.begin());
    } else if (key == "bias") {
      std::copy(vals.begin(), vals.end(), s.bias.begin());
    } else if (key == "texture_frequency") {
      s.texture_frequency = vals[0];
    } else if (key == "texture_amplitude") {
      s.texture_amplitude = vals[0];
    } else if (key == "texture_angle") {
      s.texture_angle = vals[0];
    } else if (key == "noise_sigma") {
      s.noise_sigma = vals[0];
    } else {
      throw FormatError("domain spec line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
  for (const auto& s : specs) {
    try {
      s.validate();
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("domain spec: ") + e.what());
    }
  }
  return specs;
}

ImageTensor render_class_mask(int label, std::size_t size, double cx, double cy,
                              double scale) {
  std::vector<double> mask(size * size, 0.0);
  const double stroke = std::max(1.0, scale * 0.18);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double dx = static_cast<double>(x) + 0.5 - cx;
      const double dy = static_cast<double>(y) + 0.5 - cy;
      const bool in_box = std::abs(dx) <= scale && std::abs(dy) <= scale;
      const double r = std::hypot(dx, dy);
      double v = 0.0;
      switch (label) {
        case 0:  // horizontal bars
          if (in_box) v = std::sin(dy * kPi / stroke * 0.5) > 0 ? 1.0 : 0.0;
          break;
        case 1:  // vertical bars
          if (in_box) v = std::sin(dx * kPi / stroke * 0.5) > 0 ? 1.0 : 0.0;
          break;
        case 2:  // disc
          v = std::clamp(scale + 0.5 - r, 0.0, 1.0);
          break;
        case 3:  // X
          if (in_box) {
            v = std::max(band((dx - dy) / std::sqrt(2.0), stroke * 0.6),
                         band((dx + dy) / std::sqrt(2.0), stroke * 0.6));
          }
          break;
        case 4:  // ring
          v = band(r - scale * 0.75, stroke * 0.6);
          break;
        case 5:  // square outline
          if (in_box) {
            v = band(std::max(std::abs(dx), std::abs(dy)) - scale * 0.8,
                     stroke * 0.6);
          }
          break;
        case 6:  // plus
          if (in_box) v = std::max(band(dx, stroke * 0.6), band(dy, stroke * 0.6));
          break;
        case 7:  // upward triangle
          if (in_box && dy <= scale * 0.8 && dy >= -scale) {
            const double half = (dy + scale) * 0.5;
            v = std::abs(dx) <= half ? 1.0 : 0.0;
          }
          break;
        default:
          throw InvalidArgument("render_class_mask: label out of range");
      }
      mask[y * size + x] = v;
    }
  }
  return ImageTensor(1, size, size, std::move(mask));
}

DomainImages generate_domains(const GenerateOptions& options,
                              const std::vector<DomainSpec>& specs) {
  if (options.num_domains == 0 || options.num_classes == 0 ||
      options.per_domain == 0 || options.image_size == 0) {
    throw InvalidArgument("generate_domains: counts must be at least 1");
  }
  if (options.num_classes > kMaxClasses) {
    throw InvalidArgument("generate_domains: at most " +
                          std::to_string(kMaxClasses) + " classes");
  }
  if (options.per_domain % options.num_classes != 0) {
    throw InvalidArgument(
        "generate_domains: per-domain count must be divisible by the class "
        "count");
  }
  if (specs.size() < options.num_domains) {
    throw InvalidArgument("generate_domains: need a spec per domain");
  }
  const std::size_t n = options.image_size;
  const double size = static_cast<double>(n);
  DomainImages out;
  for (std::size_t d = 0; d < options.num_domains; ++d) {
    const DomainSpec& spec = specs[d];
    spec.validate();
    std::vector<LabeledImage>& images = out[spec.id];
    images.reserve(options.per_domain);
    const double fx = std::cos(spec.texture_angle);
    const double fy = std::sin(spec.texture_angle);
    for (std::size_t i = 0; i < options.per_domain; ++i) {
      Rng rng(options.seed, {spec.id.value, 0, "render", i});
      const int label = static_cast<int>(i % options.num_classes);
      const double scale = size * rng.uniform(0.22, 0.34);
      const double cx = size * 0.5 + rng.uniform(-0.15, 0.15) * size;
      const double cy = size * 0.5 + rng.uniform(-0.15, 0.15) * size;
      const ImageTensor mask = render_class_mask(label, n, cx, cy, scale);
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      std::vector<double> px(3 * n * n);
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
          const double t =
              spec.texture_amplitude *
              std::sin(2.0 * kPi * spec.texture_frequency *
                           (fx * static_cast<double>(x) +
                            fy * static_cast<double>(y)) /
                           size +
                       phase);
          const double m = mask.at(0, y, x);
          for (std::size_t c = 0; c < 3; ++c) {
            px[(c * n + y) * n + x] = spec.bias[c] + spec.gain[c] * m + t +
                                      spec.noise_sigma * rng.normal();
          }
        }
      }
      images.push_back({ImageTensor(3, n, n, std::move(px)), label, spec.id,
                        (std::uint64_t{spec.id.value} << 32) | i});
    }
  }
  return out;
}

SourceClient split_client(ClientId id, const std::vector<LabeledImage>& images,
                          std::size_t num_classes, double train_fraction,
                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("split: train fraction must be in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const int label = images[i].label;
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw InvalidArgument("split: label out of range");
    }
    by_class[label].push_back(i);
  }
  // Largest-remainder apportionment: the train total is the rounded
  // fraction of the client, and each class is within one of proportional.
  const auto total_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(images.size())));
  std::vector<std::size_t> quota(num_classes);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double exact = train_fraction * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total_train && r < remainders.size(); ++r) {
    ++quota[remainders[r].second];
    ++assigned;
  }
  SourceClient client{id, {}, {}};
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  for (std::size_t c = 0; c < num_classes; ++c) {
    Rng rng(seed, {id.value, 0, "split", c});
    std::vector<std::size_t> members = by_class[c];
    rng.shuffle(members);
    train_idx.insert(train_idx.end(), members.begin(),
                     members.begin() + static_cast<long>(quota[c]));
    val_idx.insert(val_idx.end(), members.begin() + static_cast<long>(quota[c]),
                   members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  for (std::size_t i : train_idx) client.train.push_back(images[i]);
  for (std::size_t i : val_idx) client.validation.push_back(images[i]);
  return client;
}

FederatedDataset split_leave_one_out(const DomainImages& domains,
                                     ClientId target, std::size_t num_classes,
                                     double train_fraction,
                                     std::uint64_t seed) {
  if (!domains.count(target)) {
    throw InvalidArgument("split: unknown target domain " +
                          std::to_string(target.value));
  }
  FederatedDataset fed;
  fed.target = target;
  fed.num_classes = num_classes;
  fed.test = domains.at(target);
  for (const auto& [id, images] : domains) {
    if (id == target) continue;
    fed.sources.push_back(
        split_client(id, images, num_classes, train_fraction, seed));
  }
  if (fed.sources.empty()) {
    throw InvalidArgument("split: no source domains besides the target");
  }
  return fed;
}

std::vector<SourceClient> split_sources(const DomainImages& domains,
                                        ClientId target,
                                        std::size_t num_classes,
                                        double train_fraction,
                                        std::uint64_t seed) {
  std::vector<SourceClient> out;
  for (const auto& [id, images] : domains) {
    if (id == target) continue;
    out.push_back(split_client(id, images, num_classes, train_fraction, seed));
  }
  if (out.empty()) throw InvalidArgument("split: no source domains");
  return out;
}

void save_domains(const std::filesystem::path& dir,
                  const DomainImages& domains) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> manifest;
  for (const auto& [id, images] : domains) {
    for (std::size_t i = 0; i < images.size(); ++i) {
      char name[40];
      std::snprintf(name, sizeof(name), "d%u_%06zu.cct",
                    static_cast<unsigned>(id.value), i);
      save_tensor(dir / name, images[i].image);
      manifest.push_back({name, images[i].label, id.value,
                          {std::to_string(images[i].id)}});
    }
  }
  write_text_file(dir / "manifest.tsv", format_manifest(manifest));
}

DomainImages load_domains(const std::filesystem::path& dir,
                          const std::function<bool(ClientId)>& wanted) {
  DomainImages out;
  for (const auto& e : read_manifest(dir / "manifest.tsv")) {
    const ClientId domain{e.domain};
    if (wanted && !wanted(domain)) continue;
    if (e.extra.empty()) {
      throw FormatError("manifest entry " + e.path + " has no image id");
    }
    std::uint64_t id = 0;
    try {
      std::size_t used = 0;
      id = std::stoull(e.extra[0], &used);
      if (used != e.extra[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError("manifest entry " + e.path + " has a bad image id");
    }
    out[domain].push_back({load_tensor(dir / e.path), e.label, domain, id});
  }
  if (out.empty()) throw DataError("no images loaded from " + dir.string());
  return out;
}

}  // namespace ccst
