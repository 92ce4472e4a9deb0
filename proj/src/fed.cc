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
#include "ccst/fed.h"

#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ccst/errors.h"
#include "ccst/parallel.h"

namespace ccst {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<ImageTensor> tensors_of(std::span<const LabeledImage> images) {
  std::vector<ImageTensor> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(img.image);
  return out;
}

}  // namespace

void FederationConfig::validate() const {
  if (rounds == 0) throw InvalidArgument("rounds must be at least 1");
  if (train.local_epochs == 0) {
    throw InvalidArgument("local epochs must be at least 1");
  }
  if (train.batch_size == 0) throw InvalidArgument("batch size must be >= 1");
  if (!(train.learning_rate >= 0.0)) {
    throw InvalidArgument("learning rate must be non-negative");
  }
  if (ccst_enabled && augment.k == 0) {
    throw InvalidArgument("augmentation level K must be at least 1");
  }
}

ModelParams fedavg_aggregate(std::span<const ModelParams> params,
                             std::span<const double> weights) {
  if (params.empty()) throw InvalidArgument("fedavg: no models");
  if (params.size() != weights.size()) {
    throw InvalidArgument("fedavg: one weight per model required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].arch != params.front().arch ||
        params[i].values.size() != params.front().values.size()) {
      throw InvalidArgument("fedavg: architecture mismatch");
    }
    if (!(weights[i] >= 0.0)) {
      throw InvalidArgument("fedavg: weights must be non-negative");
    }
    total += weights[i];
  }
  if (total <= 0.0) throw InvalidArgument("fedavg: weights sum to zero");
  // Accumulate offsets from the first model so identical inputs come back
  // bit-exact, then divide once.
  const auto& anchor = params.front().values;
  std::vector<double> acc(anchor.size(), 0.0);
  for (std::size_t i = 1; i < params.size(); ++i) {
    const double w = weights[i];
    const auto& v = params[i].values;
    for (std::size_t k = 0; k < v.size(); ++k) acc[k] += w * (v[k] - anchor[k]);
  }
  ModelParams out = params.front();
  for (std::size_t k = 0; k < acc.size(); ++k) {
    out.values[k] = anchor[k] + acc[k] / total;
  }
  return out;
}

RoundResult run_round(const ModelParams& global,
                      std::span<const ClientState> clients,
                      const TrainConfig& train, std::size_t round,
                      std::size_t threads) {
  if (clients.empty()) throw InvalidArgument("run_round: no clients");
  std::vector<ModelParams> local(clients.size());
  std::vector<double> losses(clients.size(), 0.0);
  parallel_for(clients.size(), threads, [&](std::size_t i) {
    std::vector<double> trace;
    local[i] = sgd_epochs(global, clients[i].train, train, clients[i].id.value,
                          round, &trace);
    double sum = 0.0;
    for (double l : trace) sum += l;
    losses[i] = trace.empty() ? 0.0 : sum / static_cast<double>(trace.size());
  });
  std::vector<double> weights;
  for (const auto& c : clients) {
    weights.push_back(static_cast<double>(c.train.size()));
  }
  RoundResult result{fedavg_aggregate(local, weights), {}};
  result.record.round = round;
  result.record.client_loss = std::move(losses);
  result.record.client_validation.resize(clients.size());
  parallel_for(clients.size(), threads, [&](std::size_t i) {
    result.record.client_validation[i] =
        clients[i].validation.size() == 0
            ? 0.0
            : evaluate(result.global, clients[i].validation);
  });
  double sum = 0.0;
  for (double v : result.record.client_validation) sum += v;
  result.record.validation_accuracy =
      sum / static_cast<double>(clients.size());
  return result;
}

AugmentConfig resolved_augment_config(const FederationConfig& config) {
  AugmentConfig aug = config.augment;
  aug.seed = derive_seed(config.seed, "augment");
  return aug;
}

namespace {

PublishOptions publish_options(const FederationConfig& config) {
  return {config.augment.mode, config.styles_per_client, config.overall_sample};
}

}  // namespace

GlobalStyleBank build_style_bank(std::span<const SourceClient> sources,
                                 const FederationConfig& config) {
  if (sources.empty()) throw InvalidArgument("style bank: no source clients");
  const auto space = make_feature_space(config.feature_space);
  const PublishOptions publish = publish_options(config);
  const std::uint64_t seed = derive_seed(config.seed, "publish");
  std::vector<LocalStyleBank> locals(sources.size());
  parallel_for(sources.size(), config.threads, [&](std::size_t i) {
    Rng rng(seed, {sources[i].id.value, 0, "publish", 0});
    locals[i] = publish_styles(sources[i].id, tensors_of(sources[i].train),
                               publish, *space, rng);
  });
  return assemble_bank(locals);
}

AmplitudeBank build_amplitude_bank(std::span<const SourceClient> sources,
                                   const FederationConfig& config) {
  if (sources.empty()) throw InvalidArgument("amplitude bank: no source clients");
  const PublishOptions publish = publish_options(config);
  const std::uint64_t seed = derive_seed(config.seed, "publish");
  std::vector<std::vector<AmplitudeSpectrum>> spectra(sources.size());
  parallel_for(sources.size(), config.threads, [&](std::size_t i) {
    Rng rng(seed, {sources[i].id.value, 0, "publish", 0});
    spectra[i] = publish_amplitudes(tensors_of(sources[i].train), publish, rng);
  });
  AmplitudeBank bank;
  bank.mode = config.augment.mode;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (bank.entries.count(sources[i].id)) {
      throw InvalidArgument("amplitude bank: duplicate client id");
    }
    bank.entries[sources[i].id] = std::move(spectra[i]);
  }
  return bank;
}

PreparedSources prepare_sources(std::span<const SourceClient> sources,
                                const FederationConfig& config) {
  PreparedSources out;
  out.augmented.resize(sources.size());
  if (!config.ccst_enabled) {
    for (std::size_t i = 0; i < sources.size(); ++i) {
      out.augmented[i] = passthrough(sources[i].train);
    }
    return out;
  }
  if (config.augment.k > sources.size()) {
    throw InvalidArgument("augmentation level K=" +
                          std::to_string(config.augment.k) + " exceeds the " +
                          std::to_string(sources.size()) + " source clients");
  }
  const AugmentConfig aug = resolved_augment_config(config);

  if (config.augment.backend == TransferBackend::kFft) {
    const AmplitudeBank bank = build_amplitude_bank(sources, config);
    parallel_for(sources.size(), config.threads, [&](std::size_t i) {
      out.augmented[i] =
          augment_client(sources[i].train, bank, aug, sources[i].id);
    });
    return out;
  }

  // Stage 1: local style computation; stage 2: the server assembles the
  // bank and broadcasts its encoding.
  const Bytes wire = encode_bank(build_style_bank(sources, config));
  out.bank_bytes = wire.size();
  out.bank = decode_bank(wire);
  // Stage 3: local style transfer against the broadcast bank.
  const auto space = make_feature_space(config.feature_space);
  parallel_for(sources.size(), config.threads, [&](std::size_t i) {
    out.augmented[i] =
        augment_client(sources[i].train, *out.bank, aug, sources[i].id, *space);
  });
  return out;
}

TrainingResult train_federation(std::span<const SourceClient> sources,
                                std::span<const AugmentedDataset> augmented,
                                std::size_t num_classes,
                                const FederationConfig& config) {
  config.validate();
  if (sources.empty()) throw InvalidArgument("train: no source clients");
  if (augmented.size() != sources.size()) {
    throw InvalidArgument("train: one augmented dataset per client required");
  }
  const ImageTensor& probe = sources.front().train.front().image;
  Architecture arch;
  arch.channels = probe.channels();
  arch.height = probe.height();
  arch.width = probe.width();
  arch.hidden = config.hidden;
  arch.num_classes = num_classes;

  ModelParams global = init_params(arch, derive_seed(config.seed, "init"));

  // Each client shares only its per-channel input statistics; the server
  // pools them into one normalization used everywhere.
  std::vector<WeightedNorm> norms;
  std::vector<std::vector<LabeledImage>> samples(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    samples[i] = augmented[i].samples();
    if (samples[i].empty()) throw InvalidArgument("train: empty client");
    norms.push_back({compute_input_norm(samples[i]),
                     static_cast<double>(samples[i].size())});
  }
  global.norm = pool_input_norms(norms);

  std::vector<ClientState> clients(sources.size());
  parallel_for(sources.size(), config.threads, [&](std::size_t i) {
    clients[i].id = sources[i].id;
    clients[i].train = prepare_inputs(global, samples[i]);
    clients[i].validation = prepare_inputs(global, sources[i].validation);
  });
  samples.clear();

  TrainConfig train = config.train;
  train.seed = derive_seed(config.seed, "sgd");
  TrainingResult result;
  for (std::size_t r = 0; r < config.rounds; ++r) {
    RoundResult step = run_round(global, clients, train, r, config.threads);
    global = std::move(step.global);
    if (step.record.validation_accuracy > result.best_validation) {
      result.best_validation = step.record.validation_accuracy;
      result.best_round = r;
      result.best = global;
    }
    result.rounds.push_back(std::move(step.record));
  }
  result.final_params = std::move(global);
  return result;
}

void assert_target_isolated(const FederatedDataset& dataset) {
  std::set<std::uint64_t> test_ids;
  for (const auto& img : dataset.test) test_ids.insert(img.id);
  for (const auto& s : dataset.sources) {
    if (s.id == dataset.target) {
      throw std::logic_error("target domain registered as a source client");
    }
    for (const auto* split : {&s.train, &s.validation}) {
      for (const auto& img : *split) {
        if (img.domain == dataset.target || test_ids.count(img.id)) {
          throw std::logic_error("target image " + std::to_string(img.id) +
                                 " reached source client " +
                                 std::to_string(s.id.value));
        }
      }
    }
  }
}

ExperimentReport run_ccst_experiment(const FederatedDataset& dataset,
                                     const FederationConfig& config) {
  config.validate();
  assert_target_isolated(dataset);
  const PreparedSources prepared = prepare_sources(dataset.sources, config);
  ExperimentReport report;
  report.target = dataset.target;
  report.bank_bytes = prepared.bank_bytes;
  for (const auto& a : prepared.augmented) {
    report.augmented_sizes.push_back(a.size());
  }
  report.training =
      train_federation(dataset.sources, prepared.augmented,
                       dataset.num_classes, config);
  report.best_round = report.training.best_round;
  report.best_validation = report.training.best_validation;
  // The target is touched exactly once: scoring the selected checkpoint.
  report.test_accuracy = evaluate(report.training.best, dataset.test);
  return report;
}

std::uint64_t target_seed(std::uint64_t root, ClientId target) {
  return derive_seed(root, "target", target.value);
}

LeaveOneOutTable leave_one_out_suite(const DomainImages& domains,
                                     std::size_t num_classes,
                                     const FederationConfig& config,
                                     const std::string& method,
                                     double train_fraction) {
  if (domains.size() < 2) {
    throw InvalidArgument("leave-one-out needs at least two domains");
  }
  LeaveOneOutTable table;
  table.method = method;
  double sum = 0.0;
  for (const auto& [target, _] : domains) {
    FederationConfig cfg = config;
    cfg.seed = target_seed(config.seed, target);
    const FederatedDataset fed = split_leave_one_out(
        domains, target, num_classes, train_fraction,
        derive_seed(cfg.seed, "split"));
    const ExperimentReport report = run_ccst_experiment(fed, cfg);
    table.rows.push_back({target, report.test_accuracy, cfg.seed});
    sum += report.test_accuracy;
  }
  table.average = sum / static_cast<double>(table.rows.size());
  return table;
}

std::string format_round_log(std::span<const RoundRecord> rounds) {
  std::ostringstream out;
  out << "round,validation_accuracy";
  const std::size_t n = rounds.empty() ? 0 : rounds.front().client_loss.size();
  for (std::size_t i = 0; i < n; ++i) out << ",loss_client" << i;
  for (std::size_t i = 0; i < n; ++i) out << ",val_client" << i;
  out << '\n';
  for (const auto& r : rounds) {
    out << r.round << ',' << fmt_double(r.validation_accuracy);
    for (double l : r.client_loss) out << ',' << fmt_double(l);
    for (double v : r.client_validation) out << ',' << fmt_double(v);
    out << '\n';
  }
  return out.str();
}

std::string format_leave_one_out(std::span<const LeaveOneOutTable> tables) {
  std::ostringstream out;
  out << "method";
  if (!tables.empty()) {
    for (const auto& row : tables.front().rows) out << ",target" << row.target.value;
  }
  out << ",avg\n";
  for (const auto& t : tables) {
    out << t.method;
    for (const auto& row : t.rows) out << ',' << fmt_double(row.accuracy);
    out << ',' << fmt_double(t.average) << '\n';
  }
  return out.str();
}

}  // namespace ccst
