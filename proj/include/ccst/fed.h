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
#ifndef CCST_FED_H_
#define CCST_FED_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccst/augment.h"
#include "ccst/bank.h"
#include "ccst/data.h"
#include "ccst/model.h"

namespace ccst {

struct FederationConfig {
  std::size_t rounds = 60;
  TrainConfig train;  // learning rate, batch size, local epochs
  bool ccst_enabled = true;
  AugmentConfig augment;  // k, mode, backend, fft window; seed is derived
  std::size_t styles_per_client = kDefaultStylesPerClient;
  std::optional<std::size_t> overall_sample;
  std::vector<std::size_t> hidden{256};
  std::string feature_space = "identity";
  std::size_t threads = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Weighted element-wise mean sum(w_i * theta_i) / sum(w_i), accumulated in
/// input order. The input normalization of the first model is carried over.
ModelParams fedavg_aggregate(std::span<const ModelParams> params,
                             std::span<const double> weights);

/// One source client during training.
struct ClientState {
  ClientId id;
  TrainingSet train;       // augmented, standardized
  TrainingSet validation;  // never augmented
};

struct RoundRecord {
  std::size_t round = 0;
  std::vector<double> client_loss;  // mean step loss per client
  std::vector<double> client_validation;
  double validation_accuracy = 0.0;  // unweighted mean over clients
};

struct RoundResult {
  ModelParams global;
  RoundRecord record;
};

/// Every client trains a copy of `global` for the configured local epochs;
/// the server averages with weights equal to the clients' training-set
/// sizes. Clients run on up to `threads` workers; the result does not depend
/// on the worker count.
RoundResult run_round(const ModelParams& global,
                      std::span<const ClientState> clients,
                      const TrainConfig& train, std::size_t round,
                      std::size_t threads);

/// Output of the three CCST stages before training.
struct PreparedSources {
  std::vector<AugmentedDataset> augmented;  // one per source client
  std::optional<GlobalStyleBank> bank;      // AdaIN backend only
  std::size_t bank_bytes = 0;               // encoded broadcast size
};

/// Style publication, bank assembly/broadcast and local style transfer.
/// With CCST disabled every client keeps its training set as is.
/// The augmentation settings clients actually use: `config.augment` with the
/// seed derived from the root seed.
AugmentConfig resolved_augment_config(const FederationConfig& config);

/// Publishes every source client's styles and assembles the bank.
GlobalStyleBank build_style_bank(std::span<const SourceClient> sources,
                                 const FederationConfig& config);
AmplitudeBank build_amplitude_bank(std::span<const SourceClient> sources,
                                   const FederationConfig& config);

PreparedSources prepare_sources(std::span<const SourceClient> sources,
                                const FederationConfig& config);

struct TrainingResult {
  std::vector<RoundRecord> rounds;
  ModelParams best;  // highest mean validation accuracy, earliest on ties
  std::size_t best_round = 0;
  double best_validation = -1.0;
  ModelParams final_params;
};

/// FedAvg over the source clients only; the target never enters here.
TrainingResult train_federation(std::span<const SourceClient> sources,
                                std::span<const AugmentedDataset> augmented,
                                std::size_t num_classes,
                                const FederationConfig& config);

struct ExperimentReport {
  ClientId target;
  double test_accuracy = 0.0;  // of the best-validation checkpoint
  std::size_t best_round = 0;
  double best_validation = 0.0;
  std::size_t bank_bytes = 0;
  std::vector<std::size_t> augmented_sizes;
  TrainingResult training;
};

/// Throws std::logic_error if any target image reaches a source client.
void assert_target_isolated(const FederatedDataset& dataset);

ExperimentReport run_ccst_experiment(const FederatedDataset& dataset,
                                     const FederationConfig& config);

struct LeaveOneOutRow {
  ClientId target;
  double accuracy = 0.0;
  std::uint64_t seed = 0;
};

struct LeaveOneOutTable {
  std::string method;
  std::vector<LeaveOneOutRow> rows;
  double average = 0.0;
};

/// Seed used for the experiment holding out `target`.
std::uint64_t target_seed(std::uint64_t root, ClientId target);

/// One experiment per held-out domain, seeds derived from config.seed.
LeaveOneOutTable leave_one_out_suite(const DomainImages& domains,
                                     std::size_t num_classes,
                                     const FederationConfig& config,
                                     const std::string& method,
                                     double train_fraction =
                                         kDefaultTrainFraction);

std::string format_round_log(std::span<const RoundRecord> rounds);
/// Rows are methods, columns are held-out targets plus the average.
std::string format_leave_one_out(std::span<const LeaveOneOutTable> tables);

}  // namespace ccst

#endif  // CCST_FED_H_
