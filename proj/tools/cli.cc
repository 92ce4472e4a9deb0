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
#include "cli.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccst/analysis.h"
#include "ccst/augment.h"
#include "ccst/bank.h"
#include "ccst/data.h"
#include "ccst/errors.h"
#include "ccst/fed.h"
#include "ccst/io.h"
#include "ccst/model.h"
#include "ccst/parallel.h"
#include "ccst/privacy.h"

namespace ccst::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kRunManifest = "run_manifest.json";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every flag of every subcommand. Unused fields keep their defaults and are
// still recorded, so a manifest always carries the full configuration.
struct Options {
  std::string subcommand;

  std::string data;
  std::string domain_spec;
  std::size_t domains = 4;
  std::size_t classes = 4;
  std::size_t per_domain = 400;
  std::size_t size = 32;
  std::uint64_t data_seed = 0;

  int target = 0;
  double train_fraction = kDefaultTrainFraction;

  std::string mode = "overall";
  std::size_t k = 3;
  std::size_t j = kDefaultStylesPerClient;
  std::string backend = "adain";
  double fft_window = 1.0;
  std::size_t overall_style_sample = 0;  // 0 = every image
  std::string feature_space = "identity";

  std::size_t rounds = 60;
  std::size_t local_epochs = 1;
  double lr = 1e-3;
  std::size_t batch = 32;
  std::vector<std::size_t> hidden{256};
  bool no_ccst = false;

  int client = -1;
  std::string bank;
  std::string checkpoint;
  std::size_t images = 4;
  std::size_t iterations = 2000;
  double step = 0.1;
  std::size_t repeats = 1;
  bool no_loo = false;
  std::string sweep;

  std::uint64_t seed = 0;

  // Not part of the manifest.
  std::string out;
  std::string manifest;
};

Json to_json(const Options& o) {
  return Json{{"data", o.data},
              {"domain_spec", o.domain_spec},
              {"domains", o.domains},
              {"classes", o.classes},
              {"per_domain", o.per_domain},
              {"size", o.size},
              {"data_seed", o.data_seed},
              {"target", o.target},
              {"train_fraction", o.train_fraction},
              {"mode", o.mode},
              {"k", o.k},
              {"j", o.j},
              {"backend", o.backend},
              {"fft_window", o.fft_window},
              {"overall_style_sample", o.overall_style_sample},
              {"feature_space", o.feature_space},
              {"rounds", o.rounds},
              {"local_epochs", o.local_epochs},
              {"lr", o.lr},
              {"batch", o.batch},
              {"hidden", o.hidden},
              {"no_ccst", o.no_ccst},
              {"client", o.client},
              {"bank", o.bank},
              {"checkpoint", o.checkpoint},
              {"images", o.images},
              {"iterations", o.iterations},
              {"step", o.step},
              {"repeats", o.repeats},
              {"no_loo", o.no_loo},
              {"sweep", o.sweep},
              {"seed", o.seed}};
}

void from_json(const Json& j, Options& o) {
  j.at("data").get_to(o.data);
  j.at("domain_spec").get_to(o.domain_spec);
  j.at("domains").get_to(o.domains);
  j.at("classes").get_to(o.classes);
  j.at("per_domain").get_to(o.per_domain);
  j.at("size").get_to(o.size);
  j.at("data_seed").get_to(o.data_seed);
  j.at("target").get_to(o.target);
  j.at("train_fraction").get_to(o.train_fraction);
  j.at("mode").get_to(o.mode);
  j.at("k").get_to(o.k);
  j.at("j").get_to(o.j);
  j.at("backend").get_to(o.backend);
  j.at("fft_window").get_to(o.fft_window);
  j.at("overall_style_sample").get_to(o.overall_style_sample);
  j.at("feature_space").get_to(o.feature_space);
  j.at("rounds").get_to(o.rounds);
  j.at("local_epochs").get_to(o.local_epochs);
  j.at("lr").get_to(o.lr);
  j.at("batch").get_to(o.batch);
  j.at("hidden").get_to(o.hidden);
  j.at("no_ccst").get_to(o.no_ccst);
  j.at("client").get_to(o.client);
  j.at("bank").get_to(o.bank);
  j.at("checkpoint").get_to(o.checkpoint);
  j.at("images").get_to(o.images);
  j.at("iterations").get_to(o.iterations);
  j.at("step").get_to(o.step);
  j.at("repeats").get_to(o.repeats);
  j.at("no_loo").get_to(o.no_loo);
  j.at("sweep").get_to(o.sweep);
  j.at("seed").get_to(o.seed);
}

// Collects artifact names so the manifest can list them. The directory is
// created on first use so a run that fails early leaves nothing behind.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() {
    fs::create_directories(root_);
    return root_;
  }

  void text(const std::string& name, const std::string& content) {
    write_text_file(root() / name, content);
    files_.insert(name);
  }
  void bytes(const std::string& name, std::span<const std::uint8_t> content) {
    write_file(root() / name, content);
    files_.insert(name);
  }
  void json(const std::string& name, const Json& value) {
    text(name, value.dump(2) + "\n");
  }
  void note(const std::string& name) { files_.insert(name); }
  void note_tensors(std::size_t count) { tensors_ += count; }

  void finish(const Options& o) {
    Json manifest{{"tool", "ccst"},
                  {"version", kToolVersion},
                  {"subcommand", o.subcommand},
                  {"seed", o.seed},
                  {"config", to_json(o)},
                  {"artifacts",
                   Json{{"files", std::vector<std::string>(files_.begin(),
                                                           files_.end())},
                        {"tensor_files", tensors_}}}};
    write_text_file(root() / kRunManifest, manifest.dump(2) + "\n");
  }

 private:
  fs::path root_;
  std::set<std::string> files_;
  std::size_t tensors_ = 0;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ClientId to_client(int v, const char* flag) {
  if (v < 0 || v > 0xffff) {
    throw UsageError(std::string(flag) + " must be a domain id in [0, 65535]");
  }
  return ClientId{static_cast<std::uint16_t>(v)};
}

// ---- data access ----------------------------------------------------------

std::vector<DomainSpec> resolve_specs(const Options& o) {
  std::vector<DomainSpec> specs;
  if (o.domain_spec.empty()) {
    specs = default_domain_specs(o.domains, o.data_seed);
  } else {
    const Bytes raw = read_file(o.domain_spec);
    specs = parse_domain_specs(std::string(raw.begin(), raw.end()));
    if (specs.size() < o.domains) {
      throw DataError("domain spec file defines " + std::to_string(specs.size()) +
                      " domains, --domains asks for " +
                      std::to_string(o.domains));
    }
    specs.resize(o.domains);
  }
  return specs;
}

std::vector<ClientId> available_domains(const Options& o) {
  std::set<ClientId> ids;
  if (!o.data.empty()) {
    for (const auto& e : read_manifest(fs::path(o.data) / "manifest.tsv")) {
      ids.insert(ClientId{e.domain});
    }
  } else {
    for (const auto& s : resolve_specs(o)) ids.insert(s.id);
  }
  return {ids.begin(), ids.end()};
}

// Loads (or synthesizes) only the domains `wanted` accepts.
DomainImages acquire_domains(const Options& o,
                             const std::function<bool(ClientId)>& wanted) {
  if (!o.data.empty()) return load_domains(o.data, wanted);
  std::vector<DomainSpec> chosen;
  for (const auto& s : resolve_specs(o)) {
    if (!wanted || wanted(s.id)) chosen.push_back(s);
  }
  if (chosen.empty()) throw DataError("no domains selected");
  GenerateOptions g;
  g.num_domains = chosen.size();
  g.num_classes = o.classes;
  g.per_domain = o.per_domain;
  g.image_size = o.size;
  g.seed = o.data_seed;
  return generate_domains(g, chosen);
}

std::uint64_t experiment_seed(const Options& o) {
  return target_seed(o.seed, ClientId{static_cast<std::uint16_t>(o.target)});
}

// Source clients for the configured target. Target tensors are never loaded.
std::vector<SourceClient> load_sources(const Options& o) {
  const ClientId target = to_client(o.target, "--target");
  const DomainImages sources =
      acquire_domains(o, [&](ClientId d) { return d != target; });
  return split_sources(sources, target, o.classes, o.train_fraction,
                       derive_seed(experiment_seed(o), "split"));
}

std::vector<LabeledImage> load_target(const Options& o) {
  const ClientId target = to_client(o.target, "--target");
  DomainImages d = acquire_domains(o, [&](ClientId id) { return id == target; });
  return std::move(d.at(target));
}

FederationConfig federation_config(const Options& o) {
  FederationConfig cfg;
  cfg.rounds = o.rounds;
  cfg.train.learning_rate = o.lr;
  cfg.train.batch_size = o.batch;
  cfg.train.local_epochs = o.local_epochs;
  cfg.ccst_enabled = !o.no_ccst;
  cfg.augment.k = o.k;
  cfg.augment.mode = parse_style_kind(o.mode);
  cfg.augment.backend = parse_backend(o.backend);
  cfg.augment.fft_window = o.fft_window;
  cfg.styles_per_client = o.j;
  if (o.overall_style_sample > 0) cfg.overall_sample = o.overall_style_sample;
  cfg.hidden = o.hidden;
  cfg.feature_space = o.feature_space;
  cfg.threads = default_thread_count();
  cfg.seed = experiment_seed(o);
  return cfg;
}

// ---- validation -------------------------------------------------------------

void validate(const Options& o) {
  const std::string& cmd = o.subcommand;
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
  };
  require(o.domains >= 1, "--domains must be at least 1");
  require(o.classes >= 1 && o.classes <= kMaxClasses,
          "--classes must be in [1, " + std::to_string(kMaxClasses) + "]");
  require(o.per_domain >= 1 && o.per_domain % o.classes == 0,
          "--per-domain must be a positive multiple of --classes");
  require(o.size >= 2, "--size must be at least 2");
  require(o.train_fraction > 0.0 && o.train_fraction < 1.0,
          "--train-fraction must be in (0, 1)");
  require(o.mode == "single" || o.mode == "overall",
          "--mode must be 'single' or 'overall'");
  require(o.backend == "adain" || o.backend == "fft",
          "--backend must be 'adain' or 'fft'");
  require(o.feature_space == "identity" || o.feature_space == "opponent",
          "--feature-space must be 'identity' or 'opponent'");
  require(o.k >= 1, "--k must be at least 1");
  require(o.j >= 1, "--j must be at least 1");
  require(o.fft_window > 0.0 && o.fft_window <= 1.0,
          "--fft-window must be in (0, 1]");
  require(o.rounds >= 1, "--rounds must be at least 1");
  require(o.local_epochs >= 1, "--local-epochs must be at least 1");
  require(o.lr >= 0.0, "--lr must be non-negative");
  require(o.batch >= 1, "--batch must be at least 1");
  require(!o.hidden.empty() &&
              std::none_of(o.hidden.begin(), o.hidden.end(),
                           [](std::size_t h) { return h == 0; }),
          "--hidden needs at least one positive width");
  require(o.images >= 1, "--images must be at least 1");
  require(o.iterations >= 1, "--iterations must be at least 1");
  require(o.step > 0.0, "--step must be positive");
  require(o.repeats >= 1, "--repeats must be at least 1");
  if (cmd == "eval") require(!o.checkpoint.empty(), "eval needs --checkpoint");
  if (cmd == "augment") require(o.client >= 0, "augment needs --client");
  if (cmd == "augment" && !o.bank.empty()) {
    require(o.backend == "adain", "--bank holds styles; use --backend adain");
  }
  if (cmd == "gen-data" || cmd == "attack") return;

  // Checks that need the domain list (reading the manifest has no side
  // effects).
  const auto ids = available_domains(o);
  const ClientId target = to_client(o.target, "--target");
  require(std::find(ids.begin(), ids.end(), target) != ids.end(),
          "--target " + std::to_string(o.target) + " is not a domain");
  const std::size_t sources = ids.size() - 1;
  require(cmd == "eval" || sources >= 1, "need at least one source domain");
  const bool uses_k = cmd == "augment" || cmd == "report" ||
                      (cmd == "train" && !o.no_ccst);
  if (uses_k && o.bank.empty()) {
    require(o.k <= sources, "--k " + std::to_string(o.k) + " exceeds the " +
                                std::to_string(sources) + " source clients");
  }
  if (cmd == "augment") {
    const ClientId c = to_client(o.client, "--client");
    require(c != target, "--client must be a source domain, not the target");
    require(std::find(ids.begin(), ids.end(), c) != ids.end(),
            "--client " + std::to_string(o.client) + " is not a domain");
  }
}

// ---- subcommands ------------------------------------------------------------

void cmd_gen_data(const Options& o, OutputDir& out) {
  const auto specs = resolve_specs(o);
  const DomainImages domains = acquire_domains(o, nullptr);
  save_domains(out.root(), domains);
  out.note("manifest.tsv");
  std::size_t total = 0;
  for (const auto& [id, imgs] : domains) total += imgs.size();
  out.note_tensors(total);
  out.text("domains.txt", format_domain_specs(specs));
  std::cout << "generated " << domains.size() << " domains, " << total
            << " images of 3x" << o.size << "x" << o.size << "\n";
}

std::string styles_csv(const GlobalStyleBank& bank) {
  std::ostringstream csv;
  csv << "client,index,kind";
  for (std::size_t c = 0; c < bank.channels(); ++c) csv << ",mu" << c;
  for (std::size_t c = 0; c < bank.channels(); ++c) csv << ",sigma" << c;
  csv << '\n';
  char buf[40];
  for (const auto& [id, local] : bank.entries()) {
    for (std::size_t i = 0; i < local.styles.size(); ++i) {
      const auto& s = local.styles[i];
      csv << id.value << ',' << i << ',' << to_string(s.kind);
      for (double v : s.mu) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        csv << buf;
      }
      for (double v : s.sigma) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        csv << buf;
      }
      csv << '\n';
    }
  }
  return csv.str();
}

void cmd_styles(const Options& o, OutputDir& out) {
  const auto sources = load_sources(o);
  const GlobalStyleBank bank = build_style_bank(sources, federation_config(o));
  const Bytes wire = encode_bank(bank);
  out.bytes("bank.ccsb", wire);
  out.text("styles.csv", styles_csv(bank));
  std::cout << "published " << bank.style_count() << " " << o.mode
            << " styles from " << bank.entries().size()
            << " clients; bank is " << wire.size() << " bytes\n";
}

void cmd_augment(const Options& o, OutputDir& out) {
  const auto sources = load_sources(o);
  const ClientId self = to_client(o.client, "--client");
  const auto it = std::find_if(sources.begin(), sources.end(),
                               [&](const auto& s) { return s.id == self; });
  if (it == sources.end()) throw UsageError("--client is not a source domain");
  FederationConfig cfg = federation_config(o);
  const AugmentConfig aug = resolved_augment_config(cfg);
  AugmentedDataset result;
  if (cfg.augment.backend == TransferBackend::kFft) {
    result = augment_client(it->train, build_amplitude_bank(sources, cfg), aug,
                            self);
  } else {
    const GlobalStyleBank bank = o.bank.empty()
                                     ? build_style_bank(sources, cfg)
                                     : decode_bank(read_file(o.bank));
    if (bank.mode() != cfg.augment.mode) {
      throw UsageError(std::string("bank holds ") + to_string(bank.mode()) +
                       " styles but --mode is " + o.mode);
    }
    if (o.k > bank.entries().size()) {
      throw UsageError("--k " + std::to_string(o.k) + " exceeds the " +
                       std::to_string(bank.entries().size()) +
                       " clients in the bank");
    }
    const auto space = make_feature_space(o.feature_space);
    result = augment_client(it->train, bank, aug, self, *space);
  }
  write_augmented(out.root(), result);
  out.note("manifest.tsv");
  out.note_tensors(result.size());
  std::cout << "client " << self.value << ": " << it->train.size()
            << " training images -> " << result.size() << " entries ("
            << result.original_count() << " originals)\n";
}

Json training_summary(const Options& o, const PreparedSources& prepared,
                      const TrainingResult& result,
                      const std::vector<SourceClient>& sources) {
  Json sizes = Json::array();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    sizes.push_back(Json{{"client", sources[i].id.value},
                         {"train", sources[i].train.size()},
                         {"validation", sources[i].validation.size()},
                         {"augmented", prepared.augmented[i].size()}});
  }
  return Json{{"target", o.target},
              {"method", o.no_ccst ? "fedavg" : "ccst"},
              {"rounds", result.rounds.size()},
              {"best_round", result.best_round},
              {"best_validation", result.best_validation},
              {"bank_bytes", prepared.bank_bytes},
              {"clients", sizes}};
}

void cmd_train(const Options& o, OutputDir& out) {
  const auto sources = load_sources(o);
  const FederationConfig cfg = federation_config(o);
  const PreparedSources prepared = prepare_sources(sources, cfg);
  const TrainingResult result =
      train_federation(sources, prepared.augmented, o.classes, cfg);
  if (prepared.bank) out.bytes("bank.ccsb", encode_bank(*prepared.bank));
  out.bytes("best.cctp", encode_params(result.best));
  out.bytes("final.cctp", encode_params(result.final_params));
  out.text("rounds.csv", format_round_log(result.rounds));
  out.json("summary.json", training_summary(o, prepared, result, sources));
  std::cout << (o.no_ccst ? "fedavg" : "ccst") << " training, target "
            << o.target << ": best validation " << fmt(result.best_validation)
            << " at round " << result.best_round << " of " << o.rounds
            << "\n";
}

void cmd_eval(const Options& o, OutputDir& out) {
  const ModelParams params = decode_params(read_file(o.checkpoint));
  const auto test = load_target(o);
  const ImageTensor& probe = test.front().image;
  if (probe.channels() != params.arch.channels ||
      probe.height() != params.arch.height ||
      probe.width() != params.arch.width) {
    throw DataError("checkpoint expects " + std::to_string(params.arch.channels) +
                    "x" + std::to_string(params.arch.height) + "x" +
                    std::to_string(params.arch.width) + " images");
  }
  const double acc = evaluate(params, test);
  out.json("eval.json", Json{{"target", o.target},
                             {"images", test.size()},
                             {"accuracy", acc}});
  std::cout << "target " << o.target << ": accuracy " << fmt(acc) << " on "
            << test.size() << " images\n";
}

void cmd_sweep(const Options& o, OutputDir& out) {
  const auto sources = load_sources(o);
  std::ostringstream csv;
  csv << "mode,k,augmented_total,originals,best_round,best_validation,"
         "checkpoint\n";
  struct Cell {
    std::string mode;
    std::size_t k;
  };
  std::vector<Cell> cells{{"none", 0}};
  for (const char* mode : {"single", "overall"}) {
    for (std::size_t k = 1; k <= sources.size(); ++k) cells.push_back({mode, k});
  }
  for (const auto& cell : cells) {
    Options cell_opts = o;
    cell_opts.no_ccst = cell.k == 0;
    if (cell.k > 0) {
      cell_opts.mode = cell.mode;
      cell_opts.k = cell.k;
    }
    const FederationConfig cfg = federation_config(cell_opts);
    const PreparedSources prepared = prepare_sources(sources, cfg);
    const TrainingResult result =
        train_federation(sources, prepared.augmented, o.classes, cfg);
    std::size_t total = 0;
    std::size_t originals = 0;
    for (const auto& a : prepared.augmented) {
      total += a.size();
      originals += a.original_count();
    }
    const std::string name =
        "sweep_" + cell.mode + "_k" + std::to_string(cell.k) + ".cctp";
    out.bytes(name, encode_params(result.best));
    csv << cell.mode << ',' << cell.k << ',' << total << ',' << originals << ','
        << result.best_round << ',' << fmt(result.best_validation) << ','
        << name << '\n';
    std::cout << "cell " << cell.mode << " K=" << cell.k << ": " << total
              << " training entries, best validation "
              << fmt(result.best_validation) << "\n";
  }
  out.text("sweep.csv", csv.str());
}

std::vector<ImageTensor> tensors(const std::vector<LabeledImage>& images) {
  std::vector<ImageTensor> out;
  out.reserve(images.size());
  for (const auto& s : images) out.push_back(s.image);
  return out;
}

void cmd_report(const Options& o, OutputDir& out) {
  const DomainImages domains = acquire_domains(o, nullptr);
  const ClientId target = to_client(o.target, "--target");
  FederationConfig cfg = federation_config(o);
  Json summary{{"target", o.target}};

  if (!o.no_loo) {
    std::vector<LeaveOneOutTable> tables;
    std::vector<std::string> methods{"fedavg"};
    if (!o.no_ccst) methods.push_back("ccst_" + o.mode + "_k" + std::to_string(o.k));
    Json averages = Json::object();
    for (const auto& method : methods) {
      FederationConfig mcfg = cfg;
      mcfg.ccst_enabled = method != "fedavg";
      double sum = 0.0;
      for (std::size_t r = 0; r < o.repeats; ++r) {
        mcfg.seed = o.seed + r;
        LeaveOneOutTable t = leave_one_out_suite(domains, o.classes, mcfg, method,
                                                 o.train_fraction);
        t.method = method + "@seed" + std::to_string(mcfg.seed);
        sum += t.average;
        std::cout << t.method << ": average target accuracy " << fmt(t.average)
                  << "\n";
        tables.push_back(std::move(t));
      }
      averages[method] = sum / static_cast<double>(o.repeats);
    }
    out.text("leave_one_out.csv", format_leave_one_out(tables));
    summary["leave_one_out_mean"] = averages;
  }

  // Histogram uniformity of the source clients before and after CCST.
  const auto sources = split_sources(domains, target, o.classes,
                                     o.train_fraction,
                                     derive_seed(cfg.seed, "split"));
  FederationConfig acfg = cfg;
  acfg.ccst_enabled = true;
  if (acfg.augment.k > sources.size()) acfg.augment.k = sources.size();
  const PreparedSources prepared = prepare_sources(sources, acfg);
  std::vector<ClientHistogramProfile> before;
  std::vector<ClientHistogramProfile> after;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    before.push_back(client_profile(sources[i].id, tensors(sources[i].train)));
    after.push_back(client_profile(sources[i].id,
                                   tensors(prepared.augmented[i].samples())));
  }
  if (sources.size() >= 2) {
    const BeforeAfterReport report = before_after_report(before, after);
    out.text("uniformity.csv", format_uniformity_summary(report));
    out.text("uniformity_pairs.csv", format_pair_table(report));
    summary["uniformity"] = Json{{"mode", to_string(acfg.augment.mode)},
                                 {"k", acfg.augment.k},
                                 {"before", report.before_distance},
                                 {"after", report.after_distance},
                                 {"margin", report.margin()}};
    std::cout << "uniformity distance " << fmt(report.before_distance)
              << " -> " << fmt(report.after_distance) << "\n";
  }
  out.text("profiles_before.csv", format_profiles(before));
  out.text("profiles_after.csv", format_profiles(after));

  if (!o.sweep.empty()) {
    // Scores a sweep directory's checkpoints on this report's target.
    const fs::path dir(o.sweep);
    const Bytes raw = read_file(dir / "sweep.csv");
    std::istringstream in(std::string(raw.begin(), raw.end()));
    std::string line;
    std::getline(in, line);
    const auto test = domains.at(target);
    std::ostringstream csv;
    csv << "mode,k,target_accuracy\n";
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::stringstream ls(line);
      for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
      if (f.size() != 7) throw FormatError("sweep.csv: malformed row: " + line);
      const ModelParams p = decode_params(read_file(dir / f[6]));
      csv << f[0] << ',' << f[1] << ',' << fmt(evaluate(p, test)) << '\n';
    }
    out.text("sweep_eval.csv", csv.str());
  }
  out.json("report.json", summary);
}

void cmd_attack(const Options& o, OutputDir& out) {
  const ClientId client = to_client(o.client < 0 ? 0 : o.client, "--client");
  const DomainImages d =
      acquire_domains(o, [&](ClientId id) { return id == client; });
  if (!d.count(client)) throw DataError("--client domain has no images");
  const auto pool = tensors(d.at(client));
  const ImageTensor mean = mean_image(pool);
  const auto space = make_feature_space(o.feature_space);
  const std::size_t n = std::min(o.images, pool.size());
  const TensorShape shape{pool.front().channels(), pool.front().height(),
                          pool.front().width()};
  const AttackConfig attack{o.iterations, o.step};
  std::vector<AttackReport> reports;
  std::size_t witnesses = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // The attacker sees only the published style vector and the shape.
    const StyleVector style = extract_style(pool[i], *space);
    Rng rng(o.seed, {client.value, 0, "attack", i});
    const Reconstruction recon = invert_style(style, shape, *space, attack, rng);
    reports.push_back(score_attack(recon, pool, mean));
    char name[32];
    std::snprintf(name, sizeof(name), "recon_%03zu.cct", i);
    save_tensor(out.root() / name, recon.image);
    out.note(name);
    Rng wrng(o.seed, {client.value, 0, "witness", i});
    const auto [a, b] = non_injectivity_witness(pool[i], wrng);
    if (extract_style(a, *space) == extract_style(b, *space) && !(a == b)) {
      ++witnesses;
    }
  }
  out.text("attack.csv", format_attack_report(reports));
  double worst_margin = -1e300;
  for (const auto& r : reports) {
    worst_margin = std::max(worst_margin, r.best_psnr - r.best_baseline_psnr);
  }
  out.json("attack.json", Json{{"client", client.value},
                               {"targets", n},
                               {"witnesses_equal_style", witnesses},
                               {"max_psnr_gain_over_baseline_db", worst_margin}});
  std::cout << "attacked " << n << " style vectors; best PSNR exceeds the "
            << "mean-image baseline by at most " << fmt(worst_margin)
            << " dB\n";
}

// ---- argument parsing -------------------------------------------------------

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Root seed");
  sub->add_option("--out", o.out, "Output directory")->required();
  sub->add_option("--manifest", o.manifest,
                  "Rerun from a run_manifest.json (other flags ignored)");
}

void add_data(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "Dataset directory from gen-data");
  sub->add_option("--domain-spec", o.domain_spec, "Domain style spec file");
  sub->add_option("--domains", o.domains, "Number of synthetic domains");
  sub->add_option("--classes", o.classes, "Number of classes");
  sub->add_option("--per-domain", o.per_domain, "Images per domain");
  sub->add_option("--size", o.size, "Image height and width");
  sub->add_option("--data-seed", o.data_seed, "Seed of the synthetic images");
}

void add_split(CLI::App* sub, Options& o) {
  sub->add_option("--target", o.target, "Held-out target domain");
  sub->add_option("--train-fraction", o.train_fraction,
                  "Train share of each source client");
}

void add_style(CLI::App* sub, Options& o) {
  sub->add_option("--mode", o.mode, "Style mode: single or overall");
  sub->add_option("--k", o.k, "Augmentation level K");
  sub->add_option("--j", o.j, "Styles per client in single mode");
  sub->add_option("--backend", o.backend, "Transfer backend: adain or fft");
  sub->add_option("--fft-window", o.fft_window,
                  "Low-frequency window fraction for the fft backend");
  sub->add_option("--overall-style-sample", o.overall_style_sample,
                  "Images per overall style (0 = all)");
  sub->add_option("--feature-space", o.feature_space,
                  "Feature space: identity or opponent");
}

void add_train(CLI::App* sub, Options& o) {
  sub->add_option("--rounds", o.rounds, "Communication rounds");
  sub->add_option("--local-epochs", o.local_epochs, "Local epochs per round");
  sub->add_option("--lr", o.lr, "SGD learning rate");
  sub->add_option("--batch", o.batch, "Mini-batch size");
  sub->add_option("--hidden", o.hidden, "Hidden layer widths")->delimiter(',');
  sub->add_flag("--no-ccst", o.no_ccst, "Plain FedAvg without style transfer");
}

Options load_manifest(const Options& cli) {
  const Bytes raw = read_file(cli.manifest);
  Json j;
  try {
    j = Json::parse(raw.begin(), raw.end());
  } catch (const Json::exception& e) {
    throw FormatError(cli.manifest + ": " + e.what());
  }
  Options o;
  try {
    if (j.at("tool") != "ccst") throw FormatError("not a ccst run manifest");
    if (j.at("subcommand") != cli.subcommand) {
      throw UsageError("manifest is for '" +
                       j.at("subcommand").get<std::string>() +
                       "', not '" + cli.subcommand + "'");
    }
    from_json(j.at("config"), o);
  } catch (const Json::exception& e) {
    throw FormatError(cli.manifest + ": " + e.what());
  }
  o.subcommand = cli.subcommand;
  o.out = cli.out;
  return o;
}

int dispatch(Options o) {
  if (!o.manifest.empty()) o = load_manifest(o);
  validate(o);
  OutputDir out(o.out);
  const std::string& cmd = o.subcommand;
  if (cmd == "gen-data") cmd_gen_data(o, out);
  if (cmd == "styles") cmd_styles(o, out);
  if (cmd == "augment") cmd_augment(o, out);
  if (cmd == "train") cmd_train(o, out);
  if (cmd == "eval") cmd_eval(o, out);
  if (cmd == "sweep") cmd_sweep(o, out);
  if (cmd == "report") cmd_report(o, out);
  if (cmd == "attack") cmd_attack(o, out);
  out.finish(o);
  return kExitOk;
}

int fail(int code, const std::string& message) {
  std::cerr << "ccst: error: " << message << "\n";
  return code;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Cross-client style transfer federated learning simulator",
               "ccst"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic domains");
  add_data(gen, o);

  auto* styles = app.add_subcommand(
      "styles", "Publish source-client styles and write the style bank");
  add_data(styles, o);
  add_split(styles, o);
  add_style(styles, o);

  auto* augment = app.add_subcommand(
      "augment", "Augment one source client's training split");
  add_data(augment, o);
  add_split(augment, o);
  add_style(augment, o);
  augment->add_option("--client", o.client, "Source client to augment");
  augment->add_option("--bank", o.bank, "Style bank file from 'styles'");

  auto* train = app.add_subcommand(
      "train", "Federated training on the source clients (target unseen)");
  add_data(train, o);
  add_split(train, o);
  add_style(train, o);
  add_train(train, o);

  auto* eval = app.add_subcommand("eval", "Score a checkpoint on the target");
  add_data(eval, o);
  add_split(eval, o);
  eval->add_option("--checkpoint", o.checkpoint, "Checkpoint (.cctp)");

  auto* sweep = app.add_subcommand(
      "sweep", "Train the {single, overall} x K control grid");
  add_data(sweep, o);
  add_split(sweep, o);
  add_style(sweep, o);
  add_train(sweep, o);

  auto* report = app.add_subcommand(
      "report", "Leave-one-domain-out table and uniformity analysis");
  add_data(report, o);
  add_split(report, o);
  add_style(report, o);
  add_train(report, o);
  report->add_option("--repeats", o.repeats, "Seeds per method");
  report->add_flag("--no-loo", o.no_loo, "Skip the leave-one-out table");
  report->add_option("--sweep", o.sweep, "Sweep directory to score");

  auto* attack = app.add_subcommand(
      "attack", "Reconstruct images from their style vectors");
  add_data(attack, o);
  add_style(attack, o);
  attack->add_option("--client", o.client, "Domain whose styles are attacked");
  attack->add_option("--images", o.images, "Number of attacked images");
  attack->add_option("--iterations", o.iterations, "Attacker iterations");
  attack->add_option("--step", o.step, "Attacker step size");

  for (auto* sub : {gen, styles, augment, train, eval, sweep, report, attack}) {
    add_common(sub, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(kExitUsage, e.what());
  }
  o.subcommand = app.get_subcommands().front()->get_name();

  try {
    return dispatch(o);
  } catch (const UsageError& e) {
    return fail(kExitUsage, e.what());
  } catch (const InvalidArgument& e) {
    return fail(kExitUsage, e.what());
  } catch (const DataError& e) {
    return fail(kExitData, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(kExitData, e.what());
  } catch (const std::exception& e) {
    return fail(kExitData, e.what());
  }
}

}  // namespace ccst::cli
