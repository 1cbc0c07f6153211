// Copyright 2026 The Selective Pre-training Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "selpt/pipeline/config.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/text.h"

namespace selpt::pipeline {
namespace {

namespace fs = std::filesystem;
using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& KnownKeys() {
  static const auto* keys = new std::map<std::string, std::set<std::string>>{
      {"paths", {"target_train", "target_test", "source", "output_dir"}},
      {"privacy",
       {"epsilon", "delta", "split", "delta_selection", "delta_finetune",
        "delta_slack"}},
      {"selection", {"token_budget", "token_budget_fraction", "diagnostics_k"}},
      {"classifier",
       {"hash_bits", "bigrams", "l2_normalize", "hidden_width", "epochs",
        "clip_norm", "noise_multiplier", "batch_fraction", "learning_rate"}},
      {"lm",
       {"max_vocab", "min_count", "embedding_dim", "context", "hidden",
        "pretrain_steps", "pretrain_batch_size", "pretrain_learning_rate",
        "pretrain_weight_decay", "pretrain_linear_decay", "finetune_epochs",
        "finetune_batch_fraction", "finetune_clip_norm",
        "finetune_noise_multiplier", "finetune_learning_rate"}},
      {"run", {"mode", "seed", "threads"}},
  };
  return *keys;
}

class Reader {
 public:
  explicit Reader(const ptree& tree) : tree_(tree) {}

  absl::Status String(const char* section, const char* key, std::string* out) {
    if (auto v = Raw(section, key)) *out = *v;
    return absl::OkStatus();
  }

  absl::Status Double(const char* section, const char* key, double* out) {
    auto v = Raw(section, key);
    if (!v) return absl::OkStatus();
    if (!absl::SimpleAtod(*v, out)) return Bad(section, key, *v);
    return absl::OkStatus();
  }

  absl::Status OptionalDouble(const char* section, const char* key,
                              std::optional<double>* out) {
    auto v = Raw(section, key);
    if (!v) return absl::OkStatus();
    if (*v == "auto") {
      out->reset();
      return absl::OkStatus();
    }
    double d;
    if (!absl::SimpleAtod(*v, &d)) return Bad(section, key, *v);
    *out = d;
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status Integer(const char* section, const char* key, Int* out) {
    auto v = Raw(section, key);
    if (!v) return absl::OkStatus();
    Int parsed;
    if (!absl::SimpleAtoi(*v, &parsed)) return Bad(section, key, *v);
    *out = parsed;
    return absl::OkStatus();
  }

  absl::Status Bool(const char* section, const char* key, bool* out) {
    auto v = Raw(section, key);
    if (!v) return absl::OkStatus();
    if (!absl::SimpleAtob(*v, out)) return Bad(section, key, *v);
    return absl::OkStatus();
  }

  bool Has(const char* section, const char* key) const {
    return Raw(section, key).has_value();
  }

 private:
  std::optional<std::string> Raw(const char* section, const char* key) const {
    auto s = tree_.get_child_optional(section);
    if (!s) return std::nullopt;
    auto v = s->get_optional<std::string>(ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return std::string(absl::StripAsciiWhitespace(*v));
  }

  static absl::Status Bad(const char* section, const char* key,
                          const std::string& value) {
    return absl::InvalidArgumentError(
        absl::StrCat("[", section, "] ", key, ": cannot parse '", value, "'"));
  }

  const ptree& tree_;
};

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

}  // namespace

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kSelective:
      return "selective";
    case Mode::kRandom:
      return "random";
    case Mode::kFullSource:
      return "full-source";
    case Mode::kNoPretrain:
      return "no-pretrain";
  }
  return "unknown";
}

absl::StatusOr<Mode> ParseMode(std::string_view name) {
  for (Mode m : {Mode::kSelective, Mode::kRandom, Mode::kFullSource,
                 Mode::kNoPretrain}) {
    if (ModeName(m) == name) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown mode '", std::string(name),
      "'; expected selective, random, full-source or no-pretrain"));
}

absl::StatusOr<PipelineConfig> ParseConfig(std::string_view ini_text) {
  ptree tree;
  try {
    std::istringstream in{std::string(ini_text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config line ", e.line(), ": ", e.message()));
  }

  const auto& known = KnownKeys();
  for (const auto& [section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end() || body.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config section '", section, "'"));
    }
    for (const auto& entry : body) {
      if (!it->second.contains(entry.first)) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown key '", entry.first, "' in [", section, "]"));
      }
    }
  }

  PipelineConfig c;
  Reader r(tree);
  RETURN_IF_ERROR(r.String("paths", "target_train", &c.target_train_path));
  RETURN_IF_ERROR(r.String("paths", "target_test", &c.target_test_path));
  RETURN_IF_ERROR(r.String("paths", "source", &c.source_path));
  RETURN_IF_ERROR(r.String("paths", "output_dir", &c.output_dir));

  RETURN_IF_ERROR(r.Double("privacy", "epsilon", &c.total.epsilon));
  RETURN_IF_ERROR(r.Double("privacy", "delta", &c.total.delta));
  RETURN_IF_ERROR(r.Double("privacy", "split", &c.split));
  c.delta_selection = 0.25 * c.total.delta;
  c.delta_finetune = 0.25 * c.total.delta;
  c.delta_slack = 0.5 * c.total.delta;
  RETURN_IF_ERROR(r.Double("privacy", "delta_selection", &c.delta_selection));
  RETURN_IF_ERROR(r.Double("privacy", "delta_finetune", &c.delta_finetune));
  RETURN_IF_ERROR(r.Double("privacy", "delta_slack", &c.delta_slack));

  RETURN_IF_ERROR(r.Integer("selection", "token_budget", &c.token_budget));
  RETURN_IF_ERROR(r.Double("selection", "token_budget_fraction",
                           &c.token_budget_fraction));
  RETURN_IF_ERROR(r.Integer("selection", "diagnostics_k", &c.diagnostics_k));

  RETURN_IF_ERROR(r.Integer("classifier", "hash_bits", &c.features.hash_bits));
  RETURN_IF_ERROR(r.Bool("classifier", "bigrams", &c.features.bigrams));
  RETURN_IF_ERROR(
      r.Bool("classifier", "l2_normalize", &c.features.l2_normalize));
  RETURN_IF_ERROR(
      r.Integer("classifier", "hidden_width", &c.classifier.hidden_width));
  RETURN_IF_ERROR(r.Integer("classifier", "epochs", &c.classifier.epochs));
  RETURN_IF_ERROR(r.Double("classifier", "clip_norm", &c.classifier.clip_norm));
  RETURN_IF_ERROR(r.OptionalDouble("classifier", "noise_multiplier",
                                   &c.classifier.noise_multiplier));
  RETURN_IF_ERROR(
      r.Double("classifier", "batch_fraction", &c.classifier.batch_fraction));
  RETURN_IF_ERROR(r.Double("classifier", "learning_rate",
                           &c.classifier.adam.learning_rate));

  RETURN_IF_ERROR(r.Integer("lm", "max_vocab", &c.max_vocab));
  RETURN_IF_ERROR(r.Integer("lm", "min_count", &c.min_count));
  RETURN_IF_ERROR(r.Integer("lm", "embedding_dim", &c.lm_shape.embedding_dim));
  RETURN_IF_ERROR(r.Integer("lm", "context", &c.lm_shape.context));
  RETURN_IF_ERROR(r.Integer("lm", "hidden", &c.lm_shape.hidden));
  RETURN_IF_ERROR(r.Integer("lm", "pretrain_steps", &c.pretrain.steps));
  RETURN_IF_ERROR(
      r.Integer("lm", "pretrain_batch_size", &c.pretrain.batch_size));
  RETURN_IF_ERROR(r.Double("lm", "pretrain_learning_rate",
                           &c.pretrain.adam.learning_rate));
  RETURN_IF_ERROR(r.Double("lm", "pretrain_weight_decay",
                           &c.pretrain.adam.weight_decay));
  RETURN_IF_ERROR(
      r.Bool("lm", "pretrain_linear_decay", &c.pretrain.linear_decay));
  RETURN_IF_ERROR(r.Double("lm", "finetune_epochs", &c.finetune.epochs));
  RETURN_IF_ERROR(r.Double("lm", "finetune_batch_fraction",
                           &c.finetune.batch_fraction));
  RETURN_IF_ERROR(
      r.Double("lm", "finetune_clip_norm", &c.finetune.clip_norm));
  RETURN_IF_ERROR(r.OptionalDouble("lm", "finetune_noise_multiplier",
                                   &c.finetune.noise_multiplier));
  RETURN_IF_ERROR(r.Double("lm", "finetune_learning_rate",
                           &c.finetune.adam.learning_rate));

  std::string mode;
  RETURN_IF_ERROR(r.String("run", "mode", &mode));
  if (!mode.empty()) {
    ASSIGN_OR_RETURN(c.mode, ParseMode(mode));
  }
  RETURN_IF_ERROR(r.Integer("run", "seed", &c.seed));
  RETURN_IF_ERROR(r.Integer("run", "threads", &c.threads));
  return c;
}

absl::StatusOr<PipelineConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<PipelineConfig> config = ParseConfig(buffer.str());
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

std::string ConfigToIni(const PipelineConfig& c) {
  auto opt = [](const std::optional<double>& v) {
    return v.has_value() ? FormatDouble(*v) : std::string("auto");
  };
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::string out;
  absl::StrAppend(&out, "[paths]\n", "target_train = ", c.target_train_path,
                  "\ntarget_test = ", c.target_test_path,
                  "\nsource = ", c.source_path,
                  "\noutput_dir = ", c.output_dir, "\n\n");
  absl::StrAppend(&out, "[privacy]\n", "epsilon = ",
                  FormatDouble(c.total.epsilon),
                  "\ndelta = ", FormatDouble(c.total.delta),
                  "\nsplit = ", FormatDouble(c.split),
                  "\ndelta_selection = ", FormatDouble(c.delta_selection),
                  "\ndelta_finetune = ", FormatDouble(c.delta_finetune),
                  "\ndelta_slack = ", FormatDouble(c.delta_slack), "\n\n");
  absl::StrAppend(&out, "[selection]\n");
  if (c.token_budget > 0) {
    absl::StrAppend(&out, "token_budget = ", c.token_budget, "\n");
  } else {
    absl::StrAppend(&out, "token_budget_fraction = ",
                    FormatDouble(c.token_budget_fraction), "\n");
  }
  absl::StrAppend(&out, "diagnostics_k = ", c.diagnostics_k, "\n\n");
  absl::StrAppend(
      &out, "[classifier]\n", "hash_bits = ", c.features.hash_bits,
      "\nbigrams = ", b(c.features.bigrams),
      "\nl2_normalize = ", b(c.features.l2_normalize),
      "\nhidden_width = ", c.classifier.hidden_width,
      "\nepochs = ", c.classifier.epochs,
      "\nclip_norm = ", FormatDouble(c.classifier.clip_norm),
      "\nnoise_multiplier = ", opt(c.classifier.noise_multiplier),
      "\nbatch_fraction = ", FormatDouble(c.classifier.batch_fraction),
      "\nlearning_rate = ", FormatDouble(c.classifier.adam.learning_rate),
      "\n\n");
  absl::StrAppend(
      &out, "[lm]\n", "max_vocab = ", c.max_vocab,
      "\nmin_count = ", c.min_count,
      "\nembedding_dim = ", c.lm_shape.embedding_dim,
      "\ncontext = ", c.lm_shape.context, "\nhidden = ", c.lm_shape.hidden,
      "\npretrain_steps = ", c.pretrain.steps,
      "\npretrain_batch_size = ", c.pretrain.batch_size,
      "\npretrain_learning_rate = ", FormatDouble(c.pretrain.adam.learning_rate),
      "\npretrain_weight_decay = ", FormatDouble(c.pretrain.adam.weight_decay),
      "\npretrain_linear_decay = ", b(c.pretrain.linear_decay),
      "\nfinetune_epochs = ", FormatDouble(c.finetune.epochs),
      "\nfinetune_batch_fraction = ", FormatDouble(c.finetune.batch_fraction),
      "\nfinetune_clip_norm = ", FormatDouble(c.finetune.clip_norm),
      "\nfinetune_noise_multiplier = ", opt(c.finetune.noise_multiplier),
      "\nfinetune_learning_rate = ", FormatDouble(c.finetune.adam.learning_rate),
      "\n\n");
  absl::StrAppend(&out, "[run]\n", "mode = ", std::string(ModeName(c.mode)),
                  "\nseed = ", c.seed, "\nthreads = ", c.threads, "\n");
  return out;
}

nlohmann::json ConfigToJson(const PipelineConfig& c) {
  auto opt = [](const std::optional<double>& v) {
    return v.has_value() ? nlohmann::json(*v) : nlohmann::json();
  };
  nlohmann::json j;
  j["paths"] = {{"target_train", c.target_train_path},
                {"target_test", c.target_test_path},
                {"source", c.source_path},
                {"output_dir", c.output_dir}};
  j["privacy"] = {{"epsilon", c.total.epsilon},
                  {"delta", c.total.delta},
                  {"split", c.split},
                  {"delta_selection", c.delta_selection},
                  {"delta_finetune", c.delta_finetune},
                  {"delta_slack", c.delta_slack}};
  j["selection"] = {{"token_budget", c.token_budget},
                    {"token_budget_fraction", c.token_budget_fraction},
                    {"diagnostics_k", c.diagnostics_k}};
  j["classifier"] = {{"hash_bits", c.features.hash_bits},
                     {"bigrams", c.features.bigrams},
                     {"l2_normalize", c.features.l2_normalize},
                     {"hidden_width", c.classifier.hidden_width},
                     {"epochs", c.classifier.epochs},
                     {"clip_norm", c.classifier.clip_norm},
                     {"noise_multiplier", opt(c.classifier.noise_multiplier)},
                     {"batch_fraction", c.classifier.batch_fraction},
                     {"learning_rate", c.classifier.adam.learning_rate}};
  j["lm"] = {{"max_vocab", c.max_vocab},
             {"min_count", c.min_count},
             {"embedding_dim", c.lm_shape.embedding_dim},
             {"context", c.lm_shape.context},
             {"hidden", c.lm_shape.hidden},
             {"pretrain_steps", c.pretrain.steps},
             {"pretrain_batch_size", c.pretrain.batch_size},
             {"pretrain_learning_rate", c.pretrain.adam.learning_rate},
             {"pretrain_weight_decay", c.pretrain.adam.weight_decay},
             {"pretrain_linear_decay", c.pretrain.linear_decay},
             {"finetune_epochs", c.finetune.epochs},
             {"finetune_batch_fraction", c.finetune.batch_fraction},
             {"finetune_clip_norm", c.finetune.clip_norm},
             {"finetune_noise_multiplier", opt(c.finetune.noise_multiplier)},
             {"finetune_learning_rate", c.finetune.adam.learning_rate}};
  // threads is left out: it does not change results.
  j["run"] = {{"mode", std::string(ModeName(c.mode))}, {"seed", c.seed}};
  return j;
}

std::string ConfigHash(const PipelineConfig& config) {
  return absl::StrFormat("%016x", Fnv1a64(ConfigToJson(config).dump()));
}

std::vector<Finding> ValidateConfig(const PipelineConfig& c,
                                    bool check_paths) {
  std::vector<Finding> findings;
  auto error = [&](std::string key, std::string message) {
    findings.push_back({Finding::Severity::kError, std::move(key),
                        std::move(message)});
  };
  auto warning = [&](std::string key, std::string message) {
    findings.push_back({Finding::Severity::kWarning, std::move(key),
                        std::move(message)});
  };
  auto check = [&](std::string key, const absl::Status& status) {
    if (!status.ok()) error(std::move(key), std::string(status.message()));
  };
  const bool selective = c.mode == Mode::kSelective;

  // Paths.
  auto input = [&](const char* key, const std::string& path) {
    if (path.empty()) {
      error(key, "path is not set");
    } else if (check_paths && !fs::is_regular_file(path)) {
      error(key, absl::StrCat("no such file: ", path));
    }
  };
  input("paths.target_train", c.target_train_path);
  input("paths.target_test", c.target_test_path);
  if (c.mode != Mode::kNoPretrain || check_paths) {
    input("paths.source", c.source_path);
  }
  if (c.output_dir.empty()) {
    error("paths.output_dir", "path is not set");
  } else if (check_paths) {
    std::error_code ec;
    const fs::path out(c.output_dir);
    if (fs::exists(out, ec) && !fs::is_directory(out, ec)) {
      error("paths.output_dir", "exists and is not a directory");
    } else if (!fs::exists(out, ec)) {
      const fs::path parent = fs::absolute(out, ec).parent_path();
      if (!fs::is_directory(parent, ec)) {
        error("paths.output_dir",
              absl::StrCat("parent directory does not exist: ",
                           parent.string()));
      }
    }
  }

  // Budget arithmetic.
  const double eps = c.total.epsilon;
  const double delta = c.total.delta;
  if (!(std::isfinite(eps) && eps > 0)) {
    error("privacy.epsilon", "must be finite and positive");
  }
  if (!(delta > 0 && delta < 1)) {
    error("privacy.delta", "must lie in (0, 1)");
  }
  if (!(c.split > 0 && c.split < 1)) {
    error("privacy.split", "must lie in (0, 1)");
  }
  if (selective && !(c.delta_selection > 0)) {
    error("privacy.delta_selection", "must be positive");
  } else if (c.delta_selection < 0) {
    error("privacy.delta_selection", "must not be negative");
  }
  if (!(c.delta_finetune > 0)) {
    error("privacy.delta_finetune", "must be positive");
  }
  if (!(c.delta_slack > 0)) {
    error("privacy.delta_slack",
          "must be positive: composition needs delta > delta_selection + "
          "delta_finetune");
  }
  const double delta_sum = c.delta_selection + c.delta_finetune + c.delta_slack;
  if (delta > 0 && delta_sum > delta * (1 + 1e-12)) {
    error("privacy.delta",
          absl::StrFormat("delta_selection + delta_finetune + delta_slack = "
                          "%g exceeds delta = %g",
                          delta_sum, delta));
  } else if (delta > 0 && delta_sum < delta * (1 - 1e-9)) {
    warning("privacy.delta",
            absl::StrFormat("stage deltas sum to %g, below delta = %g",
                            delta_sum, delta));
  }
  if (selective && std::isfinite(eps) && eps > 0 && c.split > 0 &&
      c.split < 1 && c.delta_slack > 0) {
    const double eps2 = accounting::MaxSecondStageEpsilon(eps, c.split * eps,
                                                          c.delta_slack);
    if (!(eps2 > 0)) {
      error("privacy.split",
            absl::StrFormat("selection epsilon %g leaves no budget for "
                            "fine-tuning",
                            c.split * eps));
    }
  }

  // Selection.
  if (c.mode == Mode::kSelective || c.mode == Mode::kRandom) {
    const bool absolute = c.token_budget > 0;
    const bool fraction = c.token_budget_fraction > 0;
    if (absolute == fraction) {
      error("selection.token_budget",
            "set exactly one of token_budget and token_budget_fraction");
    }
    if (c.token_budget < 0) {
      error("selection.token_budget", "must not be negative");
    }
    if (c.token_budget_fraction < 0 || c.token_budget_fraction > 1 ||
        std::isnan(c.token_budget_fraction)) {
      error("selection.token_budget_fraction", "must lie in (0, 1]");
    }
  }
  if (c.diagnostics_k < 1) {
    error("selection.diagnostics_k", "must be at least 1");
  }

  // Models.
  if (selective) {
    check("classifier", c.features.Validate());
    check("classifier", c.classifier.Validate());
    if (c.classifier.noise_multiplier.has_value() &&
        !(*c.classifier.noise_multiplier > 0)) {
      error("classifier.noise_multiplier",
            "must be positive in a private run (or 'auto')");
    }
  }
  if (c.max_vocab < 3) error("lm.max_vocab", "must be at least 3");
  if (c.min_count < 1) error("lm.min_count", "must be at least 1");
  {
    lm::ToyLmConfig shape = c.lm_shape;
    shape.vocab_size = std::max(shape.vocab_size, 3);
    check("lm", shape.Validate());
  }
  if (c.mode != Mode::kNoPretrain) check("lm", c.pretrain.Validate());
  check("lm", c.finetune.Validate());
  if (c.finetune.noise_multiplier.has_value() &&
      !(*c.finetune.noise_multiplier > 0)) {
    error("lm.finetune_noise_multiplier",
          "must be positive in a private run (or 'auto')");
  }
  if (c.threads < 0) error("run.threads", "must not be negative");
  return findings;
}

bool HasErrors(const std::vector<Finding>& findings) {
  for (const Finding& f : findings) {
    if (f.severity == Finding::Severity::kError) return true;
  }
  return false;
}

std::string FormatFinding(const Finding& f) {
  return absl::StrCat(
      f.severity == Finding::Severity::kError ? "error" : "warning", ": ",
      f.key, ": ", f.message);
}

absl::StatusOr<BudgetPlan> PlanBudgets(const PipelineConfig& c) {
  std::vector<Finding> findings = ValidateConfig(c, /*check_paths=*/false);
  for (const Finding& f : findings) {
    if (f.severity == Finding::Severity::kError && f.key.starts_with("privacy")) {
      return absl::InvalidArgumentError(FormatFinding(f));
    }
  }
  BudgetPlan plan;
  plan.delta_slack = c.delta_slack;
  if (c.mode == Mode::kSelective) {
    plan.selection = {c.split * c.total.epsilon, c.delta_selection};
    plan.finetune = {accounting::MaxSecondStageEpsilon(
                         c.total.epsilon, plan.selection.epsilon, c.delta_slack),
                     c.delta_finetune};
  } else {
    plan.selection = {0.0, 0.0};
    plan.finetune = {c.total.epsilon, c.delta_finetune};
  }
  return plan;
}

}  // namespace selpt::pipeline
