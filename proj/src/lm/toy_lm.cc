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


#include "selpt/lm/toy_lm.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "selpt/common/parameter_file.h"
#include "selpt/common/random.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/threads.h"
#include "selpt/lm/vocabulary.h"

namespace selpt::lm {
namespace {

constexpr char kMagic[] = "SELPTTLM";
constexpr uint32_t kVersion = 1;

}  // namespace

absl::Status ToyLmConfig::Validate() const {
  if (vocab_size < 3 || embedding_dim < 1 || context < 1 || hidden < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid toy LM shape: V=", vocab_size, " d=", embedding_dim,
        " w=", context, " h=", hidden));
  }
  if (NumParameters() > (size_t{1} << 28)) {
    return absl::InvalidArgumentError("toy LM too large");
  }
  return absl::OkStatus();
}

size_t ToyLmConfig::NumParameters() const {
  const size_t v = vocab_size, d = embedding_dim, w = context, h = hidden;
  return v * d + h * w * d + h + v * h + v;
}

ToyLmModel::ToyLmModel(const ToyLmConfig& config)
    : config_(config), params_(config.NumParameters(), 0.0) {}

absl::StatusOr<ToyLmModel> ToyLmModel::Create(const ToyLmConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  return ToyLmModel(config);
}

size_t ToyLmModel::w1_offset() const {
  return size_t(config_.vocab_size) * config_.embedding_dim;
}
size_t ToyLmModel::b1_offset() const {
  return w1_offset() +
         size_t(config_.hidden) * config_.context * config_.embedding_dim;
}
size_t ToyLmModel::w2_offset() const { return b1_offset() + config_.hidden; }
size_t ToyLmModel::b2_offset() const {
  return w2_offset() + size_t(config_.vocab_size) * config_.hidden;
}

void ToyLmModel::Initialize(uint64_t seed) {
  std::fill(params_.begin(), params_.end(), 0.0);
  CounterRng rng(seed);
  const double in_dim = double(config_.context) * config_.embedding_dim;
  for (size_t i = 0; i < w1_offset(); ++i) params_[i] = 0.1 * rng.NextGaussian();
  const double s1 = 1.0 / std::sqrt(in_dim);
  for (size_t i = w1_offset(); i < b1_offset(); ++i) {
    params_[i] = s1 * rng.NextGaussian();
  }
  const double s2 = 1.0 / std::sqrt(double(config_.hidden));
  for (size_t i = w2_offset(); i < b2_offset(); ++i) {
    params_[i] = s2 * rng.NextGaussian();
  }
}

void Softmax(std::span<double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0;
  for (double& x : logits) {
    x = std::exp(x - m);
    sum += x;
  }
  for (double& x : logits) x /= sum;
}

void ToyLmModel::Forward(std::span<const int32_t> tokens, size_t t,
                         Activations& act) const {
  const size_t d = config_.embedding_dim, w = config_.context,
               h = config_.hidden, v = config_.vocab_size;
  act.context.assign(w, Vocabulary::kPadId);
  for (size_t j = 0; j < w; ++j) {
    // Slot j holds token t - w + j.
    if (t + j >= w) act.context[j] = tokens[t + j - w];
  }
  act.x.resize(w * d);
  for (size_t j = 0; j < w; ++j) {
    const double* e = params_.data() + size_t(act.context[j]) * d;
    std::copy(e, e + d, act.x.begin() + j * d);
  }
  act.z.resize(h);
  const double* w1 = params_.data() + w1_offset();
  const double* b1 = params_.data() + b1_offset();
  for (size_t k = 0; k < h; ++k) {
    const double* row = w1 + k * w * d;
    double a = b1[k];
    for (size_t i = 0; i < w * d; ++i) a += row[i] * act.x[i];
    act.z[k] = std::tanh(a);
  }
  act.probs.resize(v);
  const double* w2 = params_.data() + w2_offset();
  const double* b2 = params_.data() + b2_offset();
  for (size_t o = 0; o < v; ++o) {
    const double* row = w2 + o * h;
    double s = b2[o];
    for (size_t k = 0; k < h; ++k) s += row[k] * act.z[k];
    act.probs[o] = s;
  }
  Softmax(act.probs);
}

std::vector<double> ToyLmModel::Predict(std::span<const int32_t> tokens,
                                        size_t t) const {
  Activations act;
  Forward(tokens, t, act);
  return std::move(act.probs);
}

double ToyLmModel::SequenceLoss(std::span<const int32_t> tokens) const {
  Activations act;
  double total = 0;
  for (size_t t = 0; t < tokens.size(); ++t) {
    Forward(tokens, t, act);
    total -= std::log(act.probs[tokens[t]]);
  }
  return total / tokens.size();
}

double ToyLmModel::AccumulateGradient(std::span<const int32_t> tokens,
                                      double scale,
                                      std::span<double> grad) const {
  const size_t d = config_.embedding_dim, w = config_.context,
               h = config_.hidden, v = config_.vocab_size;
  const double* w1 = params_.data() + w1_offset();
  const double* w2 = params_.data() + w2_offset();
  double* g_w1 = grad.data() + w1_offset();
  double* g_b1 = grad.data() + b1_offset();
  double* g_w2 = grad.data() + w2_offset();
  double* g_b2 = grad.data() + b2_offset();
  const double per_position = scale / tokens.size();

  Activations act;
  std::vector<double> dz(h), da(h), dx(w * d);
  double total = 0;
  for (size_t t = 0; t < tokens.size(); ++t) {
    Forward(tokens, t, act);
    total -= std::log(act.probs[tokens[t]]);
    // d loss / d logits = p - onehot(y).
    std::vector<double>& dout = act.probs;
    dout[tokens[t]] -= 1.0;
    std::fill(dz.begin(), dz.end(), 0.0);
    for (size_t o = 0; o < v; ++o) {
      const double g = dout[o];
      const double* row = w2 + o * h;
      double* g_row = g_w2 + o * h;
      for (size_t k = 0; k < h; ++k) {
        g_row[k] += per_position * g * act.z[k];
        dz[k] += g * row[k];
      }
      g_b2[o] += per_position * g;
    }
    std::fill(dx.begin(), dx.end(), 0.0);
    for (size_t k = 0; k < h; ++k) {
      da[k] = dz[k] * (1 - act.z[k] * act.z[k]);
      const double* row = w1 + k * w * d;
      double* g_row = g_w1 + k * w * d;
      const double s = per_position * da[k];
      for (size_t i = 0; i < w * d; ++i) {
        g_row[i] += s * act.x[i];
        dx[i] += da[k] * row[i];
      }
      g_b1[k] += s;
    }
    for (size_t j = 0; j < w; ++j) {
      double* g_e = grad.data() + size_t(act.context[j]) * d;
      for (size_t i = 0; i < d; ++i) g_e[i] += per_position * dx[j * d + i];
    }
  }
  return total / tokens.size();
}

absl::Status ToyLmModel::ValidateSequence(std::span<const int32_t> tokens) const {
  if (tokens.empty()) return absl::InvalidArgumentError("empty token sequence");
  for (int32_t id : tokens) {
    if (id < 0 || id >= config_.vocab_size) {
      return absl::InvalidArgumentError(
          absl::StrCat("token id ", id, " outside vocabulary of size ",
                       config_.vocab_size));
    }
  }
  return absl::OkStatus();
}

absl::Status ToyLmModel::Validate() const {
  for (double p : params_) {
    if (!std::isfinite(p)) {
      return absl::FailedPreconditionError("toy LM has non-finite parameters");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Evaluation> Evaluate(const ToyLmModel& model,
                                    std::span<const TokenSequence> corpus,
                                    int threads) {
  if (corpus.empty()) return absl::InvalidArgumentError("empty evaluation corpus");
  for (const TokenSequence& seq : corpus) {
    RETURN_IF_ERROR(model.ValidateSequence(seq));
  }
  std::vector<double> loss(corpus.size());
  std::vector<int64_t> hits(corpus.size());
  ParallelShards(corpus.size(), threads, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const TokenSequence& seq = corpus[i];
      double l = 0;
      int64_t h = 0;
      for (size_t t = 0; t < seq.size(); ++t) {
        const std::vector<double> p = model.Predict(seq, t);
        l -= std::log(p[seq[t]]);
        h += std::max_element(p.begin(), p.end()) - p.begin() == seq[t];
      }
      loss[i] = l;
      hits[i] = h;
    }
  });
  Evaluation e;
  double total = 0;
  int64_t correct = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    total += loss[i];
    correct += hits[i];
    e.positions += static_cast<int64_t>(corpus[i].size());
  }
  e.mean_loss = total / e.positions;
  e.perplexity = std::exp(e.mean_loss);
  e.top1_accuracy = static_cast<double>(correct) / e.positions;
  return e;
}

absl::Status SaveToyLm(const ToyLmModel& model, const std::string& path) {
  const ToyLmConfig& c = model.config();
  const uint32_t shape[] = {
      static_cast<uint32_t>(c.vocab_size), static_cast<uint32_t>(c.embedding_dim),
      static_cast<uint32_t>(c.context), static_cast<uint32_t>(c.hidden)};
  return WriteParameterFile(path, std::string_view(kMagic, 8), kVersion, shape,
                            model.parameters());
}

absl::StatusOr<ToyLmModel> LoadToyLm(const std::string& path) {
  ASSIGN_OR_RETURN(ParameterFile file,
                   ReadParameterFile(path, std::string_view(kMagic, 8), 4));
  if (file.version != kVersion) {
    return absl::DataLossError(
        absl::StrCat(path, ": unsupported toy LM version ", file.version));
  }
  ToyLmConfig config{static_cast<int>(file.shape[0]),
                     static_cast<int>(file.shape[1]),
                     static_cast<int>(file.shape[2]),
                     static_cast<int>(file.shape[3])};
  ASSIGN_OR_RETURN(ToyLmModel model, ToyLmModel::Create(config));
  if (file.parameters.size() != model.num_parameters()) {
    return absl::DataLossError(
        absl::StrCat(path, ": parameter count does not match the header"));
  }
  std::copy(file.parameters.begin(), file.parameters.end(),
            model.mutable_parameters().begin());
  RETURN_IF_ERROR(model.Validate());
  return model;
}

}  // namespace selpt::lm
