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


// Fixed-window feedforward next-token model.
//
// The prediction for position t reads the embeddings of the w preceding
// tokens (padding before the start), passes their concatenation through a
// tanh layer and a softmax output layer. Every position of a sequence is
// predicted, including the first.
//
// Layout: [E (V x d) | W1 (h x w d) | b1 (h) | W2 (V x h) | b2 (V)]

#ifndef SELPT_LM_TOY_LM_H_
#define SELPT_LM_TOY_LM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt::lm {

struct ToyLmConfig {
  int vocab_size = 0;
  int embedding_dim = 32;
  int context = 8;
  int hidden = 128;

  absl::Status Validate() const;
  size_t NumParameters() const;
};

using TokenSequence = std::vector<int32_t>;

class ToyLmModel {
 public:
  static absl::StatusOr<ToyLmModel> Create(const ToyLmConfig& config);

  // Small Gaussian weights, zero biases.
  void Initialize(uint64_t seed);

  const ToyLmConfig& config() const { return config_; }
  size_t num_parameters() const { return params_.size(); }
  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }

  // Next-token distribution for position `t` of `tokens`.
  std::vector<double> Predict(std::span<const int32_t> tokens, size_t t) const;

  // Mean next-token cross-entropy over the sequence.
  double SequenceLoss(std::span<const int32_t> tokens) const;

  // Adds scale * d(SequenceLoss)/d(params) into `grad` and returns the loss.
  double AccumulateGradient(std::span<const int32_t> tokens, double scale,
                            std::span<double> grad) const;

  // Fails on ids outside [0, V) or an empty sequence.
  absl::Status ValidateSequence(std::span<const int32_t> tokens) const;
  absl::Status Validate() const;

 private:
  explicit ToyLmModel(const ToyLmConfig& config);

  size_t w1_offset() const;
  size_t b1_offset() const;
  size_t w2_offset() const;
  size_t b2_offset() const;

  struct Activations {
    std::vector<int32_t> context;
    std::vector<double> x;       // w d
    std::vector<double> z;       // h, after tanh
    std::vector<double> probs;   // V
  };
  void Forward(std::span<const int32_t> tokens, size_t t,
               Activations& act) const;

  ToyLmConfig config_;
  std::vector<double> params_;
};

// Numerically stable in-place softmax.
void Softmax(std::span<double> logits);

struct Evaluation {
  double perplexity = 0.0;
  double top1_accuracy = 0.0;
  double mean_loss = 0.0;
  int64_t positions = 0;
};

// Perplexity and top-1 accuracy pooled over all positions. Ties in the
// argmax go to the lowest id. Sharded over `threads`; result independent
// of the thread count.
absl::StatusOr<Evaluation> Evaluate(const ToyLmModel& model,
                                    std::span<const TokenSequence> corpus,
                                    int threads = 1);

absl::Status SaveToyLm(const ToyLmModel& model, const std::string& path);
absl::StatusOr<ToyLmModel> LoadToyLm(const std::string& path);

}  // namespace selpt::lm

#endif  // SELPT_LM_TOY_LM_H_
