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


// Logistic scorer over hashed features, optionally with one tanh hidden
// layer. Parameters live in one flat vector so the DP optimizer can treat
// the model as a point in R^n.
//
// Layout, linear:  [w (2^b) | bias]
// Layout, hidden:  [W1 (2^b rows of h) | b1 (h) | w2 (h) | b2]

#ifndef SELPT_CLASSIFIER_CLASSIFIER_MODEL_H_
#define SELPT_CLASSIFIER_CLASSIFIER_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "selpt/classifier/featurizer.h"

namespace selpt::classifier {

// A gradient with few nonzeros. Indices are unique but not sorted.
struct SparseGradient {
  std::vector<size_t> index;
  std::vector<double> value;

  double L2Norm() const;
};

class ClassifierModel {
 public:
  // hash_bits in [1, 26]; hidden_width 0 selects the linear model.
  static absl::StatusOr<ClassifierModel> Create(int hash_bits,
                                                int hidden_width);

  // Zero for the linear model. The hidden model draws W1 and w2 from small
  // Gaussians so the layer is not stuck at the symmetric point.
  void Initialize(uint64_t seed);

  int hash_bits() const { return hash_bits_; }
  int hidden_width() const { return hidden_width_; }
  size_t input_dim() const { return size_t{1} << hash_bits_; }
  size_t num_parameters() const { return params_.size(); }
  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }

  // Logit. Features must be valid for hash_bits().
  double Score(const FeatureVector& x) const;
  // Logistic loss softplus(s) - y s for label y in {0, 1}.
  double Loss(const FeatureVector& x, int label) const;
  SparseGradient LossGradient(const FeatureVector& x, int label) const;

  absl::Status Validate() const;

 private:
  ClassifierModel(int hash_bits, int hidden_width);

  size_t b1_offset() const { return input_dim() * hidden_width_; }
  size_t w2_offset() const { return b1_offset() + hidden_width_; }
  size_t b2_offset() const { return w2_offset() + hidden_width_; }
  // Hidden pre-activations for x.
  std::vector<double> Hidden(const FeatureVector& x) const;

  int hash_bits_;
  int hidden_width_;
  std::vector<double> params_;
};

double Sigmoid(double s);

// sigmoid(Score). Ranking by confidence equals ranking by score.
double Confidence(const ClassifierModel& model, const FeatureVector& x);

absl::Status SaveClassifier(const ClassifierModel& model,
                            const std::string& path);
absl::StatusOr<ClassifierModel> LoadClassifier(const std::string& path);

}  // namespace selpt::classifier

#endif  // SELPT_CLASSIFIER_CLASSIFIER_MODEL_H_
