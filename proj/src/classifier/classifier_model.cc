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


#include "selpt/classifier/classifier_model.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "selpt/common/parameter_file.h"
#include "selpt/common/random.h"
#include "selpt/common/status_macros.h"

namespace selpt::classifier {
namespace {

constexpr char kMagic[] = "SELPTCLF";
constexpr uint32_t kVersion = 1;

// log(1 + e^s) without overflow.
double Softplus(double s) {
  return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

}  // namespace

double SparseGradient::L2Norm() const {
  double ss = 0;
  for (double v : value) ss += v * v;
  return std::sqrt(ss);
}

double Sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

ClassifierModel::ClassifierModel(int hash_bits, int hidden_width)
    : hash_bits_(hash_bits), hidden_width_(hidden_width) {
  const size_t n = hidden_width == 0
                       ? input_dim() + 1
                       : input_dim() * hidden_width + 2 * hidden_width + 1;
  params_.assign(n, 0.0);
}

absl::StatusOr<ClassifierModel> ClassifierModel::Create(int hash_bits,
                                                        int hidden_width) {
  RETURN_IF_ERROR((FeatureConfig{.hash_bits = hash_bits}.Validate()));
  if (hidden_width < 0 || hidden_width > 4096) {
    return absl::InvalidArgumentError(
        absl::StrCat("hidden_width must be in [0, 4096], got ", hidden_width));
  }
  return ClassifierModel(hash_bits, hidden_width);
}

void ClassifierModel::Initialize(uint64_t seed) {
  std::fill(params_.begin(), params_.end(), 0.0);
  if (hidden_width_ == 0) return;
  CounterRng rng(seed);
  const double w1_scale = 1.0;
  const double w2_scale = 1.0 / std::sqrt(static_cast<double>(hidden_width_));
  for (size_t i = 0; i < b1_offset(); ++i) {
    params_[i] = w1_scale * rng.NextGaussian();
  }
  for (int k = 0; k < hidden_width_; ++k) {
    params_[w2_offset() + k] = w2_scale * rng.NextGaussian();
  }
}

std::vector<double> ClassifierModel::Hidden(const FeatureVector& x) const {
  const size_t h = hidden_width_;
  std::vector<double> a(params_.begin() + b1_offset(),
                        params_.begin() + b1_offset() + h);
  for (size_t n = 0; n < x.indices.size(); ++n) {
    const double* row = params_.data() + size_t{x.indices[n]} * h;
    for (size_t k = 0; k < h; ++k) a[k] += x.values[n] * row[k];
  }
  return a;
}

double ClassifierModel::Score(const FeatureVector& x) const {
  if (hidden_width_ == 0) {
    double s = params_.back();
    for (size_t n = 0; n < x.indices.size(); ++n) {
      s += x.values[n] * params_[x.indices[n]];
    }
    return s;
  }
  const std::vector<double> a = Hidden(x);
  double s = params_[b2_offset()];
  for (int k = 0; k < hidden_width_; ++k) {
    s += std::tanh(a[k]) * params_[w2_offset() + k];
  }
  return s;
}

double ClassifierModel::Loss(const FeatureVector& x, int label) const {
  const double s = Score(x);
  return Softplus(s) - label * s;
}

SparseGradient ClassifierModel::LossGradient(const FeatureVector& x,
                                             int label) const {
  SparseGradient g;
  if (hidden_width_ == 0) {
    const double r = Sigmoid(Score(x)) - label;
    g.index.reserve(x.indices.size() + 1);
    g.value.reserve(x.indices.size() + 1);
    for (size_t n = 0; n < x.indices.size(); ++n) {
      g.index.push_back(x.indices[n]);
      g.value.push_back(r * x.values[n]);
    }
    g.index.push_back(params_.size() - 1);
    g.value.push_back(r);
    return g;
  }

  const size_t h = hidden_width_;
  const std::vector<double> a = Hidden(x);
  std::vector<double> z(h);
  double s = params_[b2_offset()];
  for (size_t k = 0; k < h; ++k) {
    z[k] = std::tanh(a[k]);
    s += z[k] * params_[w2_offset() + k];
  }
  const double r = Sigmoid(s) - label;
  std::vector<double> da(h);
  for (size_t k = 0; k < h; ++k) {
    da[k] = r * params_[w2_offset() + k] * (1 - z[k] * z[k]);
  }
  const size_t nnz = x.indices.size() * h + 2 * h + 1;
  g.index.reserve(nnz);
  g.value.reserve(nnz);
  for (size_t n = 0; n < x.indices.size(); ++n) {
    const size_t row = size_t{x.indices[n]} * h;
    for (size_t k = 0; k < h; ++k) {
      g.index.push_back(row + k);
      g.value.push_back(x.values[n] * da[k]);
    }
  }
  for (size_t k = 0; k < h; ++k) {
    g.index.push_back(b1_offset() + k);
    g.value.push_back(da[k]);
  }
  for (size_t k = 0; k < h; ++k) {
    g.index.push_back(w2_offset() + k);
    g.value.push_back(r * z[k]);
  }
  g.index.push_back(b2_offset());
  g.value.push_back(r);
  return g;
}

absl::Status ClassifierModel::Validate() const {
  for (double p : params_) {
    if (!std::isfinite(p)) {
      return absl::FailedPreconditionError("classifier has non-finite weights");
    }
  }
  return absl::OkStatus();
}

double Confidence(const ClassifierModel& model, const FeatureVector& x) {
  return Sigmoid(model.Score(x));
}

absl::Status SaveClassifier(const ClassifierModel& model,
                            const std::string& path) {
  const uint32_t shape[] = {static_cast<uint32_t>(model.hash_bits()),
                            static_cast<uint32_t>(model.hidden_width())};
  return WriteParameterFile(path, std::string_view(kMagic, 8), kVersion, shape,
                            model.parameters());
}

absl::StatusOr<ClassifierModel> LoadClassifier(const std::string& path) {
  ASSIGN_OR_RETURN(ParameterFile file,
                   ReadParameterFile(path, std::string_view(kMagic, 8), 2));
  if (file.version != kVersion) {
    return absl::DataLossError(
        absl::StrCat(path, ": unsupported classifier version ", file.version));
  }
  ASSIGN_OR_RETURN(
      ClassifierModel model,
      ClassifierModel::Create(static_cast<int>(file.shape[0]),
                              static_cast<int>(file.shape[1])));
  if (file.parameters.size() != model.num_parameters()) {
    return absl::DataLossError(
        absl::StrCat(path, ": parameter count does not match the header"));
  }
  std::copy(file.parameters.begin(), file.parameters.end(),
            model.mutable_parameters().begin());
  RETURN_IF_ERROR(model.Validate());
  return model;
}

}  // namespace selpt::classifier
