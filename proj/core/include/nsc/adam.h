// Copyright 2026 The NSC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NSC_ADAM_H_
#define NSC_ADAM_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "nsc/nn.h"

namespace nsc {

// Standard bias-corrected Adam over a fixed list of parameter blocks.
template <typename T>
class Adam {
 public:
  explicit Adam(std::vector<ParamRef<T>> params, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8)
      : params_(std::move(params)),
        beta1_(beta1),
        beta2_(beta2),
        epsilon_(epsilon) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
      m_.emplace_back(p.size, T(0));
      v_.emplace_back(p.size, T(0));
    }
  }

  void Step(double lr) {
    ++t_;
    const T b1 = static_cast<T>(beta1_);
    const T b2 = static_cast<T>(beta2_);
    const T correction1 =
        static_cast<T>(1.0 / (1.0 - std::pow(beta1_, static_cast<double>(t_))));
    const T correction2 =
        static_cast<T>(1.0 / (1.0 - std::pow(beta2_, static_cast<double>(t_))));
    const T alpha = static_cast<T>(lr);
    const T eps = static_cast<T>(epsilon_);
    for (size_t i = 0; i < params_.size(); ++i) {
      T* value = params_[i].value;
      const T* grad = params_[i].grad;
      T* m = m_[i].data();
      T* v = v_[i].data();
      for (size_t j = 0; j < params_[i].size; ++j) {
        const T g = grad[j];
        m[j] = b1 * m[j] + (T(1) - b1) * g;
        v[j] = b2 * v[j] + (T(1) - b2) * g * g;
        const T mhat = m[j] * correction1;
        const T vhat = v[j] * correction2;
        value[j] -= alpha * mhat / (std::sqrt(vhat) + eps);
      }
    }
  }

  void ZeroGrad() {
    for (auto& p : params_) {
      for (size_t j = 0; j < p.size; ++j) p.grad[j] = T(0);
    }
  }

  int64_t step_count() const { return t_; }

 private:
  std::vector<ParamRef<T>> params_;
  std::vector<std::vector<T>> m_, v_;
  double beta1_, beta2_, epsilon_;
  int64_t t_ = 0;
};

}  // namespace nsc

#endif  // NSC_ADAM_H_
