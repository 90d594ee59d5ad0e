// Copyright 2026 The qhist Authors
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

#pragma once

#include <algorithm>
#include <charconv>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qhist/core/errors.hpp"

namespace qhist {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultDimensionCap = std::size_t{1} << 14;

/// Upper bound on the total Hilbert-space dimension. Overridable through the
/// QHIST_DIM_CAP environment variable.
inline std::size_t dimension_cap() {
  if (const char* env = std::getenv("QHIST_DIM_CAP")) {
    std::size_t value = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value > 0) return value;
  }
  return kDefaultDimensionCap;
}

struct Factor {
  std::string label;
  std::size_t dim = 1;

  bool operator==(const Factor&) const = default;
};

/// Ordered tensor-product structure H = H_1 x H_2 x ... with named factors.
/// Basis index convention: the first factor is the most significant digit.
class TensorSpace {
 public:
  TensorSpace() = default;

  explicit TensorSpace(std::vector<Factor> factors, std::size_t cap = dimension_cap())
      : factors_(std::move(factors)) {
    total_dim_ = 1;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      const auto& f = factors_[i];
      if (f.label.empty()) throw InvariantError("factor label must be non-empty");
      if (f.dim < 1) throw InvariantError("factor '" + f.label + "' has dimension 0");
      for (std::size_t j = 0; j < i; ++j) {
        if (factors_[j].label == f.label) throw InvariantError("duplicate factor label '" + f.label + "'");
      }
      if (total_dim_ > cap / f.dim) {
        throw InvariantError("total dimension exceeds cap of " + std::to_string(cap));
      }
      total_dim_ *= f.dim;
    }
    strides_.assign(factors_.size(), 1);
    for (std::size_t i = factors_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * factors_[i].dim;
  }

  static TensorSpace qubits(const std::vector<std::string>& labels) {
    std::vector<Factor> fs;
    fs.reserve(labels.size());
    for (const auto& l : labels) fs.push_back({l, 2});
    return TensorSpace(std::move(fs));
  }

  std::size_t size() const { return factors_.size(); }
  std::size_t total_dim() const { return total_dim_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(std::size_t i) const { return factors_.at(i); }
  std::size_t dim(std::size_t i) const { return factors_.at(i).dim; }
  std::size_t stride(std::size_t i) const { return strides_.at(i); }

  bool contains(std::string_view label) const {
    return std::any_of(factors_.begin(), factors_.end(), [&](const Factor& f) { return f.label == label; });
  }

  std::size_t index_of(std::string_view label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (factors_[i].label == label) return i;
    }
    throw InvariantError("unknown subsystem label '" + std::string(label) + "'");
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(factors_.size());
    for (const auto& f : factors_) out.push_back(f.label);
    return out;
  }

  /// The sub-space formed by the given factor indices, kept in this space's order.
  TensorSpace restrict_to(const std::vector<std::size_t>& indices) const {
    std::vector<Factor> fs;
    for (std::size_t i : indices) fs.push_back(factors_.at(i));
    return TensorSpace(std::move(fs), std::max(total_dim_, std::size_t{1}));
  }

  bool operator==(const TensorSpace& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

/// A subset of the subsystems of a TensorSpace. Members are kept sorted in
/// the space's factor order.
class Fragment {
 public:
  Fragment() = default;

  Fragment(const TensorSpace& space, const std::vector<std::string>& labels) : space_(space) {
    for (const auto& l : labels) indices_.push_back(space.index_of(l));
    normalize();
  }

  static Fragment from_indices(const TensorSpace& space, std::vector<std::size_t> indices) {
    Fragment f;
    f.space_ = space;
    for (std::size_t i : indices) {
      if (i >= space.size()) throw InvariantError("fragment factor index out of range");
    }
    f.indices_ = std::move(indices);
    f.normalize();
    return f;
  }

  static Fragment all(const TensorSpace& space) {
    std::vector<std::size_t> idx(space.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return from_indices(space, std::move(idx));
  }

  static Fragment none(const TensorSpace& space) { return from_indices(space, {}); }

  const TensorSpace& space() const { return space_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  bool empty() const { return indices_.empty(); }
  std::size_t size() const { return indices_.size(); }
  bool is_full() const { return indices_.size() == space_.size(); }

  bool contains(std::size_t factor_index) const {
    return std::binary_search(indices_.begin(), indices_.end(), factor_index);
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (std::size_t i : indices_) out.push_back(space_.factor(i).label);
    return out;
  }

  std::size_t dim() const {
    std::size_t d = 1;
    for (std::size_t i : indices_) d *= space_.dim(i);
    return d;
  }

  Fragment complement() const {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < space_.size(); ++i) {
      if (!contains(i)) rest.push_back(i);
    }
    return from_indices(space_, std::move(rest));
  }

  Fragment united(const Fragment& other) const {
    auto idx = indices_;
    idx.insert(idx.end(), other.indices_.begin(), other.indices_.end());
    return from_indices(space_, std::move(idx));
  }

  bool disjoint(const Fragment& other) const {
    return std::none_of(indices_.begin(), indices_.end(), [&](std::size_t i) { return other.contains(i); });
  }

  bool subset_of(const Fragment& other) const {
    return std::all_of(indices_.begin(), indices_.end(), [&](std::size_t i) { return other.contains(i); });
  }

  TensorSpace subspace() const { return space_.restrict_to(indices_); }

  bool operator==(const Fragment& other) const {
    return indices_ == other.indices_ && space_ == other.space_;
  }

 private:
  void normalize() {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  }

  TensorSpace space_;
  std::vector<std::size_t> indices_;
};

/// Splits every global basis index g into an (inner, outer) pair, where the
/// inner digits belong to a chosen factor subset and the outer digits to its
/// complement. Both keep the space's factor order.
class IndexSplit {
 public:
  IndexSplit(const TensorSpace& space, const std::vector<std::size_t>& inner_factors) {
    const std::size_t n = space.size();
    std::vector<char> is_inner(n, 0);
    for (std::size_t i : inner_factors) is_inner.at(i) = 1;
    std::vector<std::size_t> inner_stride(n, 0), outer_stride(n, 0);
    inner_dim_ = 1;
    outer_dim_ = 1;
    for (std::size_t i = n; i-- > 0;) {
      if (is_inner[i]) {
        inner_stride[i] = inner_dim_;
        inner_dim_ *= space.dim(i);
      } else {
        outer_stride[i] = outer_dim_;
        outer_dim_ *= space.dim(i);
      }
    }
    const std::size_t total = space.total_dim();
    inner_.resize(total);
    outer_.resize(total);
    global_.resize(total);
    for (std::size_t g = 0; g < total; ++g) {
      std::size_t rem = g, in = 0, out = 0;
      for (std::size_t i = n; i-- > 0;) {
        const std::size_t digit = rem % space.dim(i);
        rem /= space.dim(i);
        if (is_inner[i]) in += digit * inner_stride[i];
        else out += digit * outer_stride[i];
      }
      inner_[g] = static_cast<std::uint32_t>(in);
      outer_[g] = static_cast<std::uint32_t>(out);
      global_[out * inner_dim_ + in] = static_cast<std::uint32_t>(g);
    }
  }

  IndexSplit(const Fragment& inner) : IndexSplit(inner.space(), inner.indices()) {}

  std::size_t inner_dim() const { return inner_dim_; }
  std::size_t outer_dim() const { return outer_dim_; }
  std::size_t inner(std::size_t g) const { return inner_[g]; }
  std::size_t outer(std::size_t g) const { return outer_[g]; }
  std::size_t global(std::size_t in, std::size_t out) const { return global_[out * inner_dim_ + in]; }
  std::size_t total_dim() const { return inner_.size(); }

  /// Rearranges the columns of an N x r matrix into an inner_dim x
  /// (outer_dim * r) matrix R with R(inner(g), outer(g) + outer_dim * z) =
  /// cols(g, z). For a factor K of rho = K K^dagger, R R^dagger is the
  /// partial trace over the outer factors.
  Matrix reshape(const Matrix& cols) const {
    if (static_cast<std::size_t>(cols.rows()) != total_dim()) throw InvariantError("reshape: row count mismatch");
    const Eigen::Index r = cols.cols();
    Matrix out(static_cast<Eigen::Index>(inner_dim_), static_cast<Eigen::Index>(outer_dim_) * r);
    for (Eigen::Index z = 0; z < r; ++z) {
      const Eigen::Index base = z * static_cast<Eigen::Index>(outer_dim_);
      for (std::size_t g = 0; g < total_dim(); ++g) {
        out(inner_[g], base + outer_[g]) = cols(static_cast<Eigen::Index>(g), z);
      }
    }
    return out;
  }

  /// Inverse of reshape() for a single column block.
  Vector unreshape(const Matrix& block) const {
    Vector out(static_cast<Eigen::Index>(total_dim()));
    for (std::size_t g = 0; g < total_dim(); ++g) {
      out(static_cast<Eigen::Index>(g)) = block(inner_[g], outer_[g]);
    }
    return out;
  }

 private:
  std::size_t inner_dim_ = 1;
  std::size_t outer_dim_ = 1;
  std::vector<std::uint32_t> inner_, outer_, global_;
};

}  // namespace qhist
