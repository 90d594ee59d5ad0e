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

#include <memory>
#include <string>
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/linalg.hpp"
#include "qhist/hilbert/tensor_space.hpp"

namespace qhist {

/// Applies a dense operator acting on the inner factors of a split to every
/// column of cols (identity on the outer factors).
inline Matrix apply_local(const IndexSplit& split, const Matrix& local, const Matrix& cols) {
  if (static_cast<std::size_t>(local.cols()) != split.inner_dim()) {
    throw InvariantError("apply_local: operator does not match factor dimension");
  }
  const Matrix r = local * split.reshape(cols);
  const auto outer = static_cast<Eigen::Index>(split.outer_dim());
  Matrix out(cols.rows(), cols.cols());
  for (Eigen::Index z = 0; z < cols.cols(); ++z) {
    for (std::size_t g = 0; g < split.total_dim(); ++g) {
      out(static_cast<Eigen::Index>(g), z) = r(split.inner(g), z * outer + split.outer(g));
    }
  }
  return out;
}

/// An operator on a TensorSpace that acts as a dense matrix on a few target
/// factors and as the identity on the rest. The local matrix is stored in the
/// basis of the targets taken in space order.
class Operator {
 public:
  Operator() = default;

  /// Local matrix given in the basis of labels as listed, first label most
  /// significant.
  Operator(const TensorSpace& space, const std::vector<std::string>& labels, const Matrix& local)
      : space_(space) {
    std::vector<std::size_t> given;
    for (const auto& l : labels) given.push_back(space.index_of(l));
    init(given, local);
  }

  static Operator on_factors(const TensorSpace& space, const std::vector<std::size_t>& factor_indices,
                             const Matrix& local) {
    Operator op;
    op.space_ = space;
    op.init(factor_indices, local);
    return op;
  }

  /// Operator given as a full matrix on the whole space.
  static Operator dense(const TensorSpace& space, const Matrix& full) {
    std::vector<std::size_t> all(space.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return on_factors(space, all, full);
  }

  static Operator identity(const TensorSpace& space) {
    return on_factors(space, {}, Matrix::Identity(1, 1));
  }

  const TensorSpace& space() const { return space_; }
  const std::vector<std::size_t>& targets() const { return targets_; }
  const Matrix& local() const { return local_; }
  std::vector<std::string> target_labels() const { return Fragment::from_indices(space_, targets_).labels(); }

  Matrix apply(const Matrix& cols) const {
    check_rows(cols);
    if (targets_.empty()) return local_(0, 0) * cols;
    if (targets_.size() == space_.size()) return local_ * cols;
    return apply_local(*split_, local_, cols);
  }

  Matrix apply_adjoint(const Matrix& cols) const { return adjoint().apply(cols); }

  Operator adjoint() const {
    Operator out = *this;
    out.local_ = local_.adjoint();
    return out;
  }

  /// Same operator written on a superset of its targets.
  Operator widened(const std::vector<std::size_t>& factor_indices) const {
    std::vector<std::size_t> u = targets_;
    u.insert(u.end(), factor_indices.begin(), factor_indices.end());
    const Fragment frag = Fragment::from_indices(space_, u);
    if (frag.indices() == targets_) return *this;
    const TensorSpace sub = frag.subspace();
    std::vector<std::size_t> inner;
    for (std::size_t i = 0; i < frag.size(); ++i) {
      if (std::binary_search(targets_.begin(), targets_.end(), frag.indices()[i])) inner.push_back(i);
    }
    const IndexSplit split(sub, inner);
    const auto d = static_cast<Eigen::Index>(sub.total_dim());
    Matrix big = Matrix::Zero(d, d);
    for (std::size_t g = 0; g < sub.total_dim(); ++g) {
      for (std::size_t h = 0; h < sub.total_dim(); ++h) {
        if (split.outer(g) == split.outer(h)) big(g, h) = local_(split.inner(g), split.inner(h));
      }
    }
    return on_factors(space_, frag.indices(), big);
  }

  Matrix to_dense() const {
    const auto n = static_cast<Eigen::Index>(space_.total_dim());
    return apply(Matrix::Identity(n, n));
  }

  Operator operator*(const Operator& rhs) const {
    if (!(space_ == rhs.space_)) throw InvariantError("operator product across different spaces");
    const Operator a = widened(rhs.targets_);
    const Operator b = rhs.widened(targets_);
    Operator out = a;
    out.local_ = a.local_ * b.local_;
    return out;
  }

  Operator operator+(const Operator& rhs) const {
    if (!(space_ == rhs.space_)) throw InvariantError("operator sum across different spaces");
    const Operator a = widened(rhs.targets_);
    const Operator b = rhs.widened(targets_);
    Operator out = a;
    out.local_ = a.local_ + b.local_;
    return out;
  }

  Operator operator-(const Operator& rhs) const { return *this + rhs.scaled(-1.0); }

  Operator scaled(Complex c) const {
    Operator out = *this;
    out.local_ *= c;
    return out;
  }

 private:
  void init(const std::vector<std::size_t>& given, const Matrix& local) {
    std::size_t d = 1;
    for (std::size_t i : given) {
      if (i >= space_.size()) throw InvariantError("operator target out of range");
      d *= space_.dim(i);
    }
    if (local.rows() != local.cols() || static_cast<std::size_t>(local.rows()) != d) {
      throw InvariantError("operator matrix is " + std::to_string(local.rows()) + "x" +
                           std::to_string(local.cols()) + ", targets need " + std::to_string(d));
    }
    targets_ = given;
    std::sort(targets_.begin(), targets_.end());
    if (std::adjacent_find(targets_.begin(), targets_.end()) != targets_.end()) {
      throw InvariantError("operator targets repeat a factor");
    }
    if (targets_ == given) {
      local_ = local;
    } else {
      // sorted-order basis index -> given-order basis index
      const TensorSpace sorted_sub = space_.restrict_to(targets_);
      std::vector<std::size_t> pos;
      for (std::size_t i : given) pos.push_back(std::lower_bound(targets_.begin(), targets_.end(), i) - targets_.begin());
      std::vector<Eigen::Index> perm(d);
      for (std::size_t s = 0; s < d; ++s) {
        std::size_t g = 0;
        for (std::size_t k = 0; k < given.size(); ++k) {
          const std::size_t digit = (s / sorted_sub.stride(pos[k])) % sorted_sub.dim(pos[k]);
          g = g * space_.dim(given[k]) + digit;
        }
        perm[s] = static_cast<Eigen::Index>(g);
      }
      local_.resize(local.rows(), local.cols());
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) local_(r, c) = local(perm[r], perm[c]);
      }
    }
    if (!targets_.empty() && targets_.size() < space_.size()) split_ = std::make_shared<const IndexSplit>(space_, targets_);
  }

  void check_rows(const Matrix& cols) const {
    if (static_cast<std::size_t>(cols.rows()) != space_.total_dim()) {
      throw InvariantError("operator applied to a vector of the wrong dimension");
    }
  }

  TensorSpace space_;
  std::vector<std::size_t> targets_;
  Matrix local_ = Matrix::Identity(1, 1);
  std::shared_ptr<const IndexSplit> split_;
};

}  // namespace qhist
