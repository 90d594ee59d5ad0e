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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/core/tolerances.hpp"
#include "qhist/hilbert/state.hpp"
#include "qhist/hilbert/tensor_space.hpp"
#include "qhist/histories/projector_family.hpp"
#include "qhist/histories/schedule.hpp"

namespace qhist {

/// alpha = (a_1, ..., a_M), one outcome index per event.
using History = std::vector<std::size_t>;

/// A decomposition of the global state at one time into branches. Branch j
/// is stored as a factor B_j with C_j rho C_j^dagger = B_j B_j^dagger; for a
/// pure state B_j is the branch vector C_j |psi>.
struct BranchSet {
  TensorSpace space;
  std::vector<std::string> labels;
  std::vector<Matrix> factors;
  Matrix state;  // K with rho = K K^dagger at the same time
  bool pure = true;
  std::size_t eval_time = 0;
  Tolerances tol;

  std::size_t size() const { return factors.size(); }

  double probability(std::size_t j) const { return factors.at(j).squaredNorm(); }

  std::vector<double> probabilities() const {
    std::vector<double> out;
    for (const auto& f : factors) out.push_back(f.squaredNorm());
    return out;
  }

  /// Tr[B_a B_b^dagger].
  Complex overlap(std::size_t a, std::size_t b) const {
    return (factors.at(a).array() * factors.at(b).array().conjugate()).sum();
  }
};

struct HistorySetOptions {
  std::vector<std::string> system_labels;
  std::vector<std::string> auxiliary_labels;  // never used as environment fragments
  Tolerances tolerances;
};

/// Schedule, event families and initial state. Immutable once built; branch
/// factors are computed lazily per evaluation time and shared between copies.
class HistorySet {
 public:
  HistorySet(Schedule schedule, std::vector<ProjectorFamily> families, QState initial,
             HistorySetOptions options = {})
      : schedule_(std::move(schedule)),
        families_(std::move(families)),
        initial_(std::move(initial)),
        options_(std::move(options)),
        cache_(std::make_shared<Cache>()) {
    const auto& tol = options_.tolerances;
    if (!(initial_.space() == schedule_.space())) throw InvariantError("initial state and schedule use different spaces");
    if (!initial_.normalized()) throw InvariantError("initial state must be normalized");
    if (families_.empty()) throw InvariantError("a history set needs at least one event");
    for (std::size_t m = 0; m < families_.size(); ++m) {
      if (m > 0 && families_[m].time <= families_[m - 1].time) {
        throw InvariantError("event times must be strictly increasing");
      }
      if (families_[m].time > schedule_.duration()) {
        throw InvariantError("event at t=" + std::to_string(families_[m].time) + " lies beyond the schedule");
      }
      families_[m].validate(space(), tol);
    }
    for (const auto& l : options_.system_labels) space().index_of(l);
    for (const auto& l : options_.auxiliary_labels) space().index_of(l);
    initial_factor_ = initial_.factor();
  }

  const TensorSpace& space() const { return schedule_.space(); }
  const Schedule& schedule() const { return schedule_; }
  const std::vector<ProjectorFamily>& families() const { return families_; }
  const ProjectorFamily& family(std::size_t m) const { return families_.at(m); }
  const QState& initial_state() const { return initial_; }
  const Tolerances& tolerances() const { return options_.tolerances; }
  const HistorySetOptions& options() const { return options_; }
  const std::vector<std::string>& system_labels() const { return options_.system_labels; }
  const std::vector<std::string>& auxiliary_labels() const { return options_.auxiliary_labels; }
  bool is_pure() const { return initial_.is_pure(); }

  std::size_t num_events() const { return families_.size(); }
  std::size_t final_time() const { return families_.back().time; }
  std::size_t duration() const { return schedule_.duration(); }

  std::size_t num_histories() const {
    std::size_t n = 1;
    for (const auto& f : families_) n *= f.size();
    return n;
  }

  /// Lexicographic order, a_1 most significant.
  History decode(std::size_t flat) const {
    History alpha(families_.size());
    for (std::size_t m = families_.size(); m-- > 0;) {
      alpha[m] = flat % families_[m].size();
      flat /= families_[m].size();
    }
    return alpha;
  }

  std::size_t encode(const History& alpha) const {
    check_history(alpha);
    std::size_t flat = 0;
    for (std::size_t m = 0; m < families_.size(); ++m) flat = flat * families_[m].size() + alpha[m];
    return flat;
  }

  void check_history(const History& alpha) const {
    if (alpha.size() != families_.size()) {
      throw PreconditionError("history has " + std::to_string(alpha.size()) + " entries, expected " +
                              std::to_string(families_.size()));
    }
    for (std::size_t m = 0; m < alpha.size(); ++m) {
      if (alpha[m] >= families_[m].size()) {
        throw PreconditionError("history index " + std::to_string(alpha[m]) + " out of range at event " +
                                std::to_string(m + 1));
      }
    }
  }

  /// Outcome labels concatenated; separated by '.' unless all are single characters.
  std::string label(const History& alpha) const {
    bool compact = true;
    for (const auto& f : families_) {
      for (const auto& l : f.labels) compact = compact && l.size() == 1;
    }
    std::string out;
    for (std::size_t m = 0; m < alpha.size(); ++m) {
      if (m > 0 && !compact) out += '.';
      out += families_[m].labels.at(alpha[m]);
    }
    return out;
  }

  std::string label(std::size_t flat) const { return label(decode(flat)); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < num_histories(); ++i) out.push_back(label(i));
    return out;
  }

  std::optional<std::size_t> find(const std::string& lbl) const {
    for (std::size_t i = 0; i < num_histories(); ++i) {
      if (label(i) == lbl) return i;
    }
    return std::nullopt;
  }

  std::size_t resolve_time(std::optional<std::size_t> eval_time) const {
    const std::size_t t = eval_time.value_or(final_time());
    if (t < final_time()) {
      throw PreconditionError("evaluation time " + std::to_string(t) + " precedes the last event at t=" +
                              std::to_string(final_time()));
    }
    if (t > duration()) {
      throw PreconditionError("evaluation time " + std::to_string(t) + " beyond schedule duration " +
                              std::to_string(duration()));
    }
    return t;
  }

  /// K_t with rho(t) = K_t K_t^dagger.
  Matrix state_factor(std::size_t t) const { return schedule_.evolve(initial_factor_, 0, t); }
  const Matrix& initial_factor() const { return initial_factor_; }

  /// Rebuilt (and revalidated) under other tolerances.
  HistorySet with_tolerances(const Tolerances& tol) const {
    HistorySetOptions opt = options_;
    opt.tolerances = tol;
    return HistorySet(schedule_, families_, initial_, std::move(opt));
  }

  /// The same set restricted to the events at or before t.
  HistorySet truncated(std::size_t t) const {
    std::vector<ProjectorFamily> kept;
    for (const auto& f : families_) {
      if (f.time <= t) kept.push_back(f);
    }
    if (kept.empty()) throw PreconditionError("no event at or before t=" + std::to_string(t));
    return HistorySet(schedule_, std::move(kept), initial_, options_);
  }

  /// Branch factors C_alpha K_t for all histories, in lexicographic order.
  std::shared_ptr<const BranchSet> branches(std::optional<std::size_t> eval_time = std::nullopt) const {
    const std::size_t t = resolve_time(eval_time);
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->branches.find(t);
      if (it != cache_->branches.end()) return it->second;
    }
    auto computed = std::make_shared<const BranchSet>(compute_branches(t));
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->branches.emplace(t, std::move(computed)).first->second;
  }

  /// Dense C_alpha = U(t<-t_M) P_M ... U(t_2<-t_1) P_1 U(t_1<-0) U(t<-0)^dagger,
  /// the product of Heisenberg projectors referred to time t.
  std::shared_ptr<const Matrix> class_operator(const History& alpha, std::optional<std::size_t> eval_time = std::nullopt) const {
    const std::size_t t = resolve_time(eval_time);
    const std::size_t flat = encode(alpha);
    const auto key = std::make_pair(flat, t);
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->class_operators.find(key);
      if (it != cache_->class_operators.end()) return it->second;
    }
    const auto n = static_cast<Eigen::Index>(space().total_dim());
    Matrix x = schedule_.evolve_adjoint(Matrix::Identity(n, n), 0, t);
    std::size_t now = 0;
    for (std::size_t m = 0; m < families_.size(); ++m) {
      x = families_[m].projectors[alpha[m]].apply(schedule_.evolve(std::move(x), now, families_[m].time));
      now = families_[m].time;
    }
    auto computed = std::make_shared<const Matrix>(schedule_.evolve(std::move(x), now, t));
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->class_operators.emplace(key, std::move(computed)).first->second;
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::map<std::size_t, std::shared_ptr<const BranchSet>> branches;
    std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Matrix>> class_operators;
  };

  BranchSet compute_branches(std::size_t t) const {
    std::vector<Matrix> level{initial_factor_};
    std::size_t now = 0;
    for (const auto& fam : families_) {
      std::vector<Matrix> next;
      next.reserve(level.size() * fam.size());
      for (auto& b : level) {
        const Matrix moved = schedule_.evolve(std::move(b), now, fam.time);
        for (const auto& p : fam.projectors) next.push_back(p.apply(moved));
      }
      level = std::move(next);
      now = fam.time;
    }
    for (auto& b : level) b = schedule_.evolve(std::move(b), now, t);
    BranchSet out;
    out.space = space();
    out.labels = labels();
    out.factors = std::move(level);
    out.state = state_factor(t);
    out.pure = is_pure();
    out.eval_time = t;
    out.tol = tolerances();
    return out;
  }

  Schedule schedule_;
  std::vector<ProjectorFamily> families_;
  QState initial_;
  HistorySetOptions options_;
  Matrix initial_factor_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace qhist
