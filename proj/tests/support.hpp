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

// Test helpers: random instances plus naive reference computations that
// share no code with the library beyond the Eigen types.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "qhist/qhist.hpp"

namespace qhist::testing {

// ---- naive reference ----------------------------------------------------

inline std::vector<std::size_t> digits(std::size_t index, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    d[i] = index % dims[i];
    index /= dims[i];
  }
  return d;
}

inline std::size_t undigits(const std::vector<std::size_t>& d, const std::vector<std::size_t>& dims) {
  std::size_t x = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) x = x * dims[i] + d[i];
  return x;
}

inline std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

/// local acts on the factors listed in targets, in that order.
inline Matrix naive_embed(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& targets,
                          const Matrix& local) {
  const std::size_t n = product(dims);
  std::vector<std::size_t> tdims;
  for (auto t : targets) tdims.push_back(dims[t]);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = digits(i, dims);
    for (std::size_t j = 0; j < n; ++j) {
      const auto dj = digits(j, dims);
      bool rest_equal = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (std::find(targets.begin(), targets.end(), k) == targets.end() && di[k] != dj[k]) rest_equal = false;
      }
      if (!rest_equal) continue;
      std::vector<std::size_t> li, lj;
      for (auto t : targets) {
        li.push_back(di[t]);
        lj.push_back(dj[t]);
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          local(static_cast<Eigen::Index>(undigits(li, tdims)), static_cast<Eigen::Index>(undigits(lj, tdims)));
    }
  }
  return out;
}

inline Matrix naive_mul(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Complex s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

inline Matrix naive_adjoint(const Matrix& a) {
  Matrix c(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  }
  return c;
}

inline Matrix naive_partial_trace(const Matrix& rho, const std::vector<std::size_t>& dims,
                                  const std::vector<std::size_t>& keep) {
  std::vector<std::size_t> kdims, tdims, traced;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (std::find(keep.begin(), keep.end(), k) != keep.end()) continue;
    traced.push_back(k);
    tdims.push_back(dims[k]);
  }
  for (auto k : keep) kdims.push_back(dims[k]);
  const std::size_t n = product(dims);
  // group global indices by their traced digits
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> groups(product(tdims));
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = digits(i, dims);
    std::vector<std::size_t> kd, td;
    for (auto k : keep) kd.push_back(d[k]);
    for (auto k : traced) td.push_back(d[k]);
    groups[undigits(td, tdims)].emplace_back(i, undigits(kd, kdims));
  }
  const auto m = static_cast<Eigen::Index>(product(kdims));
  Matrix out = Matrix::Zero(m, m);
  for (const auto& g : groups) {
    for (const auto& [gi, ki] : g) {
      for (const auto& [gj, kj] : g) {
        out(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(kj)) +=
            rho(static_cast<Eigen::Index>(gi), static_cast<Eigen::Index>(gj));
      }
    }
  }
  return out;
}

// ---- random instances ----------------------------------------------------

struct RawGate {
  std::vector<std::size_t> targets;
  Matrix local;
};

struct RawFamily {
  std::size_t time = 0;
  std::vector<std::size_t> targets;
  std::vector<Matrix> locals;
};

/// A history set together with the raw data it was built from.
struct Instance {
  std::vector<std::size_t> dims;
  std::vector<std::vector<RawGate>> steps;
  std::vector<RawFamily> families;
  Matrix rho0;
  Matrix k0;
  bool pure = true;

  TensorSpace space() const {
    std::vector<Factor> fs;
    for (std::size_t i = 0; i < dims.size(); ++i) fs.push_back({"q" + std::to_string(i), dims[i]});
    return TensorSpace(fs);
  }

  std::vector<std::string> labels(const std::vector<std::size_t>& idx) const {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back("q" + std::to_string(i));
    return out;
  }

  HistorySet history_set() const {
    const TensorSpace sp = space();
    std::vector<std::vector<Operator>> ops;
    for (const auto& step : steps) {
      std::vector<Operator> gs;
      for (const auto& g : step) gs.emplace_back(sp, labels(g.targets), g.local);
      ops.push_back(std::move(gs));
    }
    std::vector<ProjectorFamily> fams;
    for (const auto& f : families) {
      std::vector<Operator> ps;
      for (const auto& p : f.locals) ps.emplace_back(sp, labels(f.targets), p);
      fams.emplace_back(f.time, std::move(ps));
    }
    QState init = pure ? QState::pure(sp, k0.col(0)) : QState::from_factor(sp, k0);
    return HistorySet(Schedule(sp, std::move(ops)), std::move(fams), std::move(init));
  }
};

inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t min_size, Rng& rng) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(min_size, n)(rng);
  all.resize(k);
  return all;  // unsorted on purpose: exercises target permutation
}

/// Random orthogonal family on targets: a Haar basis split into groups.
inline std::vector<Matrix> random_projectors(std::size_t dim, Rng& rng) {
  const Matrix v = haar_unitary(static_cast<Eigen::Index>(dim), rng);
  const std::size_t groups = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(dim, 3))(rng);
  std::vector<std::size_t> owner(dim);
  for (std::size_t i = 0; i < dim; ++i) owner[i] = i < groups ? i : std::uniform_int_distribution<std::size_t>(0, groups - 1)(rng);
  std::vector<Matrix> out(groups, Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
  for (std::size_t i = 0; i < dim; ++i) {
    const auto c = v.col(static_cast<Eigen::Index>(i));
    out[owner[i]] += c * c.adjoint();
  }
  return out;
}

/// n qubits, one step per event plus optional trailing steps; each step
/// holds one or two random gates.
inline Instance random_instance(std::size_t qubits, std::size_t events, bool pure, Rng& rng,
                                std::size_t trailing = 0) {
  Instance in;
  in.dims.assign(qubits, 2);
  in.pure = pure;
  const std::size_t n = product(in.dims);
  for (std::size_t s = 0; s < events + trailing; ++s) {
    std::vector<RawGate> step;
    const std::size_t gates = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
    for (std::size_t g = 0; g < gates; ++g) {
      RawGate gate;
      gate.targets = random_subset(qubits, 1, rng);
      gate.local = haar_unitary(static_cast<Eigen::Index>(std::size_t{1} << gate.targets.size()), rng);
      step.push_back(std::move(gate));
    }
    in.steps.push_back(std::move(step));
  }
  for (std::size_t m = 0; m < events; ++m) {
    RawFamily f;
    f.time = m + 1;
    f.targets = random_subset(qubits, 1, rng);
    f.locals = random_projectors(std::size_t{1} << f.targets.size(), rng);
    in.families.push_back(std::move(f));
  }
  if (pure) {
    in.k0 = random_unit_vector(static_cast<Eigen::Index>(n), rng);
  } else {
    const Eigen::Index rank = std::uniform_int_distribution<Eigen::Index>(2, static_cast<Eigen::Index>(n))(rng);
    in.k0 = ginibre(static_cast<Eigen::Index>(n), rank, rng);
    in.k0 /= in.k0.norm();
  }
  in.rho0 = naive_mul(in.k0, naive_adjoint(in.k0));
  return in;
}

/// D(alpha, beta) by inserting the projectors into the explicit step-by-step
/// evolution of rho0, Schroedinger picture, no caching.
inline Matrix naive_decoherence_functional(const Instance& in) {
  std::vector<Matrix> step_u;
  const std::size_t n = product(in.dims);
  for (const auto& step : in.steps) {
    Matrix u = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& g : step) u = naive_mul(naive_embed(in.dims, g.targets, g.local), u);
    step_u.push_back(u);
  }
  std::vector<std::vector<Matrix>> proj;
  std::size_t histories = 1;
  for (const auto& f : in.families) {
    std::vector<Matrix> ps;
    for (const auto& p : f.locals) ps.push_back(naive_embed(in.dims, f.targets, p));
    proj.push_back(ps);
    histories *= ps.size();
  }
  std::vector<Matrix> amp;
  for (std::size_t h = 0; h < histories; ++h) {
    std::vector<std::size_t> alpha(in.families.size());
    std::size_t x = h;
    for (std::size_t m = in.families.size(); m-- > 0;) {
      alpha[m] = x % proj[m].size();
      x /= proj[m].size();
    }
    Matrix k = in.k0;
    std::size_t t = 0;
    for (std::size_t m = 0; m < in.families.size(); ++m) {
      while (t < in.families[m].time) k = naive_mul(step_u[t++], k);
      k = naive_mul(proj[m][alpha[m]], k);
    }
    while (t < step_u.size()) k = naive_mul(step_u[t++], k);
    amp.push_back(k);
  }
  Matrix d(static_cast<Eigen::Index>(histories), static_cast<Eigen::Index>(histories));
  for (std::size_t a = 0; a < histories; ++a) {
    for (std::size_t b = 0; b < histories; ++b) {
      Complex s = 0.0;
      for (Eigen::Index i = 0; i < amp[a].rows(); ++i) {
        for (Eigen::Index j = 0; j < amp[a].cols(); ++j) s += amp[a](i, j) * std::conj(amp[b](i, j));
      }
      d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
    }
  }
  return d;
}

/// Raw data of a library-built history set, for the naive path.
inline Instance instance_of(const HistorySet& hs) {
  Instance in;
  for (const auto& f : hs.space().factors()) in.dims.push_back(f.dim);
  for (std::size_t s = 0; s < hs.schedule().duration(); ++s) {
    std::vector<RawGate> step;
    for (const auto& g : hs.schedule().step(s)) step.push_back({g.targets(), g.local()});
    in.steps.push_back(std::move(step));
  }
  for (const auto& f : hs.families()) {
    RawFamily rf;
    rf.time = f.time;
    rf.targets = f.projectors.front().targets();
    for (const auto& p : f.projectors) {
      // widen to a common target list
      if (p.targets() != rf.targets) rf.targets.clear();
    }
    if (rf.targets.empty()) {
      for (std::size_t i = 0; i < in.dims.size(); ++i) rf.targets.push_back(i);
      for (const auto& p : f.projectors) rf.locals.push_back(p.to_dense());
    } else {
      for (const auto& p : f.projectors) rf.locals.push_back(p.local());
    }
    in.families.push_back(std::move(rf));
  }
  in.k0 = hs.initial_factor();
  in.pure = hs.is_pure();
  in.rho0 = naive_mul(in.k0, naive_adjoint(in.k0));
  return in;
}

/// Every non-empty proper subset of n factors, as index lists.
inline std::vector<std::vector<std::size_t>> all_cuts(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> c;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) c.push_back(i);
    }
    out.push_back(c);
  }
  return out;
}

inline Fragment fragment_of(const TensorSpace& space, const std::vector<std::size_t>& idx) {
  return Fragment::from_indices(space, idx);
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace qhist::testing
