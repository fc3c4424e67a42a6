#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sublin/error.hpp"
#include "sublin/lp.hpp"
#include "sublin/measures.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

/// Finitely many joint probability tables over a common product grid.
///
/// Tables are flat and row-major: the first variable varies slowest.
template <Scalar T>
class JointModel {
 public:
  JointModel(std::vector<std::string> names, std::vector<std::vector<T>> supports,
             std::vector<std::vector<T>> tables)
      : names_(std::move(names)), supports_(std::move(supports)), tables_(std::move(tables)) {
    if (supports_.empty()) throw Error(ErrorKind::invalid_model, "joint model without variables");
    if (names_.empty()) {
      for (std::size_t k = 0; k < supports_.size(); ++k) names_.push_back("X" + std::to_string(k + 1));
    }
    if (names_.size() != supports_.size()) {
      throw Error(ErrorKind::invalid_model, "variables and supports differ in length");
    }
    cells_ = 1;
    for (const auto& s : supports_) {
      if (s.empty()) throw Error(ErrorKind::invalid_model, "empty support");
      for (std::size_t i = 0; i < s.size(); ++i) {
        require_finite(s[i], "support value");
        for (std::size_t j = 0; j < i; ++j) {
          if (s[i] == s[j]) throw Error(ErrorKind::invalid_model, "duplicate support value");
        }
      }
      cells_ *= s.size();
    }
    if (tables_.empty()) throw Error(ErrorKind::invalid_model, "joint model without measures");
    for (const auto& t : tables_) {
      if (t.size() != cells_) throw Error(ErrorKind::invalid_model, "table does not match support grid");
      Accumulator<T> total;
      for (const auto& w : t) {
        require_finite(w, "table weight");
        if (w < 0) throw Error(ErrorKind::invalid_model, "negative table weight");
        total.add(w);
      }
      const T dev = abs_value<T>(total.value() - T(1));
      bool ok;
      if constexpr (NumericTraits<T>::exact) {
        ok = dev == 0;
      } else {
        ok = dev <= NumericTraits<T>::weight_tol;
      }
      if (!ok) throw Error(ErrorKind::invalid_model, "table weights do not sum to 1");
    }
  }

  [[nodiscard]] std::size_t num_variables() const noexcept { return supports_.size(); }
  [[nodiscard]] std::size_t num_measures() const noexcept { return tables_.size(); }
  [[nodiscard]] std::size_t num_cells() const noexcept { return cells_; }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] const std::vector<T>& support(std::size_t k) const { return supports_.at(k); }
  [[nodiscard]] const std::vector<std::vector<T>>& supports() const noexcept { return supports_; }
  [[nodiscard]] const std::vector<T>& table(std::size_t i) const { return tables_.at(i); }
  [[nodiscard]] const std::vector<std::vector<T>>& tables() const noexcept { return tables_; }

  /// Number of cells in the grid of the first `count` variables.
  [[nodiscard]] std::size_t prefix_cells(std::size_t count) const {
    std::size_t c = 1;
    for (std::size_t k = 0; k < count; ++k) c *= supports_[k].size();
    return c;
  }

  /// Support indices of a prefix cell (first variable slowest).
  [[nodiscard]] std::vector<std::size_t> unravel(std::size_t cell, std::size_t count) const {
    std::vector<std::size_t> idx(count);
    for (std::size_t k = count; k-- > 0;) {
      idx[k] = cell % supports_[k].size();
      cell /= supports_[k].size();
    }
    return idx;
  }

  [[nodiscard]] std::vector<T> values_of(std::size_t cell, std::size_t count) const {
    const auto idx = unravel(cell, count);
    std::vector<T> v;
    v.reserve(count);
    for (std::size_t k = 0; k < count; ++k) v.push_back(supports_[k][idx[k]]);
    return v;
  }

  /// Law of (X_1..X_count) under measure i, as a vector over prefix cells.
  [[nodiscard]] std::vector<T> prefix_marginal(std::size_t i, std::size_t count) const {
    const std::size_t pc = prefix_cells(count);
    const std::size_t tail = cells_ / pc;
    std::vector<T> out(pc, T(0));
    const auto& t = tables_.at(i);
    for (std::size_t c = 0; c < cells_; ++c) out[c / tail] += t[c];
    return out;
  }

  /// Law of the single variable k (0-based) under measure i.
  [[nodiscard]] std::vector<T> marginal(std::size_t i, std::size_t k) const {
    const std::size_t inner = cells_ / prefix_cells(k + 1);
    const std::size_t size = supports_[k].size();
    std::vector<T> out(size, T(0));
    const auto& t = tables_.at(i);
    for (std::size_t c = 0; c < cells_; ++c) out[(c / inner) % size] += t[c];
    return out;
  }

  [[nodiscard]] std::size_t index_of(std::size_t k, const T& value) const {
    const auto& s = supports_.at(k);
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] == value) return j;
    }
    throw Error(ErrorKind::usage, "value is not in the support of " + names_[k]);
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<T>> supports_;
  std::vector<std::vector<T>> tables_;
  std::size_t cells_ = 0;
};

/// A test function on (x_1, ..., x_n).
template <Scalar T>
struct Probe {
  std::string name;
  std::function<T(std::span<const T>)> fn;
};

template <Scalar T>
struct ProbeOutcome {
  std::string name;
  T lhs;  // E[phi(X_1..X_n)]
  T rhs;  // E[E[phi(x, X_n)]|x=(X_1..X_{n-1})]
};

template <Scalar T>
struct IndependenceWitness {
  std::size_t measure = 0;        // measure or vertex index that violates
  std::vector<T> history;         // conditioning values, when relevant
  std::vector<T> direction;       // separating test function values
  std::string probe;              // refuting probe name (probe mode)
};

template <Scalar T>
struct IndependenceReport {
  bool verdict = true;
  // False when probe mode found no refutation, which proves nothing.
  bool definitive = true;
  std::optional<IndependenceWitness<T>> witness;
  T gap{0};
  std::vector<ProbeOutcome<T>> probes;
};

namespace detail {

template <Scalar T>
std::vector<std::vector<T>> step_marginals(const JointModel<T>& model, std::size_t var) {
  std::vector<std::vector<T>> out;
  for (std::size_t i = 0; i < model.num_measures(); ++i) out.push_back(model.marginal(i, var));
  return out;
}

template <Scalar T>
std::vector<std::vector<T>> select(const std::vector<std::vector<T>>& pts,
                                   const std::vector<std::size_t>& idx) {
  std::vector<std::vector<T>> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(pts[i]);
  return out;
}

inline void require_step(std::size_t step, std::size_t num_variables) {
  if (step < 1 || step > num_variables) {
    throw Error(ErrorKind::usage, "step must lie in [1, number of variables]");
  }
}

}  // namespace detail

/// E_P[f(X_n) | X_1..X_{n-1} = history], n = history.size() + 1.
template <Scalar T>
[[nodiscard]] T conditional_expectation(const JointModel<T>& model, std::size_t measure,
                                        const RealFunction<T>& f, std::span<const T> history) {
  const std::size_t n = history.size() + 1;
  detail::require_step(n, model.num_variables());
  if (measure >= model.num_measures()) throw Error(ErrorKind::usage, "measure index out of range");
  std::size_t h = 0;
  for (std::size_t k = 0; k < history.size(); ++k) {
    h = h * model.support(k).size() + model.index_of(k, history[k]);
  }
  const auto joint = model.prefix_marginal(measure, n);
  const auto& ys = model.support(n - 1);
  Accumulator<T> mass;
  Accumulator<T> acc;
  for (std::size_t y = 0; y < ys.size(); ++y) {
    const T& w = joint[h * ys.size() + y];
    mass.add(w);
    if (w != 0) acc.add(w * f(ys[y]));
  }
  if (mass.value() == 0) {
    throw Error(ErrorKind::null_history, "conditioning history has probability zero");
  }
  T value = acc.value() / mass.value();
  require_finite(value, "conditional expectation");
  return value;
}

/// Decides pseudo-independence of X_n from (X_1..X_{n-1}) by checking that
/// every conditional law of X_n under every measure lies in the convex hull
/// of the marginal laws of X_n. Null histories are skipped.
template <Scalar T>
[[nodiscard]] IndependenceReport<T> check_pseudo_independence(const JointModel<T>& model,
                                                              std::size_t step) {
  detail::require_step(step, model.num_variables());
  const std::size_t var = step - 1;
  const auto marginals = detail::step_marginals(model, var);
  const auto hull = detail::select(marginals, hull_vertex_indices(marginals));
  const std::size_t ny = model.support(var).size();
  const std::size_t histories = model.prefix_cells(var);

  IndependenceReport<T> report;
  for (std::size_t i = 0; i < model.num_measures(); ++i) {
    const auto joint = model.prefix_marginal(i, step);
    for (std::size_t h = 0; h < histories; ++h) {
      Accumulator<T> mass;
      for (std::size_t y = 0; y < ny; ++y) mass.add(joint[h * ny + y]);
      const T total = mass.value();
      if (total == 0) continue;
      std::vector<T> cond(ny);
      for (std::size_t y = 0; y < ny; ++y) cond[y] = joint[h * ny + y] / total;
      auto sep = separate<T>(cond, hull);
      if (sep.gap > report.gap) {
        report.gap = sep.gap;
        if (sep.gap > zero_tolerance<T>()) {
          report.verdict = false;
          report.witness = IndependenceWitness<T>{i, model.values_of(h, var), std::move(sep.direction), {}};
        }
      }
    }
  }
  return report;
}

/// Default probe family for step n: hat functions of each coordinate at each
/// support point (indicators on the grid), their products over all
/// coordinates, and the equality indicator of the last two coordinates.
template <Scalar T>
[[nodiscard]] std::vector<Probe<T>> default_probes(const JointModel<T>& model, std::size_t step) {
  detail::require_step(step, model.num_variables());
  std::vector<T> width(step);
  for (std::size_t k = 0; k < step; ++k) {
    auto s = model.support(k);
    std::sort(s.begin(), s.end());
    T w = s.size() > 1 ? T(s[1] - s[0]) : T(1);
    for (std::size_t j = 2; j < s.size(); ++j) w = std::min<T>(w, s[j] - s[j - 1]);
    width[k] = w;
  }
  auto hat = [](const T& x, const T& centre, const T& w) {
    T v = T(1) - abs_value<T>(x - centre) / w;
    return v > 0 ? v : T(0);
  };

  std::vector<Probe<T>> probes;
  for (std::size_t k = 0; k < step; ++k) {
    for (const auto& c : model.support(k)) {
      probes.push_back({"hat(" + model.names()[k] + ")",
                        [k, c, w = width[k], hat](std::span<const T> x) { return hat(x[k], c, w); }});
    }
  }
  const std::size_t cells = model.prefix_cells(step);
  if (step > 1 && cells <= 4096) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      auto centre = model.values_of(cell, step);
      probes.push_back({"hat-product", [centre, width, hat](std::span<const T> x) {
                          T v(1);
                          for (std::size_t k = 0; k < centre.size(); ++k) v *= hat(x[k], centre[k], width[k]);
                          return v;
                        }});
    }
  }
  if (step > 1) {
    const T w = std::min(width[step - 2], width[step - 1]);
    probes.push_back({"equality", [step, w, hat](std::span<const T> x) {
                        return hat(x[step - 2], x[step - 1], w);
                      }});
  }
  return probes;
}

/// Both sides of the sequential-independence identity for one probe.
template <Scalar T>
[[nodiscard]] ProbeOutcome<T> evaluate_probe(const JointModel<T>& model, std::size_t step,
                                             const Probe<T>& probe) {
  detail::require_step(step, model.num_variables());
  const std::size_t var = step - 1;
  const std::size_t ny = model.support(var).size();
  const std::size_t histories = model.prefix_cells(var);
  const std::size_t cells = histories * ny;

  std::vector<T> phi(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    auto x = model.values_of(c, step);
    phi[c] = probe.fn(x);
    require_finite(phi[c], "probe");
  }

  ProbeOutcome<T> out{probe.name, T(0), T(0)};
  bool first = true;
  for (std::size_t i = 0; i < model.num_measures(); ++i) {
    const auto joint = model.prefix_marginal(i, step);
    Accumulator<T> acc;
    for (std::size_t c = 0; c < cells; ++c) {
      if (joint[c] != 0) acc.add(joint[c] * phi[c]);
    }
    T v = acc.value();
    if (first || v > out.lhs) out.lhs = v;
    first = false;
  }

  const auto marginals = detail::step_marginals(model, var);
  std::vector<T> inner(histories);
  for (std::size_t h = 0; h < histories; ++h) {
    bool init = false;
    for (const auto& q : marginals) {
      Accumulator<T> acc;
      for (std::size_t y = 0; y < ny; ++y) {
        if (q[y] != 0) acc.add(q[y] * phi[h * ny + y]);
      }
      T v = acc.value();
      if (!init || v > inner[h]) inner[h] = v;
      init = true;
    }
  }
  first = true;
  for (std::size_t i = 0; i < model.num_measures(); ++i) {
    const auto prefix = model.prefix_marginal(i, var);
    Accumulator<T> acc;
    for (std::size_t h = 0; h < histories; ++h) {
      if (prefix[h] != 0) acc.add(prefix[h] * inner[h]);
    }
    T v = acc.value();
    if (first || v > out.rhs) out.rhs = v;
    first = false;
  }
  return out;
}

enum class PengMode { probe, exact };

struct PengOptions {
  PengMode mode = PengMode::probe;
  // Exact mode: largest admissible grid (product of support sizes).
  std::size_t cell_cap = 10'000;
  // Exact mode: largest admissible number of enumerated vertices.
  std::size_t vertex_cap = 10'000;
};

namespace detail {

// Joint laws of (X_1..X_n) obtained by pairing each prefix law in `prefixes`
// with a choice of X_n-law per positive-probability history.
template <Scalar T>
std::vector<std::vector<T>> assemble_vertices(const std::vector<std::vector<T>>& prefixes,
                                              const std::vector<std::vector<T>>& choices,
                                              std::size_t cap) {
  std::vector<std::vector<T>> out;
  if (choices.empty()) return out;
  const std::size_t ny = choices.front().size();
  for (const auto& prefix : prefixes) {
    std::vector<std::size_t> positive;
    for (std::size_t h = 0; h < prefix.size(); ++h) {
      if (prefix[h] != 0) positive.push_back(h);
    }
    std::vector<std::size_t> pick(positive.size(), 0);
    for (;;) {
      if (out.size() >= cap) {
        throw Error(ErrorKind::model_too_large, "vertex enumeration exceeds the configured cap");
      }
      std::vector<T> joint(prefix.size() * ny, T(0));
      for (std::size_t p = 0; p < positive.size(); ++p) {
        const std::size_t h = positive[p];
        const auto& q = choices[pick[p]];
        for (std::size_t y = 0; y < ny; ++y) joint[h * ny + y] = prefix[h] * q[y];
      }
      if (std::find(out.begin(), out.end(), joint) == out.end()) out.push_back(std::move(joint));
      std::size_t p = 0;
      while (p < pick.size() && ++pick[p] == choices.size()) pick[p++] = 0;
      if (p == pick.size()) break;
    }
  }
  return out;
}

}  // namespace detail

/// Sequential (Peng) independence of X_n from (X_1..X_{n-1}).
///
/// Probe mode compares both sides of the identity on `probes` and can only
/// refute. Exact mode compares the convex hull of the joint laws with the
/// polytope that realizes the nested evaluation, by mutual vertex membership.
template <Scalar T>
[[nodiscard]] IndependenceReport<T> check_peng_independence(const JointModel<T>& model,
                                                            std::size_t step,
                                                            const PengOptions& options = {},
                                                            const std::vector<Probe<T>>& probes = {}) {
  detail::require_step(step, model.num_variables());
  IndependenceReport<T> report;
  if (options.mode == PengMode::probe) {
    const auto family = probes.empty() ? default_probes(model, step) : probes;
    for (const auto& probe : family) {
      auto outcome = evaluate_probe(model, step, probe);
      const T gap = abs_value<T>(outcome.rhs - outcome.lhs);
      if (gap > report.gap) {
        report.gap = gap;
        if (gap > zero_tolerance<T>()) {
          report.verdict = false;
          report.witness = IndependenceWitness<T>{0, {}, {}, outcome.name};
        }
      }
      report.probes.push_back(std::move(outcome));
    }
    // A refutation is conclusive; surviving every probe is not.
    report.definitive = !report.verdict;
    return report;
  }

  if (model.prefix_cells(step) > options.cell_cap) {
    throw Error(ErrorKind::model_too_large, "support grid exceeds the exact-mode cap");
  }
  const std::size_t var = step - 1;
  std::vector<std::vector<T>> joints;
  std::vector<std::vector<T>> prefixes;
  for (std::size_t i = 0; i < model.num_measures(); ++i) {
    joints.push_back(model.prefix_marginal(i, step));
    prefixes.push_back(model.prefix_marginal(i, var));
  }
  const auto marginals = detail::step_marginals(model, var);
  const auto choices = detail::select(marginals, hull_vertex_indices(marginals));
  const auto prefix_vertices = detail::select(prefixes, hull_vertex_indices(prefixes));
  const auto nested = detail::assemble_vertices(prefix_vertices, choices, options.vertex_cap);

  auto consider = [&](const std::vector<T>& point, const std::vector<std::vector<T>>& against,
                      std::size_t index) {
    auto sep = separate<T>(point, against);
    if (sep.gap > report.gap) {
      report.gap = sep.gap;
      if (sep.gap > zero_tolerance<T>()) {
        report.verdict = false;
        report.witness = IndependenceWitness<T>{index, {}, std::move(sep.direction), {}};
      }
    }
  };
  for (std::size_t v = 0; v < nested.size(); ++v) consider(nested[v], joints, v);
  for (std::size_t i = 0; i < joints.size(); ++i) consider(joints[i], nested, i);
  return report;
}

/// Extreme points of the enlargement: joints whose X_1-law lies in the hull
/// of the X_1-marginals and whose conditional law of every X_k given every
/// history lies in the hull of the X_k-marginals.
template <Scalar T>
[[nodiscard]] JointModel<T> enlarge_vertices(const JointModel<T>& model,
                                             std::size_t cell_cap = 10'000,
                                             std::size_t vertex_cap = 10'000) {
  if (model.num_cells() > cell_cap) {
    throw Error(ErrorKind::model_too_large, "support grid exceeds the enumeration cap");
  }
  const auto first = detail::step_marginals(model, 0);
  std::vector<std::vector<T>> current = detail::select(first, hull_vertex_indices(first));
  for (std::size_t var = 1; var < model.num_variables(); ++var) {
    const auto marginals = detail::step_marginals(model, var);
    const auto choices = detail::select(marginals, hull_vertex_indices(marginals));
    current = detail::assemble_vertices(current, choices, vertex_cap);
  }
  return JointModel<T>(model.names(), model.supports(), std::move(current));
}

}  // namespace sublin
