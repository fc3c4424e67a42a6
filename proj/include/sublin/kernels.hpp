#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version and
// an OpenMP version that performs the identical per-element computation, so
// results agree bit for bit.

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sublin/lattice.hpp"
#include "sublin/numeric.hpp"

namespace sublin::kernels {

enum class Exec { serial, parallel };

/// Position lookup over a sorted set of lattice indices: a dense offset
/// table when more than half of [min, max] is occupied, binary search
/// otherwise.
class Locator {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit Locator(std::span<const std::int64_t> keys) : keys_(keys) {
    if (keys_.empty()) return;
    lo_ = keys_.front();
    const auto range = static_cast<std::uint64_t>(keys_.back() - keys_.front()) + 1;
    if (2 * keys_.size() > range) {
      dense_.assign(range, -1);
      for (std::size_t i = 0; i < keys_.size(); ++i) {
        dense_[static_cast<std::size_t>(keys_[i] - lo_)] = static_cast<std::int32_t>(i);
      }
    }
  }

  [[nodiscard]] bool dense() const noexcept { return !dense_.empty(); }

  [[nodiscard]] std::size_t find(std::int64_t key) const noexcept {
    if (!dense_.empty()) {
      const std::int64_t off = key - lo_;
      if (off < 0 || static_cast<std::size_t>(off) >= dense_.size()) return npos;
      const std::int32_t pos = dense_[static_cast<std::size_t>(off)];
      return pos < 0 ? npos : static_cast<std::size_t>(pos);
    }
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return npos;
    return static_cast<std::size_t>(it - keys_.begin());
  }

 private:
  std::span<const std::int64_t> keys_;
  std::int64_t lo_ = 0;
  std::vector<std::int32_t> dense_;
};

/// One Bellman update at lattice point x:
///   out = max_m  sum_y Q_m(y) * next(x + y),  arg = first maximizer.
template <Scalar T>
inline void backward_point(std::int64_t x, const LatticeStep<T>& step, const Locator& next_loc,
                           std::span<const T> next, T& out, std::uint32_t& arg) {
  bool have = false;
  for (std::size_t m = 0; m < step.measures.size(); ++m) {
    const auto& lm = step.measures[m];
    Accumulator<T> acc;
    for (std::size_t a = 0; a < lm.offsets.size(); ++a) {
      acc.add(lm.weights[a] * next[next_loc.find(x + lm.offsets[a])]);
    }
    T v = acc.value();
    if (!have || v > out) {
      out = std::move(v);
      arg = static_cast<std::uint32_t>(m);
      have = true;
    }
  }
}

template <Scalar T>
void backward_step_serial(std::span<const std::int64_t> states, const LatticeStep<T>& step,
                          const Locator& next_loc, std::span<const T> next, std::span<T> out,
                          std::span<std::uint32_t> argmax) {
  std::uint32_t scratch = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    backward_point(states[i], step, next_loc, next, out[i], argmax.empty() ? scratch : argmax[i]);
  }
}

template <Scalar T>
void backward_step_omp(std::span<const std::int64_t> states, const LatticeStep<T>& step,
                       const Locator& next_loc, std::span<const T> next, std::span<T> out,
                       std::span<std::uint32_t> argmax) {
  const auto count = static_cast<std::int64_t>(states.size());
  const bool record = !argmax.empty();
#pragma omp parallel for schedule(static) if (count > 256)
  for (std::int64_t i = 0; i < count; ++i) {
    std::uint32_t scratch = 0;
    const auto u = static_cast<std::size_t>(i);
    backward_point(states[u], step, next_loc, next, out[u], record ? argmax[u] : scratch);
  }
}

template <Scalar T>
void backward_step(Exec exec, std::span<const std::int64_t> states, const LatticeStep<T>& step,
                   const Locator& next_loc, std::span<const T> next, std::span<T> out,
                   std::span<std::uint32_t> argmax) {
  if (exec == Exec::parallel) {
    backward_step_omp(states, step, next_loc, next, out, argmax);
  } else {
    backward_step_serial(states, step, next_loc, next, out, argmax);
  }
}

/// Explicit monotone G-heat update on interior nodes:
///   out_j = u_j + dt * G((u_{j+1} - 2 u_j + u_{j-1}) / dx^2),
/// with G(a) = (hi2 * a^+ - lo2 * a^-) / 2.
/// Boundary nodes are extrapolated linearly (zero second difference).
inline double g_of(double a, double lo2, double hi2) noexcept {
  return a >= 0 ? 0.5 * hi2 * a : 0.5 * lo2 * a;
}

inline void g_heat_step_serial(std::span<const double> u, std::span<double> out, double dt,
                               double dx, double lo2, double hi2) {
  const std::size_t n = u.size();
  const double inv_dx2 = 1.0 / (dx * dx);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double d2 = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dx2;
    out[j] = u[j] + dt * g_of(d2, lo2, hi2);
  }
  out[0] = 2.0 * out[1] - out[2];
  out[n - 1] = 2.0 * out[n - 2] - out[n - 3];
}

inline void g_heat_step_omp(std::span<const double> u, std::span<double> out, double dt,
                            double dx, double lo2, double hi2) {
  const auto n = static_cast<std::int64_t>(u.size());
  const double inv_dx2 = 1.0 / (dx * dx);
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::int64_t j = 1; j < n - 1; ++j) {
    const double d2 = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dx2;
    out[j] = u[j] + dt * g_of(d2, lo2, hi2);
  }
  out[0] = 2.0 * out[1] - out[2];
  out[n - 1] = 2.0 * out[n - 2] - out[n - 3];
}

inline void g_heat_step(Exec exec, std::span<const double> u, std::span<double> out, double dt,
                        double dx, double lo2, double hi2) {
  if (exec == Exec::parallel) {
    g_heat_step_omp(u, out, dt, dx, lo2, hi2);
  } else {
    g_heat_step_serial(u, out, dt, dx, lo2, hi2);
  }
}

}  // namespace sublin::kernels
