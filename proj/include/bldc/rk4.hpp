#pragma once

#include <array>
#include <cstddef>

namespace bldc {

template <std::size_t N>
using StateArray = std::array<double, N>;

/// Increment of one classical fourth-order Runge-Kutta step of dx/dt = f(t, x).
template <std::size_t N, class Derivative>
StateArray<N> rk4_increment(Derivative&& f, double t, const StateArray<N>& x, double h) {
  auto axpy = [](const StateArray<N>& base, double a, const StateArray<N>& k) {
    StateArray<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + a * k[i];
    return out;
  };
  const StateArray<N> k1 = f(t, x);
  const StateArray<N> k2 = f(t + 0.5 * h, axpy(x, 0.5 * h, k1));
  const StateArray<N> k3 = f(t + 0.5 * h, axpy(x, 0.5 * h, k2));
  const StateArray<N> k4 = f(t + h, axpy(x, h, k3));
  StateArray<N> dx;
  for (std::size_t i = 0; i < N; ++i) dx[i] = (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return dx;
}

template <std::size_t N, class Derivative>
StateArray<N> rk4_step(Derivative&& f, double t, const StateArray<N>& x, double h) {
  const StateArray<N> dx = rk4_increment(f, t, x, h);
  StateArray<N> next;
  for (std::size_t i = 0; i < N; ++i) next[i] = x[i] + dx[i];
  return next;
}

/// RK4 integrator state with Kahan-compensated accumulation, so rounding in
/// x += dx does not grow with the number of steps.
template <std::size_t N>
class CompensatedRk4 {
 public:
  explicit CompensatedRk4(const StateArray<N>& x0) : x_(x0) {}

  template <class Derivative>
  void step(Derivative&& f, double t, double h) {
    const StateArray<N> dx = rk4_increment(f, t, x_, h);
    for (std::size_t i = 0; i < N; ++i) {
      const double y = dx[i] - carry_[i];
      const double s = x_[i] + y;
      carry_[i] = (s - x_[i]) - y;
      x_[i] = s;
    }
  }

  const StateArray<N>& state() const noexcept { return x_; }

 private:
  StateArray<N> x_;
  StateArray<N> carry_{};
};

}  // namespace bldc
