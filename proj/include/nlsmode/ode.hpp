#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nlsmode {

/// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
/// `StopFn` may end integration early (event detection); `node_sink`, when
/// set, receives the state at every requested node radius (the integrator
/// shortens steps to hit them exactly).
template <int N>
class Rk45 {
 public:
  using State = std::array<double, N>;
  using Rhs = std::function<void(double, const State&, State&)>;
  using StopFn = std::function<bool(double, const State&)>;

  double rtol = 1e-11;
  double atol = 1e-13;
  double h_init = 1e-3;
  double h_max = 0.25;
  long max_steps = 40'000'000;

  /// Integrate from (t0, y0) to t1.  Returns the final (t, y) reached.
  std::pair<double, State> integrate(const Rhs& rhs, double t0, State y0, double t1,
                                     const StopFn& stop = nullptr,
                                     const std::vector<double>* nodes = nullptr,
                                     const std::function<void(int, const State&)>& node_sink = nullptr) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    State y = y0;
    double h = std::min(h_init, t1 - t0);
    size_t next_node = 0;
    if (nodes) {
      while (next_node < nodes->size() && (*nodes)[next_node] <= t0 * (1 + 1e-15)) ++next_node;
    }

    State k1, k2, k3, k4, k5, k6, k7, ytmp, y5;
    rhs(t, y, k1);
    long steps = 0;
    while (t < t1 * (1.0 - 1e-15) + 1e-300) {
      if (++steps > max_steps) throw std::runtime_error("rk45: step limit exceeded");
      bool hit_node = false;
      double h_try = std::min(h, t1 - t);
      if (nodes && next_node < nodes->size() && t + h_try >= (*nodes)[next_node] - 1e-14) {
        h_try = (*nodes)[next_node] - t;
        hit_node = true;
      }
      if (h_try <= 1e-15 * std::max(1.0, std::abs(t))) {
        if (hit_node) {
          if (node_sink) node_sink(static_cast<int>(next_node), y);
          ++next_node;
          continue;
        }
        break;
      }

      auto stage = [&](State& out, std::initializer_list<std::pair<double, const State*>> terms) {
        for (int i = 0; i < N; ++i) {
          double s = y[i];
          for (auto& [cc, kk] : terms) s += h_try * cc * (*kk)[i];
          out[i] = s;
        }
      };
      stage(ytmp, {{a21, &k1}});
      rhs(t + c2 * h_try, ytmp, k2);
      stage(ytmp, {{a31, &k1}, {a32, &k2}});
      rhs(t + c3 * h_try, ytmp, k3);
      stage(ytmp, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
      rhs(t + c4 * h_try, ytmp, k4);
      stage(ytmp, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      rhs(t + c5 * h_try, ytmp, k5);
      stage(ytmp, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      rhs(t + h_try, ytmp, k6);
      stage(y5, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      rhs(t + h_try, y5, k7);

      double err = 0.0;
      for (int i = 0; i < N; ++i) {
        const double e = h_try * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                  e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(e) / sc);
      }

      if (err <= 1.0) {
        t += h_try;
        y = y5;
        k1 = k7;
        if (hit_node) {
          if (node_sink) node_sink(static_cast<int>(next_node), y);
          ++next_node;
        }
        if (stop && stop(t, y)) return {t, y};
      }
      const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      h = std::min(h_try * fac, h_max);
      if (h < 1e-14) throw std::runtime_error("rk45: step size underflow");
    }
    return {t, y};
  }
};

}  // namespace nlsmode
