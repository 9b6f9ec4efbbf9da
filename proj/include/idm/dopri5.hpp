#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace idm {

/// Dormand-Prince 5(4) step with the 4th order continuous extension used by
/// ode45. The stepper only performs single trial steps; step size control and
/// event handling live in the caller.
class DormandPrince45 {
 public:
  /// Writes dy/dt into the last argument; returns false when the state left the
  /// domain of the right-hand side.
  using Rhs = std::function<bool(double, std::span<const double>, std::span<double>)>;

  struct Trial {
    bool rhs_ok = true;
    double error_norm = 0.0;  ///< RMS of the embedded error scaled by atol + rtol |y|
  };

  explicit DormandPrince45(std::size_t dim);

  Trial attempt(const Rhs& f, double t, std::span<const double> y, double h, double rel_tol, double abs_tol);

  /// Fifth order solution at t + h of the last trial.
  std::span<const double> solution() const { return y_new_; }

  /// Interpolated state at t + theta h, theta in [0, 1], of the last trial.
  void dense(double theta, std::span<double> out) const;

  double step_start() const { return t0_; }
  double step_size() const { return h_; }

 private:
  std::size_t dim_;
  double t0_ = 0.0;
  double h_ = 0.0;
  std::vector<double> y0_;
  std::vector<double> y_new_;
  std::vector<double> stage_;
  std::array<std::vector<double>, 7> k_;
};

/// Largest step multiplier after a trial with the given error norm.
double step_factor(double error_norm);

}  // namespace idm
