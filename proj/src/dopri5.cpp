#include "idm/dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace idm {

namespace {

// Butcher tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b*, where b* is the embedded 4th order row.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

// Continuous extension: y(t0 + th h) = y0 + h sum_j k_j (d_j1 th + d_j2 th^2 + d_j3 th^3 + d_j4 th^4).
constexpr double dense_coef[7][4] = {
    {1.0, -183.0 / 64, 37.0 / 12, -145.0 / 128},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 1500.0 / 371, -1000.0 / 159, 1000.0 / 371},
    {0.0, -125.0 / 32, 125.0 / 12, -375.0 / 64},
    {0.0, 9477.0 / 3392, -729.0 / 106, 25515.0 / 6784},
    {0.0, -11.0 / 7, 11.0 / 3, -55.0 / 28},
    {0.0, 3.0 / 2, -4.0, 5.0 / 2},
};

}  // namespace

DormandPrince45::DormandPrince45(std::size_t dim)
    : dim_(dim), y0_(dim), y_new_(dim), stage_(dim) {
  for (auto& k : k_) k.assign(dim, 0.0);
}

DormandPrince45::Trial DormandPrince45::attempt(const Rhs& f, double t, std::span<const double> y, double h,
                                                double rel_tol, double abs_tol) {
  t0_ = t;
  h_ = h;
  std::copy(y.begin(), y.end(), y0_.begin());
  Trial trial;
  auto eval = [&](double ts, const std::vector<double>& ys, std::vector<double>& k) {
    if (!f(ts, ys, k)) trial.rhs_ok = false;
  };
  auto combine = [&](std::initializer_list<std::pair<int, double>> terms) {
    for (std::size_t i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (const auto& [j, coef] : terms) acc += coef * k_[j][i];
      stage_[i] = y0_[i] + h * acc;
    }
  };

  eval(t, y0_, k_[0]);
  combine({{0, a21}});
  eval(t + c2 * h, stage_, k_[1]);
  combine({{0, a31}, {1, a32}});
  eval(t + c3 * h, stage_, k_[2]);
  combine({{0, a41}, {1, a42}, {2, a43}});
  eval(t + c4 * h, stage_, k_[3]);
  combine({{0, a51}, {1, a52}, {2, a53}, {3, a54}});
  eval(t + c5 * h, stage_, k_[4]);
  combine({{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
  eval(t + h, stage_, k_[5]);
  combine({{0, b1}, {2, b3}, {3, b4}, {4, b5}, {5, b6}});
  std::copy(stage_.begin(), stage_.end(), y_new_.begin());
  eval(t + h, y_new_, k_[6]);

  if (!trial.rhs_ok) {
    trial.error_norm = std::numeric_limits<double>::infinity();
    return trial;
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double err =
        h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
    const double scale = abs_tol + rel_tol * std::max(std::abs(y0_[i]), std::abs(y_new_[i]));
    sum += (err / scale) * (err / scale);
  }
  trial.error_norm = std::sqrt(sum / static_cast<double>(dim_));
  if (!std::isfinite(trial.error_norm)) trial.rhs_ok = false;
  return trial;
}

void DormandPrince45::dense(double theta, std::span<double> out) const {
  double w[7];
  const double th2 = theta * theta;
  const double th3 = th2 * theta;
  const double th4 = th3 * theta;
  for (int j = 0; j < 7; ++j)
    w[j] = dense_coef[j][0] * theta + dense_coef[j][1] * th2 + dense_coef[j][2] * th3 + dense_coef[j][3] * th4;
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 7; ++j) acc += w[j] * k_[j][i];
    out[i] = y0_[i] + h_ * acc;
  }
}

double step_factor(double error_norm) {
  if (error_norm == 0.0) return 5.0;
  return std::clamp(0.9 * std::pow(error_norm, -0.2), 0.2, 5.0);
}

}  // namespace idm
