#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace finsent::arima {

struct ArimaSpec {
  int p = 5;
  int d = 1;
  int q = 0;

  void validate() const;
  bool operator==(const ArimaSpec&) const = default;
};

/// w_t = c + sum_i ar[i] w_{t-1-i} + e_t + sum_j ma[j] e_{t-1-j}, where w is
/// the series differenced d times.
struct ArimaFit {
  ArimaSpec spec;
  double intercept = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;
  double residual_variance = 0.0;
  /// Conditional sum of squares at the solution.
  double css = 0.0;
  /// Last d observed levels, oldest first.
  std::vector<double> anchors;
  /// Last p values of the differenced series, oldest first.
  std::vector<double> diff_tail;
  /// Last q residuals, oldest first.
  std::vector<double> residual_tail;
  std::size_t iterations = 0;
  bool converged = true;
  /// Objective after each accepted optimizer sweep (q > 0 only).
  std::vector<double> objective_trace;

  std::string to_json() const;
  static ArimaFit from_json(std::string_view text);
};

struct FitOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 500;
  /// Fits with a larger final relative change than this raise NonConvergence
  /// once the iteration cap is hit.
  double failure_tolerance = 1e-6;
  /// Off pins c = 0; with d = 1 and p = q = 0 that is the driftless random walk.
  bool include_intercept = true;
};

std::vector<double> difference(std::span<const double> series, int d);

/// Inverse of difference: `anchors` are the d levels immediately preceding
/// the first delta; returns the levels that follow them.
std::vector<double> undifference(std::span<const double> deltas, std::span<const double> anchors, int d);

/// Conditional sum of squared innovations with pre-sample residuals set to 0.
/// Residuals exist from index p on; `residuals` (optional) receives them.
double css_objective(std::span<const double> w, double intercept, std::span<const double> ar,
                     std::span<const double> ma, std::vector<double>* residuals = nullptr);

/// Least squares for the pure-AR part, then coordinate descent with golden
/// section line searches when q > 0.
ArimaFit fit(std::span<const double> series, const ArimaSpec& spec, const FitOptions& options = {});

/// Iterated conditional expectations (future innovations zero), in levels.
std::vector<double> forecast(const ArimaFit& fit, std::size_t steps);

struct RollingStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population
};

RollingStats rolling_stats(std::span<const double> series, std::size_t window);

struct OrderSearch {
  ArimaSpec best;
  double best_mse;
};

/// Grid over p, d, q; each candidate is fit on `train` and scored by the MSE
/// of its multi-step forecast against `validation`.
OrderSearch select_order(std::span<const double> train, std::span<const double> validation, int max_p,
                         int max_d, int max_q, const FitOptions& options = {});

}  // namespace finsent::arima
