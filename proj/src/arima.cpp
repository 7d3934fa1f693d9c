#include "finsent/arima.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "finsent/error.hpp"

namespace finsent::arima {

namespace {

constexpr double kMaBound = 0.99;

struct Coeffs {
  double c = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;
};

double& coordinate(Coeffs& k, std::size_t j) {
  if (j == 0) return k.c;
  if (j <= k.ar.size()) return k.ar[j - 1];
  return k.ma[j - 1 - k.ar.size()];
}

Coeffs fit_ar_least_squares(std::span<const double> w, int p, bool intercept) {
  Coeffs k;
  k.ar.assign(static_cast<std::size_t>(p), 0.0);
  const std::size_t m = w.size();
  if (p == 0) {
    if (!intercept) return k;
    double s = 0.0;
    for (double v : w) s += v;
    k.c = s / static_cast<double>(m);
    return k;
  }
  const std::size_t rows = m - static_cast<std::size_t>(p);
  const int c0 = intercept ? 1 : 0;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), p + c0);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + static_cast<std::size_t>(p);
    const auto ri = static_cast<Eigen::Index>(r);
    if (intercept) x(ri, 0) = 1.0;
    for (int i = 0; i < p; ++i) x(ri, i + c0) = w[t - 1 - static_cast<std::size_t>(i)];
    y(ri) = w[t];
  }
  Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  if (intercept) k.c = beta(0);
  for (int i = 0; i < p; ++i) k.ar[static_cast<std::size_t>(i)] = beta(i + c0);
  return k;
}

struct LineResult {
  double x;
  double f;
};

// Golden-section minimisation of a unimodal-ish 1-D slice on [lo, hi].
template <class F>
LineResult golden_section(F&& f, double lo, double hi, int iterations = 60) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? LineResult{x1, f1} : LineResult{x2, f2};
}

}  // namespace

void ArimaSpec::validate() const {
  if (p < 0 || d < 0 || q < 0) throw Error(ErrorCode::InvalidArgument, "ARIMA orders must be >= 0");
  if (p + q < 1 && d < 1) throw Error(ErrorCode::InvalidArgument, "ARIMA(0,0,0) is degenerate");
}

std::vector<double> difference(std::span<const double> series, int d) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "d must be >= 0");
  if (series.size() <= static_cast<std::size_t>(d)) {
    throw Error(ErrorCode::SeriesTooShort, "series shorter than differencing order");
  }
  std::vector<double> out(series.begin(), series.end());
  for (int k = 0; k < d; ++k) {
    for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
    out.pop_back();
  }
  return out;
}

std::vector<double> undifference(std::span<const double> deltas, std::span<const double> anchors, int d) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "d must be >= 0");
  if (anchors.size() < static_cast<std::size_t>(d)) {
    throw Error(ErrorCode::MissingAnchors, "need " + std::to_string(d) + " anchor levels");
  }
  // last[k] = most recent value of the k-times differenced series.
  std::vector<double> last(static_cast<std::size_t>(d));
  {
    std::vector<double> level(anchors.end() - d, anchors.end());
    for (int k = 0; k < d; ++k) {
      last[static_cast<std::size_t>(k)] = level.back();
      for (std::size_t i = 0; i + 1 < level.size(); ++i) level[i] = level[i + 1] - level[i];
      level.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(deltas.size());
  for (double v : deltas) {
    for (int k = d - 1; k >= 0; --k) {
      last[static_cast<std::size_t>(k)] += v;
      v = last[static_cast<std::size_t>(k)];
    }
    out.push_back(v);
  }
  return out;
}

double css_objective(std::span<const double> w, double intercept, std::span<const double> ar,
                     std::span<const double> ma, std::vector<double>* residuals) {
  const std::size_t p = ar.size(), q = ma.size();
  std::vector<double> local;
  std::vector<double>& e = residuals ? *residuals : local;
  e.assign(w.size(), 0.0);
  double css = 0.0;
  for (std::size_t t = p; t < w.size(); ++t) {
    double pred = intercept;
    for (std::size_t i = 0; i < p; ++i) pred += ar[i] * w[t - 1 - i];
    for (std::size_t j = 0; j < q && j + 1 + p <= t; ++j) pred += ma[j] * e[t - 1 - j];
    e[t] = w[t] - pred;
    css += e[t] * e[t];
  }
  return css;
}

ArimaFit fit(std::span<const double> series, const ArimaSpec& spec, const FitOptions& options) {
  spec.validate();
  const std::vector<double> w = difference(series, spec.d);
  const auto n_params = static_cast<std::size_t>(spec.p + spec.q + 1);
  if (w.size() < 10 * n_params) {
    throw Error(ErrorCode::SeriesTooShort, std::to_string(w.size()) + " differenced points for " +
                                               std::to_string(n_params) + " parameters");
  }

  Coeffs k = fit_ar_least_squares(w, spec.p, options.include_intercept);
  k.ma.assign(static_cast<std::size_t>(spec.q), 0.0);

  ArimaFit out;
  out.spec = spec;
  auto objective = [&](const Coeffs& c) { return css_objective(w, c.c, c.ar, c.ma); };
  double f = objective(k);

  if (spec.q > 0) {
    const std::size_t dims = 1 + k.ar.size() + k.ma.size();
    std::vector<double> radius(dims, 0.5);
    out.objective_trace.push_back(f);
    double rel_change = INFINITY;
    out.converged = false;
    std::size_t it = 0;
    while (it < options.max_iterations) {
      ++it;
      const double f_start = f;
      for (std::size_t j = options.include_intercept ? 0 : 1; j < dims; ++j) {
        const bool is_ma = j > k.ar.size();
        const double x0 = coordinate(k, j);
        double lo = x0 - radius[j], hi = x0 + radius[j];
        if (is_ma) {
          lo = std::max(lo, -kMaBound);
          hi = std::min(hi, kMaBound);
        }
        Coeffs trial = k;
        auto slice = [&](double x) {
          coordinate(trial, j) = x;
          return objective(trial);
        };
        const LineResult best = golden_section(slice, lo, hi);
        const double step = best.x - x0;
        if (best.f < f) {
          coordinate(k, j) = best.x;
          f = best.f;
        }
        if (std::abs(step) > 0.9 * radius[j]) {
          radius[j] *= 2.0;
        } else {
          radius[j] = std::max(4.0 * std::abs(step), 1e-6 * (1.0 + std::abs(x0)));
        }
      }
      out.objective_trace.push_back(f);
      rel_change = (f_start - f) / std::max(f_start, std::numeric_limits<double>::min());
      if (rel_change < options.tolerance) {
        out.converged = true;
        break;
      }
    }
    out.iterations = it;
    if (!out.converged && rel_change > options.failure_tolerance) {
      throw Error(ErrorCode::NonConvergence, "CSS optimizer hit " + std::to_string(it) +
                                                 " iterations with relative change " +
                                                 std::to_string(rel_change));
    }
  }

  std::vector<double> resid;
  out.css = css_objective(w, k.c, k.ar, k.ma, &resid);
  const std::size_t n_eff = w.size() - static_cast<std::size_t>(spec.p);
  out.residual_variance = out.css / static_cast<double>(n_eff);
  out.intercept = k.c;
  out.ar = k.ar;
  out.ma = k.ma;
  out.anchors.assign(series.end() - spec.d, series.end());
  out.diff_tail.assign(w.end() - spec.p, w.end());
  out.residual_tail.assign(resid.end() - spec.q, resid.end());
  return out;
}

std::vector<double> forecast(const ArimaFit& fit, std::size_t steps) {
  const std::size_t p = fit.ar.size(), q = fit.ma.size();
  if (fit.diff_tail.size() < p || fit.residual_tail.size() < q) {
    throw Error(ErrorCode::InvalidArgument, "fit tails shorter than model orders");
  }
  std::vector<double> w(fit.diff_tail.end() - static_cast<std::ptrdiff_t>(p), fit.diff_tail.end());
  std::vector<double> e(fit.residual_tail.end() - static_cast<std::ptrdiff_t>(q), fit.residual_tail.end());
  std::vector<double> deltas;
  deltas.reserve(steps);
  for (std::size_t h = 0; h < steps; ++h) {
    double v = fit.intercept;
    for (std::size_t i = 0; i < p; ++i) v += fit.ar[i] * w[w.size() - 1 - i];
    for (std::size_t j = 0; j < q; ++j) v += fit.ma[j] * e[e.size() - 1 - j];
    w.push_back(v);
    e.push_back(0.0);
    deltas.push_back(v);
  }
  return undifference(deltas, fit.anchors, fit.spec.d);
}

RollingStats rolling_stats(std::span<const double> series, std::size_t window) {
  if (window == 0 || window > series.size()) {
    throw Error(ErrorCode::WindowTooLarge, "window " + std::to_string(window) + " for " +
                                               std::to_string(series.size()) + " points");
  }
  RollingStats out;
  const std::size_t n = series.size() - window + 1;
  out.mean.reserve(n);
  out.stddev.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto win = series.subspan(i, window);
    double mean = 0.0;
    for (double v : win) mean += v;
    mean /= static_cast<double>(window);
    double ss = 0.0;
    for (double v : win) ss += (v - mean) * (v - mean);
    out.mean.push_back(mean);
    out.stddev.push_back(std::sqrt(ss / static_cast<double>(window)));
  }
  return out;
}

OrderSearch select_order(std::span<const double> train, std::span<const double> validation, int max_p,
                         int max_d, int max_q, const FitOptions& options) {
  if (validation.empty()) throw Error(ErrorCode::EmptyInput, "order search needs a validation block");
  OrderSearch best{{}, INFINITY};
  bool found = false;
  for (int d = 0; d <= max_d; ++d) {
    for (int p = 0; p <= max_p; ++p) {
      for (int q = 0; q <= max_q; ++q) {
        ArimaSpec spec{p, d, q};
        if (p + q < 1 && d < 1) continue;
        try {
          const ArimaFit f = fit(train, spec, options);
          const auto fc = forecast(f, validation.size());
          double mse = 0.0;
          for (std::size_t i = 0; i < fc.size(); ++i) mse += (fc[i] - validation[i]) * (fc[i] - validation[i]);
          mse /= static_cast<double>(fc.size());
          if (std::isfinite(mse) && mse < best.best_mse) {
            best = {spec, mse};
            found = true;
          }
        } catch (const Error&) {
          // Candidates that cannot be fit on this series are skipped.
        }
      }
    }
  }
  if (!found) throw Error(ErrorCode::SeriesTooShort, "no ARIMA order could be fit");
  return best;
}

std::string ArimaFit::to_json() const {
  nlohmann::ordered_json j;
  j["spec"] = {{"p", spec.p}, {"d", spec.d}, {"q", spec.q}};
  j["intercept"] = intercept;
  j["ar"] = ar;
  j["ma"] = ma;
  j["residual_variance"] = residual_variance;
  j["css"] = css;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["anchors"] = anchors;
  j["diff_tail"] = diff_tail;
  j["residual_tail"] = residual_tail;
  return j.dump(2) + "\n";
}

ArimaFit ArimaFit::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    ArimaFit f;
    f.spec = {j.at("spec").at("p").get<int>(), j.at("spec").at("d").get<int>(), j.at("spec").at("q").get<int>()};
    f.intercept = j.at("intercept").get<double>();
    f.ar = j.at("ar").get<std::vector<double>>();
    f.ma = j.at("ma").get<std::vector<double>>();
    f.residual_variance = j.at("residual_variance").get<double>();
    f.css = j.value("css", 0.0);
    f.iterations = j.value("iterations", std::size_t{0});
    f.converged = j.value("converged", true);
    f.anchors = j.at("anchors").get<std::vector<double>>();
    f.diff_tail = j.at("diff_tail").get<std::vector<double>>();
    f.residual_tail = j.at("residual_tail").get<std::vector<double>>();
    if (f.ar.size() != static_cast<std::size_t>(f.spec.p) || f.ma.size() != static_cast<std::size_t>(f.spec.q)) {
      throw Error(ErrorCode::BadFormat, "coefficient counts do not match the order");
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadFormat, std::string("arima json: ") + e.what());
  }
}

}  // namespace finsent::arima
