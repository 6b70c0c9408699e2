#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "netenergy/traffic.hpp"

// Gaussian-process regression on a single time series with covariance
// functions assembled from atomic kernels, hyperparameters picked by grid
// search on the exact marginal log-likelihood.
namespace netenergy::traffic {

inline constexpr double kGpJitter = 1e-8;
inline constexpr std::size_t kGpMinTrainingLength = 48;

// A hyperparameter: one value means fixed, several form a search grid.
struct HyperGrid {
  std::string name;
  std::vector<double> values;
};

class KernelSpec {
 public:
  enum class Type { periodic, squared_exponential, sum, product };

  // s^2 exp(-2 sin^2(pi |t - t'| / period) / l^2)
  static KernelSpec periodic(std::vector<double> period, std::vector<double> lengthscale,
                             std::vector<double> variance);
  // s^2 exp(-(t - t')^2 / (2 l^2))
  static KernelSpec squared_exponential(std::vector<double> lengthscale,
                                        std::vector<double> variance);
  static KernelSpec sum(KernelSpec a, KernelSpec b);
  static KernelSpec product(KernelSpec a, KernelSpec b);

  Type type() const noexcept { return type_; }
  // Hyperparameters in evaluation order (depth first, left to right).
  std::vector<HyperGrid> hyperparameters() const;
  std::size_t parameter_count() const;

  // k(t, t') with hyperparameters taken from theta starting at `offset`.
  double evaluate(double t, double u, std::span<const double> theta) const;
  std::string describe() const;

 private:
  double evaluate_at(double t, double u, std::span<const double> theta, std::size_t& offset) const;
  void collect(std::vector<HyperGrid>& out, const std::string& prefix) const;

  Type type_ = Type::periodic;
  std::vector<HyperGrid> own_;
  std::vector<std::shared_ptr<const KernelSpec>> children_;
};

struct GpSpec {
  KernelSpec kernel;
  std::vector<double> noise_variance;  // grid for the i.i.d. noise term

  // Daily periodic kernel with free period plus a weekly periodic term.
  static GpSpec voice_default();
};

struct GridPoint {
  std::vector<double> theta;  // kernel hyperparameters then noise variance
  double log_likelihood = 0.0;
  bool factorized = true;
};

class GpModel {
 public:
  const GpSpec& spec() const noexcept { return spec_; }
  // Selected kernel hyperparameters followed by the noise variance.
  std::span<const double> hyperparameters() const noexcept { return theta_; }
  std::vector<std::string> hyperparameter_names() const;
  double log_likelihood() const noexcept { return log_likelihood_; }
  double noise_variance() const noexcept { return theta_.back(); }
  double mean_offset() const noexcept { return mean_; }
  std::span<const double> train_times() const noexcept { return times_; }
  std::span<const double> train_values() const noexcept { return values_; }
  // Every grid point evaluated during fitting.
  std::span<const GridPoint> grid() const noexcept { return grid_; }

  // Prior variance of the latent function at t.
  double prior_variance(double t) const;

 private:
  friend GpModel gp_fit_times(std::span<const double>, std::span<const double>, const GpSpec&);
  friend struct GpPredictor;

  GpSpec spec_;
  std::vector<double> theta_;
  double log_likelihood_ = 0.0;
  double mean_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> chol_;   // lower Cholesky factor, row-major n x n
  std::vector<double> alpha_;  // (K + s_n^2 I)^{-1} (y - mean)
  std::vector<GridPoint> grid_;
};

struct GpForecast {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<double> hyperparameters;
  std::size_t train_window = 0;
};

GpModel gp_fit(const TrafficSeries& series, const GpSpec& spec);
// Fit on explicit (time, value) pairs; time points need not be regular.
GpModel gp_fit_times(std::span<const double> times, std::span<const double> values,
                     const GpSpec& spec);

// Forecast `horizon` steps after the training window. With include_noise the
// std describes a new observation rather than the latent function.
GpForecast gp_predict(const GpModel& model, std::size_t horizon, bool include_noise = true);
GpForecast gp_predict_at(const GpModel& model, std::span<const double> times,
                         bool include_noise = true);

// Fraction of `actual` within mean +- z std.
double band_coverage(const GpForecast& forecast, std::span<const double> actual, double z = 1.96);

}  // namespace netenergy::traffic
