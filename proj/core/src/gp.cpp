#include "netenergy/gp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "netenergy/errors.hpp"

namespace netenergy::traffic {

namespace {

void require_positive_grid(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw InvalidArgument(std::string(what) + ": grid is empty");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + ": values must be > 0");
  }
}

}  // namespace

KernelSpec KernelSpec::periodic(std::vector<double> period, std::vector<double> lengthscale,
                                std::vector<double> variance) {
  require_positive_grid(period, "periodic period");
  require_positive_grid(lengthscale, "periodic lengthscale");
  require_positive_grid(variance, "periodic variance");
  KernelSpec k;
  k.type_ = Type::periodic;
  k.own_ = {{"period", std::move(period)},
            {"lengthscale", std::move(lengthscale)},
            {"variance", std::move(variance)}};
  return k;
}

KernelSpec KernelSpec::squared_exponential(std::vector<double> lengthscale,
                                           std::vector<double> variance) {
  require_positive_grid(lengthscale, "squared-exponential lengthscale");
  require_positive_grid(variance, "squared-exponential variance");
  KernelSpec k;
  k.type_ = Type::squared_exponential;
  k.own_ = {{"lengthscale", std::move(lengthscale)}, {"variance", std::move(variance)}};
  return k;
}

KernelSpec KernelSpec::sum(KernelSpec a, KernelSpec b) {
  KernelSpec k;
  k.type_ = Type::sum;
  k.children_ = {std::make_shared<const KernelSpec>(std::move(a)),
                 std::make_shared<const KernelSpec>(std::move(b))};
  return k;
}

KernelSpec KernelSpec::product(KernelSpec a, KernelSpec b) {
  KernelSpec k;
  k.type_ = Type::product;
  k.children_ = {std::make_shared<const KernelSpec>(std::move(a)),
                 std::make_shared<const KernelSpec>(std::move(b))};
  return k;
}

void KernelSpec::collect(std::vector<HyperGrid>& out, const std::string& prefix) const {
  switch (type_) {
    case Type::periodic:
    case Type::squared_exponential: {
      const std::string tag = prefix + (type_ == Type::periodic ? "per" : "se");
      for (const auto& h : own_) out.push_back({tag + "." + h.name, h.values});
      break;
    }
    case Type::sum:
    case Type::product: {
      const char* op = type_ == Type::sum ? "sum" : "prod";
      for (std::size_t c = 0; c < children_.size(); ++c) {
        children_[c]->collect(out, prefix + op + std::to_string(c) + ".");
      }
      break;
    }
  }
}

std::vector<HyperGrid> KernelSpec::hyperparameters() const {
  std::vector<HyperGrid> out;
  collect(out, "");
  return out;
}

std::size_t KernelSpec::parameter_count() const { return hyperparameters().size(); }

double KernelSpec::evaluate_at(double t, double u, std::span<const double> theta,
                               std::size_t& offset) const {
  switch (type_) {
    case Type::periodic: {
      const double period = theta[offset], ell = theta[offset + 1], var = theta[offset + 2];
      offset += 3;
      const double s = std::sin(std::numbers::pi * std::abs(t - u) / period);
      return var * std::exp(-2.0 * s * s / (ell * ell));
    }
    case Type::squared_exponential: {
      const double ell = theta[offset], var = theta[offset + 1];
      offset += 2;
      const double d = t - u;
      return var * std::exp(-0.5 * d * d / (ell * ell));
    }
    case Type::sum: {
      const double a = children_[0]->evaluate_at(t, u, theta, offset);
      return a + children_[1]->evaluate_at(t, u, theta, offset);
    }
    case Type::product: {
      const double a = children_[0]->evaluate_at(t, u, theta, offset);
      return a * children_[1]->evaluate_at(t, u, theta, offset);
    }
  }
  return 0.0;
}

double KernelSpec::evaluate(double t, double u, std::span<const double> theta) const {
  std::size_t offset = 0;
  return evaluate_at(t, u, theta, offset);
}

std::string KernelSpec::describe() const {
  switch (type_) {
    case Type::periodic: return "Periodic";
    case Type::squared_exponential: return "SE";
    case Type::sum: return "(" + children_[0]->describe() + " + " + children_[1]->describe() + ")";
    case Type::product: return "(" + children_[0]->describe() + " * " + children_[1]->describe() + ")";
  }
  return {};
}

GpSpec GpSpec::voice_default() {
  GpSpec s{KernelSpec::sum(KernelSpec::periodic({23.0, 24.0, 25.0}, {1.0, 2.0, 4.0},
                                                {0.05, 0.1, 0.2}),
                           KernelSpec::periodic({168.0}, {1.0}, {0.005, 0.02})),
           {4e-4, 6e-4, 8e-4, 1e-3, 1.2e-3, 1.5e-3, 2e-3, 3e-3, 4e-3}};
  return s;
}

std::vector<std::string> GpModel::hyperparameter_names() const {
  std::vector<std::string> names;
  for (const auto& h : spec_.kernel.hyperparameters()) names.push_back(h.name);
  names.push_back("noise_variance");
  return names;
}

double GpModel::prior_variance(double t) const { return spec_.kernel.evaluate(t, t, theta_); }

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool regular_spacing(std::span<const double> t) {
  if (t.size() < 2) return true;
  const double step = t[1] - t[0];
  for (std::size_t i = 2; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step))) return false;
  }
  return true;
}

MatrixXd covariance(const KernelSpec& kernel, std::span<const double> t,
                    std::span<const double> theta, double noise) {
  const auto n = static_cast<Eigen::Index>(t.size());
  MatrixXd k(n, n);
  if (regular_spacing(t)) {
    // Stationary kernels on a regular grid: one evaluation per lag.
    std::vector<double> by_lag(t.size());
    for (std::size_t l = 0; l < t.size(); ++l) by_lag[l] = kernel.evaluate(t[0], t[l], theta);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) k(i, j) = by_lag[static_cast<std::size_t>(std::abs(i - j))];
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        k(i, j) = kernel.evaluate(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)], theta);
        k(j, i) = k(i, j);
      }
    }
  }
  k.diagonal().array() += noise + kGpJitter;
  return k;
}

std::string format_theta(std::span<const double> theta) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta[i];
  os << ']';
  return os.str();
}

}  // namespace

GpModel gp_fit_times(std::span<const double> times, std::span<const double> values,
                     const GpSpec& spec) {
  if (times.size() != values.size()) throw DimensionError("gp_fit: times and values differ in length");
  if (times.empty()) throw InvalidArgument("gp_fit: no training data");
  require_positive_grid(spec.noise_variance, "noise variance");

  const auto grids = spec.kernel.hyperparameters();
  std::vector<const std::vector<double>*> axes;
  for (const auto& g : grids) axes.push_back(&g.values);
  axes.push_back(&spec.noise_variance);
  std::size_t total = 1;
  for (const auto* a : axes) total *= a->size();

  const std::size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = values[i] - mean;

  std::vector<GridPoint> grid(total);
  auto theta_at = [&](std::size_t index) {
    std::vector<double> theta(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      theta[a] = (*axes[a])[index % axes[a]->size()];
      index /= axes[a]->size();
    }
    return theta;
  };
  auto evaluate_point = [&](std::size_t index) {
    GridPoint& gp = grid[index];
    gp.theta = theta_at(index);
    const MatrixXd k = covariance(spec.kernel, times, gp.theta, gp.theta.back());
    Eigen::LLT<MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) {
      gp.factorized = false;
      gp.log_likelihood = -std::numeric_limits<double>::infinity();
      return;
    }
    const VectorXd alpha = llt.solve(y);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    gp.log_likelihood = -0.5 * y.dot(alpha) - 0.5 * log_det -
                        0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), total));
  if (workers == 1) {
    for (std::size_t i = 0; i < total; ++i) evaluate_point(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < total; i += workers) evaluate_point(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::size_t best = total;
  for (std::size_t i = 0; i < total; ++i) {
    if (!grid[i].factorized) continue;
    if (best == total || grid[i].log_likelihood > grid[best].log_likelihood) best = i;
  }
  if (best == total) {
    throw NumericalError("covariance not positive definite after jitter for hyperparameters " +
                         format_theta(grid.front().theta) +
                         (total > 1 ? " (and every other grid point)" : ""));
  }

  GpModel model;
  model.spec_ = spec;
  model.theta_ = grid[best].theta;
  model.log_likelihood_ = grid[best].log_likelihood;
  model.mean_ = mean;
  model.times_.assign(times.begin(), times.end());
  model.values_.assign(values.begin(), values.end());

  const MatrixXd k = covariance(spec.kernel, times, model.theta_, model.theta_.back());
  Eigen::LLT<MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("covariance not positive definite for hyperparameters " +
                         format_theta(model.theta_));
  }
  const MatrixXd l = llt.matrixL();
  model.chol_.resize(n * n);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      model.chol_.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = l;
  const VectorXd alpha = llt.solve(y);
  model.alpha_.assign(alpha.data(), alpha.data() + alpha.size());
  model.grid_ = std::move(grid);
  return model;
}

GpModel gp_fit(const TrafficSeries& series, const GpSpec& spec) {
  series.validate();
  if (series.size() < kGpMinTrainingLength) {
    throw InvalidArgument("gp_fit: need at least " + std::to_string(kGpMinTrainingLength) +
                          " training samples, got " + std::to_string(series.size()));
  }
  std::vector<double> times(series.size());
  for (std::size_t t = 0; t < times.size(); ++t) times[t] = series.hour_of(t);
  return gp_fit_times(times, series.values, spec);
}

struct GpPredictor {
  static GpForecast predict(const GpModel& model, std::span<const double> times, bool include_noise) {
    const std::size_t n = model.times_.size();
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> l(
        model.chol_.data(), ni, ni);
    Eigen::Map<const VectorXd> alpha(model.alpha_.data(), ni);

    GpForecast f;
    f.times.assign(times.begin(), times.end());
    f.mean.resize(times.size());
    f.std.resize(times.size());
    f.hyperparameters = model.theta_;
    f.train_window = n;
    VectorXd kstar(ni);
    for (std::size_t q = 0; q < times.size(); ++q) {
      for (std::size_t i = 0; i < n; ++i) {
        kstar(static_cast<Eigen::Index>(i)) = model.spec_.kernel.evaluate(times[q], model.times_[i], model.theta_);
      }
      f.mean[q] = model.mean_ + kstar.dot(alpha);
      const VectorXd v = l.triangularView<Eigen::Lower>().solve(kstar);
      double var = model.spec_.kernel.evaluate(times[q], times[q], model.theta_) - v.squaredNorm();
      var = std::max(var, 0.0);
      if (include_noise) var += model.noise_variance();
      f.std[q] = std::sqrt(var);
    }
    return f;
  }
};

GpForecast gp_predict_at(const GpModel& model, std::span<const double> times, bool include_noise) {
  return GpPredictor::predict(model, times, include_noise);
}

GpForecast gp_predict(const GpModel& model, std::size_t horizon, bool include_noise) {
  const auto train = model.train_times();
  const double step = train.size() >= 2 ? train[1] - train[0] : 1.0;
  std::vector<double> times(horizon);
  for (std::size_t h = 0; h < horizon; ++h) times[h] = train.back() + step * static_cast<double>(h + 1);
  return GpPredictor::predict(model, times, include_noise);
}

double band_coverage(const GpForecast& forecast, std::span<const double> actual, double z) {
  if (actual.size() != forecast.mean.size()) throw DimensionError("band_coverage: length mismatch");
  if (actual.empty()) return 0.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (std::abs(actual[i] - forecast.mean[i]) <= z * forecast.std[i]) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(actual.size());
}

}  // namespace netenergy::traffic
