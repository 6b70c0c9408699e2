#include "netenergy/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netenergy/errors.hpp"

namespace netenergy::lp {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

void LinearProgram::validate() const {
  const std::size_t n = num_vars();
  if (n == 0) throw InvalidArgument("linear program has no variables");
  auto check_block = [n](const Matrix& a, const std::vector<double>& b, const char* name) {
    if (a.rows() != b.size()) throw DimensionError(std::string(name) + ": rows and rhs differ");
    if (a.rows() > 0 && a.cols() != n) throw DimensionError(std::string(name) + ": wrong column count");
    for (double v : a.data()) {
      if (!std::isfinite(v)) throw InvalidArgument(std::string(name) + ": non-finite coefficient");
    }
    for (double v : b) {
      if (!std::isfinite(v)) throw InvalidArgument(std::string(name) + ": non-finite rhs");
    }
  };
  check_block(a_ub, b_ub, "A_ub");
  check_block(a_eq, b_eq, "A_eq");
  for (double v : objective) {
    if (!std::isfinite(v)) throw InvalidArgument("objective: non-finite coefficient");
  }
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& opt) : opt_(opt), n_(lp.num_vars()) {
    const std::size_t m_ub = lp.b_ub.size();
    const std::size_t m_eq = lp.b_eq.size();
    m_ = m_ub + m_eq;

    std::size_t n_art = m_eq;
    for (double b : lp.b_ub) n_art += b < 0.0 ? 1 : 0;
    slack0_ = n_;
    art0_ = n_ + m_ub;
    cols_ = art0_ + n_art;
    width_ = cols_ + 1;

    t_.assign(m_ * width_, 0.0);
    obj_.assign(width_, 0.0);
    basis_.assign(m_, 0);
    allowed_.assign(cols_, 1);
    row_active_.assign(m_, 1);

    std::size_t art = art0_;
    for (std::size_t r = 0; r < m_ub; ++r) {
      const double sign = lp.b_ub[r] < 0.0 ? -1.0 : 1.0;
      double* row = &t_[r * width_];
      const auto src = lp.a_ub.row(r);
      for (std::size_t j = 0; j < n_; ++j) row[j] = sign * src[j];
      row[slack0_ + r] = sign;
      row[cols_] = sign * lp.b_ub[r];
      if (sign > 0.0) {
        basis_[r] = slack0_ + r;
      } else {
        row[art] = 1.0;
        basis_[r] = art++;
      }
    }
    for (std::size_t e = 0; e < m_eq; ++e) {
      const std::size_t r = m_ub + e;
      const double sign = lp.b_eq[e] < 0.0 ? -1.0 : 1.0;
      double* row = &t_[r * width_];
      const auto src = lp.a_eq.row(e);
      for (std::size_t j = 0; j < n_; ++j) row[j] = sign * src[j];
      row[cols_] = sign * lp.b_eq[e];
      row[art] = 1.0;
      basis_[r] = art++;
    }

    max_iterations_ = opt.max_iterations ? opt.max_iterations : 50 * (m_ + cols_) + 1000;
    double bmax = 0.0;
    for (double b : lp.b_ub) bmax = std::max(bmax, std::abs(b));
    for (double b : lp.b_eq) bmax = std::max(bmax, std::abs(b));
    rhs_scale_ = std::max(1.0, bmax);
  }

  LpResult solve(const LinearProgram& lp) {
    LpResult result;
    if (art0_ < cols_) {
      // Phase one: minimise the sum of artificials.
      std::fill(obj_.begin(), obj_.end(), 0.0);
      for (std::size_t j = art0_; j < cols_; ++j) obj_[j] = 1.0;
      for (std::size_t r = 0; r < m_; ++r) {
        if (basis_[r] >= art0_) axpy_row(obj_.data(), -1.0, r);
      }
      const LpStatus s = iterate();
      result.iterations = iterations_;
      if (s == LpStatus::iteration_limit) {
        result.status = s;
        return result;
      }
      const double infeasibility = -obj_[cols_];
      if (infeasibility > opt_.feasibility_tolerance * rhs_scale_) {
        result.status = LpStatus::infeasible;
        return result;
      }
      drive_out_artificials();
    }

    if (opt_.feasibility_only) {
      result.status = LpStatus::optimal;
      result.x = extract();
      result.objective = evaluate(lp, result.x);
      result.iterations = iterations_;
      return result;
    }

    std::fill(obj_.begin(), obj_.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj_[j] = lp.objective[j];
    for (std::size_t r = 0; r < m_; ++r) {
      if (!row_active_[r]) continue;
      const std::size_t b = basis_[r];
      if (b < n_ && obj_[b] != 0.0) axpy_row(obj_.data(), -obj_[b], r);
    }
    const LpStatus s = iterate();
    result.iterations = iterations_;
    result.status = s;
    if (s == LpStatus::optimal) {
      result.x = extract();
      result.objective = evaluate(lp, result.x);
    }
    return result;
  }

 private:
  double* row_ptr(std::size_t r) { return &t_[r * width_]; }

  // dst += alpha * row r over the nonzero columns of row r.
  void axpy_row(double* dst, double alpha, std::size_t r) {
    const double* src = row_ptr(r);
    for (std::size_t k = 0; k < width_; ++k) {
      if (src[k] != 0.0) dst[k] += alpha * src[k];
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = row_ptr(pr);
    const double inv = 1.0 / prow[pc];
    nz_.clear();
    for (std::size_t k = 0; k < width_; ++k) {
      if (prow[k] != 0.0) {
        prow[k] *= inv;
        nz_.push_back(k);
      }
    }
    prow[pc] = 1.0;
    auto eliminate = [&](double* row) {
      const double f = row[pc];
      if (f == 0.0) return;
      for (std::size_t k : nz_) {
        double v = row[k] - f * prow[k];
        if (std::abs(v) < 1e-15) v = 0.0;
        row[k] = v;
      }
      row[pc] = 0.0;
    };
    for (std::size_t r = 0; r < m_; ++r) {
      if (r != pr && row_active_[r]) eliminate(row_ptr(r));
    }
    eliminate(obj_.data());
    basis_[pr] = pc;
    ++iterations_;
  }

  LpStatus iterate() {
    std::size_t degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iterations_ >= max_iterations_) return LpStatus::iteration_limit;

      std::size_t enter = cols_;
      double best = -opt_.optimality_tolerance;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allowed_[j]) continue;
        if (obj_[j] < best) {
          enter = j;
          if (bland) break;
          best = obj_[j];
        }
      }
      if (enter == cols_) return LpStatus::optimal;

      std::size_t leave = m_;
      double min_ratio = std::numeric_limits<double>::infinity();
      double leave_coef = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        if (!row_active_[r]) continue;
        const double a = t_[r * width_ + enter];
        if (a <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(0.0, t_[r * width_ + cols_]) / a;
        const double tie = 1e-12 * (1.0 + min_ratio);
        if (leave == m_ || ratio < min_ratio - tie) {
          leave = r;
          min_ratio = ratio;
          leave_coef = a;
        } else if (ratio <= min_ratio + tie) {
          const bool better = bland ? basis_[r] < basis_[leave] : a > leave_coef;
          if (better) {
            leave = r;
            min_ratio = std::min(min_ratio, ratio);
            leave_coef = a;
          }
        }
      }
      if (leave == m_) return LpStatus::unbounded;

      if (min_ratio <= 1e-12) {
        if (++degenerate_run >= opt_.degenerate_pivots_before_bland) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!row_active_[r] || basis_[r] < art0_) continue;
      const double* row = row_ptr(r);
      std::size_t col = cols_;
      double best = opt_.pivot_tolerance;
      for (std::size_t j = 0; j < art0_; ++j) {
        if (std::abs(row[j]) > best) {
          best = std::abs(row[j]);
          col = j;
        }
      }
      if (col == cols_) {
        row_active_[r] = 0;  // redundant equality
      } else {
        pivot(r, col);
      }
    }
    for (std::size_t j = art0_; j < cols_; ++j) allowed_[j] = 0;
  }

  std::vector<double> extract() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (row_active_[r] && basis_[r] < n_) x[basis_[r]] = std::max(0.0, t_[r * width_ + cols_]);
    }
    return x;
  }

  static double evaluate(const LinearProgram& lp, const std::vector<double>& x) {
    double z = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) z += lp.objective[j] * x[j];
    return z;
  }

  const LpOptions& opt_;
  std::size_t n_ = 0, m_ = 0, cols_ = 0, width_ = 0, slack0_ = 0, art0_ = 0;
  std::vector<double> t_;
  std::vector<double> obj_;
  std::vector<std::size_t> basis_;
  std::vector<char> allowed_;
  std::vector<char> row_active_;
  std::vector<std::size_t> nz_;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
  double rhs_scale_ = 1.0;
};

}  // namespace

LpResult lp_solve(const LinearProgram& program, const LpOptions& options) {
  program.validate();
  Tableau tableau(program, options);
  return tableau.solve(program);
}

}  // namespace netenergy::lp
