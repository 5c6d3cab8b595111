#include "backcom/barrier.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace backcom {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

ProfileEval evaluate_profile(Profile profile, double x, double k, double shift) {
  constexpr double ln2 = std::numbers::ln2;
  switch (profile) {
    case Profile::Log2OnePlusOverShift: {
      const double z = x + shift;
      if (!(z > 0.0)) return {kNaN, kNaN, kNaN};
      return {std::log1p(k / z) / ln2, -k / (z * (z + k) * ln2), (1.0 / (z * z) - 1.0 / ((z + k) * (z + k))) / ln2};
    }
    case Profile::Log2OnePlusOverSquare: {
      if (!(x > 0.0)) return {kNaN, kNaN, kNaN};
      const double x2 = x * x;
      const double w = x2 + k;
      return {std::log1p(k / x2) / ln2, -2.0 * k / (x * w * ln2), (2.0 * (k - x2) / (w * w) + 2.0 / x2) / ln2};
    }
    case Profile::Log2OnePlusScaled: {
      const double w = 1.0 + k * x;
      if (!(w > 0.0)) return {kNaN, kNaN, kNaN};
      return {std::log1p(k * x) / ln2, k / (w * ln2), -k * k / (w * w * ln2)};
    }
  }
  return {kNaN, kNaN, kNaN};
}

void CompositeFunction::touch(int i) {
  auto it = std::lower_bound(support_.begin(), support_.end(), i);
  if (it == support_.end() || *it != i) support_.insert(it, i);
}

CompositeFunction& CompositeFunction::add_constant(double c) {
  constant_ += c;
  return *this;
}

CompositeFunction& CompositeFunction::add_linear(int i, double coef) {
  linear_.push_back({i, coef});
  touch(i);
  return *this;
}

CompositeFunction& CompositeFunction::add_squared_distance(int i, const Eigen::Vector2d& p, double coef) {
  distance_.push_back({i, p, coef});
  touch(i);
  touch(i + 1);
  return *this;
}

CompositeFunction& CompositeFunction::add_squared_difference(int i, int j, double coef) {
  difference_.push_back({i, j, coef});
  for (int v : {i, i + 1, j, j + 1}) touch(v);
  return *this;
}

CompositeFunction& CompositeFunction::add_univariate(int i, Profile profile, double k, double shift, double coef) {
  univariate_.push_back({i, profile, k, shift, coef});
  touch(i);
  return *this;
}

double CompositeFunction::value(const Eigen::VectorXd& x) const {
  double v = constant_;
  for (const auto& t : linear_) v += t.coef * x[t.i];
  for (const auto& t : distance_) {
    const double dx = x[t.i] - t.p.x();
    const double dy = x[t.i + 1] - t.p.y();
    v += t.coef * (dx * dx + dy * dy);
  }
  for (const auto& t : difference_) {
    const double dx = x[t.i] - x[t.j];
    const double dy = x[t.i + 1] - x[t.j + 1];
    v += t.coef * (dx * dx + dy * dy);
  }
  for (const auto& t : univariate_) v += t.coef * evaluate_profile(t.profile, x[t.i], t.k, t.shift).value;
  return v;
}

void CompositeFunction::add_gradient(const Eigen::VectorXd& x, double weight, Eigen::VectorXd& grad) const {
  for (const auto& t : linear_) grad[t.i] += weight * t.coef;
  for (const auto& t : distance_) {
    const double c = 2.0 * weight * t.coef;
    grad[t.i] += c * (x[t.i] - t.p.x());
    grad[t.i + 1] += c * (x[t.i + 1] - t.p.y());
  }
  for (const auto& t : difference_) {
    const double c = 2.0 * weight * t.coef;
    const double dx = x[t.i] - x[t.j];
    const double dy = x[t.i + 1] - x[t.j + 1];
    grad[t.i] += c * dx;
    grad[t.i + 1] += c * dy;
    grad[t.j] -= c * dx;
    grad[t.j + 1] -= c * dy;
  }
  for (const auto& t : univariate_) {
    grad[t.i] += weight * t.coef * evaluate_profile(t.profile, x[t.i], t.k, t.shift).d1;
  }
}

void CompositeFunction::add_hessian(const Eigen::VectorXd& x, double weight, Eigen::MatrixXd& hess) const {
  for (const auto& t : distance_) {
    const double c = 2.0 * weight * t.coef;
    hess(t.i, t.i) += c;
    hess(t.i + 1, t.i + 1) += c;
  }
  for (const auto& t : difference_) {
    const double c = 2.0 * weight * t.coef;
    for (int d = 0; d < 2; ++d) {
      hess(t.i + d, t.i + d) += c;
      hess(t.j + d, t.j + d) += c;
      hess(t.i + d, t.j + d) -= c;
      hess(t.j + d, t.i + d) -= c;
    }
  }
  for (const auto& t : univariate_) {
    hess(t.i, t.i) += weight * t.coef * evaluate_profile(t.profile, x[t.i], t.k, t.shift).d2;
  }
}

SmoothConvexProgram SmoothConvexProgram::unconstrained(int dimension, std::shared_ptr<const SmoothFunction> objective) {
  SmoothConvexProgram p;
  p.dimension = dimension;
  p.objective = std::move(objective);
  p.affine_a.resize(0, dimension);
  p.affine_b.resize(0);
  p.lower = Eigen::VectorXd::Constant(dimension, -kInf);
  p.upper = Eigen::VectorXd::Constant(dimension, kInf);
  return p;
}

std::string to_string(ScpStatus status) {
  switch (status) {
    case ScpStatus::Optimal: return "optimal";
    case ScpStatus::InfeasibleStart: return "infeasible_start";
    case ScpStatus::LineSearchFailure: return "line_search_failure";
    case ScpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

struct SparseRow {
  std::vector<int> index;
  std::vector<double> coef;
  double rhs;
};

class BarrierSolver {
 public:
  BarrierSolver(const SmoothConvexProgram& p, const ScpOptions& opt) : p_(p), opt_(opt), n_(p.dimension) {
    if (!p.objective) throw std::invalid_argument("program has no objective");
    if (p.lower.size() != n_ || p.upper.size() != n_ || p.affine_a.cols() != n_ ||
        p.affine_a.rows() != p.affine_b.size()) {
      throw std::invalid_argument("program dimensions are inconsistent");
    }
    for (Eigen::Index r = 0; r < p.affine_a.rows(); ++r) {
      SparseRow row{{}, {}, p.affine_b[r]};
      for (int j = 0; j < n_; ++j) {
        if (p.affine_a(r, j) != 0.0) {
          row.index.push_back(j);
          row.coef.push_back(p.affine_a(r, j));
        }
      }
      rows_.push_back(std::move(row));
    }
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(p.lower[j])) ++m_;
      if (std::isfinite(p.upper[j])) ++m_;
    }
    m_ += static_cast<int>(rows_.size() + p.constraints.size());
    scratch_ = Eigen::VectorXd::Zero(n_);
  }

  int barrier_terms() const { return m_; }

  bool strictly_feasible(const Eigen::VectorXd& x) const {
    for (int j = 0; j < n_; ++j) {
      if (!(x[j] > p_.lower[j]) || !(x[j] < p_.upper[j])) return false;
    }
    for (const auto& row : rows_) {
      if (!(slack(row, x) > 0.0)) return false;
    }
    for (const auto& g : p_.constraints) {
      if (!(g->value(x) < 0.0)) return false;
    }
    return std::isfinite(p_.objective->value(x));
  }

  // Barrier function value; +inf outside the strict interior.
  double phi(const Eigen::VectorXd& x, double t) const {
    double v = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(p_.lower[j])) {
        const double s = x[j] - p_.lower[j];
        if (!(s > 0.0)) return kInf;
        v -= std::log(s);
      }
      if (std::isfinite(p_.upper[j])) {
        const double s = p_.upper[j] - x[j];
        if (!(s > 0.0)) return kInf;
        v -= std::log(s);
      }
    }
    for (const auto& row : rows_) {
      const double s = slack(row, x);
      if (!(s > 0.0)) return kInf;
      v -= std::log(s);
    }
    for (const auto& g : p_.constraints) {
      const double gv = g->value(x);
      if (!(gv < 0.0)) return kInf;
      v -= std::log(-gv);
    }
    const double f = p_.objective->value(x);
    if (!std::isfinite(f)) return kInf;
    return v - t * f;
  }

  void derivatives(const Eigen::VectorXd& x, double t, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    grad.setZero(n_);
    hess.setZero(n_, n_);
    p_.objective->add_gradient(x, -t, grad);
    p_.objective->add_hessian(x, -t, hess);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(p_.lower[j])) {
        const double s = x[j] - p_.lower[j];
        grad[j] -= 1.0 / s;
        hess(j, j) += 1.0 / (s * s);
      }
      if (std::isfinite(p_.upper[j])) {
        const double s = p_.upper[j] - x[j];
        grad[j] += 1.0 / s;
        hess(j, j) += 1.0 / (s * s);
      }
    }
    for (const auto& row : rows_) {
      const double s = slack(row, x);
      const std::size_t k = row.index.size();
      for (std::size_t a = 0; a < k; ++a) {
        grad[row.index[a]] += row.coef[a] / s;
        for (std::size_t b = 0; b < k; ++b) hess(row.index[a], row.index[b]) += row.coef[a] * row.coef[b] / (s * s);
      }
    }
    for (const auto& g : p_.constraints) {
      const double neg = -g->value(x);
      const auto& sup = g->support();
      g->add_gradient(x, 1.0, scratch_);
      for (int a : sup) {
        grad[a] += scratch_[a] / neg;
        for (int b : sup) hess(a, b) += scratch_[a] * scratch_[b] / (neg * neg);
      }
      for (int a : sup) scratch_[a] = 0.0;
      g->add_hessian(x, 1.0 / neg, hess);
    }
  }

  // Largest step keeping the box and affine rows strictly satisfied.
  double max_linear_step(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
    double s = kInf;
    for (int j = 0; j < n_; ++j) {
      if (d[j] < 0.0 && std::isfinite(p_.lower[j])) s = std::min(s, (x[j] - p_.lower[j]) / -d[j]);
      if (d[j] > 0.0 && std::isfinite(p_.upper[j])) s = std::min(s, (p_.upper[j] - x[j]) / d[j]);
    }
    for (const auto& row : rows_) {
      double rate = 0.0;
      for (std::size_t a = 0; a < row.index.size(); ++a) rate += row.coef[a] * d[row.index[a]];
      if (rate > 0.0) s = std::min(s, slack(row, x) / rate);
    }
    return s;
  }

  double stationarity(const Eigen::VectorXd& x, double t) {
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    derivatives(x, t, grad, hess);
    return grad.norm() / t;
  }

 private:
  static double slack(const SparseRow& row, const Eigen::VectorXd& x) {
    double v = row.rhs;
    for (std::size_t a = 0; a < row.index.size(); ++a) v -= row.coef[a] * x[row.index[a]];
    return v;
  }

  const SmoothConvexProgram& p_;
  const ScpOptions& opt_;
  int n_;
  int m_ = 0;
  std::vector<SparseRow> rows_;
  Eigen::VectorXd scratch_;
};

bool solve_newton_system(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad, Eigen::VectorXd& step) {
  Eigen::LLT<Eigen::MatrixXd> llt(hess);
  if (llt.info() == Eigen::Success) {
    step = -llt.solve(grad);
    if (step.allFinite()) return true;
  }
  const double scale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
  for (double reg = 1e-14; reg < 1e2; reg *= 100.0) {
    Eigen::MatrixXd shifted = hess;
    shifted.diagonal().array() += reg * scale;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) {
      step = -llt.solve(grad);
      if (step.allFinite()) return true;
    }
  }
  return false;
}

}  // namespace

ScpResult solve_scp(const SmoothConvexProgram& program, const Eigen::VectorXd& x0, const ScpOptions& options) {
  if (x0.size() != program.dimension) throw std::invalid_argument("x0 has the wrong dimension");
  BarrierSolver solver(program, options);
  ScpResult result;
  result.x = x0;
  if (!solver.strictly_feasible(x0)) {
    result.status = ScpStatus::InfeasibleStart;
    result.objective = program.objective->value(x0);
    return result;
  }
  const double f0 = program.objective->value(x0);
  const int m = solver.barrier_terms();
  double t = options.t0 > 0.0 ? options.t0 : std::max(1, m) / std::max(0.1 * std::abs(f0), 10.0 * options.tol);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd grad, step;
  Eigen::MatrixXd hess;
  result.status = ScpStatus::IterationLimit;
  for (int stage = 0; stage < options.max_stages; ++stage) {
    bool stalled = false;
    for (int it = 0; it < options.max_newton_per_stage; ++it) {
      solver.derivatives(x, t, grad, hess);
      if (!solve_newton_system(hess, grad, step)) {
        stalled = true;
        break;
      }
      const double decrement = -grad.dot(step);
      if (decrement <= 2e-10) break;
      double s = std::min(1.0, 0.99 * solver.max_linear_step(x, step));
      const double phi0 = solver.phi(x, t);
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                           (t * std::abs(program.objective->value(x)) + std::abs(phi0) + m);
      bool accepted = false;
      while (s > 1e-16) {
        const Eigen::VectorXd trial = x + s * step;
        const double phi1 = solver.phi(trial, t);
        if (std::isfinite(phi1) && phi1 <= phi0 - 0.25 * s * decrement + noise) {
          x = trial;
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      ++result.newton_steps;
      if (!accepted) {
        stalled = true;
        break;
      }
    }
    result.path_objectives.push_back(program.objective->value(x));
    result.gap = m / t;
    if (stalled && result.gap > options.tol) {
      result.status = ScpStatus::LineSearchFailure;
      break;
    }
    if (result.gap <= options.tol) {
      result.status = ScpStatus::Optimal;
      break;
    }
    t *= options.t_factor;
  }
  result.kkt_residual = solver.stationarity(x, t);
  const double f = program.objective->value(x);
  if (f >= f0) {
    result.x = x;
    result.objective = f;
  } else {
    result.x = x0;
    result.objective = f0;
  }
  return result;
}

}  // namespace backcom
