#pragma once

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace backcom {

/// Twice-differentiable scalar function of the decision vector. Evaluators may return +inf or NaN
/// outside their domain; the solver treats such points as infeasible.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;

  virtual double value(const Eigen::VectorXd& x) const = 0;
  /// Sorted, unique indices of the variables the function depends on.
  virtual const std::vector<int>& support() const = 0;
  /// grad += weight * gradient (entries outside support() are left untouched).
  virtual void add_gradient(const Eigen::VectorXd& x, double weight, Eigen::VectorXd& grad) const = 0;
  /// hess += weight * Hessian.
  virtual void add_hessian(const Eigen::VectorXd& x, double weight, Eigen::MatrixXd& hess) const = 0;
};

/// Scalar profiles available to CompositeFunction::add_univariate.
enum class Profile {
  Log2OnePlusOverShift,   // log2(1 + k / (x + s)), convex decreasing for x + s > 0
  Log2OnePlusOverSquare,  // log2(1 + k / x^2), convex decreasing for x > 0
  Log2OnePlusScaled,      // log2(1 + k x), concave increasing for 1 + k x > 0
};

/// Sum of simple terms; covers every objective and constraint of the scheduling and trajectory subproblems.
class CompositeFunction final : public SmoothFunction {
 public:
  CompositeFunction& add_constant(double c);
  CompositeFunction& add_linear(int i, double coef);
  /// coef * ||(x_i, x_{i+1}) - p||^2
  CompositeFunction& add_squared_distance(int i, const Eigen::Vector2d& p, double coef);
  /// coef * ||(x_i, x_{i+1}) - (x_j, x_{j+1})||^2
  CompositeFunction& add_squared_difference(int i, int j, double coef);
  /// coef * profile(x_i; k, s)
  CompositeFunction& add_univariate(int i, Profile profile, double k, double shift, double coef);

  double value(const Eigen::VectorXd& x) const override;
  const std::vector<int>& support() const override { return support_; }
  void add_gradient(const Eigen::VectorXd& x, double weight, Eigen::VectorXd& grad) const override;
  void add_hessian(const Eigen::VectorXd& x, double weight, Eigen::MatrixXd& hess) const override;

 private:
  struct Linear {
    int i;
    double coef;
  };
  struct Distance {
    int i;
    Eigen::Vector2d p;
    double coef;
  };
  struct Difference {
    int i;
    int j;
    double coef;
  };
  struct Univariate {
    int i;
    Profile profile;
    double k;
    double shift;
    double coef;
  };

  void touch(int i);

  double constant_ = 0.0;
  std::vector<Linear> linear_;
  std::vector<Distance> distance_;
  std::vector<Difference> difference_;
  std::vector<Univariate> univariate_;
  std::vector<int> support_;
};

/// Value, first and second derivative of a scalar profile.
struct ProfileEval {
  double value;
  double d1;
  double d2;
};
ProfileEval evaluate_profile(Profile profile, double x, double k, double shift);

/// maximize f(x) subject to A x <= b, g_k(x) <= 0, lower <= x <= upper
/// (f concave, g_k convex; infinite bounds allowed).
struct SmoothConvexProgram {
  int dimension = 0;
  std::shared_ptr<const SmoothFunction> objective;
  Eigen::MatrixXd affine_a;
  Eigen::VectorXd affine_b;
  std::vector<std::shared_ptr<const SmoothFunction>> constraints;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Unbounded box and no affine rows.
  static SmoothConvexProgram unconstrained(int dimension, std::shared_ptr<const SmoothFunction> objective);
};

struct ScpOptions {
  /// Absolute duality-gap target m / t.
  double tol = 1e-9;
  /// Initial barrier weight; 0 selects m / max(0.1 |f(x0)|, 10 tol).
  double t0 = 0.0;
  double t_factor = 10.0;
  int max_newton_per_stage = 100;
  int max_stages = 60;
};

enum class ScpStatus { Optimal, InfeasibleStart, LineSearchFailure, IterationLimit };

std::string to_string(ScpStatus status);

struct ScpResult {
  ScpStatus status = ScpStatus::InfeasibleStart;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Duality gap bound m / t of the last centered point.
  double gap = 0.0;
  /// Stationarity residual of the Lagrangian with barrier-implied multipliers.
  double kkt_residual = 0.0;
  int newton_steps = 0;
  /// Objective after each centering stage (the central path).
  std::vector<double> path_objectives;
};

/// Log-barrier path following with damped Newton centering and backtracking line search.
/// x0 must be strictly feasible. The returned objective is never below f(x0).
ScpResult solve_scp(const SmoothConvexProgram& program, const Eigen::VectorXd& x0, const ScpOptions& options = {});

}  // namespace backcom
