#pragma once

#include <functional>

#include "tve/thermal_step.hpp"

namespace tve {

// Piecewise-linear time curve; interval averages are exact.
template <class T>
class Curve {
 public:
  static Curve constant(T v) {
    Curve c;
    c.constant_ = true;
    c.values_ = {v};
    return c;
  }

  static Curve piecewise_linear(std::vector<double> times, std::vector<T> values) {
    if (times.size() < 2 || times.size() != values.size())
      fail(ErrorCode::ValidationError, "Curve: need matching times/values, at least two");
    for (size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        fail(ErrorCode::ValidationError, "Curve: times must be strictly increasing");
    Curve c;
    c.times_ = std::move(times);
    c.values_ = std::move(values);
    return c;
  }

  T eval(double t) const {
    if (constant_) return values_[0];
    check_domain(t);
    t = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    size_t hi = std::min(size_t(it - times_.begin()), times_.size() - 1);
    if (hi == 0) hi = 1;
    const size_t lo = hi - 1;
    const double s = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return values_[lo] * (1.0 - s) + values_[hi] * s;
  }

  T interval_average(double t0, double t1) const {
    if (constant_) return values_[0];
    if (!(t1 > t0)) fail(ErrorCode::ValidationError, "interval_average: empty interval");
    check_domain(t0);
    check_domain(t1);
    // Trapezoid on the curve's own breakpoints: exact for piecewise-linear data.
    T acc = values_[0] * 0.0;
    double a = t0;
    for (size_t i = 1; i < times_.size() && a < t1; ++i) {
      if (times_[i] <= a) continue;
      const double b = std::min(times_[i], t1);
      acc = acc + (eval(a) + eval(b)) * (0.5 * (b - a));
      a = b;
    }
    return acc * (1.0 / (t1 - t0));
  }

  double domain_end() const { return constant_ ? std::numeric_limits<double>::infinity()
                                               : times_.back(); }

 private:
  void check_domain(double t) const {
    const double slack = 1e-9 * std::max(1.0, std::abs(times_.back()));
    if (t < times_.front() - slack || t > times_.back() + slack)
      fail(ErrorCode::CurveUndefined, "Curve: t outside [" + std::to_string(times_.front()) +
                                          ", " + std::to_string(times_.back()) + "]");
  }

  bool constant_ = false;
  std::vector<double> times_;
  std::vector<T> values_;
};

struct DirichletMotion {
  enum class Kind { Static, RigidRotation, Map };
  Kind kind = Kind::Static;
  double rotation_rate = 0.0;  // radians per unit time about the out-of-plane axis
  std::function<Vec2(double, const Vec2&)> map;

  Vec2 apply(double t, const Vec2& x) const;
  bool is_rigid() const { return kind != Kind::Map; }
  // Exact composition h(t1) o h(t0)^{-1} for rigid motions.
  std::function<Vec2(const Vec2&)> incremental_update(double t0, double t1) const;
};

struct LoadProgram {
  Curve<Vec2> body_force = Curve<Vec2>::constant(Vec2::Zero());
  Curve<Vec2> traction = Curve<Vec2>::constant(Vec2::Zero());
  Curve<double> theta_flat = Curve<double>::constant(0.0);
  DirichletMotion dirichlet_motion;
};

StepLoads step_loads(const LoadProgram& loads, int k, double tau);

struct Trajectory {
  std::vector<State> states;  // t = 0, tau, 2 tau, ...
  std::vector<StepReport> mech_reports;
  std::vector<StepReport> thermal_reports;

  int step_count() const { return int(mech_reports.size()); }
};

class SimulationError : public Error {
 public:
  SimulationError(ErrorCode code, const std::string& msg, int step, Trajectory partial)
      : Error(code, msg), step(step), partial(std::move(partial)) {}
  int step;
  Trajectory partial;
};

using StepCallback =
    std::function<void(int k, const State&, const StepReport& mech, const StepReport& thermal)>;

Trajectory run_simulation(const Mesh& mesh, const FemCache& cache, const MaterialModel& m,
                          const LoadProgram& loads, const Eigen::VectorXd& y0,
                          const Eigen::VectorXd& theta0, double tau, double t_end,
                          const MechSolveConfig& mech_cfg, const ThermalSolveConfig& thermal_cfg,
                          const StepCallback& callback = nullptr);

}  // namespace tve
