#pragma once

#include <vector>

#include "dunkl_lab/gauss_poly.hpp"
#include "dunkl_lab/report.hpp"
#include "dunkl_lab/transform.hpp"

namespace dunkl {

struct PoissonOptions {
  double tail_tol = 1e-14;   // e^{-t Xi} target for the kernel frequency cutoff
  double max_freq = 400.0;
  double density = 0.6;      // refinement factor of the kernel frequency rule
};

class PoissonEvaluator {
 public:
  explicit PoissonEvaluator(PlanPtr plan, PoissonOptions opts = {});

  const TransformPlan& plan() const { return *plan_; }
  const PlanPtr& plan_ptr() const { return plan_; }
  const RootSystemSpec& rs() const { return plan_->grid()->rs; }
  const PoissonOptions& options() const { return opts_; }

  // (-|xi|)^m e^{-t|xi|} F
  SpectralFunction evolve(const SpectralFunction& F, double t, int m = 0) const;
  GridFunction apply(const GridFunction& f, double t) const;
  GridFunction apply_dt(const GridFunction& f, double t, int m) const;

  // p_t(x, y) and its t-derivatives by frequency quadrature
  double kernel(const Vec& x, const Vec& y, double t, int m = 0) const;
  std::vector<double> kernel_row(const Vec& x, const std::vector<Vec>& ys, double t, int m = 0) const;

 private:
  PlanPtr plan_;
  PoissonOptions opts_;
};

GridFunction poisson_apply(const PoissonEvaluator& pe, const GridFunction& f, double t);
double poisson_kernel(const PoissonEvaluator& pe, const Vec& x, const Vec& y, double t);

struct MassResult {
  double mass = 0.0;
  double tail = 0.0;   // fitted contribution beyond the truncation radius
  double truncated = 0.0;
};

// integral of p_t(x, .) dw over a rank-one grid of radius Y plus a power-law tail fit
MassResult kernel_mass(const PoissonEvaluator& pe, const Vec& x, double t, double Y = 24.0, int resolution = 384);

struct KernelSample {
  Vec x, y;
  double t = 1.0;
};

struct KernelBoundRow {
  KernelSample s;
  double p = 0.0;
  double d = 0.0;       // orbit distance
  double euclid = 0.0;  // |x - y|
  double v_lower = 0.0; // V(x, y, t + |x - y|)
  double v_upper = 0.0; // V(x, y, t + d)
  double lower_ratio = 0.0;  // lower model / p
  double upper_ratio = 0.0;  // p / upper model
  double dt = 0.0;           // d/dt p_t(x, y)
  double mixed_ratio = 0.0;  // |dt p| / (p (t + d)^{-1} (1 + d / t))
};

struct KernelBoundReport {
  std::vector<KernelBoundRow> rows;
  double fitted_c = 1.0;
  double mixed_c = 0.0;
  double min_p = 0.0;
  bool positive = true;
};

KernelBoundReport check_kernel_bounds(const PoissonEvaluator& pe, const std::vector<KernelSample>& samples,
                                      int ball_resolution = 48);

// PDE residual, contraction and decay checks for P_t f
VerificationReport semigroup_residuals(const PoissonEvaluator& pe, const GaussPoly& f, const std::vector<double>& t_list);

double pde_residual(const PoissonEvaluator& pe, const GridFunction& f, double t);

}  // namespace dunkl
