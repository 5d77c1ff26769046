#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "dunkl_lab/kernel.hpp"
#include "dunkl_lab/quadrature.hpp"

namespace dunkl {

struct SpectralFunction {
  GridPtr freq_grid;
  std::vector<cplx> values;
};

struct Normalizer {
  double c_k = 0.0;
};

// c_k = integral of exp(-|x|^2/2) dw over the grid.
Normalizer compute_normalizer(const QuadratureGrid& grid);

using Multiplier = std::function<cplx(const Vec&)>;

// per-axis inverse-transform rows for one point; reusable across spectral functions
struct PointRows {
  Vec x;
  std::vector<std::vector<cplx>> rows;
};

// Dense separable transform between a physical grid and a frequency grid.
class TransformPlan {
 public:
  TransformPlan(GridPtr grid, GridPtr freq_grid, KernelEval ke = {});

  const GridPtr& grid() const { return grid_; }
  const GridPtr& freq_grid() const { return freq_; }
  const KernelEval& kernel() const { return ke_; }
  double normalizer() const { return c_k_; }

  SpectralFunction forward(const GridFunction& f) const;
  GridFunction inverse(const SpectralFunction& F) const;
  // inverse transform evaluated at an arbitrary point
  cplx inverse_at(const SpectralFunction& F, const Vec& x) const;
  PointRows point_rows(const Vec& x) const;
  cplx inverse_at(const SpectralFunction& F, const PointRows& r) const;
  // d/dx_j of the inverse transform, using the kernel derivative
  GridFunction inverse_partial(const SpectralFunction& F, int axis) const;
  // fraction of int |F|^2 dw carried by the outer 10% of the frequency box
  double spectral_tail_fraction(const SpectralFunction& F) const;

 private:
  using Matrix = std::vector<cplx>;  // row-major
  std::vector<cplx> apply_axes(const std::vector<cplx>& in, const std::vector<const Matrix*>& mats,
                               const std::vector<std::size_t>& in_ext, const std::vector<std::size_t>& out_ext) const;
  const Matrix& derivative_matrix(int axis) const;

  GridPtr grid_, freq_;
  KernelEval ke_;
  double c_k_ = 0.0;
  std::vector<double> axis_c_;
  std::vector<Matrix> fwd_, inv_;
  mutable std::vector<Matrix> dinv_;
  mutable std::unique_ptr<std::once_flag[]> dflags_;
};

using PlanPtr = std::shared_ptr<const TransformPlan>;
PlanPtr make_plan(GridPtr grid, GridPtr freq_grid, KernelEval ke = {});

SpectralFunction forward(const GridPtr& grid, const GridFunction& f, const GridPtr& freq_grid);
GridFunction inverse(const GridPtr& freq_grid, const SpectralFunction& F, const GridPtr& grid);
SpectralFunction forward(const TransformPlan& plan, const GridFunction& f);
GridFunction inverse(const TransformPlan& plan, const SpectralFunction& F);

SpectralFunction apply_multiplier(const SpectralFunction& F, const Multiplier& m);
double spectral_l2_norm(const SpectralFunction& F);

// | ||Ff||_2 - ||f||_2 | / ||f||_2, zero for f = 0
double plancherel_residual(const TransformPlan& plan, const GridFunction& f);
double plancherel_residual(const GridPtr& grid, const GridPtr& freq_grid, const GridFunction& f);

void write_spectral_csv(const std::string& path, const SpectralFunction& F);

}  // namespace dunkl
