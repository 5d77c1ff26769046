#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dunkl_lab/root_system.hpp"

namespace dunkl {

using cplx = std::complex<double>;

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes; cached per n.
const GaussRule& gauss_legendre(int n);

// One symmetric axis of a grid: composite Gauss-Legendre panels graded toward 0.
struct AxisRule {
  std::vector<double> nodes;    // ascending, symmetric about 0, never 0
  std::vector<double> weights;  // Lebesgue quadrature weights
};

// resolution = total node count on [-radius, radius]; layers < 0 picks the default grading depth.
AxisRule graded_axis_rule(double radius, int resolution, int layers = -1);

struct QuadratureGrid {
  RootSystemSpec rs;
  double radius = 0.0;
  int resolution = 0;
  int dimension = 1;
  std::vector<AxisRule> axes;
  std::vector<std::vector<double>> axis_dw;  // per-axis Lebesgue weight times axis density (no prefactor)
  std::vector<double> nodes;                 // flattened, size() * dimension
  std::vector<double> dw_weights;

  std::size_t size() const { return dw_weights.size(); }
  Vec node(std::size_t i) const;
  double coord(std::size_t i, int axis) const { return nodes[i * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(axis)]; }
  // Index of the node g(x) for every node x.
  std::vector<std::size_t> permutation(std::size_t g) const;
  // Index of the node sigma_alpha(x) for root index a.
  std::vector<std::size_t> reflection_permutation(std::size_t root_index) const;
  std::string descriptor_json() const;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

GridPtr build_grid(const RootSystemSpec& rs, double radius, int resolution, int layers = -1);

struct GridFunction {
  GridPtr grid;
  std::vector<cplx> values;
};

GridFunction make_grid_function(GridPtr grid, std::vector<cplx> values);
GridFunction sample(GridPtr grid, const std::function<cplx(const Vec&)>& f);
GridFunction compose_with_group(const GridFunction& f, std::size_t g);

cplx integrate(const QuadratureGrid& grid, const std::vector<cplx>& values);
cplx integrate(const GridFunction& f);
double integrate_real(const QuadratureGrid& grid, const std::vector<double>& values);
double lp_norm(const GridFunction& f, double p);  // p = INFINITY gives the sup proxy
double sup_norm(const GridFunction& f);
double pairwise_sum(const std::vector<double>& v);

double ball_measure(const RootSystemSpec& rs, const Vec& center, double r, int resolution = 64);

struct FittedConstant {
  double value = 0.0;  // smallest C >= 1 making the comparison hold on the sample set
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

// w(B(x,r)) against r^N prod (|<x,alpha>| + r)^k(alpha).
FittedConstant ball_comparability(const RootSystemSpec& rs, const std::vector<std::pair<Vec, double>>& samples,
                                  int resolution = 64);
// max w(B(x,2r)) / w(B(x,r)) over the samples.
double doubling_constant(const RootSystemSpec& rs, const std::vector<std::pair<Vec, double>>& samples,
                         int resolution = 64);

void write_grid_function_csv(const std::string& path, const GridFunction& f);
GridFunction read_grid_function_csv(const std::string& path, GridPtr grid);
void write_grid_function_binary(const std::string& path, const GridFunction& f);
GridFunction read_grid_function_binary(const std::string& path, GridPtr grid);

}  // namespace dunkl
