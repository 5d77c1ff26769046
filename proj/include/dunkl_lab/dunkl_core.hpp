#pragma once

#include <variant>

#include "dunkl_lab/gauss_poly.hpp"
#include "dunkl_lab/transform.hpp"

namespace dunkl {

using FunctionRep = std::variant<GaussPoly, GridFunction>;

enum class GridDerivative { Spectral, Direct };

// Closed form, exact; requires coordinate-aligned roots.
GaussPoly apply_dunkl_operator(const RootSystemSpec& rs, const GaussPoly& f, const Vec& xi);
GaussPoly dunkl_laplacian(const RootSystemSpec& rs, const GaussPoly& f);

// Grid path. Spectral multiplies the transform by i<xi, eta>; Direct differentiates the
// inverse transform and adds node-permutation difference quotients.
GridFunction apply_dunkl_operator(const TransformPlan& plan, const GridFunction& f, const Vec& xi,
                                  GridDerivative how = GridDerivative::Spectral);
GridFunction dunkl_laplacian(const TransformPlan& plan, const GridFunction& f);

FunctionRep apply_dunkl_operator(const RootSystemSpec& rs, const FunctionRep& f, const Vec& xi,
                                 const TransformPlan* plan = nullptr);
FunctionRep dunkl_laplacian(const RootSystemSpec& rs, const FunctionRep& f, const TransformPlan* plan = nullptr);

// Pointwise evaluation for any root system. On a hyperplane the difference quotient is replaced
// by its limit <grad f, alpha>.
double dunkl_operator_at(const RootSystemSpec& rs, const GaussPoly& f, const Vec& xi, const Vec& x);
double dunkl_laplacian_at(const RootSystemSpec& rs, const GaussPoly& f, const Vec& x);

// Gradient-plus-difference closed form; throws on a hyperplane.
double carre_du_champ(const RootSystemSpec& rs, const GaussPoly& f, const GaussPoly& g, const Vec& x);
// 1/2 (L(fg) - f Lg - g Lf), the defining form, for cross-checks
double carre_du_champ_from_laplacian(const RootSystemSpec& rs, const GaussPoly& f, const GaussPoly& g, const Vec& x);

// |int (T_xi f) g dw + int f (T_xi g) dw| / (|f|_2 |g|_2)
double skew_symmetry_residual(const RootSystemSpec& rs, const QuadratureGrid& grid, const GaussPoly& f,
                              const GaussPoly& g, const Vec& xi);

}  // namespace dunkl
