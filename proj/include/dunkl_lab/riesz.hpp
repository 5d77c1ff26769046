#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dunkl_lab/gauss_poly.hpp"
#include "dunkl_lab/semigroup.hpp"

namespace dunkl {

struct RieszParams {
  double p = 2.0;
  double q = 2.0;
  double p_star = 2.0;
  double k_sum = 0.0;

  static RieszParams make(double p, const RootSystemSpec& rs);
};

// -i xi_j / |xi| times F; j is 1-based, 1 <= j <= N
SpectralFunction riesz_multiplier(const SpectralFunction& F, int j);
// j is 1-based, 1 <= j <= N
GridFunction riesz_apply(const TransformPlan& plan, const GridFunction& f, int j);
GridFunction riesz_apply(const PoissonEvaluator& pe, const GridFunction& f, int j);
GridFunction hilbert_apply(const PoissonEvaluator& pe, const GridFunction& f);
GridFunction riesz_vector_magnitude(const PoissonEvaluator& pe, const GridFunction& f);

class LowFrequencyError : public std::runtime_error {
 public:
  LowFrequencyError(const std::string& msg, double ratio) : std::runtime_error(msg), shell_ratio(ratio) {}
  double shell_ratio;
};

// Ratio S(r, 2r) / S(2r, 4r) of |F|^2 |xi|^{-2} dw over frequency shells; below 2^{-1/4} means the
// |xi|^{-1} multiplier is integrable at the origin for this f.
double low_frequency_shell_ratio(const SpectralFunction& F, double r = 0.1);

struct RieszIdentityResult {
  double spectral = 0.0;  // T_j as the i xi_j multiplier
  double direct = 0.0;    // T_j as derivative plus difference quotient on the grid
  double shell_ratio = 0.0;
};

// |R_j f + T_j (-Delta_k)^{-1/2} f|_2 / |f|_2; throws LowFrequencyError if f is not admissible
RieszIdentityResult riesz_identity(const PoissonEvaluator& pe, const GridFunction& f, int j);
double riesz_identity_residual(const PoissonEvaluator& pe, const GridFunction& f, int j);

struct FamilySpec {
  int max_degree = 6;
  double a_min = 0.25;
  double a_max = 2.0;
  bool symmetrize = false;  // average over the group
};

// reproducible draw for (seed, trial)
GaussPoly draw_test_function(const RootSystemSpec& rs, const FamilySpec& fam, std::uint64_t seed, int trial);

struct RatioRow {
  int trial = 0;
  std::string function;
  double f_norm = 0.0;
  double rf_norm = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  double shell_fraction = 0.0;   // share of |Rf|^p in the outer 10% of the box
  double spectral_tail = 0.0;    // share of |Ff|^2 in the outer 10% of the frequency box
  bool flagged = false;
};

struct RatioReport {
  std::vector<RatioRow> rows;
  double max_ratio = 0.0;
  double bound = 0.0;
  std::string bound_kind;
  int flagged = 0;
};

double riesz_bound(const RieszParams& params, int dimension, bool g_invariant);

RatioReport norm_ratio_experiment(const PoissonEvaluator& pe, const RieszParams& params, const FamilySpec& fam,
                                  int trials, std::uint64_t seed);

std::string ratio_report_csv(const RatioReport& r);

}  // namespace dunkl
