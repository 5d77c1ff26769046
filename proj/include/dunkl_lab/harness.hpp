#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "dunkl_lab/bellman.hpp"
#include "dunkl_lab/gauss_poly.hpp"
#include "dunkl_lab/report.hpp"
#include "dunkl_lab/semigroup.hpp"

namespace dunkl {

// Phi(x/n): 1 on |x| <= n, exp(1 - 1/(1 - (|x|/n - 1)^2)) on n < |x| < 2n, 0 beyond
double cutoff_phi(const Vec& x, double n);
// radial profile phi(r) of Phi and its first two derivatives
double cutoff_profile(double r, int derivative = 0);
// nu_a(t) = t exp(-a (t + 1/t)) and its t-derivatives
double nu(double t, double a, int derivative = 0);
// int_0^inf |nu_a''(t)| dt
double nu_second_integral(double a);
// (n max(1, w(B(0, 2n))))^{-1/q}
double kappa_n(const RootSystemSpec& rs, double n, double q);

// geometric t-panels on [t_min, t_max] with `nodes` Gauss points each; (node, weight) pairs
std::vector<std::pair<double, double>> geometric_t_rule(double t_min, double t_max, int panels_per_six_decades = 64,
                                                        int nodes = 8);

struct HarnessGrids {
  double radius = 16.0;
  int resolution = 512;
  double freq_radius = 12.0;
  int freq_resolution = 384;

  static HarnessGrids for_dimension(int N);
};

// u = (P_t f, P_t g_1, ..., P_t g_N); b_kappa = B_kappa(u) with N1 = 1, N2 = N
struct HarnessState {
  RootSystemSpec rs;
  GaussPoly f;
  std::vector<GaussPoly> g;
  BellmanParams bp;
  std::shared_ptr<const PoissonEvaluator> pe;
  SpectralFunction F;
  std::vector<SpectralFunction> G;

  int components() const { return 1 + static_cast<int>(g.size()); }
  const TransformPlan& plan() const { return pe->plan(); }
  const QuadratureGrid& grid() const { return *pe->plan().grid(); }
  // u and its t-derivatives of order m at an arbitrary point
  Vec u(const Vec& x, double t, int m = 0) const;
  Vec u_at(const PointRows& rows, double t, int m = 0) const;
  double b_kappa(const Vec& x, double t, double kappa) const;
  BellmanParams params(double kappa) const;
  bool f_invariant() const;
};

HarnessState build_state(const RootSystemSpec& rs, const GaussPoly& f, const std::vector<GaussPoly>& g_list,
                         const BellmanParams& bp, const HarnessGrids& grids);
HarnessState build_state(const RootSystemSpec& rs, const GaussPoly& f, const std::vector<GaussPoly>& g_list,
                         const BellmanParams& bp);

struct LaplaceBellmanTerms {
  double lhs = 0.0;         // (d_t^2 + Delta_k) b_kappa by finite differences
  double t_term = 0.0;      // <Hess B u_t, u_t>
  double x_term = 0.0;      // sum_j <Hess B d_j u, d_j u>
  double reflection = 0.0;  // sum_alpha k(alpha) int_0^1 s <Hess B(...) rho u, rho u> ds
  double rhs() const { return t_term + x_term + reflection; }
  double residual() const;
};

LaplaceBellmanTerms laplace_bellman_terms(const HarnessState& s, const Vec& x, double t, double kappa);
// |LHS - RHS| / (1 + |LHS|) at kappa = bp.kappa
double laplace_on_bellman_residual(const HarnessState& s, const Vec& x, double t);

struct DualIdentity {
  double pairing = 0.0;   // int R_j f g dw
  double integral = 0.0;  // 4 int int t d_t P_t g T_j P_t f dt dw
  double scale = 0.0;     // |f|_2 |g|_2
  double tail = 0.0;      // tail proxy at t_max, relative to the accumulated absolute integral
  double signed_residual() const;
  double absolute_residual() const;
};

// j is 1-based; throws if the tail bound at t_max is not met
DualIdentity dual_identity(const PoissonEvaluator& pe, const GaussPoly& f, const GaussPoly& g, int j,
                           double t_max = 1e3);
double dual_identity_residual(const PoissonEvaluator& pe, const GaussPoly& f, const GaussPoly& g, int j,
                              double t_max = 1e3);

struct PipelineRow {
  double n = 1.0, eps = 1.0, kappa = 1.0;
  bool bellman = true;  // rows without it only carry the kappa-free and e-term columns
  double I = 0.0, I_t = 0.0, I_x = 0.0, I_reflection = 0.0;
  double lhs = 0.0;      // sum_j int Phi int nu |d_t P_t g_j T_j P_t f|
  double lhs_odd = 0.0;  // int Phi int nu |d_t P_t f| |T P_t g_1|
  double e1 = 0.0, e2 = 0.0;
  double e1_integral = 0.0;   // e1 / (6 kappa^{2-q})
  double dk_block = 0.0;      // int Phi int nu Delta_k b
  double dk_block_parts = 0.0;  // int Delta_k(Phi(./n)) int nu b
  double dt2_block = 0.0;     // int Phi int nu d_t^2 b
  double dt2_block_parts = 0.0;  // int Phi int nu'' b
  double dt2_majorant = 0.0;  // (1+gamma) int Phi int |nu''| ((|P_t f|+kappa)^p + (|P_t g|+kappa)^q)
  double b_min = 0.0;
  double lower_factor = 0.0;
  double slack = 0.0;
  double scale = 1.0;
};

// one sweep over the t-rule shared by every (n, eps) pair
std::vector<PipelineRow> run_pipeline(const HarnessState& s, const std::vector<std::pair<double, double>>& pairs,
                                      bool with_bellman = true);

double compute_I(const HarnessState& s, double n, double eps);
// I with the finite-difference LHS of the Laplace-on-Bellman identity as integrand
double compute_I_direct(const HarnessState& s, double n, double eps);
// (2/gamma)(sum k + 2^7) I - LHS; factor 2/gamma alone when f is G-invariant
double lower_estimate_slack(const HarnessState& s, double n, double eps);

VerificationReport upper_estimate_report(const HarnessState& s, const std::vector<double>& eps_list,
                                         const std::vector<double>& n_list);
VerificationReport lower_estimate_report(const HarnessState& s, const std::vector<double>& eps_list,
                                         const std::vector<double>& n_list);
// smoothness and decay of b_kappa over sampled (x, t)
VerificationReport state_report(const HarnessState& s);

// N = 1: even/odd split of g_1, e-terms over n_list, odd- and even-part slack at (n_slack, eps)
VerificationReport one_dim_pipeline(const HarnessState& s, const std::vector<double>& n_list, double eps,
                                    double n_slack, bool with_slack = true);

// (1+gamma)/gamma ((p/q)^{1/p} + (q/p)^{1/q}) and the dual pairing under f -> sf, g -> g/s
VerificationReport polarization_report(const PoissonEvaluator& pe, const GaussPoly& f, const GaussPoly& g,
                                       double p);

}  // namespace dunkl
