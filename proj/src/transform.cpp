#include "dunkl_lab/transform.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dunkl_lab/io.hpp"
#include "dunkl_lab/parallel.hpp"

namespace dunkl {

Normalizer compute_normalizer(const QuadratureGrid& grid) {
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r2 = 0.0;
    for (int j = 0; j < grid.dimension; ++j) r2 += grid.coord(i, j) * grid.coord(i, j);
    g[i] = std::exp(-0.5 * r2);
  }
  return {integrate_real(grid, g)};
}

namespace {

double axis_normalizer(const QuadratureGrid& g, int j) {
  const auto& ax = g.axes[static_cast<std::size_t>(j)];
  std::vector<double> v(ax.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::exp(-0.5 * ax.nodes[i] * ax.nodes[i]) * g.axis_dw[static_cast<std::size_t>(j)][i];
  return pairwise_sum(v);
}

}  // namespace

TransformPlan::TransformPlan(GridPtr grid, GridPtr freq_grid, KernelEval ke)
    : grid_(std::move(grid)), freq_(std::move(freq_grid)), ke_(std::move(ke)) {
  if (!grid_ || !freq_) throw std::runtime_error("transform plan needs two grids");
  if (grid_->dimension != freq_->dimension) throw std::runtime_error("grid and frequency grid dimensions differ");
  if (root_system_to_json(grid_->rs) != root_system_to_json(freq_->rs))
    throw std::runtime_error("grid and frequency grid use different root systems");
  ke_.rs = grid_->rs;
  const int n = grid_->dimension;
  const auto ks = grid_->rs.axis_k();
  const QuadratureGrid& wide = grid_->radius >= freq_->radius ? *grid_ : *freq_;
  c_k_ = grid_->rs.prefactor;
  for (int j = 0; j < n; ++j) {
    axis_c_.push_back(axis_normalizer(wide, j));
    c_k_ *= axis_c_.back();
  }
  for (int j = 0; j < n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const auto& xs = grid_->axes[ju].nodes;
    const auto& xi = freq_->axes[ju].nodes;
    const std::size_t nx = xs.size(), nf = xi.size();
    const double c = axis_c_[ju];
    Matrix K(nf * nx);
    parallel_for(nf, [&](std::size_t i) {
      for (std::size_t l = 0; l < nx; ++l) K[i * nx + l] = kernel_1d(ks[ju], xi[i] * xs[l], true, ke_);
    });
    Matrix F(nf * nx), I(nx * nf);
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t l = 0; l < nx; ++l) {
        F[i * nx + l] = std::conj(K[i * nx + l]) * (grid_->axis_dw[ju][l] / c);
        I[l * nf + i] = K[i * nx + l] * (freq_->axis_dw[ju][i] / c);
      }
    fwd_.push_back(std::move(F));
    inv_.push_back(std::move(I));
  }
  dinv_.resize(static_cast<std::size_t>(n));
  dflags_ = std::make_unique<std::once_flag[]>(static_cast<std::size_t>(n));
}

std::vector<cplx> TransformPlan::apply_axes(const std::vector<cplx>& in, const std::vector<const Matrix*>& mats,
                                            const std::vector<std::size_t>& in_ext,
                                            const std::vector<std::size_t>& out_ext) const {
  std::vector<cplx> cur = in;
  std::vector<std::size_t> ext = in_ext;
  for (std::size_t a = 0; a < mats.size(); ++a) {
    const Matrix& M = *mats[a];
    const std::size_t nin = ext[a], nout = out_ext[a];
    std::size_t pre = 1, post = 1;
    for (std::size_t b = 0; b < a; ++b) pre *= ext[b];
    for (std::size_t b = a + 1; b < ext.size(); ++b) post *= ext[b];
    std::vector<cplx> out(pre * nout * post);
    parallel_for(pre * nout, [&](std::size_t pr) {
      const std::size_t p = pr / nout, r = pr % nout;
      cplx* dst = &out[(p * nout + r) * post];
      const cplx* row = &M[r * nin];
      if (post == 1) {
        const cplx* src = &cur[p * nin];
        double re = 0.0, im = 0.0;
        for (std::size_t c = 0; c < nin; ++c) {
          const double ar = row[c].real(), ai = row[c].imag();
          const double br = src[c].real(), bi = src[c].imag();
          re += ar * br - ai * bi;
          im += ar * bi + ai * br;
        }
        dst[0] = {re, im};
      } else {
        for (std::size_t q = 0; q < post; ++q) dst[q] = 0.0;
        for (std::size_t c = 0; c < nin; ++c) {
          const cplx m = row[c];
          const cplx* src = &cur[(p * nin + c) * post];
          for (std::size_t q = 0; q < post; ++q) dst[q] += m * src[q];
        }
      }
    });
    cur = std::move(out);
    ext[a] = nout;
  }
  return cur;
}

namespace {

std::vector<std::size_t> extents(const QuadratureGrid& g) {
  std::vector<std::size_t> e;
  for (const auto& ax : g.axes) e.push_back(ax.nodes.size());
  return e;
}

}  // namespace

SpectralFunction TransformPlan::forward(const GridFunction& f) const {
  if (f.grid.get() != grid_.get() && f.grid->descriptor_json() != grid_->descriptor_json())
    throw std::runtime_error("function does not live on the plan's grid");
  std::vector<const Matrix*> mats;
  for (const auto& m : fwd_) mats.push_back(&m);
  return {freq_, apply_axes(f.values, mats, extents(*grid_), extents(*freq_))};
}

GridFunction TransformPlan::inverse(const SpectralFunction& F) const {
  if (F.freq_grid.get() != freq_.get() && F.freq_grid->descriptor_json() != freq_->descriptor_json())
    throw std::runtime_error("spectral function does not live on the plan's frequency grid");
  std::vector<const Matrix*> mats;
  for (const auto& m : inv_) mats.push_back(&m);
  return {grid_, apply_axes(F.values, mats, extents(*freq_), extents(*grid_))};
}

cplx TransformPlan::inverse_at(const SpectralFunction& F, const Vec& x) const { return inverse_at(F, point_rows(x)); }

PointRows TransformPlan::point_rows(const Vec& x) const {
  const int n = grid_->dimension;
  if (static_cast<int>(x.size()) != n) throw std::runtime_error("point has wrong dimension");
  const auto ks = grid_->rs.axis_k();
  PointRows r{x, std::vector<std::vector<cplx>>(static_cast<std::size_t>(n))};
  for (int j = 0; j < n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const auto& xi = freq_->axes[ju].nodes;
    r.rows[ju].resize(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i)
      r.rows[ju][i] = kernel_1d(ks[ju], xi[i] * x[ju], true, ke_) * (freq_->axis_dw[ju][i] / axis_c_[ju]);
  }
  return r;
}

cplx TransformPlan::inverse_at(const SpectralFunction& F, const PointRows& r) const {
  const auto ext = extents(*freq_);
  if (r.rows.size() != ext.size()) throw std::runtime_error("point rows have wrong dimension");
  // contract the last axis first so the work stays a chain of dot products
  std::vector<cplx> cur = F.values;
  for (std::size_t a = ext.size(); a-- > 0;) {
    const std::size_t m = ext[a], outer = cur.size() / m;
    const auto& row = r.rows[a];
    std::vector<cplx> next(outer);
    for (std::size_t o = 0; o < outer; ++o) {
      cplx s = 0.0;
      const cplx* src = &cur[o * m];
      for (std::size_t c = 0; c < m; ++c) s += row[c] * src[c];
      next[o] = s;
    }
    cur = std::move(next);
  }
  return cur[0];
}

const TransformPlan::Matrix& TransformPlan::derivative_matrix(int axis) const {
  const auto ju = static_cast<std::size_t>(axis);
  std::call_once(dflags_[ju], [&] {
    const auto ks = grid_->rs.axis_k();
    const auto& xs = grid_->axes[ju].nodes;
    const auto& xi = freq_->axes[ju].nodes;
    const std::size_t nx = xs.size(), nf = xi.size();
    Matrix D(nx * nf);
    parallel_for(nx, [&](std::size_t l) {
      for (std::size_t i = 0; i < nf; ++i)
        D[l * nf + i] = xi[i] * kernel_1d_dz_imag(ks[ju], xs[l] * xi[i], ke_) * (freq_->axis_dw[ju][i] / axis_c_[ju]);
    });
    dinv_[ju] = std::move(D);
  });
  return dinv_[ju];
}

GridFunction TransformPlan::inverse_partial(const SpectralFunction& F, int axis) const {
  if (axis < 0 || axis >= grid_->dimension) throw std::runtime_error("derivative axis out of range");
  std::vector<const Matrix*> mats;
  for (int j = 0; j < grid_->dimension; ++j)
    mats.push_back(j == axis ? &derivative_matrix(j) : &inv_[static_cast<std::size_t>(j)]);
  return {grid_, apply_axes(F.values, mats, extents(*freq_), extents(*grid_))};
}

double TransformPlan::spectral_tail_fraction(const SpectralFunction& F) const {
  std::vector<double> all(F.values.size()), outer(F.values.size(), 0.0);
  const double cut = 0.9 * freq_->radius;
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = std::norm(F.values[i]);
    bool out = false;
    for (int j = 0; j < freq_->dimension; ++j)
      if (std::abs(freq_->coord(i, j)) > cut) out = true;
    if (out) outer[i] = all[i];
  }
  const double tot = integrate_real(*freq_, all);
  return tot > 0.0 ? integrate_real(*freq_, outer) / tot : 0.0;
}

PlanPtr make_plan(GridPtr grid, GridPtr freq_grid, KernelEval ke) {
  return std::make_shared<const TransformPlan>(std::move(grid), std::move(freq_grid), std::move(ke));
}

SpectralFunction forward(const GridPtr& grid, const GridFunction& f, const GridPtr& freq_grid) {
  return TransformPlan(grid, freq_grid).forward(f);
}

GridFunction inverse(const GridPtr& freq_grid, const SpectralFunction& F, const GridPtr& grid) {
  return TransformPlan(grid, freq_grid).inverse(F);
}

SpectralFunction forward(const TransformPlan& plan, const GridFunction& f) { return plan.forward(f); }
GridFunction inverse(const TransformPlan& plan, const SpectralFunction& F) { return plan.inverse(F); }

SpectralFunction apply_multiplier(const SpectralFunction& F, const Multiplier& m) {
  SpectralFunction out{F.freq_grid, std::vector<cplx>(F.values.size())};
  for (std::size_t i = 0; i < F.values.size(); ++i) {
    const cplx v = m(F.freq_grid->node(i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "multiplier is not finite at frequency node " << i;
      throw std::runtime_error(msg.str());
    }
    out.values[i] = v * F.values[i];
  }
  return out;
}

double spectral_l2_norm(const SpectralFunction& F) {
  std::vector<double> a(F.values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::norm(F.values[i]);
  return std::sqrt(integrate_real(*F.freq_grid, a));
}

double plancherel_residual(const TransformPlan& plan, const GridFunction& f) {
  const double nf = lp_norm(f, 2.0);
  if (nf == 0.0) return 0.0;
  return std::abs(spectral_l2_norm(plan.forward(f)) - nf) / nf;
}

double plancherel_residual(const GridPtr& grid, const GridPtr& freq_grid, const GridFunction& f) {
  return plancherel_residual(TransformPlan(grid, freq_grid), f);
}

void write_spectral_csv(const std::string& path, const SpectralFunction& F) {
  std::ostringstream out;
  for (int j = 0; j < F.freq_grid->dimension; ++j) out << "xi" << j << ",";
  out << "re,im\n";
  for (std::size_t i = 0; i < F.values.size(); ++i) {
    for (int j = 0; j < F.freq_grid->dimension; ++j) out << format_double(F.freq_grid->coord(i, j)) << ",";
    out << format_double(F.values[i].real()) << "," << format_double(F.values[i].imag()) << "\n";
  }
  write_file_atomic(path, out.str());
}

}  // namespace dunkl
