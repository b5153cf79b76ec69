#include "dualpor/fvsolver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "dualpor/errors.hpp"

namespace dualpor {

StructuredGrid StructuredGrid::line(std::size_t nx, double lx) {
  if (nx == 0 || !(lx > 0.0)) throw ParameterError("line grid needs nx > 0 and lx > 0");
  StructuredGrid g;
  g.dimension_ = 1;
  g.nx_ = nx;
  g.ny_ = 1;
  g.dx_ = lx / static_cast<double>(nx);
  g.dy_ = 1.0;
  g.build();
  return g;
}

StructuredGrid StructuredGrid::rectangle(std::size_t nx, std::size_t ny, double lx, double ly) {
  if (nx == 0 || ny == 0 || !(lx > 0.0) || !(ly > 0.0)) {
    throw ParameterError("rectangle grid needs positive sizes");
  }
  StructuredGrid g;
  g.dimension_ = 2;
  g.nx_ = nx;
  g.ny_ = ny;
  g.dx_ = lx / static_cast<double>(nx);
  g.dy_ = ly / static_cast<double>(ny);
  g.build();
  return g;
}

std::array<double, 2> StructuredGrid::center(std::size_t cell) const {
  const std::size_t i = cell % nx_;
  const std::size_t j = cell / nx_;
  return {(static_cast<double>(i) + 0.5) * dx_,
          dimension_ == 2 ? (static_cast<double>(j) + 0.5) * dy_ : 0.0};
}

void StructuredGrid::build() {
  faces_.clear();
  boundary_faces_.clear();
  neighbours_.assign(cell_count(), {});
  auto id = [&](std::size_t i, std::size_t j) { return i + nx_ * j; };
  const double area_x = dimension_ == 2 ? dy_ : 1.0;
  const double area_y = dx_;
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t c = id(i, j);
      if (i + 1 < nx_) faces_.push_back({c, id(i + 1, j), area_x / dx_});
      if (dimension_ == 2 && j + 1 < ny_) faces_.push_back({c, id(i, j + 1), area_y / dy_});
      if (i == 0) boundary_faces_.push_back({c, XMinus, area_x, area_x / (0.5 * dx_)});
      if (i + 1 == nx_) boundary_faces_.push_back({c, XPlus, area_x, area_x / (0.5 * dx_)});
      if (dimension_ == 2) {
        if (j == 0) boundary_faces_.push_back({c, YMinus, area_y, area_y / (0.5 * dy_)});
        if (j + 1 == ny_) boundary_faces_.push_back({c, YPlus, area_y, area_y / (0.5 * dy_)});
      }
    }
  }
  for (const auto& f : faces_) {
    neighbours_[f.a].push_back(f.b);
    neighbours_[f.b].push_back(f.a);
  }
}

double EffectiveParams::k_star_from(double k_f, int dimension) {
  if (dimension < 1 || dimension > 3) throw ParameterError("dimension must be 1..3");
  return k_f * static_cast<double>(dimension - 1) / static_cast<double>(dimension);
}

void EffectiveParams::validate() const {
  if (!model) throw ParameterError("effective parameters need a constitutive model");
  if (!(fracture_porosity > 0.0 && fracture_porosity < 1.0)) {
    throw ParameterError("fracture porosity must lie in (0, 1)");
  }
  if (!(k_star >= 0.0)) throw ParameterError("k* must be non-negative");
  if (!(source.c_m >= 0.0)) throw ParameterError("kernel constant must be non-negative");
}

EffectiveState initial_state(const StructuredGrid& grid, const EffectiveParams& params,
                             double saturation, double nonwetting_pressure) {
  params.validate();
  if (!(saturation > 0.0 && saturation < 1.0)) {
    throw ParameterError("initial fracture saturation must lie in (0, 1)");
  }
  const std::size_t n = grid.cell_count();
  EffectiveState st;
  st.saturation.assign(n, saturation);
  st.nonwetting_pressure.assign(n, nonwetting_pressure);
  const double pc = capillary_pressure(saturation, params.model->set().fracture.vg);
  st.wetting_pressure.assign(n, nonwetting_pressure - pc);
  st.times = {0.0};
  st.transfer_history = {std::vector<double>(n, params.model->transfer(saturation))};
  st.saturation_history = {st.saturation};
  st.running_min.assign(n, saturation);
  st.running_max.assign(n, saturation);
  return st;
}

std::vector<FaceMobility> upwind_mobilities(const StructuredGrid& grid,
                                            const std::vector<double>& saturation,
                                            const std::vector<double>& wetting_pressure,
                                            const std::vector<double>& nonwetting_pressure,
                                            const ConstitutiveModel& model) {
  const auto& vg = model.set().fracture.vg;
  const auto& fluids = model.set().fluids;
  std::vector<FaceMobility> out;
  out.reserve(grid.faces().size());
  for (const auto& f : grid.faces()) {
    const std::size_t lo = std::min(f.a, f.b);
    const std::size_t hi = std::max(f.a, f.b);
    FaceMobility m;
    const double dw = wetting_pressure[hi] - wetting_pressure[lo];
    const double dn = nonwetting_pressure[hi] - nonwetting_pressure[lo];
    m.wetting_from = dw > 0.0 ? hi : lo;
    m.nonwetting_from = dn > 0.0 ? hi : lo;
    m.wetting = mobilities(saturation[m.wetting_from], vg, fluids).wetting;
    m.nonwetting = mobilities(saturation[m.nonwetting_from], vg, fluids).nonwetting;
    out.push_back(m);
  }
  return out;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct CellProps {
  double pc = 0.0;     // P_c,f(S)
  double dpc = 0.0;    // dP_c,f/dS
  double lw = 0.0, ln = 0.0;
  double dlw = 0.0, dln = 0.0;
};

}  // namespace

struct EffectiveStepSystem::Impl {
  const StructuredGrid* grid = nullptr;
  const EffectiveParams* params = nullptr;
  std::array<BoundaryCondition, 4> boundary;
  const EffectiveState* state = nullptr;
  double dt = 0.0;
  std::size_t n = 0;     // cells
  std::size_t level = 0; // current time level index
  double pore = 0.0;     // Phi_f V
  // model I
  double implicit_weight = 0.0;
  std::vector<double> history;  // F^n per cell
  // model II
  std::vector<double> times_next;
  std::vector<std::vector<double>> p_cell;
  std::vector<std::vector<double>> ah_cell;  // alpha_hat^1 .. alpha_hat^n, plus a slot
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  mutable bool factorized = false;

  CellProps props(double s) const {
    const auto& set = params->model->set();
    CellProps c;
    c.pc = capillary_pressure(s, set.fracture.vg);
    c.dpc = capillary_pressure_derivative(s, set.fracture.vg);
    const auto kr = relative_permeabilities(s, set.fracture.vg);
    const auto dkr = relative_permeability_derivatives(s, set.fracture.vg);
    c.lw = kr.k_rw / set.fluids.mu_w;
    c.ln = kr.k_rn / set.fluids.mu_n;
    c.dlw = dkr.k_rw / set.fluids.mu_w;
    c.dln = dkr.k_rn / set.fluids.mu_n;
    return c;
  }

  // Q and dQ/dS for one cell
  std::pair<double, double> source(std::size_t cell, double s) const {
    const auto& model = *params->model;
    const double p = model.transfer(s);
    const double dp = model.transfer_derivative(s);
    if (params->source.model == SourceModel::I) {
      return {-(implicit_weight * p - history[cell]) / dt, -implicit_weight * dp / dt};
    }
    auto ah = ah_cell[cell];
    const double lo = std::min(state->running_min[cell], s);
    const double hi = std::max(state->running_max[cell], s);
    ah[level] = model.alpha_hat(lo, hi);
    const auto split = model2_split(p_cell[cell], ah, times_next, params->source.c_m, level);
    const double p0 = p_cell[cell][0];
    return {-(split.weight * (p - p0) - split.history) / dt, -split.weight * dp / dt};
  }

  double boundary_pressure_w(const BoundaryCondition& bc) const {
    return bc.nonwetting_pressure - capillary_pressure(bc.saturation, params->model->set().fracture.vg);
  }

  std::vector<double> evaluate(const std::vector<double>& x, std::vector<Eigen::Triplet<double>>* jac) const;
};

EffectiveStepSystem::EffectiveStepSystem(const StructuredGrid& grid, const EffectiveParams& params,
                                         const std::array<BoundaryCondition, 4>& boundary,
                                         const EffectiveState& state, double dt)
    : impl_(std::make_unique<Impl>()) {
  params.validate();
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  if (state.times.empty()) throw ParameterError("effective state has no time level");
  for (const auto& bc : boundary) {
    if (bc.kind == BoundaryKind::Dirichlet && !(bc.saturation > 0.0 && bc.saturation < 1.0)) {
      throw ParameterError("Dirichlet saturation must lie in (0, 1)");
    }
  }
  auto& im = *impl_;
  im.grid = &grid;
  im.params = &params;
  im.boundary = boundary;
  im.state = &state;
  im.dt = dt;
  im.n = grid.cell_count();
  im.level = state.step();
  im.pore = params.fracture_porosity * grid.volume();
  im.times_next = state.times;
  im.times_next.push_back(state.times.back() + dt);

  const std::size_t L = im.level;
  if (params.source.model == SourceModel::I) {
    const QuadratureTable table(im.times_next, params.source.c_m);
    im.implicit_weight = params.source.c_m > 0.0 ? table.I(L + 1, L + 1) : 0.0;
    const auto row = table.d_row(L);
    im.history.assign(im.n, 0.0);
    for (std::size_t k = 0; k <= L; ++k) {
      const auto& pk = state.transfer_history[k];
      for (std::size_t c = 0; c < im.n; ++c) im.history[c] += row[k] * pk[c];
    }
  } else {
    im.p_cell.assign(im.n, std::vector<double>(L + 1));
    im.ah_cell.assign(im.n, std::vector<double>(L + 1, 0.0));
    for (std::size_t k = 0; k <= L; ++k) {
      for (std::size_t c = 0; c < im.n; ++c) im.p_cell[c][k] = state.transfer_history[k][c];
    }
    for (std::size_t k = 0; k < L; ++k) {
      for (std::size_t c = 0; c < im.n; ++c) im.ah_cell[c][k] = state.alpha_hat_history[k][c];
    }
  }
}

EffectiveStepSystem::~EffectiveStepSystem() = default;
EffectiveStepSystem::EffectiveStepSystem(EffectiveStepSystem&&) noexcept = default;

std::size_t EffectiveStepSystem::unknowns() const { return 2 * impl_->n; }

std::vector<double> EffectiveStepSystem::Impl::evaluate(
    const std::vector<double>& x, std::vector<Eigen::Triplet<double>>* jac) const {
  const double k_star = params->k_star;
  const double scale = dt / pore;
  std::vector<double> r(2 * n, 0.0);
  std::vector<CellProps> cp(n);
  std::vector<double> pw(n);
  for (std::size_t c = 0; c < n; ++c) {
    cp[c] = props(x[2 * c]);
    pw[c] = x[2 * c + 1] - cp[c].pc;
  }
  auto add = [&](std::size_t row, std::size_t col, double v) {
    if (jac) jac->emplace_back(static_cast<int>(row), static_cast<int>(col), v * scale);
  };

  const double vol = grid->volume();
  for (std::size_t c = 0; c < n; ++c) {
    const double s = x[2 * c];
    const double acc = pore * (s - state->saturation[c]) / dt;
    const auto [q, dq] = source(c, s);
    r[2 * c] += acc - vol * q;
    r[2 * c + 1] += -acc + vol * q;
    add(2 * c, 2 * c, pore / dt - vol * dq);
    add(2 * c + 1, 2 * c, -pore / dt + vol * dq);
    add(2 * c, 2 * c + 1, 0.0);
    add(2 * c + 1, 2 * c + 1, 0.0);
  }

  // interior faces: flux into a is T lambda (P_b - P_a)
  for (const auto& f : grid->faces()) {
    const std::size_t a = std::min(f.a, f.b);
    const std::size_t b = std::max(f.a, f.b);
    const double t = f.transmissibility * k_star;
    // wetting
    {
      const double dp = pw[b] - pw[a];
      const std::size_t up = dp > 0.0 ? b : a;
      const double lam = cp[up].lw;
      const double flux = t * lam * dp;
      r[2 * a] -= flux;
      r[2 * b] += flux;
      const double d_up = t * cp[up].dlw * dp;
      const double d_sa = t * lam * cp[a].dpc;   // dP_w,a/dS_a = -P_c'
      const double d_sb = -t * lam * cp[b].dpc;
      const double d_pa = -t * lam;
      const double d_pb = t * lam;
      for (int sign : {-1, 1}) {
        const std::size_t row = sign < 0 ? 2 * a : 2 * b;
        add(row, 2 * up, sign * d_up);
        add(row, 2 * a, sign * d_sa);
        add(row, 2 * b, sign * d_sb);
        add(row, 2 * a + 1, sign * d_pa);
        add(row, 2 * b + 1, sign * d_pb);
      }
    }
    // nonwetting
    {
      const double dp = x[2 * b + 1] - x[2 * a + 1];
      const std::size_t up = dp > 0.0 ? b : a;
      const double lam = cp[up].ln;
      const double flux = t * lam * dp;
      r[2 * a + 1] -= flux;
      r[2 * b + 1] += flux;
      const double d_up = t * cp[up].dln * dp;
      for (int sign : {-1, 1}) {
        const std::size_t row = sign < 0 ? 2 * a + 1 : 2 * b + 1;
        add(row, 2 * up, sign * d_up);
        add(row, 2 * a + 1, -sign * t * lam);
        add(row, 2 * b + 1, sign * t * lam);
      }
    }
  }

  const auto& set = params->model->set();
  for (const auto& bf : grid->boundary_faces()) {
    const auto& bc = boundary[static_cast<std::size_t>(bf.side)];
    const std::size_t c = bf.cell;
    if (bc.kind == BoundaryKind::Injection) {
      r[2 * c] -= bc.wetting_flux * bf.area;
      continue;
    }
    if (bc.kind != BoundaryKind::Dirichlet) continue;
    const double t = bf.transmissibility * k_star;
    const auto mob_b = mobilities(bc.saturation, set.fracture.vg, set.fluids);
    {
      const double dp = boundary_pressure_w(bc) - pw[c];
      const bool from_boundary = dp > 0.0;
      const double lam = from_boundary ? mob_b.wetting : cp[c].lw;
      r[2 * c] -= t * lam * dp;
      const double d_s = (from_boundary ? 0.0 : t * cp[c].dlw * dp) + t * lam * cp[c].dpc;
      add(2 * c, 2 * c, -d_s);
      add(2 * c, 2 * c + 1, t * lam);
    }
    {
      const double dp = bc.nonwetting_pressure - x[2 * c + 1];
      const bool from_boundary = dp > 0.0;
      const double lam = from_boundary ? mob_b.nonwetting : cp[c].ln;
      r[2 * c + 1] -= t * lam * dp;
      const double d_s = from_boundary ? 0.0 : t * cp[c].dln * dp;
      add(2 * c + 1, 2 * c, -d_s);
      add(2 * c + 1, 2 * c + 1, t * lam);
    }
  }

  for (double& v : r) v *= scale;
  return r;
}

std::vector<double> EffectiveStepSystem::residual(const std::vector<double>& x) const {
  return impl_->evaluate(x, nullptr);
}

std::vector<double> EffectiveStepSystem::assemble(const std::vector<double>& x) const {
  auto& im = *impl_;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(32 * im.n);
  auto r = im.evaluate(x, &trip);
  const auto m = static_cast<Eigen::Index>(2 * im.n);
  SpMat jac(m, m);
  jac.setFromTriplets(trip.begin(), trip.end());
  jac.makeCompressed();
  im.lu.compute(jac);
  im.factorized = im.lu.info() == Eigen::Success;
  return r;
}

std::vector<double> EffectiveStepSystem::solve_last(const std::vector<double>& r) const {
  auto& im = *impl_;
  if (!im.factorized) throw StepError("effective step: singular Jacobian", 0.0, 0);
  const auto m = static_cast<Eigen::Index>(r.size());
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) rhs[i] = -r[static_cast<std::size_t>(i)];
  const Eigen::VectorXd dx = im.lu.solve(rhs);
  return std::vector<double>(dx.data(), dx.data() + dx.size());
}

std::vector<double> EffectiveStepSystem::sources(const std::vector<double>& x) const {
  std::vector<double> q(impl_->n);
  for (std::size_t c = 0; c < impl_->n; ++c) q[c] = impl_->source(c, x[2 * c]).first;
  return q;
}

std::vector<std::array<double, 2>> EffectiveStepSystem::boundary_inflow(
    const std::vector<double>& x) const {
  const auto& im = *impl_;
  const auto& set = im.params->model->set();
  std::vector<std::array<double, 2>> out(im.n, {0.0, 0.0});
  for (const auto& bf : im.grid->boundary_faces()) {
    const auto& bc = im.boundary[static_cast<std::size_t>(bf.side)];
    const std::size_t c = bf.cell;
    if (bc.kind == BoundaryKind::Injection) {
      out[c][0] += bc.wetting_flux * bf.area;
    } else if (bc.kind == BoundaryKind::Dirichlet) {
      const double t = bf.transmissibility * im.params->k_star;
      const double s = x[2 * c];
      const auto mob_c = mobilities(s, set.fracture.vg, set.fluids);
      const auto mob_b = mobilities(bc.saturation, set.fracture.vg, set.fluids);
      const double pw = x[2 * c + 1] - capillary_pressure(s, set.fracture.vg);
      const double dw = im.boundary_pressure_w(bc) - pw;
      const double dn = bc.nonwetting_pressure - x[2 * c + 1];
      out[c][0] += t * (dw > 0.0 ? mob_b.wetting : mob_c.wetting) * dw;
      out[c][1] += t * (dn > 0.0 ? mob_b.nonwetting : mob_c.nonwetting) * dn;
    }
  }
  return out;
}

NewtonReport newton_step(const EffectiveStepSystem& system, std::vector<double>& x,
                         const NewtonControls& controls) {
  NewtonReport rep;
  std::vector<double> trial = x;
  const double lo = controls.clamp;
  const double hi = 1.0 - controls.clamp;
  for (int it = 0;; ++it) {
    const auto r = system.assemble(trial);
    double res = 0.0;
    for (double v : r) res = std::max(res, std::abs(v));
    rep.iterations = it;
    rep.residual = res;
    if (!std::isfinite(res)) throw StepError("effective step: non-finite residual", res, it);
    if (res < controls.tolerance) break;
    if (it >= controls.max_iterations) {
      throw StepError("effective step: Newton did not converge", res, it);
    }
    const auto dx = system.solve_last(r);
    double ds_max = 0.0;
    for (std::size_t i = 0; i < dx.size(); i += 2) ds_max = std::max(ds_max, std::abs(dx[i]));
    const double theta = ds_max > controls.max_saturation_change
                             ? controls.max_saturation_change / ds_max
                             : 1.0;
    for (std::size_t i = 0; i < dx.size(); ++i) trial[i] += theta * dx[i];
    for (std::size_t i = 0; i < trial.size(); i += 2) trial[i] = std::clamp(trial[i], lo, hi);
  }
  for (std::size_t i = 0; i < trial.size(); i += 2) {
    if (trial[i] <= lo || trial[i] >= hi) ++rep.active_clamps;
  }
  x = trial;
  return rep;
}

namespace {

std::vector<double> pack(const EffectiveState& st) {
  std::vector<double> x(2 * st.saturation.size());
  for (std::size_t c = 0; c < st.saturation.size(); ++c) {
    x[2 * c] = st.saturation[c];
    x[2 * c + 1] = st.nonwetting_pressure[c];
  }
  return x;
}

MassBalance commit(const StructuredGrid& grid, const EffectiveParams& params,
                   const EffectiveStepSystem& system, EffectiveState& st,
                   const std::vector<double>& x, double dt) {
  const std::size_t n = grid.cell_count();
  const auto q = system.sources(x);
  const auto inflow = system.boundary_inflow(x);
  const auto& set = params.model->set();
  const double vol = grid.volume();
  MassBalance mb;
  mb.time = st.times.back() + dt;
  mb.dt = dt;
  double pc_max_defect = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double ds = x[2 * c] - st.saturation[c];
    mb.wetting_accumulation += params.fracture_porosity * vol * ds;
    mb.nonwetting_accumulation -= params.fracture_porosity * vol * ds;
    mb.wetting_source += dt * vol * q[c];
    mb.nonwetting_source -= dt * vol * q[c];
    mb.wetting_boundary += dt * inflow[c][0];
    mb.nonwetting_boundary += dt * inflow[c][1];
  }
  const double pore_total = params.fracture_porosity * vol * static_cast<double>(n);
  auto imbalance = [&](double acc, double src, double bnd) {
    return std::abs(acc - src - bnd) / pore_total;
  };
  mb.wetting_imbalance = imbalance(mb.wetting_accumulation, mb.wetting_source, mb.wetting_boundary);
  mb.nonwetting_imbalance =
      imbalance(mb.nonwetting_accumulation, mb.nonwetting_source, mb.nonwetting_boundary);

  std::vector<double> p_new(n), s_new(n);
  std::vector<double> ah_new;
  if (params.source.model == SourceModel::II) ah_new.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double s = x[2 * c];
    st.saturation[c] = s;
    st.nonwetting_pressure[c] = x[2 * c + 1];
    const double pc = capillary_pressure(s, set.fracture.vg);
    st.wetting_pressure[c] = st.nonwetting_pressure[c] - pc;
    const double defect = std::abs(st.nonwetting_pressure[c] - st.wetting_pressure[c] - pc);
    pc_max_defect = std::max(pc_max_defect, defect / std::max(pc, 1.0));
    s_new[c] = s;
    p_new[c] = params.model->transfer(s);
    st.running_min[c] = std::min(st.running_min[c], s);
    st.running_max[c] = std::max(st.running_max[c], s);
    if (!ah_new.empty()) ah_new[c] = params.model->alpha_hat(st.running_min[c], st.running_max[c]);
    mb.min_saturation = std::min(mb.min_saturation, s);
    mb.max_saturation = std::max(mb.max_saturation, s);
  }
  mb.max_capillary_defect = pc_max_defect;
  st.times.push_back(mb.time);
  st.transfer_history.push_back(std::move(p_new));
  st.saturation_history.push_back(std::move(s_new));
  if (!ah_new.empty()) st.alpha_hat_history.push_back(std::move(ah_new));
  return mb;
}

}  // namespace

MassBalance advance_effective(const StructuredGrid& grid, const EffectiveParams& params,
                              const std::array<BoundaryCondition, 4>& boundary,
                              EffectiveState& state, double dt, const NewtonControls& controls) {
  EffectiveStepSystem system(grid, params, boundary, state, dt);
  auto x = pack(state);
  const auto rep = newton_step(system, x, controls);
  auto mb = commit(grid, params, system, state, x, dt);
  mb.newton_iterations = rep.iterations;
  mb.residual = rep.residual;
  mb.active_clamps = rep.active_clamps;
  return mb;
}

EffectiveRunResult run_effective(const EffectiveRunConfig& config) {
  config.params.validate();
  if (!(config.horizon > 0.0 && config.dt > 0.0)) {
    throw ParameterError("effective run needs a positive horizon and time step");
  }
  const auto& grid = config.grid;
  EffectiveRunResult out;
  out.state = initial_state(grid, config.params, config.initial_saturation,
                            config.initial_nonwetting_pressure);
  out.cell0_source.method = config.params.source.model == SourceModel::I
                                ? ExchangeMethod::EffectiveI
                                : ExchangeMethod::EffectiveII;
  out.cell0_source.divided_by_delta = true;
  auto& st = out.state;
  auto snapshot = [&]() {
    out.snapshots.push_back({st.times.back(), st.saturation, st.wetting_pressure,
                             st.nonwetting_pressure});
  };
  snapshot();

  std::size_t step = 0;
  while (st.times.back() < config.horizon * (1.0 - 1e-12)) {
    const double t = st.times.back();
    double dt = std::min(config.dt, config.horizon - t);
    if (config.prescribed_saturation) {
      EffectiveStepSystem system(grid, config.params, config.boundary, st, dt);
      auto x = pack(st);
      const double s = config.prescribed_saturation(t + dt);
      for (std::size_t c = 0; c < grid.cell_count(); ++c) x[2 * c] = s;
      const double q0 = system.sources(x)[0];
      auto mb = commit(grid, config.params, system, st, x, dt);
      out.balance.push_back(mb);
      out.cell0_source.times.push_back(t + 0.5 * dt);
      out.cell0_source.values.push_back(q0);
    } else {
      int cuts = 0;
      for (;;) {
        try {
          EffectiveStepSystem system(grid, config.params, config.boundary, st, dt);
          auto x = pack(st);
          const auto rep = newton_step(system, x, config.newton);
          const double q0 = system.sources(x)[0];
          auto mb = commit(grid, config.params, system, st, x, dt);
          mb.newton_iterations = rep.iterations;
          mb.residual = rep.residual;
          mb.active_clamps = rep.active_clamps;
          out.balance.push_back(mb);
          out.cell0_source.times.push_back(t + 0.5 * dt);
          out.cell0_source.values.push_back(q0);
          break;
        } catch (const StepError& e) {
          if (++cuts > config.max_dt_cuts) {
            throw RunError(std::string("effective run failed at t = ") + std::to_string(t) +
                           " s: " + e.what());
          }
          dt *= 0.5;
        }
      }
    }
    ++step;
    if (config.snapshot_every > 0 && step % config.snapshot_every == 0) snapshot();
  }
  if (config.snapshot_every == 0 || step % config.snapshot_every != 0) snapshot();
  return out;
}

void write_snapshot_csv(std::ostream& os, const StructuredGrid& grid, const Snapshot& snap) {
  os << "cell,x,y,S,P_w,P_n\n";
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto xy = grid.center(c);
    os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", c, xy[0], xy[1],
                      snap.saturation[c], snap.wetting_pressure[c], snap.nonwetting_pressure[c]);
  }
}

void write_mass_balance_csv(std::ostream& os, const std::vector<MassBalance>& balance) {
  os << "time_days,dt_days,wetting_accumulation,wetting_source,wetting_boundary,"
        "wetting_imbalance,nonwetting_accumulation,nonwetting_source,nonwetting_boundary,"
        "nonwetting_imbalance,max_capillary_defect,newton_iterations,residual,active_clamps,"
        "min_saturation,max_saturation\n";
  for (const auto& b : balance) {
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.6e},{:.17g},{:.17g},{:.17g},"
                      "{:.6e},{:.6e},{},{:.6e},{},{:.17g},{:.17g}\n",
                      b.time / 86400.0, b.dt / 86400.0, b.wetting_accumulation, b.wetting_source,
                      b.wetting_boundary, b.wetting_imbalance, b.nonwetting_accumulation,
                      b.nonwetting_source, b.nonwetting_boundary, b.nonwetting_imbalance,
                      b.max_capillary_defect, b.newton_iterations, b.residual, b.active_clamps,
                      b.min_saturation, b.max_saturation);
  }
}

}  // namespace dualpor
