#include "lvlab/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <limits>
#include <random>

#include "lvlab/error.hpp"
#include "lvlab/spectrum.hpp"
#include "lvlab/tridiag.hpp"

namespace lvlab {

CoefficientPath CoefficientPath::constant(Field h) {
  Grid g = h.grid();
  return CoefficientPath(std::move(g), std::move(h));
}

CoefficientPath CoefficientPath::expression(Expr e, const Grid& g) {
  return CoefficientPath(g, std::move(e));
}

CoefficientPath CoefficientPath::sampled(std::vector<double> times, std::vector<Field> fields) {
  if (times.empty() || times.size() != fields.size()) {
    throw InvalidArgument("sampled path needs one field per time and at least one sample");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw InvalidArgument("sampled path times must increase");
  }
  Grid g = fields.front().grid();
  Sampled s{std::move(times), {}};
  for (const Field& f : fields) {
    if (!(f.grid() == g)) throw InvalidArgument("sampled path fields differ in grid");
    s.values.emplace_back(f.values().begin(), f.values().end());
  }
  return CoefficientPath(std::move(g), std::move(s));
}

CoefficientPath CoefficientPath::from_trajectory(const Trajectory& traj, const Field& m) {
  std::vector<Field> h;
  h.reserve(traj.states.size());
  for (const SpeciesState& s : traj.states) {
    Field f = m;
    for (const Field& u : s.fields) f = f - u;
    h.push_back(std::move(f));
  }
  return sampled(traj.times, std::move(h));
}

CoefficientPath CoefficientPath::plus(Expr e) const {
  CoefficientPath p = *this;
  if (p.extra_) throw InvalidArgument("path already carries an additive expression");
  p.extra_ = std::move(e);
  return p;
}

bool CoefficientPath::is_static() const noexcept {
  return !extra_ && std::holds_alternative<Field>(kind_);
}

namespace {

// Folds t into [a, b] by repeated even reflection about the ends.
double fold(double t, double a, double b) {
  if (b <= a) return a;
  const double period = 2.0 * (b - a);
  double s = std::fmod(t - a, period);
  if (s < 0.0) s += period;
  return s <= (b - a) ? a + s : b - (s - (b - a));
}

}  // namespace

void CoefficientPath::sample(double t, std::span<double> out) const {
  const std::size_t n = grid_.size();
  if (out.size() != n) throw InvalidArgument("path sample buffer has the wrong size");
  if (const Field* f = std::get_if<Field>(&kind_)) {
    std::copy(f->values().begin(), f->values().end(), out.begin());
  } else if (const Expr* e = std::get_if<Expr>(&kind_)) {
    for (std::size_t j = 0; j < n; ++j) out[j] = e->eval(grid_.node(j), t);
  } else {
    const Sampled& s = std::get<Sampled>(kind_);
    const double tt = fold(t, s.times.front(), s.times.back());
    const auto hi = std::upper_bound(s.times.begin(), s.times.end(), tt);
    if (hi == s.times.begin() || hi == s.times.end()) {
      const auto& v = (hi == s.times.begin()) ? s.values.front() : s.values.back();
      std::copy(v.begin(), v.end(), out.begin());
    } else {
      const std::size_t k = static_cast<std::size_t>(hi - s.times.begin());
      const double w = (tt - s.times[k - 1]) / (s.times[k] - s.times[k - 1]);
      for (std::size_t j = 0; j < n; ++j) {
        out[j] = (1.0 - w) * s.values[k - 1][j] + w * s.values[k][j];
      }
    }
  }
  if (extra_) {
    for (std::size_t j = 0; j < n; ++j) out[j] += extra_->eval(grid_.node(j), t);
  }
}

Field CoefficientPath::at(double t) const {
  std::vector<double> v(grid_.size());
  sample(t, v);
  return Field(grid_, std::move(v));
}

namespace {

// Advances the positive normalised solution of psi_t = d Delta psi + h psi by
// backward Euler. The equation is linear, so treating h implicitly costs
// nothing and makes the static fixed point the exact discrete eigenvector.
class BundleStepper {
 public:
  BundleStepper(double d, const CoefficientPath& path, double t_start, double dt)
      : d_(d), path_(path), dt_(dt), t_(t_start), lap_(path.grid()),
        phi_(path.grid().size(), 1.0 / std::sqrt(path.grid().length())),
        prev_(phi_.size()), h_(phi_.size()), a_(phi_.size()), b_(phi_.size()), c_(phi_.size()) {
    if (!(d > 0.0)) throw InvalidArgument("bundle: d must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("bundle: dt must be positive");
    for (std::size_t j = 0; j < phi_.size(); ++j) {
      a_[j] = -dt_ * d_ * lap_.sub()[j];
      c_[j] = -dt_ * d_ * lap_.super()[j];
    }
    if (path_.is_static()) {
      path_.sample(0.0, h_);
      lu_ = factor(h_, 0.0);
    }
  }

  // Factorisation of I - dt (d Delta + h + shift).
  TridiagonalLU factor(std::span<const double> h, double shift) const {
    std::vector<double> b(phi_.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
      b[j] = 1.0 - dt_ * d_ * lap_.diag()[j] - dt_ * (h[j] + shift);
    }
    return TridiagonalLU(a_, b, c_);
  }

  void step() {
    t_ += dt_;
    if (!path_.is_static()) {
      path_.sample(t_, h_);
      lu_ = factor(h_, 0.0);
    }
    prev_ = phi_;
    lu_.solve(phi_);
    const Grid& g = path_.grid();
    const double rho2 = weighted_dot(g, phi_, phi_);
    const double rho = std::sqrt(rho2);
    H_ = (1.0 / rho - 1.0) / dt_;
    H_quotient_ = -(rho2 - weighted_dot(g, phi_, prev_)) / (dt_ * rho2);
    double lo = phi_[0];
    for (double& v : phi_) {
      v /= rho;
      lo = std::min(lo, v);
    }
    if (!(lo > 0.0)) {
      throw SolverFailure("bundle iterate lost positivity at t = " + std::to_string(t_), lo);
    }
  }

  double time() const noexcept { return t_; }
  double H() const noexcept { return H_; }
  double H_quotient() const noexcept { return H_quotient_; }
  const std::vector<double>& phi() const noexcept { return phi_; }
  std::span<const double> h() const noexcept { return h_; }
  double dt() const noexcept { return dt_; }

 private:
  double d_;
  const CoefficientPath& path_;
  double dt_;
  double t_;
  NeumannLaplacian lap_;
  std::vector<double> phi_, prev_, h_, a_, b_, c_;
  TridiagonalLU lu_;
  double H_ = 0.0;
  double H_quotient_ = 0.0;
};

std::size_t spin_steps(double spinup, double dt) {
  return static_cast<std::size_t>(std::llround(spinup / dt));
}

}  // namespace

double default_spinup(double d, const CoefficientPath& path, double t) {
  const Field h = path.at(t);
  const double gap = second_eigenvalue(d, h) - principal_eigenpair(d, h).lambda;
  if (!(gap > 0.0)) throw SolverFailure("non-positive spectral gap", gap);
  return 50.0 / gap;
}

BundleTrajectory compute_bundle(double d, const CoefficientPath& path, double t0, double t1,
                                double spinup, double dt, const BundleOptions& opts) {
  if (spinup < 0.0) spinup = default_spinup(d, path, t0);
  const std::size_t steps = step_count(t1 - t0, dt);
  const std::size_t spin = spin_steps(spinup, dt);
  const std::size_t stride = std::max<std::size_t>(opts.record_stride, 1);

  BundleStepper stepper(d, path, t0 - static_cast<double>(spin) * dt, dt);
  for (std::size_t k = 0; k < spin; ++k) stepper.step();

  BundleTrajectory out;
  out.d = d;
  out.spinup = static_cast<double>(spin) * dt;
  const Grid& g = path.grid();
  auto record = [&](double t) {
    const auto& phi = stepper.phi();
    const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
    out.times.push_back(t);
    out.psi.emplace_back(g, phi);
    out.H.push_back(stepper.H());
    out.H_quotient.push_back(stepper.H_quotient());
    out.harnack = std::max(out.harnack, *hi / *lo);
    out.normalization_error = std::max(out.normalization_error, std::abs(l2_norm(g, phi) - 1.0));
  };
  // H_1 at t0 is only defined if some step ends there.
  if (spin > 0) record(t0);
  for (std::size_t k = 1; k <= steps; ++k) {
    stepper.step();
    if (k % stride == 0 || k == steps) record(t0 + static_cast<double>(k) * dt);
  }
  return out;
}

void write_bundle_csv(const BundleTrajectory& b, std::ostream& out) {
  out << "time,H1,sup_psi1,inf_psi1\n";
  char buf[128];
  for (std::size_t k = 0; k < b.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", b.times[k], b.H[k],
                  b.psi[k].max(), b.psi[k].min());
    out << buf;
  }
}

Field project_off_bundle(const Field& w, const Field& psi1) {
  if (!(w.grid() == psi1.grid())) throw InvalidArgument("project_off_bundle: grid mismatch");
  const double c = weighted_dot(w.grid(), w.values(), psi1.values());
  std::vector<double> v(w.values().begin(), w.values().end());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c * psi1[j];
  return Field(w.grid(), std::move(v));
}

namespace {

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

}  // namespace

SeparationEstimate separation_rate(double d, const CoefficientPath& path, double t0, double t1,
                                   double dt, std::size_t trials, std::uint64_t seed,
                                   double spinup) {
  if (trials == 0) throw InvalidArgument("separation_rate: need at least one trial");
  if (spinup < 0.0) spinup = default_spinup(d, path, t0);
  const std::size_t steps = step_count(t1 - t0, dt);
  const std::size_t spin = spin_steps(spinup, dt);
  const Grid& g = path.grid();
  const std::size_t n = g.size();

  BundleStepper bundle(d, path, t0 - static_cast<double>(spin) * dt, dt);
  for (std::size_t k = 0; k < spin; ++k) bundle.step();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> w(trials, std::vector<double>(n));
  auto project = [&](std::vector<double>& v) {
    const auto& psi = bundle.phi();
    const double c = weighted_dot(g, v, psi);
    for (std::size_t j = 0; j < n; ++j) v[j] -= c * psi[j];
    const double nrm = l2_norm(g, v);
    if (nrm > 0.0) {
      for (double& x : v) x /= nrm;
    }
    return nrm;
  };
  for (auto& v : w) {
    for (double& x : v) x = normal(rng);
    project(v);
  }

  std::vector<double> times{t0};
  std::vector<std::vector<double>> log_norm(trials, std::vector<double>{0.0});
  std::vector<bool> alive(trials, true);
  SeparationEstimate est;

  for (std::size_t k = 1; k <= steps; ++k) {
    bundle.step();
    // Implicit step of w_t = d Delta w + (h + H_1) w with h, H_1 at t_{n+1}.
    std::vector<double> h(bundle.h().begin(), bundle.h().end());
    const TridiagonalLU lu = bundle.factor(h, bundle.H());
    times.push_back(bundle.time());
    for (std::size_t r = 0; r < trials; ++r) {
      if (!alive[r]) continue;
      lu.solve(w[r]);
      const double grow = project(w[r]);
      if (!(grow > 0.0) || !std::isfinite(grow)) {
        alive[r] = false;
        est.truncated = true;
        continue;
      }
      log_norm[r].push_back(log_norm[r].back() + std::log(grow));
    }
  }

  est.gamma = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < trials; ++r) {
    const std::size_t len = log_norm[r].size();
    const std::size_t begin = len / 2;
    const std::span<const double> x(times.data() + begin, len - begin);
    const std::span<const double> y(log_norm[r].data() + begin, len - begin);
    const double rate = len - begin >= 2 ? -least_squares_slope(x, y) : 0.0;
    est.trial_rates.push_back(rate);
    est.gamma = std::min(est.gamma, rate);
  }
  return est;
}

double BundleDerivative::min() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

BundleDerivative bundle_d_derivative(double d, const CoefficientPath& path, double t0, double t1,
                                     double delta, double dt, double spinup) {
  if (delta <= 0.0) delta = 1e-3 * d;
  if (!(d - delta > 0.0)) throw InvalidArgument("bundle_d_derivative needs d - delta > 0");
  if (spinup < 0.0) spinup = default_spinup(d - delta, path, t0);
  auto run = [&](double dd) { return compute_bundle(dd, path, t0, t1, spinup, dt); };
  auto upper = std::async(std::launch::async, run, d + delta);
  const BundleTrajectory lower = run(d - delta);
  const BundleTrajectory up = upper.get();
  BundleDerivative out;
  out.times = lower.times;
  for (std::size_t k = 0; k < lower.H.size(); ++k) {
    out.values.push_back((up.H[k] - lower.H[k]) / (2.0 * delta));
  }
  return out;
}

}  // namespace lvlab
