#include "ltmpc/socp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

namespace ltmpc {

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::infeasible: return "infeasible";
    case SolverStatus::inaccurate: return "inaccurate";
    case SolverStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

namespace {

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;

// Primal variables: per node (t, u), plus tau.
struct Primal {
  std::vector<Vector4> x;
  double tau = 0.0;

  explicit Primal(std::size_t n = 0) : x(n, Vector4::Zero()) {}
  double dot(const Primal& o) const {
    double r = tau * o.tau;
    for (std::size_t j = 0; j < x.size(); ++j) r += x[j].dot(o.x[j]);
    return r;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  void axpy(double a, const Primal& o) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += a * o.x[j];
    tau += a * o.tau;
  }
};

// Cone vectors: per node a linear slot and a 4-d Lorentz cone, plus the
// terminal 4-d Lorentz cone.
struct Cone {
  std::vector<double> l;
  std::vector<Vector4> c;
  Vector4 t = Vector4::Zero();

  explicit Cone(std::size_t n = 0) : l(n, 0.0), c(n, Vector4::Zero()) {}
  double dot(const Cone& o) const {
    double r = t.dot(o.t);
    for (std::size_t j = 0; j < l.size(); ++j) r += l[j] * o.l[j] + c[j].dot(o.c[j]);
    return r;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  void axpy(double a, const Cone& o) {
    for (std::size_t j = 0; j < l.size(); ++j) {
      l[j] += a * o.l[j];
      c[j] += a * o.c[j];
    }
    t += a * o.t;
  }
  static Cone identity(std::size_t n) {
    Cone e(n);
    std::fill(e.l.begin(), e.l.end(), 1.0);
    for (auto& v : e.c) v(0) = 1.0;
    e.t(0) = 1.0;
    return e;
  }
};

// x0^2 - |x1|^2 without cancellation near the boundary.
double soc_det(const Vector4& x) {
  const double r = x.tail<3>().norm();
  return (x(0) - r) * (x(0) + r);
}

Vector4 soc_product(const Vector4& x, const Vector4& y) {
  Vector4 r;
  r(0) = x.dot(y);
  r.tail<3>() = x(0) * y.tail<3>() + y(0) * x.tail<3>();
  return r;
}

// Solves lambda o x = b.
Vector4 soc_divide(const Vector4& lam, const Vector4& b) {
  const double r = lam.tail<3>().norm();
  const double det = (lam(0) - r) * (lam(0) + r);
  Vector4 x;
  x(0) = (lam(0) * b(0) - lam.tail<3>().dot(b.tail<3>())) / det;
  x.tail<3>() = (b.tail<3>() - x(0) * lam.tail<3>()) / lam(0);
  return x;
}

Cone product(const Cone& a, const Cone& b) {
  Cone r(a.l.size());
  for (std::size_t j = 0; j < a.l.size(); ++j) {
    r.l[j] = a.l[j] * b.l[j];
    r.c[j] = soc_product(a.c[j], b.c[j]);
  }
  r.t = soc_product(a.t, b.t);
  return r;
}

Cone divide(const Cone& lam, const Cone& b) {
  Cone r(lam.l.size());
  for (std::size_t j = 0; j < lam.l.size(); ++j) {
    r.l[j] = b.l[j] / lam.l[j];
    r.c[j] = soc_divide(lam.c[j], b.c[j]);
  }
  r.t = soc_divide(lam.t, b.t);
  return r;
}

// Largest alpha with x + alpha d in the closed Lorentz cone.
double soc_max_step(const Vector4& x, const Vector4& d) {
  const double a = soc_det(d);
  const double b = 2.0 * (x(0) * d(0) - x.tail<3>().dot(d.tail<3>()));
  const double c = soc_det(x);
  const double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  auto take = [&](double r) {
    if (r > 0.0 && r < best) best = r;
  };
  if (std::abs(a) < 1e-300) {
    if (b < 0.0) take(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) {
        take(q / a);
        take(c / q);
      }
    }
  }
  if (d(0) < 0.0) take(-x(0) / d(0));
  return best;
}

double max_step(const Cone& x, const Cone& d) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.l.size(); ++j) {
    if (d.l[j] < 0.0) best = std::min(best, -x.l[j] / d.l[j]);
    best = std::min(best, soc_max_step(x.c[j], d.c[j]));
  }
  return std::min(best, soc_max_step(x.t, d.t));
}

// Nesterov-Todd scaling W (symmetric) with W z = W^{-1} s.
struct SocScaling {
  Matrix4 w, w_inv;
};

SocScaling soc_scaling(const Vector4& s, const Vector4& z) {
  const double sn = std::sqrt(soc_det(s));
  const double zn = std::sqrt(soc_det(z));
  const Vector4 sb = s / sn;
  const Vector4 zb = z / zn;
  const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
  Vector4 jz = zb;
  jz.tail<3>() = -jz.tail<3>();
  const Vector4 wb = (sb + jz) / (2.0 * gamma);
  const double eta = std::sqrt(sn / zn);
  const Eigen::Vector3d w1 = wb.tail<3>();
  SocScaling out;
  out.w(0, 0) = wb(0);
  out.w.block<1, 3>(0, 1) = w1.transpose();
  out.w.block<3, 1>(1, 0) = w1;
  out.w.block<3, 3>(1, 1) = Matrix3::Identity() + w1 * w1.transpose() / (1.0 + wb(0));
  out.w_inv = out.w;
  out.w_inv.block<1, 3>(0, 1) *= -1.0;
  out.w_inv.block<3, 1>(1, 0) *= -1.0;
  out.w *= eta;
  out.w_inv /= eta;
  return out;
}

struct Scaling {
  std::vector<double> l;  // sqrt(s / z)
  std::vector<SocScaling> c;
  SocScaling t;

  Cone apply(const Cone& v) const {
    Cone r(v.l.size());
    for (std::size_t j = 0; j < v.l.size(); ++j) {
      r.l[j] = l[j] * v.l[j];
      r.c[j] = c[j].w * v.c[j];
    }
    r.t = t.w * v.t;
    return r;
  }
  Cone apply_inv(const Cone& v) const {
    Cone r(v.l.size());
    for (std::size_t j = 0; j < v.l.size(); ++j) {
      r.l[j] = v.l[j] / l[j];
      r.c[j] = c[j].w_inv * v.c[j];
    }
    r.t = t.w_inv * v.t;
    return r;
  }
};

Scaling compute_scaling(const Cone& s, const Cone& z) {
  Scaling w;
  const std::size_t n = s.l.size();
  w.l.resize(n);
  w.c.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    w.l[j] = std::sqrt(s.l[j] / z.l[j]);
    w.c[j] = soc_scaling(s.c[j], z.c[j]);
  }
  w.t = soc_scaling(s.t, z.t);
  return w;
}

Scaling unit_scaling(std::size_t n) {
  Scaling w;
  w.l.assign(n, 1.0);
  w.c.assign(n, SocScaling{Matrix4::Identity(), Matrix4::Identity()});
  w.t = SocScaling{Matrix4::Identity(), Matrix4::Identity()};
  return w;
}

class Program {
 public:
  Program(std::vector<double> c, std::vector<double> b, std::vector<Matrix3> h, Vector3 d, double w)
      : c_(std::move(c)), b_(std::move(b)), h_(std::move(h)), d_(d), w_(w) {}

  std::size_t n() const { return c_.size(); }

  Cone g(const Primal& x) const {
    Cone r(n());
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (std::size_t j = 0; j < n(); ++j) {
      r.l[j] = x.x[j](0);
      r.c[j] = -x.x[j];
      acc += h_[j] * x.x[j].tail<3>();
    }
    r.t(0) = -x.tau;
    r.t.tail<3>() = -acc;
    return r;
  }

  Primal gt(const Cone& z) const {
    Primal r(n());
    const Eigen::Vector3d zt = z.t.tail<3>();
    for (std::size_t j = 0; j < n(); ++j) {
      r.x[j] = -z.c[j];
      r.x[j](0) += z.l[j];
      r.x[j].tail<3>() -= h_[j].transpose() * zt;
    }
    r.tau = -z.t(0);
    return r;
  }

  Cone h() const {
    Cone r(n());
    r.l = b_;
    r.t.tail<3>() = d_;
    return r;
  }

  Primal c() const {
    Primal r(n());
    for (std::size_t j = 0; j < n(); ++j) r.x[j](0) = c_[j];
    r.tau = w_;
    return r;
  }

  // Factorizes G' W^-2 G for the given scaling. The terminal rows enter
  // through W_T^-1 T, which keeps the bordered system well conditioned.
  void factor(const Scaling& w) {
    scaling_ = &w;
    d_llt_.resize(n());
    f_.resize(n());
    tt_.resize(n());
    Matrix4 s = Matrix4::Zero();
    for (std::size_t j = 0; j < n(); ++j) {
      Matrix4 dj = w.c[j].w_inv * w.c[j].w_inv;
      dj(0, 0) += 1.0 / (w.l[j] * w.l[j]);
      // Node blocks go singular along the cone boundary near the optimum.
      // A tiny static shift keeps the elimination stable; refinement against
      // the exact operator removes its effect.
      dj.diagonal().array() += 1e-11 * dj.trace();
      d_llt_[j].compute(dj);
      Matrix4 tj = Matrix4::Zero();
      tj.block<3, 3>(1, 1) = -h_[j];
      tt_[j] = w.t.w_inv * tj;
      f_[j] = d_llt_[j].solve(tt_[j].transpose());
      s += tt_[j] * f_[j];
    }
    a_llt_.compute(Matrix4::Identity() + s);
    t_tau_ = -w.t.w_inv.col(0);
    a_t_ = a_llt_.solve(t_tau_);
    schur_ = t_tau_.dot(a_t_);
  }

  // Solves [0 G'; G -W^2] [dx; dz] = [bx; bz].
  void kkt_solve(const Primal& bx, const Cone& bz, Primal& dx, Cone& dz, int refinement) const {
    solve_once(bx, bz, dx, dz);
    for (int it = 0; it < refinement; ++it) {
      Primal ex = bx;
      ex.axpy(-1.0, gt(dz));
      Cone ez = bz;
      ez.axpy(-1.0, g(dx));
      ez.axpy(1.0, scaling_->apply(scaling_->apply(dz)));
      Primal cx;
      Cone cz;
      solve_once(ex, ez, cx, cz);
      dx.axpy(1.0, cx);
      dz.axpy(1.0, cz);
    }
  }

 private:
  void solve_once(const Primal& bx, const Cone& bz, Primal& dx, Cone& dz) const {
    const Scaling& w = *scaling_;
    Primal r = bx;
    r.axpy(1.0, gt(w.apply_inv(w.apply_inv(bz))));
    Vector4 rhs = Vector4::Zero();
    for (std::size_t j = 0; j < n(); ++j) rhs += f_[j].transpose() * r.x[j];
    const Vector4 a_rhs = a_llt_.solve(rhs);
    dx = Primal(n());
    dx.tau = (r.tau - t_tau_.dot(a_rhs)) / schur_;
    const Vector4 y = a_rhs + dx.tau * a_t_;
    for (std::size_t j = 0; j < n(); ++j) dx.x[j] = d_llt_[j].solve(r.x[j] - tt_[j].transpose() * y);
    dz = g(dx);
    dz.axpy(-1.0, bz);
    dz = w.apply_inv(w.apply_inv(dz));
  }

  std::vector<double> c_, b_;
  std::vector<Matrix3> h_;
  Vector3 d_;
  double w_;
  const Scaling* scaling_ = nullptr;
  std::vector<Eigen::LLT<Matrix4>> d_llt_;
  std::vector<Matrix4> f_, tt_;
  Eigen::LLT<Matrix4> a_llt_;
  Vector4 t_tau_, a_t_;
  double schur_ = 1.0;
};

// Shifts v into the cone interior if needed.
void push_inside(Cone& v) {
  double alpha = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < v.l.size(); ++j) {
    alpha = std::max(alpha, -v.l[j]);
    alpha = std::max(alpha, v.c[j].tail<3>().norm() - v.c[j](0));
  }
  alpha = std::max(alpha, v.t.tail<3>().norm() - v.t(0));
  if (alpha >= -1e-8 * std::max(1.0, v.norm())) {
    const Cone e = Cone::identity(v.l.size());
    v.axpy(1.0 + alpha, e);
  }
}

}  // namespace

SocpResult solve_tracking_socp(const TrackingSocp& problem, const SocpSettings& settings) {
  const std::size_t n_all = problem.size();
  SocpResult res;
  res.u.assign(n_all, Vector3::Zero());
  res.t.assign(n_all, 0.0);

  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < n_all; ++k) {
    const double b = problem.bound[k];
    if (!std::isfinite(b) || b < 0.0 || !std::isfinite(problem.cost[k])) {
      res.status = SolverStatus::infeasible;
      return res;
    }
    if (b > 0.0) active.push_back(k);
  }
  if (!problem.offset.allFinite() || !(problem.terminal_weight >= 0.0)) {
    res.status = SolverStatus::infeasible;
    return res;
  }

  if (active.empty()) {
    res.tau = problem.offset.norm();
    res.objective = problem.terminal_weight * res.tau;
    res.status = SolverStatus::optimal;
    return res;
  }

  std::vector<double> c, b;
  std::vector<Matrix3> h;
  for (std::size_t k : active) {
    c.push_back(problem.cost[k]);
    b.push_back(problem.bound[k]);
    h.push_back(problem.gain[k]);
  }
  Program prog(std::move(c), std::move(b), std::move(h), problem.offset, problem.terminal_weight);
  const std::size_t n = prog.n();
  const double degree = static_cast<double>(2 * n + 1);
  const Cone hv = prog.h();
  const Primal cv = prog.c();
  const double h_scale = std::max(1.0, hv.norm());
  const double c_scale = std::max(1.0, cv.norm());

  // Least-squares starting points, shifted into the cone interior.
  Primal x(n);
  Cone s(n), z(n);
  {
    const Scaling unit = unit_scaling(n);
    prog.factor(unit);
    Cone zp;
    prog.kkt_solve(Primal(n), hv, x, zp, settings.refinement);
    s = zp;
    for (auto& v : s.l) v = -v;
    for (auto& v : s.c) v = -v;
    s.t = -s.t;
    Primal xd;
    Primal mc = cv;
    mc.axpy(-2.0, cv);
    prog.kkt_solve(mc, Cone(n), xd, z, settings.refinement);
    push_inside(s);
    push_inside(z);
  }

  // Close to the optimum the last digits are noise, so keep the best iterate.
  Primal best_x = x;
  double best_merit = std::numeric_limits<double>::infinity();
  SocpResult best = res;
  int worse = 0;

  const Cone e = Cone::identity(n);
  for (int it = 0; it <= settings.max_iter; ++it) {
    Primal rx = prog.gt(z);
    rx.axpy(1.0, cv);
    Cone rz = prog.g(x);
    rz.axpy(1.0, s);
    rz.axpy(-1.0, hv);
    const double gap = s.dot(z);
    const double pcost = cv.dot(x);
    res.primal_residual = rz.norm() / h_scale;
    res.dual_residual = rx.norm() / c_scale;
    res.gap = gap;
    res.iterations = it;
    const double merit = std::max({res.primal_residual, res.dual_residual,
                                   gap / std::max(1.0, std::abs(pcost))});
    if (!std::isfinite(merit)) break;
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x;
      best = res;
      worse = 0;
    } else if (++worse >= 3) {
      break;
    }
    if (merit <= settings.tol) break;
    if (it == settings.max_iter) break;

    const double mu = gap / degree;
    const Scaling w = compute_scaling(s, z);
    const Cone lambda = w.apply(z);
    prog.factor(w);

    Primal bx = rx;
    for (auto& v : bx.x) v = -v;
    bx.tau = -bx.tau;

    auto direction = [&](const Cone& ds, Primal& dx, Cone& dz, Cone& dsl) {
      const Cone q = divide(lambda, ds);
      Cone bz = rz;
      bz.axpy(1.0, w.apply(q));
      for (auto& v : bz.l) v = -v;
      for (auto& v : bz.c) v = -v;
      bz.t = -bz.t;
      prog.kkt_solve(bx, bz, dx, dz, settings.refinement);
      dsl = w.apply(q);
      dsl.axpy(-1.0, w.apply(w.apply(dz)));
    };

    // Predictor.
    Cone ds_aff = product(lambda, lambda);
    ds_aff.axpy(-2.0, ds_aff);
    Primal dx;
    Cone dz, dsv;
    direction(ds_aff, dx, dz, dsv);
    const double alpha_aff = std::min(1.0, std::min(max_step(s, dsv), max_step(z, dz)));
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    // Corrector.
    Cone ds = ds_aff;
    ds.axpy(-1.0, product(w.apply_inv(dsv), w.apply(dz)));
    ds.axpy(sigma * mu, e);
    direction(ds, dx, dz, dsv);
    const double alpha = std::min(1.0, 0.99 * std::min(max_step(s, dsv), max_step(z, dz)));

    x.axpy(alpha, dx);
    s.axpy(alpha, dsv);
    z.axpy(alpha, dz);
  }

  best.iterations = res.iterations;
  if (best_merit <= settings.tol)
    best.status = SolverStatus::optimal;
  else if (best_merit <= 1e-5)
    best.status = SolverStatus::inaccurate;
  else
    best.status = SolverStatus::max_iter;
  for (std::size_t j = 0; j < n; ++j) {
    best.t[active[j]] = best_x.x[j](0);
    best.u[active[j]] = best_x.x[j].tail<3>();
  }
  best.tau = best_x.tau;
  best.objective = cv.dot(best_x);
  return best;
}

}  // namespace ltmpc
