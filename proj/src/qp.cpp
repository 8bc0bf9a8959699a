#include "causalsvm/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace causalsvm {

double KktResiduals::worst() const {
  return std::max(std::max(stationarity, primal), std::max(dual, complementarity));
}

std::vector<std::string> validate_qp(const QpProblem& qp) {
  std::vector<std::string> out;
  const auto n = qp.P.rows();
  if (qp.P.cols() != n) out.push_back("P is not square");
  if (qp.q.size() != n) out.push_back("q length does not match P");
  if (qp.A.rows() > 0 && qp.A.cols() != n) out.push_back("A column count does not match P");
  if (qp.b.size() != qp.A.rows()) out.push_back("b length does not match A");
  if (qp.E.rows() > 0 && qp.E.cols() != n) out.push_back("E column count does not match P");
  if (qp.d.size() != qp.E.rows()) out.push_back("d length does not match E");
  if (qp.P.cols() == n && n > 0) {
    const double asym = (qp.P - qp.P.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, qp.P.cwiseAbs().maxCoeff());
    if (asym > 1e-8 * scale) out.push_back("P is not symmetric");
  }
  if (!qp.P.allFinite() || !qp.q.allFinite() || !qp.A.allFinite() || !qp.b.allFinite() ||
      !qp.E.allFinite() || !qp.d.allFinite())
    out.push_back("non-finite entry in problem data");
  return out;
}

KktResiduals kkt_residuals(const QpProblem& qp, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& mu, const Eigen::VectorXd& nu) {
  KktResiduals r;
  Eigen::VectorXd grad = qp.P * x + qp.q;
  if (qp.A.rows() > 0) grad.noalias() += qp.A.transpose() * mu;
  if (qp.E.rows() > 0) grad.noalias() += qp.E.transpose() * nu;
  r.stationarity = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
  if (qp.A.rows() > 0) {
    const Eigen::VectorXd slack = qp.A * x - qp.b;  // <= 0 when feasible
    r.primal = std::max(0.0, slack.maxCoeff());
    r.dual = std::max(0.0, -mu.minCoeff());
    r.complementarity = (mu.array() * slack.array()).abs().maxCoeff();
  }
  if (qp.E.rows() > 0)
    r.primal = std::max(r.primal, (qp.E * x - qp.d).cwiseAbs().maxCoeff());
  return r;
}

namespace {

// Nonzero pattern of one inequality row, for cheap A'WA assembly.
struct RowPattern {
  std::vector<int> idx;
  std::vector<double> val;
};

struct Scaling {
  Eigen::VectorXd var;    // x = var .* x_scaled
  Eigen::VectorXd row_a;  // scaled A = diag(row_a) * A * diag(var)
  Eigen::VectorXd row_e;
  double cost = 1.0;      // scaled P = cost * var P var, q likewise
};

Scaling ruiz_equilibrate(Eigen::MatrixXd& P, Eigen::VectorXd& q, Eigen::MatrixXd& A,
                         Eigen::VectorXd& b, Eigen::MatrixXd& E, Eigen::VectorXd& d) {
  const auto n = P.rows();
  const auto m = A.rows();
  const auto p = E.rows();
  Scaling sc;
  sc.var = Eigen::VectorXd::Ones(n);
  sc.row_a = Eigen::VectorXd::Ones(m);
  sc.row_e = Eigen::VectorXd::Ones(p);

  auto guarded = [](double v) { return std::clamp(v, 1e-12, 1e12); };

  for (int round = 0; round < 12; ++round) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double col = P.col(j).cwiseAbs().maxCoeff();
      if (m > 0) col = std::max(col, A.col(j).cwiseAbs().maxCoeff());
      if (p > 0) col = std::max(col, E.col(j).cwiseAbs().maxCoeff());
      const double s = 1.0 / std::sqrt(guarded(col));
      sc.var[j] *= s;
      P.col(j) *= s;
      P.row(j) *= s;
      q[j] *= s;
      if (m > 0) A.col(j) *= s;
      if (p > 0) E.col(j) *= s;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      const double s = 1.0 / std::sqrt(guarded(A.row(i).cwiseAbs().maxCoeff()));
      sc.row_a[i] *= s;
      A.row(i) *= s;
      b[i] *= s;
    }
    for (Eigen::Index i = 0; i < p; ++i) {
      const double s = 1.0 / std::sqrt(guarded(E.row(i).cwiseAbs().maxCoeff()));
      sc.row_e[i] *= s;
      E.row(i) *= s;
      d[i] *= s;
    }
  }
  double cost_scale = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) cost_scale += P.col(j).cwiseAbs().maxCoeff();
  cost_scale /= std::max<Eigen::Index>(n, 1);
  cost_scale = std::max(cost_scale, q.size() > 0 ? q.cwiseAbs().maxCoeff() : 0.0);
  sc.cost = 1.0 / guarded(cost_scale);
  P *= sc.cost;
  q *= sc.cost;
  return sc;
}

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

// Componentwise backward-error test. When the data spans many orders of
// magnitude the absolute residuals bottom out at roughly eps * |P||x|, which
// can exceed any sensible absolute tol even at the exact optimum; residuals
// small relative to the magnitudes that produced them still certify the point.
bool kkt_ok_relative(const QpProblem& qp, const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                     const Eigen::VectorXd& y, const KktResiduals& r, double tol) {
  const Eigen::VectorXd ax = x.cwiseAbs();
  Eigen::VectorXd stat_scale = qp.P.cwiseAbs() * ax + qp.q.cwiseAbs();
  double prim_scale = 1.0;
  double comp_scale = 1.0;
  double zmax = 0.0;
  if (qp.A.rows() > 0) {
    stat_scale.noalias() += qp.A.transpose().cwiseAbs() * z.cwiseAbs();
    const Eigen::VectorXd row = qp.A.cwiseAbs() * ax + qp.b.cwiseAbs();
    prim_scale = std::max(prim_scale, row.maxCoeff());
    comp_scale = std::max(comp_scale, (z.cwiseAbs().array() * row.array()).maxCoeff());
    zmax = z.cwiseAbs().maxCoeff();
  }
  if (qp.E.rows() > 0) {
    stat_scale.noalias() += qp.E.transpose().cwiseAbs() * y.cwiseAbs();
    prim_scale = std::max(prim_scale, (qp.E.cwiseAbs() * ax + qp.d.cwiseAbs()).maxCoeff());
  }
  const double ss = std::max(1.0, stat_scale.size() > 0 ? stat_scale.maxCoeff() : 0.0);
  return r.stationarity <= tol * ss && r.primal <= tol * prim_scale &&
         r.dual <= tol * std::max(1.0, zmax) && r.complementarity <= tol * comp_scale;
}

}  // namespace

QpSolution solve_qp(const QpProblem& qp0, double tol, int max_iter) {
  {
    const auto issues = validate_qp(qp0);
    if (!issues.empty()) {
      std::string msg = "solve_qp: malformed problem:";
      for (const auto& s : issues) msg += " " + s + ";";
      throw std::invalid_argument(msg);
    }
  }
  if (!(tol > 0.0)) throw std::invalid_argument("solve_qp: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("solve_qp: max_iter must be >= 1");

  const auto n = qp0.P.rows();
  const auto m = qp0.A.rows();
  const auto p = qp0.E.rows();

  // Work on an equilibrated copy; certify on the original.
  Eigen::MatrixXd P = 0.5 * (qp0.P + qp0.P.transpose());
  Eigen::VectorXd q = qp0.q;
  Eigen::MatrixXd A = qp0.A;
  Eigen::VectorXd b = qp0.b;
  Eigen::MatrixXd E = qp0.E;
  Eigen::VectorXd d = qp0.d;
  const Scaling sc = ruiz_equilibrate(P, q, A, b, E, d);

  QpSolution sol;
  sol.metadata = "ipm:mehrotra/v1;scaling:ruiz12";
  sol.x = Eigen::VectorXd::Zero(n);
  sol.ineq_multipliers = Eigen::VectorXd::Zero(m);
  sol.eq_multipliers = Eigen::VectorXd::Zero(p);

  const double pmax = P.size() > 0 ? P.cwiseAbs().maxCoeff() : 0.0;
  double delta = 1e-12 * std::max(1.0, pmax);

  auto finish = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& y, int iters, QpStatus status) {
    sol.x = sc.var.asDiagonal() * x;
    sol.ineq_multipliers = (sc.row_a.asDiagonal() * z) / sc.cost;
    sol.eq_multipliers = (sc.row_e.asDiagonal() * y) / sc.cost;
    sol.iterations = iters;
    sol.kkt = kkt_residuals(qp0, sol.x, sol.ineq_multipliers, sol.eq_multipliers);
    sol.objective = 0.5 * sol.x.dot(qp0.P * sol.x) + qp0.q.dot(sol.x);
    sol.status = status;
    return sol;
  };

  // Equality-only / unconstrained: one regularized KKT solve with refinement.
  if (m == 0) {
    Eigen::VectorXd x(n), y(p);
    Eigen::LLT<Eigen::MatrixXd> llt;
    double dl = std::max(delta, 1e-12);
    for (int attempt = 0; attempt < 30; ++attempt) {
      llt.compute(P + dl * Eigen::MatrixXd::Identity(n, n));
      if (llt.info() == Eigen::Success) break;
      dl *= 100.0;
    }
    auto solve_kkt = [&](Eigen::VectorXd& xr, Eigen::VectorXd& yr) {
      if (p == 0) {
        xr = llt.solve(-q);
        for (int r = 0; r < 3; ++r) xr += llt.solve(-q - P.selfadjointView<Eigen::Lower>() * xr);
      } else {
        Eigen::MatrixXd Et = E.transpose();
        Eigen::MatrixXd ET_sol = llt.solve(Et);
        Eigen::VectorXd x0 = llt.solve(-q);
        Eigen::MatrixXd S = E * ET_sol;
        yr = S.ldlt().solve(E * x0 - d);
        xr = x0 - ET_sol * yr;
        for (int r = 0; r < 2; ++r) {
          Eigen::VectorXd res1 = -q - P.selfadjointView<Eigen::Lower>() * xr - Et * yr;
          Eigen::VectorXd res2 = d - E * xr;
          Eigen::VectorXd cx = llt.solve(res1);
          Eigen::VectorXd cy = S.ldlt().solve(E * cx - res2);
          xr += cx - ET_sol * cy;
          yr += cy;
        }
      }
    };
    solve_kkt(x, y);
    finish(x, Eigen::VectorXd(), y, 1, QpStatus::Optimal);
    if (sol.kkt.worst() > tol) {
      if (kkt_ok_relative(qp0, sol.x, sol.ineq_multipliers, sol.eq_multipliers, sol.kkt, tol))
        sol.metadata += ";certificate:relative";
      else
        sol.status = QpStatus::MaxIter;
    }
    return sol;
  }

  // Row sparsity of A for the normal matrix.
  std::vector<RowPattern> rows(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (A(i, j) != 0.0) {
        rows[static_cast<std::size_t>(i)].idx.push_back(static_cast<int>(j));
        rows[static_cast<std::size_t>(i)].val.push_back(A(i, j));
      }
    }
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd s(m), z(m);
  {
    const Eigen::VectorXd slack0 = b;  // b - A*0
    for (Eigen::Index i = 0; i < m; ++i) s[i] = std::max(1.0, slack0[i]);
    z.setOnes();
  }

  // KKT residuals of an iterate on the equilibrated data; used to decide
  // whether a polished point beats the one it started from.
  auto scaled_worst = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& zs,
                          const Eigen::VectorXd& ys) {
    Eigen::VectorXd g = P.selfadjointView<Eigen::Lower>() * xs + q + A.transpose() * zs;
    if (p > 0) g.noalias() += E.transpose() * ys;
    const double stat = g.cwiseAbs().maxCoeff();
    const Eigen::VectorXd slack = A * xs - b;
    double prim = std::max(0.0, slack.maxCoeff());
    if (p > 0) prim = std::max(prim, (E * xs - d).cwiseAbs().maxCoeff());
    const double dual = std::max(0.0, -zs.minCoeff());
    const double comp = (zs.array() * slack.array()).abs().maxCoeff();
    return std::max(std::max(stat, prim), std::max(dual, comp));
  };

  const int iter_cap = std::min(max_iter, 500);
  double best_worst = std::numeric_limits<double>::infinity();
  int stall = 0;

  // Final polish: once the barrier is exhausted the active set is unambiguous,
  // so re-solve the KKT system with the active inequalities pinned as
  // equalities, with iterative refinement. Adopts the result only if it beats
  // the current iterate on the equilibrated residuals.
  auto polish = [&](Eigen::VectorXd& xs, Eigen::VectorXd& zs, Eigen::VectorXd& ys) {
    std::vector<Eigen::Index> act;
    for (Eigen::Index i = 0; i < m; ++i)
      if (zs[i] >= s[i]) act.push_back(i);
    const Eigen::Index na = static_cast<Eigen::Index>(act.size());
    const Eigen::Index nc = na + p;
    Eigen::MatrixXd C(nc, n);
    Eigen::VectorXd rc(nc);
    for (Eigen::Index k = 0; k < na; ++k) {
      C.row(k) = A.row(act[static_cast<std::size_t>(k)]);
      rc[k] = b[act[static_cast<std::size_t>(k)]];
    }
    if (p > 0) {
      C.bottomRows(p) = E;
      rc.tail(p) = d;
    }
    // Proximal term: P can be singular (low-rank kernels), leaving directions
    // the active set does not pin. Anchoring those at the current iterate
    // keeps the polished point on the optimal face nearest to it, and in
    // particular keeps the inactive constraints satisfied.
    const double rho = 1e-8;
    const Eigen::Index dim = n + nc;
    Eigen::MatrixXd K(dim, dim);
    K.setZero();
    K.topLeftCorner(n, n) = P;
    K.topLeftCorner(n, n).diagonal().array() += rho;
    if (nc > 0) {
      K.topRightCorner(n, nc) = C.transpose();
      K.bottomLeftCorner(nc, n) = C;
    }
    Eigen::VectorXd rhs(dim);
    rhs.head(n) = -q + rho * xs;
    rhs.tail(nc) = rc;
    auto residual = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd r(dim);
      r.head(n) = -q - P.selfadjointView<Eigen::Lower>() * v.head(n) - rho * (v.head(n) - xs);
      if (nc > 0) {
        r.head(n).noalias() -= C.transpose() * v.tail(nc);
        r.tail(nc) = rc - C * v.head(n);
      }
      return r;
    };
    K.bottomRightCorner(nc, nc).diagonal().array() -= 1e-10;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    Eigen::VectorXd v = lu.solve(rhs);
    for (int r = 0; r < 4; ++r) v += lu.solve(residual(v));
    const Eigen::VectorXd xn = v.head(n);
    const Eigen::VectorXd w = v.tail(nc);
    Eigen::VectorXd zn = Eigen::VectorXd::Zero(m);
    for (Eigen::Index k = 0; k < na; ++k) zn[act[static_cast<std::size_t>(k)]] = w[k];
    Eigen::VectorXd yn = p > 0 ? Eigen::VectorXd(w.tail(p)) : Eigen::VectorXd();
    if (!xn.allFinite() || !zn.allFinite() || (p > 0 && !yn.allFinite())) return;
    if (scaled_worst(xn, zn, yn) < scaled_worst(xs, zs, ys)) {
      xs = xn;
      zs = zn;
      ys = yn;
    }
  };

  // Shared exit for stall / factorization failure / iteration cap: polish,
  // then certify with the absolute criterion first and the backward-error
  // criterion as fallback; otherwise report MaxIter.
  auto give_up = [&](Eigen::VectorXd xs, Eigen::VectorXd zs, Eigen::VectorXd ys, int iters) {
    polish(xs, zs, ys);
    finish(xs, zs, ys, iters, QpStatus::MaxIter);
    if (sol.kkt.worst() <= tol) {
      sol.status = QpStatus::Optimal;
    } else if (kkt_ok_relative(qp0, sol.x, sol.ineq_multipliers, sol.eq_multipliers, sol.kkt,
                               tol)) {
      sol.status = QpStatus::Optimal;
      sol.metadata += ";certificate:relative";
    }
    return sol;
  };

  Eigen::MatrixXd M(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt;

  for (int iter = 0; iter < iter_cap; ++iter) {
    // Convergence is judged on the original data.
    {
      const Eigen::VectorXd x_o = sc.var.asDiagonal() * x;
      const Eigen::VectorXd z_o = (sc.row_a.asDiagonal() * z) / sc.cost;
      const Eigen::VectorXd y_o = (sc.row_e.asDiagonal() * y) / sc.cost;
      const KktResiduals res = kkt_residuals(qp0, x_o, z_o, y_o);
      const double w = res.worst();
      if (w <= tol) return finish(x, z, y, iter, QpStatus::Optimal);
      if (w < best_worst * (1.0 - 1e-3)) {
        best_worst = w;
        stall = 0;
      } else if (++stall > 40) {
        return give_up(x, z, y, iter);
      }
    }

    Eigen::VectorXd rd = P.selfadjointView<Eigen::Lower>() * x + q + A.transpose() * z;
    if (p > 0) rd.noalias() += E.transpose() * y;
    const Eigen::VectorXd rp = A * x + s - b;
    const Eigen::VectorXd re = p > 0 ? Eigen::VectorXd(E * x - d) : Eigen::VectorXd();
    const double mu = s.dot(z) / static_cast<double>(m);

    // Crude infeasibility certificate check.
    if (iter > 20 && z.lpNorm<Eigen::Infinity>() > 1e10) {
      const double zn = z.lpNorm<1>() + (p > 0 ? y.lpNorm<1>() : 0.0);
      const Eigen::VectorXd zh = z / zn;
      const Eigen::VectorXd yh = p > 0 ? Eigen::VectorXd(y / zn) : Eigen::VectorXd();
      Eigen::VectorXd at = A.transpose() * zh;
      if (p > 0) at += E.transpose() * yh;
      double rhs = b.dot(zh) + (p > 0 ? d.dot(yh) : 0.0);
      if (at.lpNorm<Eigen::Infinity>() < 1e-8 && rhs < -1e-10)
        return finish(x, z, y, iter, QpStatus::Infeasible);
    }

    const Eigen::VectorXd w = (z.array() / s.array()).matrix();

    // M = P + A' diag(w) A + delta I, using the row patterns.
    M = P;
    M.diagonal().array() += delta;
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& rw = rows[static_cast<std::size_t>(i)];
      const double wi = w[i];
      for (std::size_t a = 0; a < rw.idx.size(); ++a)
        for (std::size_t c = 0; c < rw.idx.size(); ++c)
          M(rw.idx[a], rw.idx[c]) += wi * rw.val[a] * rw.val[c];
    }
    llt.compute(M);
    int bumps = 0;
    while (llt.info() != Eigen::Success && bumps < 12) {
      delta = std::max(delta * 100.0, 1e-10);
      M.diagonal().array() += delta;
      llt.compute(M);
      ++bumps;
    }
    if (llt.info() != Eigen::Success) return give_up(x, z, y, iter);

    Eigen::MatrixXd ET_sol;
    Eigen::LDLT<Eigen::MatrixXd> schur;
    if (p > 0) {
      ET_sol = llt.solve(E.transpose());
      schur.compute(E * ET_sol);
    }
    auto newton = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
                      Eigen::VectorXd& dy) {
      if (p == 0) {
        dx = llt.solve(r1);
        dy.resize(0);
      } else {
        const Eigen::VectorXd x0 = llt.solve(r1);
        dy = schur.solve(E * x0 - r2);
        dx = x0 - ET_sol * dy;
      }
    };

    // Affine scaling step.
    Eigen::VectorXd rc = (z.array() * s.array()).matrix();
    Eigen::VectorXd r1 =
        -rd - A.transpose() * ((w.array() * rp.array()).matrix() - (rc.array() / s.array()).matrix());
    Eigen::VectorXd dx_a, dy_a;
    newton(r1, p > 0 ? Eigen::VectorXd(-re) : Eigen::VectorXd(), dx_a, dy_a);
    Eigen::VectorXd dz_a =
        (w.array() * (A * dx_a + rp).array()).matrix() - (rc.array() / s.array()).matrix();
    Eigen::VectorXd ds_a = -rp - A * dx_a;

    const double ap_a = max_step(s, ds_a);
    const double ad_a = max_step(z, dz_a);
    const double mu_aff = (s + ap_a * ds_a).dot(z + ad_a * dz_a) / static_cast<double>(m);
    double sigma = std::pow(std::max(mu_aff, 0.0) / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    rc = (z.array() * s.array() + dz_a.array() * ds_a.array() - sigma * mu).matrix();
    r1 = -rd -
         A.transpose() * ((w.array() * rp.array()).matrix() - (rc.array() / s.array()).matrix());
    Eigen::VectorXd dx, dy;
    newton(r1, p > 0 ? Eigen::VectorXd(-re) : Eigen::VectorXd(), dx, dy);
    Eigen::VectorXd dz =
        (w.array() * (A * dx + rp).array()).matrix() - (rc.array() / s.array()).matrix();
    Eigen::VectorXd ds = -rp - A * dx;

    const double frac = mu < 1e-8 ? 0.9995 : 0.995;
    const double ap = std::min(1.0, frac * max_step(s, ds));
    const double ad = std::min(1.0, frac * max_step(z, dz));
    x += ap * dx;
    s += ap * ds;
    z += ad * dz;
    if (p > 0) y += ad * dy;
  }
  return give_up(x, z, y, iter_cap);
}

}  // namespace causalsvm
