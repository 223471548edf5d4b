#include "neckpinch/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "neckpinch/errors.hpp"

namespace neckpinch::spectral {

UniformLine UniformLine::make(double half_width, int nodes) {
  if (nodes < 16 || nodes % 2 == 0)
    fail("bad-grid", "spectral line needs an odd node count >= 17");
  UniformLine l;
  l.z.resize(nodes);
  l.h = 2.0 * half_width / (nodes - 1);
  for (int i = 0; i < nodes; ++i) l.z[i] = -half_width + i * l.h;
  return l;
}

double UniformLine::inner(std::span<const double> f, std::span<const double> g) const {
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  s -= 0.5 * (f.front() * g.front() + f.back() * g.back());
  return s * h;
}

std::vector<double> UniformLine::d1(std::span<const double> f) const {
  const int n = size();
  std::vector<double> out(n);
  for (int i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return out;
}

double hermite_mode_value(int k, double alpha, double z) {
  const double w = std::exp(-0.25 * alpha * z * z);
  switch (k) {
    case 0:
      return std::pow(alpha / (2.0 * M_PI), 0.25) * w;
    case 1:
      return std::pow(alpha / (2.0 * M_PI), 0.25) * std::sqrt(alpha) * z * w;
    case 2:
      return std::pow(alpha / (8.0 * M_PI), 0.25) * (1.0 - alpha * z * z) * w;
  }
  fail("bad-argument", "hermite_mode_value supports k = 0, 1, 2");
}

EigenBasis hermite_modes(const UniformLine& line, double alpha) {
  if (!(alpha > 0.0)) fail("bad-argument", "alpha must be positive");
  const double W = std::abs(line.z.back());
  if (std::exp(-0.25 * alpha * W * W) > 1e-14)
    fail("domain-too-small", "Gaussian weight does not decay at the boundary");
  EigenBasis b;
  b.alpha = alpha;
  for (int k = 0; k < 3; ++k) {
    b.modes[k].resize(line.size());
    for (int i = 0; i < line.size(); ++i)
      b.modes[k][i] = hermite_mode_value(k, alpha, line.z[i]);
  }
  return b;
}

std::vector<double> project(const UniformLine& line, const EigenBasis& basis,
                            std::span<const double> f, int n) {
  if (n < 1 || n > 3) fail("bad-argument", "projection order must be 1, 2 or 3");
  std::vector<double> out(f.begin(), f.end());
  for (int m = 0; m < n; ++m) {
    // discrete renormalization keeps the projector idempotent to round-off
    const double nn = line.inner(basis.modes[m], basis.modes[m]);
    const double c = line.inner(basis.modes[m], out) / nn;
    for (int i = 0; i < line.size(); ++i) out[i] -= c * basis.modes[m][i];
  }
  return out;
}

OperatorAssembly assemble_operator(OperatorId id, const OperatorParams& p,
                                   const UniformLine& line) {
  OperatorAssembly op;
  op.id = id;
  op.params = p;
  op.line = line;
  const int n = line.size();
  const double h2 = line.h * line.h;
  op.diag.resize(n);
  op.sub.assign(n - 1, -1.0 / h2);
  for (int i = 0; i < n; ++i) {
    const double z = line.z[i];
    const double z2 = z * z;
    double pot = 0.0;
    switch (id) {
      case OperatorId::L_alpha:
        pot = 0.25 * p.alpha * p.alpha * z2 - 1.5 * p.alpha;
        break;
      case OperatorId::L_alpha_shifted:
        pot = 0.25 * p.alpha * p.alpha * z2 - 2.5 * p.alpha;
        break;
      case OperatorId::L_alpha_potential:
        pot = 0.25 * p.alpha * p.alpha * z2 - 1.5 * p.alpha -
              2.0 * (p.d - 1) * p.alpha / (2.0 * (p.d - 1) + p.beta * z2);
        break;
      case OperatorId::L_ab:
        pot = 0.25 * (p.a * p.a + p.a_tau) * z2 - 1.5 * p.a -
              (p.d - 1) * (0.5 + p.a) / (2.0 * (p.d - 1) + p.b * z2);
        break;
    }
    op.diag[i] = 2.0 / h2 + pot;
  }
  return op;
}

std::vector<double> OperatorAssembly::apply(std::span<const double> f) const {
  const int n = static_cast<int>(diag.size());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double s = diag[i] * f[i];
    if (i > 0) s += sub[i - 1] * f[i - 1];
    if (i + 1 < n) s += sub[i] * f[i + 1];
    out[i] = s;
  }
  return out;
}

std::vector<double> discrete_spectrum(const OperatorAssembly& op, int k) {
  const int n = static_cast<int>(op.diag.size());
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(op.diag.data(), n);
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(op.sub.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail("spectrum-failed", "tridiagonal eigensolver failed");
  std::vector<double> vals(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + n);
  std::sort(vals.begin(), vals.end());
  vals.resize(std::min<size_t>(vals.size(), k));
  return vals;
}

namespace {

// one Thomas solve of (A - shift I) x = b
bool shifted_solve(const OperatorAssembly& op, double shift, std::vector<double>& x) {
  const int n = static_cast<int>(op.diag.size());
  std::vector<double> dg(n), rhs = x;
  for (int i = 0; i < n; ++i) dg[i] = op.diag[i] - shift;
  std::vector<double> c(op.sub.begin(), op.sub.end());
  for (int i = 1; i < n; ++i) {
    if (dg[i - 1] == 0.0) return false;
    const double w = op.sub[i - 1] / dg[i - 1];
    dg[i] -= w * c[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (dg[n - 1] == 0.0) return false;
  rhs[n - 1] /= dg[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / dg[i];
  x = rhs;
  return true;
}

}  // namespace

std::vector<SpectrumRow> discrete_spectrum_with_residuals(const OperatorAssembly& op, int k) {
  auto vals = discrete_spectrum(op, k);
  std::vector<SpectrumRow> rows;
  const int n = static_cast<int>(op.diag.size());
  for (int idx = 0; idx < static_cast<int>(vals.size()); ++idx) {
    // inverse iteration around a slightly detuned shift
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = std::sin(0.7 * (i + 1) * (idx + 1));
    const double shift = vals[idx] + 1e-8;
    double nrm = 0.0;
    for (int it = 0; it < 4; ++it) {
      if (!shifted_solve(op, shift, x)) break;
      nrm = 0.0;
      for (double v : x) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (double& v : x) v /= nrm;
    }
    auto ax = op.apply(x);
    double rr = 0.0, xx = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = ax[i] - vals[idx] * x[i];
      rr += e * e;
      xx += x[i] * x[i];
    }
    rows.push_back({idx, vals[idx], std::sqrt(rr / xx)});
  }
  return rows;
}

std::vector<double> Propagator::evolve(std::span<const double> f0, double sigma) const {
  const int n = static_cast<int>(f0.size());
  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> w = v;
    if (basis && project_n > 0) w = project(op->line, *basis, w, project_n);
    w = op->apply(w);
    if (basis && project_n > 0) w = project(op->line, *basis, w, project_n);
    return w;
  };
  // Lanczos with full reorthogonalization
  const int m = std::min(krylov, n);
  std::vector<std::vector<double>> V;
  std::vector<double> alpha_c, beta_c;
  std::vector<double> v0(f0.begin(), f0.end());
  if (basis && project_n > 0) v0 = project(op->line, *basis, v0, project_n);
  double nrm0 = std::sqrt(op->line.inner(v0, v0));
  if (nrm0 == 0.0) return std::vector<double>(n, 0.0);
  for (double& x : v0) x /= nrm0;
  V.push_back(v0);
  for (int j = 0; j < m; ++j) {
    auto w = apply(V[j]);
    const double a = op->line.inner(w, V[j]);
    alpha_c.push_back(a);
    for (size_t k = 0; k < V.size(); ++k) {
      const double c = op->line.inner(w, V[k]);
      for (int i = 0; i < n; ++i) w[i] -= c * V[k][i];
    }
    const double b = std::sqrt(op->line.inner(w, w));
    if (b < 1e-13 || j + 1 == m) break;
    beta_c.push_back(b);
    for (double& x : w) x /= b;
    V.push_back(w);
  }
  const int mm = static_cast<int>(alpha_c.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(mm, mm);
  for (int i = 0; i < mm; ++i) {
    T(i, i) = alpha_c[i];
    if (i + 1 < mm) T(i, i + 1) = T(i + 1, i) = beta_c[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(mm);
  e1(0) = 1.0;
  Eigen::VectorXd y = es.eigenvectors() *
                      ((-sigma * es.eigenvalues().array()).exp() *
                       (es.eigenvectors().transpose() * e1).array())
                          .matrix();
  std::vector<double> out(n, 0.0);
  for (int j = 0; j < mm; ++j)
    for (int i = 0; i < n; ++i) out[i] += nrm0 * y(j) * V[j][i];
  return out;
}

ProbeResult propagator_decay_probe(int n, double alpha, bool potential_on,
                                   const UniformLine& line, std::span<const double> f,
                                   double horizon, double beta_frozen, int d) {
  if (horizon < 2.0) fail("probe-inconclusive", "horizon too short for a stable fit");
  EigenBasis basis = hermite_modes(line, alpha);
  OperatorParams p;
  p.alpha = alpha;
  p.beta = beta_frozen;
  p.d = d;
  OperatorAssembly op = assemble_operator(
      potential_on ? OperatorId::L_alpha_potential : OperatorId::L_alpha, p, line);
  const int proj = potential_on ? n : 2;
  Propagator prop{&op, &basis, proj, 140};

  auto weighted_sup = [&](const std::vector<double>& eta) {
    double best = 0.0;
    for (int i = 0; i < line.size(); ++i) {
      const double z = line.z[i];
      if (std::abs(z) > 10.0) continue;  // keep e^{alpha z^2/4} off the round-off floor
      const double w = std::exp(0.25 * alpha * z * z) * std::pow(1.0 + z * z, -0.5 * n);
      best = std::max(best, std::abs(eta[i]) * w);
    }
    return best;
  };

  ProbeResult r;
  const int samples = 13;
  std::vector<double> f0 = project(line, basis, f, proj);
  for (int k = 0; k < samples; ++k) {
    const double s = 1.0 + (horizon - 1.0) * k / (samples - 1.0);  // skip transient
    auto eta = prop.evolve(f0, s);
    const double nrm = weighted_sup(eta);
    if (nrm <= 0.0 || !std::isfinite(nrm))
      fail("probe-inconclusive", "weighted norm vanished before the horizon");
    r.sigmas.push_back(s);
    r.norms.push_back(nrm);
  }
  // log-linear least squares
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < samples; ++k) {
    const double x = r.sigmas[k], y = std::log(r.norms[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  r.rate = -slope;
  r.bound_rate = potential_on ? 0.0 : (n - 1) * alpha;
  r.passed = potential_on ? r.rate > 0.0 : r.rate >= r.bound_rate * 0.9;
  return r;
}

}  // namespace neckpinch::spectral
