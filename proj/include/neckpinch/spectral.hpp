#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace neckpinch::spectral {

/// Uniform full-line grid [-W, W] with Dirichlet truncation; the flat L^2
/// inner product is the plain trapezoid rule (spectrally accurate for the
/// Gaussian-decay functions all operators here act on).
struct UniformLine {
  std::vector<double> z;
  double h = 0.0;

  static UniformLine make(double half_width, int nodes);
  int size() const { return static_cast<int>(z.size()); }
  double inner(std::span<const double> f, std::span<const double> g) const;
  std::vector<double> d1(std::span<const double> f) const;  // central, O(h^2)
};

/// First three normalized Gaussian-weighted Hermite modes of the oscillator
/// L_alpha = -d^2 + (alpha^2/4) z^2 - 3 alpha/2.
struct EigenBasis {
  double alpha = 0.5;
  std::array<std::vector<double>, 3> modes;  // phi_0, phi_1, phi_2
};

// Throws "domain-too-small" when the weight fails to decay at the boundary.
EigenBasis hermite_modes(const UniformLine& line, double alpha);

// Closed-form mode values (for oracles).
double hermite_mode_value(int k, double alpha, double z);

// P_n f = f - sum_{m<n} <phi_m, f> phi_m, n = 1, 2, 3.
std::vector<double> project(const UniformLine& line, const EigenBasis& basis,
                            std::span<const double> f, int n);

enum class OperatorId { L_alpha, L_alpha_shifted, L_alpha_potential, L_ab };

struct OperatorParams {
  double alpha = 0.5;
  double beta = 0.05;   // frozen potential parameter (L_alpha_potential)
  double a = 0.5, b = 0.0, a_tau = 0.0;  // L_ab
  int d = 2;
};

/// Symmetric tridiagonal assembly of the chosen operator on the line
/// (second-order Laplacian plus diagonal potential).
struct OperatorAssembly {
  OperatorId id = OperatorId::L_alpha;
  OperatorParams params;
  std::vector<double> diag, sub;
  UniformLine line;

  std::vector<double> apply(std::span<const double> f) const;
};

OperatorAssembly assemble_operator(OperatorId id, const OperatorParams& p,
                                   const UniformLine& line);

// Lowest k eigenvalues (symmetric tridiagonal eigensolver).  Throws
// "spectrum-failed" if the solver does not converge.
std::vector<double> discrete_spectrum(const OperatorAssembly& op, int k);

struct SpectrumRow {
  int index;
  double eigenvalue;
  double residual;  // ||A psi - lambda psi|| / ||psi||, inverse-iteration vector
};
std::vector<SpectrumRow> discrete_spectrum_with_residuals(const OperatorAssembly& op, int k);

/// exp(-sigma A) f for the (optionally projected) symmetric operator via a
/// Lanczos Krylov propagator; exact in sigma up to Krylov truncation.
struct Propagator {
  const OperatorAssembly* op;
  const EigenBasis* basis;  // if set, evolve P_n A P_n on range(P_n)
  int project_n = 0;
  int krylov = 120;

  std::vector<double> evolve(std::span<const double> f0, double sigma) const;
};

struct ProbeResult {
  double rate = 0.0;        // fitted exponential decay of the weighted sup
  double bound_rate = 0.0;  // asserted lower rate ((1-n)alpha flat; 0 potential)
  bool passed = false;
  std::vector<double> sigmas, norms;
};

/// Decay probe for the weighted sup ||<z>^{-n} e^{alpha z^2/4} eta||_inf under
/// the flat semigroup (potential_on = false, projector P_2) or the projected
/// potential flow (potential_on = true, projector P_n).  The weighted sup is
/// taken on |z| <= 10 where the Gaussian weight does not amplify round-off.
/// Throws "probe-inconclusive" when the horizon cannot support a stable fit.
ProbeResult propagator_decay_probe(int n, double alpha, bool potential_on,
                                   const UniformLine& line, std::span<const double> f,
                                   double horizon, double beta_frozen = 0.05,
                                   int d = 2);

}  // namespace neckpinch::spectral
