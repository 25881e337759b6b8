#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "altchain/common.hpp"
#include "altchain/linalg.hpp"

// Exact solution of the dimerized XX chain (Delta = 0): Jordan-Wigner plus
// Fourier diagonalization. Two single-particle bands
//   eps_{+,k} =  (1/2) sqrt(1 + lambda^2 + 2 lambda cos k) - B,
//   eps_{-,k} = -(1/2) sqrt(1 + lambda^2 + 2 lambda cos k) - B,
// over N/2 cell momenta. Note the appendix fixes the fermionic field sign so
// that large B > 0 fills every mode; spin energies are unaffected because
// E(B) = E(-B) at Delta = 0.

namespace altchain::xx {

enum class Boundary { periodic, open };

struct FermionSpectrum {
  std::vector<double> momenta;
  Eigen::VectorXd eps_plus, eps_minus;
  double lambda = 0.0, b = 0.0;
};

/// Momenta k = 2 pi n / N with n = -(N/2-1), -(N/2-3), ..., N/2-1
/// (the antiperiodic grid of the even fermion-parity sector).
inline std::vector<double> allowed_momenta(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("allowed_momenta: even N >= 2 required");
  std::vector<double> ks;
  ks.reserve(n / 2);
  for (int m = -(n / 2 - 1); m <= n / 2 - 1; m += 2) ks.push_back(2.0 * kPi * m / n);
  return ks;
}

inline std::pair<double, double> dispersion(double lambda, double b, double k) {
  const double e = 0.5 * std::sqrt(1.0 + lambda * lambda + 2.0 * lambda * std::cos(k));
  return {e - b, -e - b};
}

inline FermionSpectrum spectrum(double lambda, double b, int n) {
  FermionSpectrum s;
  s.lambda = lambda;
  s.b = b;
  s.momenta = allowed_momenta(n);
  const int m = static_cast<int>(s.momenta.size());
  s.eps_plus.resize(m);
  s.eps_minus.resize(m);
  for (int i = 0; i < m; ++i) {
    const auto [ep, em] = dispersion(lambda, b, s.momenta[i]);
    s.eps_plus[i] = ep;
    s.eps_minus[i] = em;
  }
  return s;
}

/// Gap-closing fields B = |1-lambda|/2 (k = pi) and B = |1+lambda|/2 (k = 0),
/// returned ascending.
inline std::pair<double, double> phase_boundaries(double lambda) {
  const double a = std::abs(1.0 - lambda) / 2.0;
  const double b = std::abs(1.0 + lambda) / 2.0;
  return {std::min(a, b), std::max(a, b)};
}

namespace detail_xx {

/// Ground-state energy on one momentum grid (k = 2 pi m / N, m stepping by 2
/// from m_start, N/2 values) with the fermion-parity constraint of its
/// Jordan-Wigner sector: odd m means antiperiodic cell boundary and even
/// fermion parity, even m the opposite. Strictly negative modes are filled
/// (zero modes stay empty); a parity mismatch flips the cheapest mode.
inline double sector_energy(double lambda, double b, int n, int m_start) {
  const int half = n / 2;
  const int want_parity = (std::abs(m_start) % 2 == 1) ? 0 : 1;
  double e = 0.0;
  int count = 0;
  double cheapest_add = std::numeric_limits<double>::infinity();
  double cheapest_remove = std::numeric_limits<double>::infinity();
  for (int i = 0; i < half; ++i) {
    const int m = m_start + 2 * i;
    const double k = 2.0 * kPi * m / n;
    const auto [ep, em] = dispersion(lambda, b, k);
    for (double eps : {ep, em}) {
      if (eps < 0.0) {
        e += eps;
        ++count;
        cheapest_remove = std::min(cheapest_remove, -eps);
      } else {
        cheapest_add = std::min(cheapest_add, eps);
      }
    }
    e += b;  // constant from normal ordering, one per momentum
  }
  if (count % 2 != want_parity) e += std::min(cheapest_add, cheapest_remove);
  return e;
}

}  // namespace detail_xx

/// Exact ground-state energy per site for even N with periodic boundary:
/// minimum over the two Jordan-Wigner sectors with their parity constraints.
inline double gs_energy_per_site(double lambda, double b, int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("gs_energy_per_site: even N >= 2 required");
  const double e_a = detail_xx::sector_energy(lambda, b, n, -(n / 2 - 1));
  const double e_b = detail_xx::sector_energy(lambda, b, n, -(n / 2 - 2));
  return std::min(e_a, e_b) / n;
}

/// Thermodynamic limit: (1/4pi) integral over (-pi, pi] of the filled-band
/// density, composite Simpson.
inline double gs_energy_per_site_thermo(double lambda, double b, int intervals = 1 << 16) {
  auto f = [&](double k) {
    const auto [ep, em] = dispersion(lambda, b, k);
    return std::min(ep, 0.0) + std::min(em, 0.0) - 0.5 * (ep + em);
  };
  const double h = 2.0 * kPi / intervals;
  double acc = f(-kPi) + f(kPi);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(-kPi + i * h);
  return acc * h / 3.0 / (4.0 * kPi);
}

struct CorrelationMatrix {
  Eigen::MatrixXcd matrix;  // <c_i^+ c_j>
  int n_sites = 0;
  Boundary boundary = Boundary::periodic;
};

/// Ground-state correlation matrix. The periodic path assembles the
/// appendix's Fourier modes on the antiperiodic grid (zero modes empty); the
/// open path diagonalizes the single-particle hopping matrix directly and is
/// the one to use for Fig.5-style open-chain entropy profiles.
inline CorrelationMatrix correlation_matrix(int n, double lambda, double b,
                                            Boundary boundary = Boundary::periodic) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("correlation_matrix: even N >= 2");
  CorrelationMatrix out;
  out.n_sites = n;
  out.boundary = boundary;
  if (boundary == Boundary::open) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = (i % 2 == 0 ? 1.0 : lambda) / 2.0;
    for (int i = 0; i < n; ++i) h(i, i) = -b;
    auto eig = linalg::sym_eig(std::move(h));
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < n; ++m)
      if (eig.values[m] < 0.0) c.noalias() += eig.vectors.col(m) * eig.vectors.col(m).transpose();
    out.matrix = c.cast<cplx>();
    return out;
  }

  const int cells = n / 2;
  out.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (double k : allowed_momenta(n)) {
    const cplx lam_k = 0.5 * (1.0 + lambda * std::exp(cplx(0, k)));
    Eigen::Matrix2cd hk;
    hk << -b, lam_k, std::conj(lam_k), -b;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(hk);
    Eigen::Matrix2cd nk = Eigen::Matrix2cd::Zero();
    for (int m = 0; m < 2; ++m)
      if (es.eigenvalues()[m] < 0.0)
        nk += es.eigenvectors().col(m).conjugate() * es.eigenvectors().col(m).transpose();
    for (int p = 0; p < cells; ++p)
      for (int q = 0; q < cells; ++q) {
        const cplx ph = std::exp(cplx(0, k * (p - q))) * (2.0 / n);
        out.matrix(2 * p, 2 * q) += ph * nk(0, 0);
        out.matrix(2 * p, 2 * q + 1) += ph * nk(0, 1);
        out.matrix(2 * p + 1, 2 * q) += ph * nk(1, 0);
        out.matrix(2 * p + 1, 2 * q + 1) += ph * nk(1, 1);
      }
  }
  return out;
}

/// Block entanglement entropy (bits) of the first l sites from the
/// correlation-matrix spectrum: S = -sum [nu log2 nu + (1-nu) log2(1-nu)].
inline double block_entropy_from_correlations(const CorrelationMatrix& c, int l) {
  if (l < 1 || l >= c.n_sites)
    throw std::invalid_argument("block_entropy_from_correlations: need 1 <= l < N");
  auto eig = linalg::herm_eig(c.matrix.topLeftCorner(l, l));
  double s = 0.0;
  for (int i = 0; i < l; ++i) {
    const double nu = std::clamp(eig.values[i], 0.0, 1.0);
    if (nu > 1e-14) s -= nu * std::log2(nu);
    if (1.0 - nu > 1e-14) s -= (1.0 - nu) * std::log2(1.0 - nu);
  }
  return s;
}

}  // namespace altchain::xx
