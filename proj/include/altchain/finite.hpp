#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "altchain/common.hpp"
#include "altchain/detail/two_site.hpp"
#include "altchain/itebd.hpp"
#include "altchain/linalg.hpp"
#include "altchain/model.hpp"

// Open-chain ground states by imaginary-time TEBD with the same two-site
// gate machinery as the infinite engine. Ground states of the (real) bond
// Hamiltonians are taken real, which roughly quarters the SVD cost at the
// N = 96, chi = 128 scale of the entropy-scaling runs.

namespace altchain::finite {

using SiteTensor = detail::SiteTensor<double>;

/// Open-boundary MPS of N sites in Vidal form: gamma[i] with Schmidt weights
/// on every interior bond; bond i joins sites i and i+1 (0-based).
struct FiniteMPS {
  std::vector<SiteTensor> gamma;
  std::vector<Eigen::VectorXd> weights;  // size N-1
  int n_sites = 0;

  const Eigen::VectorXd& bond(int i) const { return weights[i]; }
};

namespace detail_fin {

inline const Eigen::VectorXd& edge() {
  static const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  return one;
}

inline const Eigen::VectorXd& left_w(const FiniteMPS& m, int site) {
  return site == 0 ? edge() : m.weights[site - 1];
}
inline const Eigen::VectorXd& right_w(const FiniteMPS& m, int site) {
  return site == m.n_sites - 1 ? edge() : m.weights[site];
}

/// Field shares carried by bond b for its two sites: edge sites put their
/// whole -B Sz on the only bond they touch.
inline std::pair<double, double> field_fracs(int b, int n) {
  return {b == 0 ? 1.0 : 0.5, b == n - 2 ? 1.0 : 0.5};
}

inline Eigen::Matrix4d real_gate(const model::ModelParams& p, int b, int n, double tau) {
  const Parity parity = b % 2 == 0 ? Parity::odd : Parity::even;
  const auto [fl, fr] = field_fracs(b, n);
  const auto h = model::bond_hamiltonian(p, parity, fl, fr);
  const auto g = model::trotter_gate(h, tau);
  if (g.matrix.imag().cwiseAbs().maxCoeff() > 1e-14)
    throw NumericalBreakdown("finite: bond gate has an imaginary part");
  return g.matrix.real();
}

}  // namespace detail_fin

/// Exact re-canonicalization: QR sweep to the left-canonical form, then an
/// SVD sweep back extracting the Schmidt weights of every bond. Normalizes
/// the state.
inline void canonicalize(FiniteMPS& m, int chi_max = 0, double weight_floor = 1e-14) {
  using detail::scale_cols;
  const int n = m.n_sites;
  // left-to-right QR over right-weighted tensors
  std::vector<SiteTensor> a(n);
  Eigen::MatrixXd carry = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 0; i < n; ++i) {
    SiteTensor t;
    for (int s = 0; s < 2; ++s) {
      Eigen::MatrixXd b = m.gamma[i][s];
      if (i < n - 1) b = scale_cols<double>(b, m.weights[i]);
      t[s] = carry * b;
    }
    const Eigen::Index rl = t[0].rows(), rc = t[0].cols();
    Eigen::MatrixXd stacked(2 * rl, rc);
    stacked << t[0], t[1];
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
    const Eigen::Index k = std::min<Eigen::Index>(2 * rl, rc);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * rl, k);
    carry = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    a[i][0] = q.topRows(rl);
    a[i][1] = q.bottomRows(rl);
  }
  // right-to-left SVD sweep, extracting weights
  Eigen::MatrixXd rcarry = carry;  // 1x1 norm
  for (int i = n - 1; i >= 0; --i) {
    const Eigen::Index rl = a[i][0].rows();
    Eigen::MatrixXd t0 = a[i][0] * rcarry;
    Eigen::MatrixXd t1 = a[i][1] * rcarry;
    const Eigen::Index rc = t0.cols();
    Eigen::MatrixXd grouped(rl, 2 * rc);
    grouped << t0, t1;
    auto dec = linalg::svd(std::move(grouped));
    int keep = static_cast<int>(dec.s.size());
    if (i > 0) {
      const int cap = chi_max > 0 ? chi_max : keep;
      keep = linalg::decide_truncation(dec.s, cap, weight_floor).keep;
    } else {
      keep = 1;  // left edge: single Schmidt value, the state norm
    }
    const double nrm = dec.s.head(keep).norm();
    const Eigen::VectorXd w = dec.s.head(keep) / nrm;
    const Eigen::VectorXd inv_r =
        linalg::pinv_diag(i == n - 1 ? detail_fin::edge() : m.weights[i]);
    for (int s = 0; s < 2; ++s) {
      Eigen::MatrixXd bnew = dec.vh.block(0, s * rc, keep, rc);
      m.gamma[i][s] = scale_cols<double>(bnew, inv_r);
    }
    if (i > 0) {
      m.weights[i - 1] = w;
      rcarry = dec.u.leftCols(keep) * w.asDiagonal() * nrm;
      rcarry /= nrm;  // drop the global norm once, at the end
    }
  }
}

/// Largest deviation from the canonical conditions over all sites.
inline double canonical_residual(const FiniteMPS& m) {
  using detail::scale_cols;
  using detail::scale_rows;
  double worst = 0.0;
  for (int i = 0; i < m.n_sites; ++i) {
    const auto& wl = detail_fin::left_w(m, i);
    const auto& wr = detail_fin::right_w(m, i);
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(wr.size(), wr.size());
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(wl.size(), wl.size());
    for (int s = 0; s < 2; ++s) {
      const Eigen::MatrixXd a = scale_rows<double>(wl, m.gamma[i][s]);
      const Eigen::MatrixXd b = scale_cols<double>(m.gamma[i][s], wr);
      l.noalias() += a.transpose() * a;
      r.noalias() += b * b.transpose();
    }
    l -= Eigen::MatrixXd::Identity(l.rows(), l.cols());
    r -= Eigen::MatrixXd::Identity(r.rows(), r.cols());
    worst = std::max({worst, l.cwiseAbs().maxCoeff(), r.cwiseAbs().maxCoeff()});
  }
  return worst;
}

/// Random product state (chi = 1 everywhere), deterministic in the seed.
inline FiniteMPS random_product_state(int n, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("finite: even N >= 2 required");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FiniteMPS m;
  m.n_sites = n;
  m.gamma.resize(n);
  m.weights.assign(n - 1, Eigen::VectorXd::Ones(1));
  for (int i = 0; i < n; ++i) {
    Eigen::Vector2d v{gauss(rng), gauss(rng)};
    v.normalize();
    for (int s = 0; s < 2; ++s) {
      m.gamma[i][s].resize(1, 1);
      m.gamma[i][s](0, 0) = v[s];
    }
  }
  return m;
}

/// Total energy <H> from per-bond density matrices (canonical form assumed;
/// callers re-canonicalize before measuring).
inline double energy(const FiniteMPS& m, const model::ModelParams& p) {
  using detail::scale_cols;
  using detail::scale_rows;
  const int n = m.n_sites;
  double e = 0.0;
  for (int b = 0; b + 1 < n; ++b) {
    const auto [fl, fr] = detail_fin::field_fracs(b, n);
    const Parity parity = b % 2 == 0 ? Parity::odd : Parity::even;
    const Eigen::Matrix4d h =
        model::bond_hamiltonian(p, parity, fl, fr).matrix.real();
    std::array<Eigen::MatrixXd, 4> mm;
    for (int s = 0; s < 2; ++s) {
      const Eigen::MatrixXd left =
          scale_cols<double>(scale_rows<double>(detail_fin::left_w(m, b), m.gamma[b][s]),
                             m.weights[b]);
      for (int t = 0; t < 2; ++t)
        mm[2 * s + t] = left * scale_cols<double>(m.gamma[b + 1][t], detail_fin::right_w(m, b + 1));
    }
    Eigen::Matrix4d rho;
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y) rho(x, y) = (mm[y].array() * mm[x].array()).sum();
    e += (rho * h).trace();
  }
  return e;
}

struct FiniteResult {
  FiniteMPS state;
  double energy = 0.0;  // total, not per site
  long iterations = 0;
  double max_truncation_error = 0.0;
  bool converged = false;
  std::vector<itebd::TracePoint> trace;
};

/// Open-chain ground-state search with the shared tau schedule; odd bonds
/// then even bonds per sweep.
inline FiniteResult finite_ground_state(const model::ModelParams& p, int n, int chi,
                                        const itebd::Schedule& schedule, std::uint64_t seed = 1) {
  using namespace detail_fin;
  p.validate();
  schedule.validate();
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("finite_ground_state: even N >= 4");
  if (chi < 1) throw std::invalid_argument("finite_ground_state: chi >= 1");

  FiniteResult res;
  res.state = random_product_state(n, seed);
  constexpr int kCheck = 10;
  long sweeps = 0;
  bool floor_converged = false;

  for (double tau = schedule.tau_initial; tau > schedule.tau_floor * 0.999999;
       tau /= schedule.tau_shrink) {
    std::vector<Eigen::Matrix4d> gates(n - 1);
    for (int b = 0; b + 1 < n; ++b) gates[b] = real_gate(p, b, n, tau);
    double e_prev = std::numeric_limits<double>::quiet_NaN();
    bool stage_converged = false;

    for (int sweep = 1; sweep <= schedule.sweeps_per_tau; ++sweep) {
      for (int pass = 0; pass < 2; ++pass)
        for (int b = pass; b + 1 < n; b += 2) {
          auto up = detail::apply_bond_gate<double>(
              res.state.gamma[b], res.state.gamma[b + 1], left_w(res.state, b),
              res.state.weights[b], right_w(res.state, b + 1), gates[b], chi);
          res.state.gamma[b] = std::move(up.left);
          res.state.gamma[b + 1] = std::move(up.right);
          res.state.weights[b] = std::move(up.weights);
          res.max_truncation_error = std::max(res.max_truncation_error, up.truncation_error);
        }
      ++sweeps;
      if (sweep % kCheck == 0 || sweep == schedule.sweeps_per_tau) {
        canonicalize(res.state, chi);
        const double e = energy(res.state, p) / n;
        res.trace.push_back({tau, sweeps, e, res.max_truncation_error});
        if (!std::isnan(e_prev)) {
          const double de = std::abs(e - e_prev) / kCheck;
          if (de < std::max(schedule.energy_tol * tau, 5e-15 * std::max(1.0, std::abs(e)))) {
            stage_converged = true;
            break;
          }
        }
        e_prev = e;
      }
    }
    if (tau / schedule.tau_shrink <= schedule.tau_floor * 0.999999)
      floor_converged = stage_converged;
  }
  canonicalize(res.state, chi);
  res.energy = energy(res.state, p);
  res.iterations = sweeps;
  res.converged = floor_converged;
  return res;
}

struct EntropyProfile {
  int n_sites = 0;
  Eigen::VectorXd entropies;  // S_L for L = 1..N-1, bits
  model::ModelParams params;
};

/// Block entropy at every cut, straight from the Schmidt weights.
inline EntropyProfile entropy_profile(const FiniteMPS& m, const model::ModelParams& p = {}) {
  EntropyProfile out;
  out.n_sites = m.n_sites;
  out.params = p;
  out.entropies.resize(m.n_sites - 1);
  for (int l = 1; l < m.n_sites; ++l) {
    double s = 0.0;
    const auto& w = m.weights[l - 1];
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double q = w[i] * w[i];
      if (q > 1e-30) s -= q * std::log2(q);
    }
    out.entropies[l - 1] = s;
  }
  return out;
}

enum class FitParity { even, odd, all };

struct CentralChargeFit {
  double c = 0.0;
  double a_const = 0.0;
  double residual = 0.0;  // RMS of fit residuals
  FitParity parity_used = FitParity::even;
  std::pair<int, int> l_window{0, 0};
};

/// Least squares of S_L against log2[(N/pi) sin(pi L / N)] over the selected
/// window and L-parity; c = 6 * slope.
inline CentralChargeFit fit_central_charge(const EntropyProfile& prof, FitParity parity,
                                           std::pair<int, int> l_window) {
  const int n = prof.n_sites;
  std::vector<double> xs, ys;
  for (int l = std::max(1, l_window.first); l <= std::min(n - 1, l_window.second); ++l) {
    if (parity == FitParity::even && l % 2 != 0) continue;
    if (parity == FitParity::odd && l % 2 != 1) continue;
    xs.push_back(std::log2(n / kPi * std::sin(kPi * l / n)));
    ys.push_back(prof.entropies[l - 1]);
  }
  if (xs.size() < 4)
    throw std::invalid_argument("fit_central_charge: need at least 4 points after filtering");
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double inter = (sy - slope * sx) / m;
  double rss = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double d = ys[i] - slope * xs[i] - inter;
    rss += d * d;
  }
  CentralChargeFit fit;
  fit.c = 6.0 * slope;
  fit.a_const = inter;
  fit.residual = std::sqrt(rss / m);
  fit.parity_used = parity;
  fit.l_window = l_window;
  return fit;
}

/// Default fit window [N/8, 7N/8].
inline std::pair<int, int> default_window(int n) { return {n / 8, 7 * n / 8}; }

}  // namespace altchain::finite
