#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "altchain/common.hpp"
#include "altchain/detail/two_site.hpp"
#include "altchain/linalg.hpp"
#include "altchain/model.hpp"

namespace altchain::imps {

using SiteTensor = detail::SiteTensor<cplx>;  // [physical s](left bond x right bond)
using detail::scale_cols;
using detail::scale_rows;

/// Infinite MPS with a two-site unit cell in Vidal canonical form,
///
///   ... w_even G_A w_odd G_B w_even G_A w_odd G_B ...
///
/// gamma[0] = G_A sits on odd lattice sites (left bond: even, right: odd),
/// gamma[1] = G_B on even sites. weights[0] is the odd bond (A-B inside the
/// cell), weights[1] the even bond (B-A across cells). Weight vectors are
/// descending, strictly positive, normalized to sum(w^2) = 1.
struct IMPSState {
  std::array<SiteTensor, 2> gamma;
  std::array<Eigen::VectorXd, 2> weights;
  int chi_max = 0;

  int chi(Parity bond) const {
    return static_cast<int>(weights[bond == Parity::odd ? 0 : 1].size());
  }
};

struct TransferEigenpair {
  cplx eigenvalue;
  Eigen::MatrixXcd left_vector, right_vector;  // normalized so <left, right> = 1
};

struct DensityMatrix {
  Eigen::MatrixXcd matrix;
  std::string site_labels;

  /// Hermiticity, unit trace and positivity up to numerical dust.
  void validate(double tol = 1e-8) const {
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(matrix.trace() - cplx(1.0)) > tol)
      throw std::invalid_argument("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  }
};

namespace detail_imps {

inline int site_index(Parity site) { return site == Parity::odd ? 0 : 1; }
inline int bond_index(Parity bond) { return bond == Parity::odd ? 0 : 1; }

/// Right bond of a site: odd bond for A, even bond for B.
inline const Eigen::VectorXd& right_weights(const IMPSState& s, int site) {
  return s.weights[site == 0 ? 0 : 1];
}
inline const Eigen::VectorXd& left_weights(const IMPSState& s, int site) {
  return s.weights[site == 0 ? 1 : 0];
}

/// Gamma * diag(right weights): right-canonical building block.
inline SiteTensor right_weighted(const IMPSState& s, int site) {
  SiteTensor m;
  const auto& w = right_weights(s, site);
  for (int p = 0; p < 2; ++p) m[p] = scale_cols(s.gamma[site][p], w);
  return m;
}

/// Unit-cell tensor C^{st} = G_A^s diag(w_odd) G_B^t (even bond on both ends).
inline std::array<std::array<Eigen::MatrixXcd, 2>, 2> cell_tensor(const IMPSState& s) {
  std::array<std::array<Eigen::MatrixXcd, 2>, 2> c;
  for (int a = 0; a < 2; ++a) {
    const Eigen::MatrixXcd left = scale_cols(s.gamma[0][a], s.weights[0]);
    for (int b = 0; b < 2; ++b) c[a][b].noalias() = left * s.gamma[1][b];
  }
  return c;
}

/// Dominant Hermitian fixed point of X -> sum_k A_k X A_k^+ (dir=+1) or of
/// the adjoint map (dir=-1), by power iteration from the identity.
inline std::pair<Eigen::MatrixXcd, double> dominant_fixed_point(
    const std::array<Eigen::MatrixXcd, 4>& a, int dim, int dir, int max_iter = 20000,
    double tol = 1e-13) {
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Identity(dim, dim);
  x /= x.norm();
  double eta = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& m : a) {
      if (dir > 0)
        y.noalias() += m * x * m.adjoint();
      else
        y.noalias() += m.adjoint() * x * m;
    }
    y = 0.5 * (y + y.adjoint()).eval();  // fixed point is Hermitian
    const double nrm = y.norm();
    if (!(nrm > 0.0)) throw NumericalBreakdown("transfer fixed point: map annihilated iterate");
    y /= nrm;
    const double diff = (y - x).cwiseAbs().maxCoeff();
    x = std::move(y);
    eta = nrm;
    if (diff < tol && it > 2) break;
  }
  return {x, eta};
}

struct GaugeFactors {
  Eigen::MatrixXcd half;  // v = half * half^+
  Eigen::MatrixXcd inv;   // pseudo-inverse of half
};

inline GaugeFactors split_psd(const Eigen::MatrixXcd& v, double rel_cut = 1e-14) {
  auto eig = linalg::herm_eig(v);
  const double top = eig.values.maxCoeff();
  if (!(top > 0.0)) throw NumericalBreakdown("canonicalize: non-positive fixed point");
  int first = 0;
  while (first < eig.values.size() && eig.values[first] < rel_cut * top) ++first;
  const int r = static_cast<int>(eig.values.size()) - first;
  GaugeFactors g;
  g.half.resize(v.rows(), r);
  g.inv.resize(r, v.rows());
  for (int i = 0; i < r; ++i) {
    const double d = std::sqrt(eig.values[first + i]);
    g.half.col(i) = eig.vectors.col(first + i) * d;
    g.inv.row(i) = eig.vectors.col(first + i).adjoint() / d;
  }
  return g;
}

}  // namespace detail_imps

/// Max deviation from the Vidal canonical conditions: left-contracted
/// (weights * gamma) and right-contracted (gamma * weights) identities on
/// both sites, plus weight normalization.
inline double canonical_residual(const IMPSState& s) {
  using namespace detail_imps;
  double worst = 0.0;
  for (int site = 0; site < 2; ++site) {
    const auto& wl = left_weights(s, site);
    const auto& wr = right_weights(s, site);
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(wr.size(), wr.size());
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(wl.size(), wl.size());
    for (int p = 0; p < 2; ++p) {
      const Eigen::MatrixXcd a = scale_rows(wl, s.gamma[site][p]);
      const Eigen::MatrixXcd b = scale_cols(s.gamma[site][p], wr);
      l.noalias() += a.adjoint() * a;
      r.noalias() += b * b.adjoint();
    }
    l -= Eigen::MatrixXcd::Identity(l.rows(), l.cols());
    r -= Eigen::MatrixXcd::Identity(r.rows(), r.cols());
    worst = std::max({worst, l.cwiseAbs().maxCoeff(), r.cwiseAbs().maxCoeff()});
  }
  for (const auto& w : s.weights) worst = std::max(worst, std::abs(w.squaredNorm() - 1.0));
  return worst;
}

/// Restore full canonical form: gauge-fix the blocked unit cell through the
/// dominant transfer fixed points, then re-split the odd bond with an exact
/// SVD. Optionally truncate to chi_max; chi_max <= 0 keeps the current size.
inline IMPSState canonicalize(const IMPSState& in, int chi_max = 0, double weight_floor = 1e-12) {
  using namespace detail_imps;
  const int cap = chi_max > 0 ? chi_max : std::max(in.chi(Parity::odd), in.chi(Parity::even));
  const auto c = cell_tensor(in);
  const int dim = static_cast<int>(in.weights[1].size());

  std::array<Eigen::MatrixXcd, 4> right_w, left_w;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      right_w[2 * a + b] = scale_cols(c[a][b], in.weights[1]);
      left_w[2 * a + b] = scale_rows(in.weights[1], c[a][b]);
    }
  auto [vr, eta_r] = dominant_fixed_point(right_w, dim, +1);
  auto [vl, eta_l] = dominant_fixed_point(left_w, dim, -1);
  (void)eta_l;

  const auto x = split_psd(vr);
  const auto y = split_psd(vl);
  Eigen::MatrixXcd t = y.half.adjoint() * scale_rows(in.weights[1], x.half);
  auto dec = linalg::svd(std::move(t));
  const auto tr = linalg::decide_truncation(dec.s, cap, weight_floor);
  const int ke = tr.keep;
  Eigen::VectorXd w_even = dec.s.head(ke) / dec.s.head(ke).norm();

  const Eigen::MatrixXcd gl = dec.vh.topRows(ke) * x.inv;           // k x dim
  const Eigen::MatrixXcd gr = y.inv.adjoint() * dec.u.leftCols(ke);  // dim x k
  std::array<std::array<Eigen::MatrixXcd, 2>, 2> cn;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) cn[a][b] = (gl * c[a][b] * gr) / std::sqrt(eta_r);

  // snap the overall scale so the right fixed point is exactly the identity
  Eigen::MatrixXcd chk = Eigen::MatrixXcd::Zero(ke, ke);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Eigen::MatrixXcd m = scale_cols(cn[a][b], w_even);
      chk.noalias() += m * m.adjoint();
    }
  const double scale = std::sqrt(chk.trace().real() / ke);
  for (auto& row : cn)
    for (auto& m : row) m /= scale;

  // exact Schmidt split of the odd bond inside the cell
  Eigen::MatrixXcd m2(2 * ke, 2 * ke);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      m2.block(a * ke, b * ke, ke, ke) = scale_rows(w_even, scale_cols(cn[a][b], w_even));
  auto dec2 = linalg::svd(std::move(m2));
  const auto tr2 = linalg::decide_truncation(dec2.s, cap, weight_floor);
  const int ko = tr2.keep;

  IMPSState out;
  out.chi_max = in.chi_max > 0 ? in.chi_max : cap;
  out.weights[0] = dec2.s.head(ko) / dec2.s.head(ko).norm();
  out.weights[1] = std::move(w_even);
  const Eigen::VectorXd inv_e = linalg::pinv_diag(out.weights[1]);
  for (int p = 0; p < 2; ++p) {
    out.gamma[0][p] = scale_rows(inv_e, Eigen::MatrixXcd(dec2.u.block(p * ke, 0, ke, ko)));
    out.gamma[1][p] = scale_cols(Eigen::MatrixXcd(dec2.vh.block(0, p * ke, ko, ke)), inv_e);
  }
  return out;
}

/// Random full-rank state, canonicalized; deterministic in the seed.
inline IMPSState init_random(int chi, std::uint64_t seed) {
  if (chi < 1) throw std::invalid_argument("init_random: chi must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  IMPSState s;
  s.chi_max = chi;
  for (int site = 0; site < 2; ++site)
    for (int p = 0; p < 2; ++p) {
      s.gamma[site][p].resize(chi, chi);
      for (int j = 0; j < chi; ++j)
        for (int i = 0; i < chi; ++i) s.gamma[site][p](i, j) = cplx(gauss(rng), gauss(rng));
    }
  for (int b = 0; b < 2; ++b) {
    Eigen::VectorXd w(chi);
    for (int i = 0; i < chi; ++i) w[i] = std::abs(gauss(rng)) + 1e-3;
    std::sort(w.data(), w.data() + chi, std::greater<double>());
    s.weights[b] = w / w.norm();
  }
  return canonicalize(s, chi);
}

struct ApplyResult {
  IMPSState state;
  double truncation_error = 0.0;
};

/// Contract one Trotter gate into the bond selected by its parity, SVD and
/// truncate to chi_max. Returns the updated state and the discarded weight.
inline ApplyResult apply_gate(IMPSState state, const model::TrotterGate& gate, int chi_max) {
  const int li = gate.parity == Parity::odd ? 0 : 1;  // left site of the bond
  const int ri = 1 - li;
  const int ib = gate.parity == Parity::odd ? 0 : 1;  // inner bond
  const int ob = 1 - ib;
  auto up = detail::apply_bond_gate<cplx>(state.gamma[li], state.gamma[ri], state.weights[ob],
                                          state.weights[ib], state.weights[ob], gate.matrix,
                                          chi_max);
  state.gamma[li] = std::move(up.left);
  state.gamma[ri] = std::move(up.right);
  state.weights[ib] = std::move(up.weights);
  return {std::move(state), up.truncation_error};
}

/// Entanglement entropy (bits) across the chosen bond, straight from the
/// Schmidt weights.
inline double bond_entropy(const IMPSState& s, Parity bond) {
  const auto& w = s.weights[detail_imps::bond_index(bond)];
  double out = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double p = w[i] * w[i];
    if (p > 1e-30) out -= p * std::log2(p);
  }
  return out;
}

/// Reduced density matrix of 1..3 contiguous sites, the first one of the
/// given parity. Environments are trivial in canonical form.
inline DensityMatrix rdm(const IMPSState& s, Parity first_site, int n_sites) {
  using namespace detail_imps;
  if (n_sites < 1 || n_sites > 3) throw std::invalid_argument("rdm: 1..3 contiguous sites");
  const int first = site_index(first_site);
  const int dim = 1 << n_sites;
  const auto& wl = left_weights(s, first);

  std::vector<Eigen::MatrixXcd> m(dim);
  for (int cfg = 0; cfg < dim; ++cfg) {
    Eigen::MatrixXcd acc = wl.cast<cplx>().asDiagonal();
    for (int l = 0; l < n_sites; ++l) {
      const int site = (first + l) % 2;
      const int p = (cfg >> (n_sites - 1 - l)) & 1;
      acc = acc * scale_cols(s.gamma[site][p], right_weights(s, site));
    }
    m[cfg] = std::move(acc);
  }
  DensityMatrix rho;
  rho.matrix.resize(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) rho.matrix(a, b) = (m[b].adjoint() * m[a]).trace();
  rho.matrix = 0.5 * (rho.matrix + rho.matrix.adjoint().eval());
  rho.site_labels = std::string(to_string(first_site)) +
                    (n_sites == 1 ? " site" : (n_sites == 2 ? " pair" : " triple"));
  return rho;
}

inline DensityMatrix rdm_site(const IMPSState& s, Parity site) { return rdm(s, site, 1); }

/// Two-site density matrix of the pair joined by the given bond: (A,B) for
/// the odd bond, (B,A') for the even bond.
inline DensityMatrix rdm_pair(const IMPSState& s, Parity bond) {
  return rdm(s, bond == Parity::odd ? Parity::odd : Parity::even, 2);
}

/// <left_1 string_2 ... string_r right_{r+1}> with the first operator on
/// site 1 of the unit cell (odd), evaluated by transfer contraction with
/// operator insertions. r must be odd so the last site is even.
inline cplx string_expectation(const IMPSState& s, const Eigen::Matrix2cd& left_op,
                               const Eigen::Matrix2cd& string_op,
                               const Eigen::Matrix2cd& right_op, int r) {
  using namespace detail_imps;
  if (r < 1 || r % 2 == 0)
    throw std::invalid_argument("string_expectation: r must be odd and >= 1");
  const Eigen::VectorXd p0 = s.weights[1].array().square();
  Eigen::MatrixXcd e = p0.cast<cplx>().asDiagonal();
  for (int l = 1; l <= r + 1; ++l) {
    const int site = (l - 1) % 2;
    const auto m = right_weighted(s, site);
    const Eigen::Matrix2cd& op = l == 1 ? left_op : (l == r + 1 ? right_op : string_op);
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(m[0].cols(), m[0].cols());
    for (int sk = 0; sk < 2; ++sk)
      for (int sb = 0; sb < 2; ++sb) {
        const cplx o = op(sb, sk);
        if (o != cplx(0)) next.noalias() += o * (m[sb].adjoint() * e * m[sk]);
      }
    e = std::move(next);
  }
  return e.trace();
}

/// Norm^2 of one unit cell (1 for a canonical normalized state).
inline double norm_per_cell(const IMPSState& s) {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  return string_expectation(s, id, id, id, 1).real();
}

namespace detail_imps {

inline std::array<Eigen::MatrixXcd, 4> cell_right_weighted(const IMPSState& s) {
  auto c = cell_tensor(s);
  std::array<Eigen::MatrixXcd, 4> w;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) w[2 * a + b] = scale_cols(c[a][b], s.weights[1]);
  return w;
}

}  // namespace detail_imps

/// Leading eigenpair of the unit-cell mixed transfer map
///   X -> sum_{st} W1^{st} X (W2^{st})^+ ,
/// by power iteration (tolerance 1e-12). A map that annihilates the iterate
/// is reported as eigenvalue 0; failure to settle within the cap (degenerate
/// leading eigenvalues) raises NonConvergence.
inline TransferEigenpair mixed_transfer_leading(const IMPSState& s1, const IMPSState& s2,
                                                int max_iter = 50000, double tol = 1e-12) {
  using namespace detail_imps;
  const auto w1 = cell_right_weighted(s1);
  const auto w2 = cell_right_weighted(s2);
  const int r = static_cast<int>(w1[0].rows());
  const int c = static_cast<int>(w2[0].rows());

  auto apply = [&](const Eigen::MatrixXcd& x, bool adjoint) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
    for (int k = 0; k < 4; ++k) {
      if (adjoint)
        y.noalias() += w1[k].adjoint() * x * w2[k];
      else
        y.noalias() += w1[k] * x * w2[k].adjoint();
    }
    return y;
  };

  auto power = [&](bool adjoint) -> std::pair<cplx, Eigen::MatrixXcd> {
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(r, c);
    for (int i = 0; i < std::min(r, c); ++i) x(i, i) = 1.0;
    x /= x.norm();
    cplx mu = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      Eigen::MatrixXcd y = apply(x, adjoint);
      const double nrm = y.norm();
      if (nrm < 1e-150) return {cplx(0.0), Eigen::MatrixXcd::Zero(r, c)};
      y /= nrm;
      const cplx overlap = (x.adjoint() * y).trace();
      const double ao = std::abs(overlap);
      const cplx phase = ao > 1e-300 ? overlap / ao : cplx(1.0);
      const cplx mu_new = nrm * phase;
      const double resid = (y - phase * x).norm();
      x = std::move(y);
      const bool settled = it > 2 && resid < tol &&
                           std::abs(mu_new - mu) < tol * std::max(1.0, std::abs(mu_new));
      mu = mu_new;
      if (settled) return {mu, x};
    }
    throw NonConvergence(
        "mixed_transfer_leading: power iteration did not settle "
        "(degenerate leading eigenvalues?)");
  };

  auto [mu, right] = power(false);
  TransferEigenpair out;
  out.eigenvalue = mu;
  out.right_vector = right;
  if (mu == cplx(0.0)) {
    out.left_vector = Eigen::MatrixXcd::Zero(r, c);
    return out;
  }
  auto [mu_l, left] = power(true);
  (void)mu_l;
  const cplx ip = (left.adjoint() * right).trace();
  if (std::abs(ip) > 1e-300) left /= std::conj(ip);
  out.left_vector = left;
  return out;
}

/// Dense cross-check path for small bond dimensions: explicit
/// (chi1*chi2) x (chi1*chi2) transfer matrix and a full eigensolve.
inline cplx mixed_transfer_leading_dense(const IMPSState& s1, const IMPSState& s2) {
  using namespace detail_imps;
  const auto w1 = cell_right_weighted(s1);
  const auto w2 = cell_right_weighted(s2);
  const int r1 = static_cast<int>(w1[0].rows());
  const int r2 = static_cast<int>(w2[0].rows());
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(r1 * r2, r1 * r2);
  for (int k = 0; k < 4; ++k)
    for (int a1 = 0; a1 < r1; ++a1)
      for (int a2 = 0; a2 < r2; ++a2)
        for (int b1 = 0; b1 < r1; ++b1)
          for (int b2 = 0; b2 < r2; ++b2)
            t(a1 + r1 * a2, b1 + r1 * b2) += w1[k](a1, b1) * std::conj(w2[k](a2, b2));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(t, false);
  cplx best = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i]) > std::abs(best)) best = es.eigenvalues()[i];
  return best;
}

}  // namespace altchain::imps
