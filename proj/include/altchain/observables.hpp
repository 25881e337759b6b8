#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "altchain/common.hpp"
#include "altchain/imps.hpp"
#include "altchain/linalg.hpp"
#include "altchain/model.hpp"

namespace altchain::obs {

/// Ground-state fidelity per site d = limit of |<psi1|psi2>|^(1/N): the
/// leading mixed-transfer eigenvalue normalized by the states' own leading
/// eigenvalues, per-site exponent (square root of the per-cell ratio).
/// Clamped to [0, 1]; values above 1 + 1e-10 indicate a bug upstream.
inline double fidelity_per_site(const imps::IMPSState& s1, const imps::IMPSState& s2) {
  const double mu12 = std::abs(imps::mixed_transfer_leading(s1, s2).eigenvalue);
  const double mu11 = std::abs(imps::mixed_transfer_leading(s1, s1).eigenvalue);
  const double mu22 = std::abs(imps::mixed_transfer_leading(s2, s2).eigenvalue);
  const double per_cell = mu12 / std::sqrt(mu11 * mu22);
  const double d = std::sqrt(per_cell);
  return std::clamp(d, 0.0, 1.0);
}

/// Wootters concurrence of a two-qubit density matrix: descending square
/// roots b_i of the eigenvalues of rho (sy x sy) rho* (sy x sy), then
/// max(b1 - b2 - b3 - b4, 0). Conjugation in the computational basis.
inline double concurrence(const imps::DensityMatrix& rho) {
  if (rho.matrix.rows() != 4 || rho.matrix.cols() != 4)
    throw std::invalid_argument("concurrence: 4x4 density matrix required");
  rho.validate(1e-8);
  const auto op = model::spin_operators();
  const Eigen::Matrix4cd yy = model::kron2(2.0 * op.sy, 2.0 * op.sy);
  const Eigen::Matrix4cd r = rho.matrix * yy * rho.matrix.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r, false);
  Eigen::Vector4d beta;
  for (int i = 0; i < 4; ++i) beta[i] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
  std::sort(beta.data(), beta.data() + 4, std::greater<double>());
  return std::max(0.0, beta[0] - beta[1] - beta[2] - beta[3]);
}

/// von Neumann entropy in bits; eigenvalues below 1e-14 are dropped.
inline double entropy(const imps::DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()[i];
    if (p > 1e-14) s -= p * std::log2(p);
  }
  return s;
}

/// l1 norm of coherence in the computational basis: sum of |rho_ij|, i != j.
inline double l1_coherence(const imps::DensityMatrix& rho) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < rho.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.matrix.cols(); ++j)
      if (i != j) s += std::abs(rho.matrix(i, j));
  return s;
}

/// Raw off-diagonal sum without absolute values, kept for comparison; can be
/// complex and is not a norm.
inline cplx l1_coherence_raw(const imps::DensityMatrix& rho) {
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < rho.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.matrix.cols(); ++j)
      if (i != j) s += rho.matrix(i, j);
  return s;
}

/// Wigner-Yanase skew information I(rho, K) = -Tr([rho, K]^2) / 4.
inline double wysi(const imps::DensityMatrix& rho, const Eigen::MatrixXcd& k) {
  if (k.rows() != rho.matrix.rows() || k.cols() != rho.matrix.cols())
    throw std::invalid_argument("wysi: dimension mismatch between rho and K");
  if ((k - k.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("wysi: K must be Hermitian");
  const Eigen::MatrixXcd c = rho.matrix * k - k * rho.matrix;
  return std::max(0.0, -0.25 * (c * c).trace().real());
}

/// String order parameter O_x^even(r) = -4 <Sx_1 prod exp(i pi Sx_l) Sx_j>,
/// j = 1 + r, r odd; exp(i pi Sx) = i sigma_x for spin 1/2.
inline double string_order(const imps::IMPSState& s, int r) {
  const auto op = model::spin_operators();
  const Eigen::Matrix2cd string = cplx(0, 2) * op.sx;
  const cplx v = -4.0 * imps::string_expectation(s, op.sx, string, op.sx, r);
  if (std::abs(v.imag()) > 1e-8)
    throw NumericalBreakdown("string_order: imaginary part above 1e-8");
  return v.real();
}

}  // namespace altchain::obs
