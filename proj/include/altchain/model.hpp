#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "altchain/common.hpp"

namespace altchain::model {

/// Couplings of the alternating-chain Hamiltonian
///   H = sum_i J (Sx Sx + Sy Sy + Delta Sz Sz)_{2i-1,2i}
///     + sum_i lambda (Sx Sx + Sy Sy + Delta Sz Sz)_{2i,2i+1}
///     - B sum_i Sz_i,
/// spin-1/2 operators, J fixed to 1.
struct ModelParams {
  double j = 1.0;
  double lambda = 0.0;
  double delta = 1.0;
  double b = 0.0;

  void validate() const {
    if (j != 1.0) throw std::invalid_argument("ModelParams: J is fixed to 1");
    if (!std::isfinite(lambda) || !std::isfinite(delta) || !std::isfinite(b))
      throw std::invalid_argument("ModelParams: non-finite coupling");
  }
};

struct SpinOperatorSet {
  Eigen::Matrix2cd sx, sy, sz, s_plus, s_minus, identity;
};

inline SpinOperatorSet spin_operators() {
  SpinOperatorSet o;
  o.sx << 0.0, 0.5, 0.5, 0.0;
  o.sy << 0.0, cplx(0, -0.5), cplx(0, 0.5), 0.0;
  o.sz << 0.5, 0.0, 0.0, -0.5;
  o.s_plus = o.sx + cplx(0, 1) * o.sy;
  o.s_minus = o.sx - cplx(0, 1) * o.sy;
  o.identity = Eigen::Matrix2cd::Identity();
  return o;
}

/// Kronecker product of two single-site operators; combined index is
/// s_left * 2 + s_right throughout the code base.
inline Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

struct BondHamiltonian {
  Eigen::Matrix4cd matrix;
  Parity parity;
};

/// Two-site term of the Hamiltonian. The single-site field -B Sz is shared
/// between the two gates that touch a site; `field_frac_left/right` is the
/// share this bond carries for its left/right site. Bulk bonds use 1/2 each
/// so that one odd plus one even gate reproduce -B Sz per site exactly once;
/// open-chain edge sites take their full field on the only bond they touch.
inline BondHamiltonian bond_hamiltonian(const ModelParams& p, Parity parity,
                                        double field_frac_left = 0.5,
                                        double field_frac_right = 0.5) {
  p.validate();
  const auto op = spin_operators();
  const double c = parity == Parity::odd ? p.j : p.lambda;
  Eigen::Matrix4cd h = c * (kron2(op.sx, op.sx) + kron2(op.sy, op.sy) +
                            p.delta * kron2(op.sz, op.sz));
  h -= p.b * (field_frac_left * kron2(op.sz, op.identity) +
              field_frac_right * kron2(op.identity, op.sz));
  return {h, parity};
}

struct TrotterGate {
  Eigen::Matrix4cd matrix;
  double tau = 0.0;
  Parity parity;
};

/// exp(-tau h) through the exact eigendecomposition of the Hermitian bond
/// Hamiltonian.
inline TrotterGate trotter_gate(const BondHamiltonian& h, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("trotter_gate: tau must be finite and >= 0");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h.matrix);
  const Eigen::Vector4d w = (-tau * es.eigenvalues().array()).exp();
  Eigen::Matrix4cd g = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  return {g, tau, h.parity};
}

}  // namespace altchain::model
