#pragma once

#include <Eigen/Dense>
#include <array>

#include "altchain/common.hpp"
#include "altchain/linalg.hpp"

namespace altchain::detail {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using SiteTensor = std::array<Mat<Scalar>, 2>;  // [physical index](left bond x right bond)

template <typename Scalar>
inline Mat<Scalar> scale_rows(const Eigen::VectorXd& w, const Mat<Scalar>& m) {
  return w.template cast<Scalar>().asDiagonal() * m;
}

template <typename Scalar>
inline Mat<Scalar> scale_cols(const Mat<Scalar>& m, const Eigen::VectorXd& w) {
  return m * w.template cast<Scalar>().asDiagonal();
}

template <typename Scalar>
struct BondUpdate {
  SiteTensor<Scalar> left, right;
  Eigen::VectorXd weights;  // new inner bond, normalized to sum(w^2) = 1
  double truncation_error = 0.0;
};

/// One two-site gate application in Vidal form, shared by the infinite and
/// the finite engine: contract outer weights, inner weight and the gate into
/// the pair wavefunction, SVD, truncate, strip the outer weights back off.
///
/// gate is 4x4 with combined index s_left * 2 + s_right.
template <typename Scalar>
inline BondUpdate<Scalar> apply_bond_gate(const SiteTensor<Scalar>& gl,
                                          const SiteTensor<Scalar>& gr,
                                          const Eigen::VectorXd& outer_left,
                                          const Eigen::VectorXd& inner,
                                          const Eigen::VectorXd& outer_right,
                                          const Mat<Scalar>& gate, int chi_max,
                                          double weight_floor = 1e-12) {
  const Eigen::Index rl = gl[0].rows();
  const Eigen::Index rr = gr[0].cols();
  std::array<Mat<Scalar>, 2> p, q;
  for (int s = 0; s < 2; ++s) {
    p[s] = scale_cols<Scalar>(scale_rows<Scalar>(outer_left, gl[s]), inner);
    q[s] = scale_cols<Scalar>(gr[s], outer_right);
  }
  std::array<std::array<Mat<Scalar>, 2>, 2> theta;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) theta[s][t].noalias() = p[s] * q[t];

  Mat<Scalar> m(2 * rl, 2 * rr);
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      Mat<Scalar> blk = Mat<Scalar>::Zero(rl, rr);
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
          const Scalar g = gate(2 * u + v, 2 * s + t);
          if (g != Scalar(0)) blk.noalias() += g * theta[s][t];
        }
      m.block(u * rl, v * rr, rl, rr) = blk;
    }

  auto dec = linalg::svd(std::move(m));
  const auto trunc = linalg::decide_truncation(dec.s, chi_max, weight_floor);
  const int k = trunc.keep;
  const double nrm = dec.s.head(k).norm();

  BondUpdate<Scalar> out;
  out.truncation_error = trunc.error;
  out.weights = dec.s.head(k) / nrm;
  const Eigen::VectorXd inv_l = linalg::pinv_diag(outer_left);
  const Eigen::VectorXd inv_r = linalg::pinv_diag(outer_right);
  for (int s = 0; s < 2; ++s) {
    out.left[s] = scale_rows<Scalar>(inv_l, Mat<Scalar>(dec.u.block(s * rl, 0, rl, k)));
    out.right[s] = scale_cols<Scalar>(Mat<Scalar>(dec.vh.block(0, s * rr, k, rr)), inv_r);
  }
  return out;
}

}  // namespace altchain::detail
