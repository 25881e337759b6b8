#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "altchain/common.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace altchain::linalg {

template <typename Scalar>
struct Svd {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> u;
  Eigen::VectorXd s;  // descending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vh;
};

/// Thin SVD, LAPACK divide-and-conquer with a one-shot QR fallback.
inline Svd<cplx> svd(Eigen::MatrixXcd a) {
  if (!a.allFinite()) throw NumericalBreakdown("svd: non-finite matrix entries");
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd<cplx> out;
  out.u.resize(m, k);
  out.s.resize(k);
  out.vh.resize(k, n);
  Eigen::MatrixXcd work = a;
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                                   out.s.data(), out.u.data(), m, out.vh.data(), k);
  if (info != 0) {
    work = a;
    std::vector<double> superb(std::max<lapack_int>(1, k - 1));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, work.data(), m,
                          out.s.data(), out.u.data(), m, out.vh.data(), k, superb.data());
    if (info != 0) throw NumericalBreakdown("svd: zgesdd/zgesvd failed to converge");
  }
  return out;
}

inline Svd<double> svd(Eigen::MatrixXd a) {
  if (!a.allFinite()) throw NumericalBreakdown("svd: non-finite matrix entries");
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd<double> out;
  out.u.resize(m, k);
  out.s.resize(k);
  out.vh.resize(k, n);
  Eigen::MatrixXd work = a;
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                                   out.s.data(), out.u.data(), m, out.vh.data(), k);
  if (info != 0) {
    work = a;
    std::vector<double> superb(std::max<lapack_int>(1, k - 1));
    info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, work.data(), m,
                          out.s.data(), out.u.data(), m, out.vh.data(), k, superb.data());
    if (info != 0) throw NumericalBreakdown("svd: dgesdd/dgesvd failed to converge");
  }
  return out;
}

struct HermEig {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXcd vectors;
};

inline HermEig herm_eig(Eigen::MatrixXcd a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("herm_eig: square matrix required");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  HermEig out;
  out.values.resize(n);
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, out.values.data());
  if (info != 0) throw NumericalBreakdown("herm_eig: zheevd failed");
  out.vectors = std::move(a);
  return out;
}

struct SymEig {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXd vectors;
};

inline SymEig sym_eig(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: square matrix required");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SymEig out;
  out.values.resize(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, out.values.data());
  if (info != 0) throw NumericalBreakdown("sym_eig: dsyevd failed");
  out.vectors = std::move(a);
  return out;
}

/// Eigenvalues only, real symmetric.
inline Eigen::VectorXd sym_eigvals(Eigen::MatrixXd a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  if (info != 0) throw NumericalBreakdown("sym_eigvals: dsyevd failed");
  return w;
}

struct Truncation {
  int keep = 0;
  double error = 0.0;  // sum of discarded normalized squared singular values
};

/// How many of the descending singular values to keep under a hard cap and a
/// relative floor. The floor drops weights that would blow up on inversion.
inline Truncation decide_truncation(const Eigen::VectorXd& s, int chi_max, double rel_floor) {
  if (s.size() == 0 || s[0] <= 0.0) throw NumericalBreakdown("truncation: vanishing singular spectrum");
  const double total = s.squaredNorm();
  int keep = std::min<int>(static_cast<int>(s.size()), chi_max);
  while (keep > 1 && s[keep - 1] < rel_floor * s[0]) --keep;
  Truncation t;
  t.keep = keep;
  t.error = 1.0 - s.head(keep).squaredNorm() / total;
  if (t.error < 0.0) t.error = 0.0;
  return t;
}

/// Diagonal pseudo-inverse with a relative cutoff.
inline Eigen::VectorXd pinv_diag(const Eigen::VectorXd& w, double rel_cut = 1e-14) {
  Eigen::VectorXd out(w.size());
  const double cut = rel_cut * (w.size() ? w.maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < w.size(); ++i) out[i] = w[i] > cut ? 1.0 / w[i] : 0.0;
  return out;
}

}  // namespace altchain::linalg
