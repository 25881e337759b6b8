#pragma once

#include <Eigen/Dense>
#include <unordered_map>
#include <utility>
#include <vector>

#include "altchain/common.hpp"
#include "altchain/linalg.hpp"
#include "altchain/model.hpp"

// Dense exact diagonalization of the alternating chain for N <= 14, within
// total-Sz blocks. Basis convention: bit i of the index is site i+1 (1-based
// chain site), bit value 1 = spin up.

namespace altchain::ed {

enum class Boundary { open, periodic };

struct EDResult {
  double energy = 0.0;
  Eigen::VectorXcd ground_vector;  // full 2^N space, normalized
  int degeneracy = 1;
  int n_sites = 0;
  Boundary boundary = Boundary::open;
};

namespace detail_ed {

struct Bond {
  int i, j;
  double coupling;
};

inline std::vector<Bond> bonds(int n, double lambda, Boundary boundary) {
  std::vector<Bond> out;
  for (int i = 0; i + 1 < n; i += 2) out.push_back({i, i + 1, 1.0});
  for (int i = 1; i + 1 < n; i += 2) out.push_back({i, i + 1, lambda});
  if (boundary == Boundary::periodic) out.push_back({n - 1, 0, lambda});
  return out;
}

inline double sz_of(unsigned state, int site) { return (state >> site) & 1u ? 0.5 : -0.5; }

}  // namespace detail_ed

/// H |v> on the full 2^N space.
inline Eigen::VectorXcd apply_hamiltonian(const model::ModelParams& p, int n, Boundary boundary,
                                          const Eigen::VectorXcd& v) {
  using namespace detail_ed;
  p.validate();
  const auto bs = bonds(n, p.lambda, boundary);
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(v.size());
  for (unsigned s = 0; s < v.size(); ++s) {
    if (v[s] == cplx(0)) continue;
    double diag = 0.0;
    for (const auto& b : bs) {
      diag += b.coupling * p.delta * sz_of(s, b.i) * sz_of(s, b.j);
      if (((s >> b.i) & 1u) != ((s >> b.j) & 1u))
        w[s ^ (1u << b.i) ^ (1u << b.j)] += 0.5 * b.coupling * v[s];
    }
    for (int i = 0; i < n; ++i) diag -= p.b * sz_of(s, i);
    w[s] += diag * v[s];
  }
  return w;
}

/// Lowest eigenpair of the dense Hamiltonian, exploiting the total-Sz block
/// structure; N even, 2 <= N <= 14.
inline EDResult ed_ground_state(const model::ModelParams& p, int n, Boundary boundary) {
  using namespace detail_ed;
  p.validate();
  if (n < 2 || n > 14 || n % 2 != 0)
    throw std::invalid_argument("ed_ground_state: even N with 2 <= N <= 14 required");
  const auto bs = bonds(n, p.lambda, boundary);

  EDResult res;
  res.n_sites = n;
  res.boundary = boundary;
  res.energy = std::numeric_limits<double>::infinity();
  std::vector<double> all_levels;

  std::vector<unsigned> states;
  std::unordered_map<unsigned, int> index;
  for (int nup = 0; nup <= n; ++nup) {
    states.clear();
    index.clear();
    for (unsigned s = 0; s < (1u << n); ++s)
      if (__builtin_popcount(s) == nup) {
        index[s] = static_cast<int>(states.size());
        states.push_back(s);
      }
    const int dim = static_cast<int>(states.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int si = 0; si < dim; ++si) {
      const unsigned s = states[si];
      double diag = 0.0;
      for (const auto& b : bs) {
        diag += b.coupling * p.delta * sz_of(s, b.i) * sz_of(s, b.j);
        if (((s >> b.i) & 1u) != ((s >> b.j) & 1u))
          h(index[s ^ (1u << b.i) ^ (1u << b.j)], si) += 0.5 * b.coupling;
      }
      for (int i = 0; i < n; ++i) diag -= p.b * sz_of(s, i);
      h(si, si) += diag;
    }
    auto eig = linalg::sym_eig(std::move(h));
    for (int i = 0; i < dim; ++i) all_levels.push_back(eig.values[i]);
    if (eig.values[0] < res.energy) {
      res.energy = eig.values[0];
      res.ground_vector = Eigen::VectorXcd::Zero(1 << n);
      for (int si = 0; si < dim; ++si) res.ground_vector[states[si]] = eig.vectors(si, 0);
    }
  }

  res.degeneracy = 0;
  for (double e : all_levels)
    if (e < res.energy + 1e-10 * std::max(1.0, std::abs(res.energy))) ++res.degeneracy;
  return res;
}

/// Eigenvalues per total-Sz block (nup, ascending levels), for spectrum
/// printouts.
inline std::vector<std::pair<int, Eigen::VectorXd>> ed_block_spectra(const model::ModelParams& p,
                                                                     int n, Boundary boundary) {
  using namespace detail_ed;
  p.validate();
  if (n < 2 || n > 14 || n % 2 != 0)
    throw std::invalid_argument("ed_block_spectra: even N with 2 <= N <= 14 required");
  const auto bs = bonds(n, p.lambda, boundary);
  std::vector<std::pair<int, Eigen::VectorXd>> out;
  std::vector<unsigned> states;
  std::unordered_map<unsigned, int> index;
  for (int nup = 0; nup <= n; ++nup) {
    states.clear();
    index.clear();
    for (unsigned s = 0; s < (1u << n); ++s)
      if (__builtin_popcount(s) == nup) {
        index[s] = static_cast<int>(states.size());
        states.push_back(s);
      }
    const int dim = static_cast<int>(states.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int si = 0; si < dim; ++si) {
      const unsigned s = states[si];
      double diag = 0.0;
      for (const auto& b : bs) {
        diag += b.coupling * p.delta * sz_of(s, b.i) * sz_of(s, b.j);
        if (((s >> b.i) & 1u) != ((s >> b.j) & 1u))
          h(index[s ^ (1u << b.i) ^ (1u << b.j)], si) += 0.5 * b.coupling;
      }
      for (int i = 0; i < n; ++i) diag -= p.b * sz_of(s, i);
      h(si, si) += diag;
    }
    out.emplace_back(nup, linalg::sym_eigvals(std::move(h)));
  }
  return out;
}

/// <v| prod_i O_i |v> for single-site operators on distinct sites
/// (0-based site indices).
inline cplx ed_expectation(const EDResult& r,
                           const std::vector<std::pair<int, Eigen::Matrix2cd>>& ops) {
  const int n = r.n_sites;
  for (size_t a = 0; a < ops.size(); ++a) {
    if (ops[a].first < 0 || ops[a].first >= n)
      throw std::invalid_argument("ed_expectation: site out of range");
    for (size_t b = a + 1; b < ops.size(); ++b)
      if (ops[a].first == ops[b].first)
        throw std::invalid_argument("ed_expectation: duplicate site in operator string");
  }
  Eigen::VectorXcd w = r.ground_vector;
  for (const auto& [site, m] : ops) {
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(w.size());
    const unsigned mask = 1u << site;
    for (unsigned s = 0; s < w.size(); ++s) {
      if (w[s] == cplx(0)) continue;
      const int bit = (s & mask) ? 0 : 1;  // matrix index: 0 = up, 1 = down
      for (int bp = 0; bp < 2; ++bp) {
        const cplx amp = m(bp, bit);
        if (amp != cplx(0)) next[bp == 0 ? (s | mask) : (s & ~mask)] += amp * w[s];
      }
    }
    w = std::move(next);
  }
  return r.ground_vector.dot(w);  // Eigen dot conjugates the left argument
}

}  // namespace altchain::ed
