#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace altchain {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Bond / site selector for the two-site unit cell. Odd bonds couple sites
/// (2i-1, 2i) with strength J, even bonds couple (2i, 2i+1) with strength
/// lambda. Site parity follows the same 1-based convention: site A of the
/// unit cell sits on an odd lattice position.
enum class Parity { odd, even };

inline Parity flip(Parity p) { return p == Parity::odd ? Parity::even : Parity::odd; }
inline const char* to_string(Parity p) { return p == Parity::odd ? "odd" : "even"; }

/// Irrecoverable numerical failure: non-finite tensor entries, SVD that does
/// not converge, vanishing singular spectrum.
struct NumericalBreakdown : std::runtime_error {
  explicit NumericalBreakdown(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative eigensolver failed to settle, typically because the leading
/// transfer eigenvalues are (near-)degenerate.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace altchain
