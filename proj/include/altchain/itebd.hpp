#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "altchain/imps.hpp"
#include "altchain/model.hpp"

namespace altchain::itebd {

/// Imaginary-time step schedule: start at tau_initial, divide by tau_shrink
/// after each converged stage, stop below tau_floor.
struct Schedule {
  double tau_initial = 0.1;
  double tau_shrink = 10.0;
  double tau_floor = 1e-9;
  int sweeps_per_tau = 3000;  // convergence-checked cap per stage
  double energy_tol = 1e-10;

  void validate() const {
    if (!(tau_initial > tau_floor) || !(tau_floor > 0.0))
      throw std::invalid_argument("Schedule: need tau_initial > tau_floor > 0");
    if (!(tau_shrink > 1.0)) throw std::invalid_argument("Schedule: need tau_shrink > 1");
    if (sweeps_per_tau < 1) throw std::invalid_argument("Schedule: need sweeps_per_tau >= 1");
  }
};

struct TracePoint {
  double tau;
  long sweep;  // cumulative odd+even sweeps
  double energy;
  double truncation_error;
};

struct GroundStateResult {
  imps::IMPSState state;
  double energy_per_site = 0.0;
  long iterations = 0;  // total odd+even sweep pairs
  double max_truncation_error = 0.0;
  bool converged = false;  // energy tolerance reached at the floor-tau stage
  std::vector<TracePoint> trace;
};

/// (Tr(rho_odd h_odd) + Tr(rho_even h_even)) / 2: with the half-and-half
/// field split this is the energy per site of the full Hamiltonian. The
/// explicit trace normalization keeps mid-evolution measurements on slightly
/// drifted states consistent.
inline double energy_per_site(const imps::IMPSState& s, const model::ModelParams& p) {
  double e = 0.0;
  for (Parity bond : {Parity::odd, Parity::even}) {
    const auto h = model::bond_hamiltonian(p, bond);
    const auto rho = imps::rdm_pair(s, bond);
    e += (rho.matrix * h.matrix).trace().real() / rho.matrix.trace().real();
  }
  return e / 2.0;
}

namespace detail_itebd {
constexpr int kCheckInterval = 10;
// Mid-stage energies are read off the as-is state: the Vidal update keeps it
// near-canonical and a consistent bias cancels in the Delta-E stop. A full
// gauge fix runs at every stage boundary, before every reported energy, and
// whenever the drift becomes structural.
constexpr double kResidualSafety = 0.3;
}  // namespace detail_itebd

/// Imaginary-time evolution from a given initial state (used directly for
/// warm starts; ground_state seeds it with a random state).
inline GroundStateResult ground_state_from(imps::IMPSState state, const model::ModelParams& p,
                                           int chi, const Schedule& schedule) {
  using namespace detail_itebd;
  p.validate();
  schedule.validate();
  if (chi < 1) throw std::invalid_argument("ground_state: chi must be >= 1");

  const auto h_odd = model::bond_hamiltonian(p, Parity::odd);
  const auto h_even = model::bond_hamiltonian(p, Parity::even);

  GroundStateResult res;
  res.state = std::move(state);
  long sweeps_total = 0;
  bool floor_stage_converged = false;

  for (double tau = schedule.tau_initial; tau > schedule.tau_floor * 0.999999;
       tau /= schedule.tau_shrink) {
    const auto g_odd = model::trotter_gate(h_odd, tau);
    const auto g_even = model::trotter_gate(h_even, tau);
    double e_prev = std::numeric_limits<double>::quiet_NaN();
    bool stage_converged = false;

    for (int sweep = 1; sweep <= schedule.sweeps_per_tau; ++sweep) {
      auto r1 = imps::apply_gate(std::move(res.state), g_odd, chi);
      auto r2 = imps::apply_gate(std::move(r1.state), g_even, chi);
      res.state = std::move(r2.state);
      res.max_truncation_error =
          std::max({res.max_truncation_error, r1.truncation_error, r2.truncation_error});
      ++sweeps_total;

      if (sweep % kCheckInterval == 0 || sweep == schedule.sweeps_per_tau) {
        if (imps::canonical_residual(res.state) > kResidualSafety)
          res.state = imps::canonicalize(res.state, chi);
        const double e = energy_per_site(res.state, p);
        res.trace.push_back({tau, sweeps_total, e, res.max_truncation_error});
        if (!std::isnan(e_prev)) {
          const double de = std::abs(e - e_prev) / kCheckInterval;
          if (de < std::max(schedule.energy_tol * tau, 5e-15 * std::max(1.0, std::abs(e)))) {
            stage_converged = true;
            break;
          }
        }
        e_prev = e;
      }
    }
    res.state = imps::canonicalize(res.state, chi);
    if (tau / schedule.tau_shrink <= schedule.tau_floor * 0.999999)
      floor_stage_converged = stage_converged;
  }

  res.iterations = sweeps_total;
  res.energy_per_site = energy_per_site(res.state, p);
  res.converged = floor_stage_converged;
  return res;
}

/// Ground-state search from a random state: alternate odd/even gates while
/// shrinking tau from tau_initial down to tau_floor.
inline GroundStateResult ground_state(const model::ModelParams& p, int chi,
                                      const Schedule& schedule, std::uint64_t seed) {
  return ground_state_from(imps::init_random(chi, seed), p, chi, schedule);
}

/// Convergence trace as CSV (tau, iteration, energy, truncation_error).
inline void write_trace_csv(const GroundStateResult& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_trace_csv: cannot open " + path);
  os << "tau,iteration,energy,truncation_error\n";
  os.precision(15);
  for (const auto& t : r.trace)
    os << t.tau << ',' << t.sweep << ',' << t.energy << ',' << t.truncation_error << '\n';
}

}  // namespace altchain::itebd
