#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "altchain/itebd.hpp"
#include "altchain/model.hpp"
#include "altchain/observables.hpp"

namespace altchain::sweep {

enum class Axis { b, lambda };

inline const char* to_string(Axis a) { return a == Axis::b ? "B" : "lambda"; }

/// One parameter point of a sweep with the full observable set. Fields that
/// could not be computed stay NaN and `error` carries the reason.
struct ScanRecord {
  model::ModelParams params;
  double alpha = std::numeric_limits<double>::quiet_NaN();  // loop scans only
  double energy = std::numeric_limits<double>::quiet_NaN();
  // entanglement entropy across the bond (Schmidt weights)
  double bond_entropy_odd = std::numeric_limits<double>::quiet_NaN();
  double bond_entropy_even = std::numeric_limits<double>::quiet_NaN();
  // von Neumann entropy of the two-site pair density matrix
  double pair_entropy_odd = std::numeric_limits<double>::quiet_NaN();
  double pair_entropy_even = std::numeric_limits<double>::quiet_NaN();
  double concurrence_odd = std::numeric_limits<double>::quiet_NaN();
  double concurrence_even = std::numeric_limits<double>::quiet_NaN();
  double coherence_odd = std::numeric_limits<double>::quiet_NaN();
  double coherence_even = std::numeric_limits<double>::quiet_NaN();
  // single-site Wigner-Yanase skew information with K = sigma^x
  double wysi_odd = std::numeric_limits<double>::quiet_NaN();
  double wysi_even = std::numeric_limits<double>::quiet_NaN();
  double wysi_avg = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<int, double>> sop;  // (r, O_x^even(r))
  double fidelity_prev = std::numeric_limits<double>::quiet_NaN();
  long iterations = 0;
  double max_truncation_error = 0.0;
  bool converged = false;
  bool cold_checked = false;
  double cold_energy_diff = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

struct ScanOptions {
  int chi = 32;
  itebd::Schedule schedule;
  double warm_tau_initial = 0.01;  // shortened schedule for warm-started points
  std::uint64_t seed = 1;
  int cold_check_every = 10;  // hysteresis guard cadence; <= 0 disables
  std::vector<int> sop_r;     // string-order distances to record
};

struct LoopPath {
  double radius = 0.8;
  double delta = 1.0;
  std::vector<double> alpha_samples;

  /// B = (1 + Delta)/2 + R sin(alpha), lambda = R cos(alpha).
  model::ModelParams params_at(double alpha) const {
    model::ModelParams p;
    p.delta = delta;
    p.b = (1.0 + delta) / 2.0 + radius * std::sin(alpha);
    p.lambda = radius * std::cos(alpha);
    return p;
  }

  static LoopPath uniform(double radius, double delta, int n_samples,
                          double alpha_min = -kPi, double alpha_max = kPi) {
    LoopPath lp;
    lp.radius = radius;
    lp.delta = delta;
    for (int i = 0; i < n_samples; ++i)
      lp.alpha_samples.push_back(alpha_min + (alpha_max - alpha_min) * i /
                                 std::max(1, n_samples - 1));
    return lp;
  }
};

struct PinchPoint {
  double location = 0.0;
  double fidelity_minimum = 1.0;
  double refinement_width = 0.0;
};

namespace detail_sweep {

inline model::ModelParams at(model::ModelParams base, Axis axis, double x) {
  if (axis == Axis::b)
    base.b = x;
  else
    base.lambda = x;
  return base;
}

inline void fill_observables(ScanRecord& rec, const imps::IMPSState& s,
                             const std::vector<int>& sop_r) {
  const auto op = model::spin_operators();
  const Eigen::Matrix2cd sigx = 2.0 * op.sx;
  rec.bond_entropy_odd = imps::bond_entropy(s, Parity::odd);
  rec.bond_entropy_even = imps::bond_entropy(s, Parity::even);
  const auto rho_odd = imps::rdm_pair(s, Parity::odd);
  const auto rho_even = imps::rdm_pair(s, Parity::even);
  rec.pair_entropy_odd = obs::entropy(rho_odd);
  rec.pair_entropy_even = obs::entropy(rho_even);
  rec.concurrence_odd = obs::concurrence(rho_odd);
  rec.concurrence_even = obs::concurrence(rho_even);
  rec.coherence_odd = obs::l1_coherence(rho_odd);
  rec.coherence_even = obs::l1_coherence(rho_even);
  rec.wysi_odd = obs::wysi(imps::rdm_site(s, Parity::odd), sigx);
  rec.wysi_even = obs::wysi(imps::rdm_site(s, Parity::even), sigx);
  rec.wysi_avg = 0.5 * (rec.wysi_odd + rec.wysi_even);
  for (int r : sop_r) rec.sop.emplace_back(r, obs::string_order(s, r));
}

struct PointSolver {
  const ScanOptions& opt;
  std::optional<imps::IMPSState> warm_state;

  itebd::GroundStateResult solve(const model::ModelParams& p, bool force_cold = false) {
    if (!force_cold && warm_state) {
      itebd::Schedule warm = opt.schedule;
      warm.tau_initial = std::min(opt.schedule.tau_initial, opt.warm_tau_initial);
      return itebd::ground_state_from(*warm_state, p, opt.chi, warm);
    }
    return itebd::ground_state(p, opt.chi, opt.schedule, opt.seed);
  }
};

}  // namespace detail_sweep

/// Ground state and observables at a list of parameter points, warm-started
/// in order with periodic cold-start hysteresis checks. Per-point failures
/// are recorded and the scan continues.
inline std::vector<ScanRecord> scan_points(const std::vector<model::ModelParams>& points,
                                           const ScanOptions& opt) {
  detail_sweep::PointSolver solver{opt, std::nullopt};
  std::vector<ScanRecord> out;
  std::optional<imps::IMPSState> prev_state;
  for (size_t i = 0; i < points.size(); ++i) {
    ScanRecord rec;
    rec.params = points[i];
    try {
      auto res = solver.solve(points[i]);
      const bool check_cold = opt.cold_check_every > 0 && i > 0 &&
                              i % static_cast<size_t>(opt.cold_check_every) == 0;
      if (check_cold) {
        auto cold = solver.solve(points[i], /*force_cold=*/true);
        rec.cold_checked = true;
        rec.cold_energy_diff = res.energy_per_site - cold.energy_per_site;
        if (cold.energy_per_site < res.energy_per_site - 1e-9) res = std::move(cold);
      }
      rec.energy = res.energy_per_site;
      rec.iterations = res.iterations;
      rec.max_truncation_error = res.max_truncation_error;
      rec.converged = res.converged;
      detail_sweep::fill_observables(rec, res.state, opt.sop_r);
      if (prev_state) rec.fidelity_prev = obs::fidelity_per_site(*prev_state, res.state);
      prev_state = res.state;
      solver.warm_state = std::move(res.state);
    } catch (const std::exception& e) {
      rec.error = e.what();
      prev_state.reset();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

/// Sweep one axis of the model over [from, to] with the given step.
inline std::vector<ScanRecord> scan_line(const model::ModelParams& base, Axis axis, double from,
                                         double to, double step, const ScanOptions& opt) {
  if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to))
    throw std::invalid_argument("scan_line: need finite range and step > 0");
  std::vector<model::ModelParams> pts;
  for (double x = from; x <= to + step / 2; x += step)
    pts.push_back(detail_sweep::at(base, axis, x));
  return scan_points(pts, opt);
}

/// Records along the (R, alpha) loop path.
inline std::vector<ScanRecord> loop_scan(const LoopPath& path, const ScanOptions& opt) {
  if (path.alpha_samples.empty()) throw std::invalid_argument("loop_scan: empty path");
  std::vector<model::ModelParams> pts;
  for (double a : path.alpha_samples) pts.push_back(path.params_at(a));
  auto recs = scan_points(pts, opt);
  for (size_t i = 0; i < recs.size(); ++i) recs[i].alpha = path.alpha_samples[i];
  return recs;
}

/// Axis value a record of a scan corresponds to.
inline double axis_value(const ScanRecord& r, Axis axis) {
  return axis == Axis::b ? r.params.b : r.params.lambda;
}

/// Locate local minima of the adjacent-point fidelity in a coarse scan and
/// refine each by re-solving ground states on shrinking brackets until the
/// probe spacing is at or below `resolution`. A monotone fidelity profile
/// yields an empty list.
inline std::vector<PinchPoint> refine_pinch(const std::vector<ScanRecord>& scan, Axis axis,
                                            const model::ModelParams& base, double resolution,
                                            const ScanOptions& opt) {
  if (!(resolution > 0.0)) throw std::invalid_argument("refine_pinch: resolution > 0 required");
  // adjacent fidelity d_i sits between points i-1 and i; use the midpoint
  std::vector<double> xs, ds;
  for (size_t i = 1; i < scan.size(); ++i) {
    if (std::isnan(scan[i].fidelity_prev)) continue;
    xs.push_back(0.5 * (axis_value(scan[i - 1], axis) + axis_value(scan[i], axis)));
    ds.push_back(scan[i].fidelity_prev);
  }
  if (xs.size() < 3) return {};

  std::vector<double> var;
  for (size_t i = 1; i < ds.size(); ++i) var.push_back(std::abs(ds[i] - ds[i - 1]));

  // a local minimum is a pinch candidate when its depth clears five times the
  // median fidelity variation of the rest of the scan
  std::vector<std::pair<double, double>> brackets;  // candidate (lo, hi)
  for (size_t i = 1; i + 1 < ds.size(); ++i) {
    if (!(ds[i] <= ds[i - 1] && ds[i] <= ds[i + 1])) continue;
    std::vector<double> other;
    for (size_t j = 0; j < var.size(); ++j)
      if (j + 1 != i && j != i) other.push_back(var[j]);
    std::sort(other.begin(), other.end());
    const double median_var = other.empty() ? 0.0 : other[other.size() / 2];
    if (ds[i] < 1.0 - 5.0 * std::max(median_var, 1e-12))
      brackets.emplace_back(xs[i - 1], xs[i + 1]);
  }

  std::vector<PinchPoint> out;
  for (auto [lo, hi] : brackets) {
    double spacing = (hi - lo) / 4.0;
    double dmin = 1.0;
    double center = 0.5 * (lo + hi);
    while (true) {
      // five probe points, each solved cold: refinement brackets sit at the
      // transition, where warm starts are exactly the hysteresis risk
      std::vector<double> px;
      for (int i = 0; i <= 4; ++i) px.push_back(lo + spacing * i);
      detail_sweep::PointSolver solver{opt, std::nullopt};
      std::vector<imps::IMPSState> states;
      for (double x : px) {
        auto res = solver.solve(detail_sweep::at(base, axis, x), /*force_cold=*/true);
        states.push_back(std::move(res.state));
      }
      int best = 0;
      dmin = 2.0;
      for (int i = 0; i + 1 <= 4; ++i) {
        const double d = obs::fidelity_per_site(states[i], states[i + 1]);
        if (d < dmin) {
          dmin = d;
          best = i;
        }
      }
      center = 0.5 * (px[best] + px[best + 1]);
      if (spacing <= resolution) break;
      lo = std::max(lo, center - spacing);
      hi = std::min(hi, center + spacing);
      spacing = (hi - lo) / 4.0;
    }
    out.push_back({center, dmin, spacing});
  }
  std::sort(out.begin(), out.end(),
            [](const PinchPoint& a, const PinchPoint& b) { return a.location < b.location; });
  return out;
}

struct BoundaryPoint {
  double lambda = 0.0;
  double b_c = 0.0;
  double fidelity_minimum = 1.0;
  double refinement_width = 0.0;
  int curve_id = -1;
};

struct GridResult {
  std::vector<ScanRecord> records;             // row-major, lambda-major order
  std::vector<BoundaryPoint> boundary;         // pinch points per column
};

/// Full (lambda, B) table: one warm-started B column per lambda, columns run
/// by a bounded worker pool, results merged in parameter order. Pinch
/// detection per column assembles the phase-boundary overlay.
inline GridResult grid_scan(const model::ModelParams& base_params, double lambda_from,
                            double lambda_to, int lambda_steps, double b_from, double b_to,
                            int b_steps, const ScanOptions& opt, double resolution = 0.0,
                            int n_workers = 2) {
  if (lambda_steps < 1 || b_steps < 1) throw std::invalid_argument("grid_scan: steps >= 1");
  std::vector<double> lams;
  for (int i = 0; i < lambda_steps; ++i)
    lams.push_back(lambda_steps == 1
                       ? lambda_from
                       : lambda_from + (lambda_to - lambda_from) * i / (lambda_steps - 1));
  const double b_step = b_steps == 1 ? 1.0 : (b_to - b_from) / (b_steps - 1);

  std::vector<std::vector<ScanRecord>> cols(lams.size());
  std::vector<std::vector<PinchPoint>> pinches(lams.size());
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const size_t c = next.fetch_add(1);
      if (c >= lams.size()) return;
      model::ModelParams base = base_params;
      base.lambda = lams[c];
      ScanOptions col_opt = opt;
      col_opt.seed = opt.seed + 1000 * c;
      auto recs = b_steps == 1
                      ? scan_points({detail_sweep::at(base, Axis::b, b_from)}, col_opt)
                      : scan_line(base, Axis::b, b_from, b_to, b_step, col_opt);
      if (resolution > 0.0 && b_steps > 2)
        pinches[c] = refine_pinch(recs, Axis::b, base, resolution, col_opt);
      cols[c] = std::move(recs);
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::max(1, std::min<int>(n_workers, static_cast<int>(lams.size())));
  for (int i = 0; i < nw; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  GridResult out;
  for (size_t c = 0; c < lams.size(); ++c)
    for (auto& r : cols[c]) out.records.push_back(std::move(r));
  // assemble boundary points; greedy curve matching between adjacent columns
  int next_curve = 0;
  std::vector<std::pair<double, int>> prev_ids;  // (b_c, curve_id) of previous column
  for (size_t c = 0; c < lams.size(); ++c) {
    std::vector<std::pair<double, int>> cur_ids;
    for (const auto& p : pinches[c]) {
      BoundaryPoint bp{lams[c], p.location, p.fidelity_minimum, p.refinement_width, -1};
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [b_prev, id] : prev_ids) {
        const double dist = std::abs(b_prev - p.location);
        if (dist < best && dist < 5 * b_step) {
          best = dist;
          bp.curve_id = id;
        }
      }
      if (bp.curve_id < 0) bp.curve_id = next_curve++;
      cur_ids.emplace_back(p.location, bp.curve_id);
      out.boundary.push_back(bp);
    }
    prev_ids = std::move(cur_ids);
  }
  return out;
}

}  // namespace altchain::sweep
