// Command-line driver: ground-state solves, phase-diagram scans, loop paths,
// exact oracles and entropy-scaling fits. Emits CSV or JSON tables with a
// reproduction-metadata block; errors go to stderr as JSON with exit code 1.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "altchain/checkpoint.hpp"
#include "altchain/ed.hpp"
#include "altchain/finite.hpp"
#include "altchain/io.hpp"
#include "altchain/itebd.hpp"
#include "altchain/observables.hpp"
#include "altchain/sweep.hpp"
#include "altchain/version.hpp"
#include "altchain/xx_exact.hpp"

using namespace altchain;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config, out, checkpoint, from_checkpoint, trace;
  int chi = 50;
  std::uint64_t seed = 1;
  double resolution = 0.01;
  model::ModelParams params;
  itebd::Schedule schedule;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config, "key = value config file; command line wins");
  cmd->add_option("--out", o.out, "output table (.json for JSON, else CSV)");
  cmd->add_option("--checkpoint", o.checkpoint, "write the final state (imps binary format)");
  cmd->add_option("--from-checkpoint", o.from_checkpoint, "warm-start from a saved state");
  cmd->add_option("--chi", o.chi, "bond dimension cap");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--resolution", o.resolution, "pinch refinement resolution");
  cmd->add_option("--lambda", o.params.lambda, "even-bond coupling");
  cmd->add_option("--delta", o.params.delta, "anisotropy");
  cmd->add_option("--b", o.params.b, "field strength");
  cmd->add_option("--tau-initial", o.schedule.tau_initial, "first Trotter step");
  cmd->add_option("--tau-shrink", o.schedule.tau_shrink, "step reduction factor");
  cmd->add_option("--tau-floor", o.schedule.tau_floor, "stop once tau drops below this");
  cmd->add_option("--sweeps-per-tau", o.schedule.sweeps_per_tau, "sweep cap per tau stage");
  cmd->add_option("--energy-tol", o.schedule.energy_tol, "per-site energy tolerance");
  cmd->add_option("--trace", o.trace, "write the convergence trace CSV here");
  cmd->add_option("--jobs", o.jobs, "worker threads for grid columns");
}

/// Config-file values fill in anything not set on the command line.
void merge_config(CLI::App* cmd, CommonOpts& o) {
  if (o.config.empty()) return;
  const auto cfg = io::parse_config(o.config);
  auto take = [&](const char* flag, const char* key, auto& slot) {
    auto it = cfg.find(key);
    if (it == cfg.end() || cmd->count(flag) > 0) return;
    using T = std::decay_t<decltype(slot)>;
    if constexpr (std::is_same_v<T, std::string>)
      slot = it->second;
    else if constexpr (std::is_same_v<T, int>)
      slot = std::stoi(it->second);
    else if constexpr (std::is_same_v<T, std::uint64_t>)
      slot = static_cast<std::uint64_t>(std::stoull(it->second));
    else
      slot = std::stod(it->second);
  };
  take("--out", "out", o.out);
  take("--checkpoint", "checkpoint", o.checkpoint);
  take("--from-checkpoint", "from_checkpoint", o.from_checkpoint);
  take("--chi", "chi", o.chi);
  take("--seed", "seed", o.seed);
  take("--resolution", "resolution", o.resolution);
  take("--lambda", "lambda", o.params.lambda);
  take("--delta", "delta", o.params.delta);
  take("--b", "b", o.params.b);
  take("--tau-initial", "tau_initial", o.schedule.tau_initial);
  take("--tau-shrink", "tau_shrink", o.schedule.tau_shrink);
  take("--tau-floor", "tau_floor", o.schedule.tau_floor);
  take("--sweeps-per-tau", "sweeps_per_tau", o.schedule.sweeps_per_tau);
  take("--energy-tol", "energy_tol", o.schedule.energy_tol);
  take("--trace", "trace", o.trace);
  take("--jobs", "jobs", o.jobs);
}

io::Metadata make_meta(const CommonOpts& o, const std::string& command) {
  io::Metadata m;
  m.chi = o.chi;
  m.schedule = o.schedule;
  m.seed = o.seed;
  m.command = command;
  return m;
}

sweep::ScanOptions scan_opts(const CommonOpts& o, int cold_every,
                             const std::vector<int>& sop_r) {
  sweep::ScanOptions so;
  so.chi = o.chi;
  so.schedule = o.schedule;
  so.seed = o.seed;
  so.cold_check_every = cold_every;
  so.sop_r = sop_r;
  return so;
}

int cmd_ground(CommonOpts& o, const std::vector<int>& sop_r) {
  itebd::GroundStateResult res;
  if (!o.from_checkpoint.empty()) {
    auto init = imps::load_checkpoint(o.from_checkpoint);
    res = itebd::ground_state_from(std::move(init), o.params, o.chi, o.schedule);
  } else {
    res = itebd::ground_state(o.params, o.chi, o.schedule, o.seed);
  }
  sweep::ScanRecord rec;
  rec.params = o.params;
  rec.energy = res.energy_per_site;
  rec.iterations = res.iterations;
  rec.max_truncation_error = res.max_truncation_error;
  rec.converged = res.converged;
  sweep::detail_sweep::fill_observables(rec, res.state, sop_r);
  std::cout << "energy_per_site = " << std::setprecision(12) << res.energy_per_site
            << "\niterations = " << res.iterations
            << "\nmax_truncation_error = " << res.max_truncation_error
            << "\nconverged = " << (res.converged ? "yes" : "no")
            << "\nbond_entropy_odd = " << rec.bond_entropy_odd
            << "\nbond_entropy_even = " << rec.bond_entropy_even
            << "\nconcurrence_odd = " << rec.concurrence_odd << std::endl;
  if (!o.out.empty()) io::write_records(o.out, {rec}, make_meta(o, "ground"));
  if (!o.checkpoint.empty()) imps::save_checkpoint(res.state, o.checkpoint);
  if (!o.trace.empty()) itebd::write_trace_csv(res, o.trace);
  return 0;
}

int cmd_scan(CommonOpts& o, const std::string& axis_name, double from, double to, double step,
             int cold_every, const std::vector<int>& sop_r, bool surface) {
  const sweep::Axis axis = axis_name == "lambda" ? sweep::Axis::lambda : sweep::Axis::b;
  auto so = scan_opts(o, cold_every, sop_r);
  auto recs = sweep::scan_line(o.params, axis, from, to, step, so);
  auto meta = make_meta(o, "scan");
  meta.extra["axis"] = axis_name;
  meta.extra["range"] = std::to_string(from) + ".." + std::to_string(to) + " step " +
                        std::to_string(step);
  auto pinches = sweep::refine_pinch(recs, axis, o.params, o.resolution, so);
  for (size_t i = 0; i < pinches.size(); ++i) {
    std::cout << "pinch " << i << ": " << axis_name << "_c = " << pinches[i].location
              << "  d_min = " << pinches[i].fidelity_minimum
              << "  width = " << pinches[i].refinement_width << std::endl;
    meta.extra["pinch_" + std::to_string(i)] =
        std::to_string(pinches[i].location) + " (d_min " +
        std::to_string(pinches[i].fidelity_minimum) + ")";
  }
  if (pinches.empty()) std::cout << "no pinch points detected" << std::endl;
  if (surface && !o.out.empty()) {
    // full d(x1, x2) fidelity surface, Fig.2 style
    std::vector<imps::IMPSState> states;
    sweep::detail_sweep::PointSolver solver{so, std::nullopt};
    std::vector<double> xv;
    for (double x = from; x <= to + step / 2; x += step) {
      auto res = solver.solve(sweep::detail_sweep::at(o.params, axis, x));
      solver.warm_state = res.state;
      states.push_back(std::move(res.state));
      xv.push_back(x);
    }
    const std::string spath = o.out + ".surface.csv";
    std::ofstream os(spath);
    os.precision(12);
    meta.write_csv_header(os);
    os << "x1,x2,d\n";
    for (size_t i = 0; i < states.size(); ++i)
      for (size_t j = i; j < states.size(); ++j) {
        const double d = obs::fidelity_per_site(states[i], states[j]);
        os << xv[i] << ',' << xv[j] << ',' << d << '\n';
      }
    std::cout << "fidelity surface written to " << spath << std::endl;
  }
  if (!o.out.empty()) io::write_records(o.out, recs, meta);
  return 0;
}

int cmd_loop(CommonOpts& o, double radius, double alpha_from, double alpha_to, int samples,
             const std::vector<int>& sop_r) {
  auto path = sweep::LoopPath::uniform(radius, o.params.delta, samples, alpha_from, alpha_to);
  auto recs = sweep::loop_scan(path, scan_opts(o, 10, sop_r));
  auto meta = make_meta(o, "loop");
  meta.extra["radius"] = std::to_string(radius);
  meta.extra["alpha_range"] = std::to_string(alpha_from) + ".." + std::to_string(alpha_to);
  if (!o.out.empty()) io::write_records(o.out, recs, meta);
  std::cout << "loop scan: " << recs.size() << " points" << std::endl;
  return 0;
}

int cmd_grid(CommonOpts& o, double lf, double lt, int ls, double bf, double bt, int bs) {
  auto res = sweep::grid_scan(o.params, lf, lt, ls, bf, bt, bs, scan_opts(o, 10, {}),
                              o.resolution, o.jobs);
  auto meta = make_meta(o, "grid");
  meta.extra["lambda_range"] = std::to_string(lf) + ".." + std::to_string(lt) + " steps " +
                               std::to_string(ls);
  meta.extra["b_range"] = std::to_string(bf) + ".." + std::to_string(bt) + " steps " +
                          std::to_string(bs);
  if (!o.out.empty()) {
    io::write_records(o.out, res.records, meta);
    const std::string bpath = o.out + ".boundary.csv";
    std::ofstream os(bpath);
    os.precision(12);
    meta.write_csv_header(os);
    os << "lambda,b_c,fidelity_minimum,refinement_width,curve_id\n";
    for (const auto& bp : res.boundary)
      os << bp.lambda << ',' << bp.b_c << ',' << bp.fidelity_minimum << ','
         << bp.refinement_width << ',' << bp.curve_id << '\n';
    std::cout << "boundary overlay written to " << bpath << std::endl;
  }
  std::cout << "grid scan: " << res.records.size() << " points, " << res.boundary.size()
            << " boundary points" << std::endl;
  return 0;
}

int cmd_xx(CommonOpts& o, const std::string& what, int n, double lf, double lt, int ls,
           const std::string& boundary) {
  auto meta = make_meta(o, "xx-exact " + what);
  if (what == "dispersion") {
    std::ofstream os;
    std::ostream& out = o.out.empty() ? std::cout : (os.open(o.out), os);
    out.precision(12);
    meta.write_csv_header(out);
    out << "k,eps_plus,eps_minus\n";
    for (double k : xx::allowed_momenta(n)) {
      const auto [ep, em] = xx::dispersion(o.params.lambda, o.params.b, k);
      out << k << ',' << ep << ',' << em << '\n';
    }
  } else if (what == "boundaries") {
    std::ofstream os;
    std::ostream& out = o.out.empty() ? std::cout : (os.open(o.out), os);
    out.precision(12);
    meta.write_csv_header(out);
    out << "lambda,b_lower,b_upper\n";
    for (int i = 0; i < ls; ++i) {
      const double lam = ls == 1 ? lf : lf + (lt - lf) * i / (ls - 1);
      const auto [bl, bu] = xx::phase_boundaries(lam);
      out << lam << ',' << bl << ',' << bu << '\n';
    }
  } else if (what == "energy") {
    std::cout.precision(12);
    std::cout << "finite N=" << n << ": "
              << xx::gs_energy_per_site(o.params.lambda, o.params.b, n)
              << "\nthermodynamic: "
              << xx::gs_energy_per_site_thermo(o.params.lambda, o.params.b) << std::endl;
  } else if (what == "entropy") {
    const auto bc = boundary == "periodic" ? xx::Boundary::periodic : xx::Boundary::open;
    const auto c = xx::correlation_matrix(n, o.params.lambda, o.params.b, bc);
    finite::EntropyProfile prof;
    prof.n_sites = n;
    prof.entropies.resize(n - 1);
    for (int l = 1; l < n; ++l) prof.entropies[l - 1] = xx::block_entropy_from_correlations(c, l);
    const auto fit =
        finite::fit_central_charge(prof, finite::FitParity::even, finite::default_window(n));
    meta.extra["boundary"] = boundary;
    meta.extra["fit_parity"] = "even";
    meta.extra["fit_window"] = std::to_string(fit.l_window.first) + ".." +
                               std::to_string(fit.l_window.second);
    meta.extra["central_charge"] = std::to_string(fit.c);
    meta.extra["fit_constant"] = std::to_string(fit.a_const);
    std::ofstream os;
    std::ostream& out = o.out.empty() ? std::cout : (os.open(o.out), os);
    out.precision(12);
    meta.write_csv_header(out);
    out << "L,S_L,fitted\n";
    for (int l = 1; l < n; ++l)
      out << l << ',' << prof.entropies[l - 1] << ','
          << fit.c / 6.0 * std::log2(n / kPi * std::sin(kPi * l / n)) + fit.a_const << '\n';
    std::cout << "c = " << fit.c << "  A = " << fit.a_const << "  residual = " << fit.residual
              << std::endl;
  } else {
    throw std::invalid_argument("xx-exact: unknown --what " + what);
  }
  return 0;
}

int cmd_ed(CommonOpts& o, int n, const std::string& boundary) {
  const auto bc = boundary == "periodic" ? ed::Boundary::periodic : ed::Boundary::open;
  const auto spectra = ed::ed_block_spectra(o.params, n, bc);
  auto res = ed::ed_ground_state(o.params, n, bc);
  std::cout.precision(12);
  std::cout << "N = " << n << " (" << boundary << ")\nE0 = " << res.energy
            << "  E0/N = " << res.energy / n << "  degeneracy = " << res.degeneracy << '\n';
  for (const auto& [nup, levels] : spectra) {
    std::cout << "Sz = " << std::setw(5) << (nup - n / 2.0) << " :";
    for (int i = 0; i < std::min<int>(5, static_cast<int>(levels.size())); ++i)
      std::cout << ' ' << levels[i];
    std::cout << '\n';
  }
  if (!o.out.empty()) {
    std::ofstream os(o.out);
    os.precision(12);
    make_meta(o, "ed").write_csv_header(os);
    os << "nup,level_index,energy\n";
    for (const auto& [nup, levels] : spectra)
      for (int i = 0; i < levels.size(); ++i) os << nup << ',' << i << ',' << levels[i] << '\n';
  }
  return 0;
}

int cmd_entropy_fit(CommonOpts& o, int n, const std::string& method, const std::string& parity,
                    int wlo, int whi) {
  finite::EntropyProfile prof;
  if (method == "xx") {
    const auto c = xx::correlation_matrix(n, o.params.lambda, o.params.b, xx::Boundary::open);
    prof.n_sites = n;
    prof.params = o.params;
    prof.entropies.resize(n - 1);
    for (int l = 1; l < n; ++l) prof.entropies[l - 1] = xx::block_entropy_from_correlations(c, l);
  } else if (method == "tebd") {
    auto res = finite::finite_ground_state(o.params, n, o.chi, o.schedule, o.seed);
    prof = finite::entropy_profile(res.state, o.params);
    std::cout << "E/N = " << std::setprecision(12) << res.energy / n
              << "  iterations = " << res.iterations
              << "  max_trunc = " << res.max_truncation_error << std::endl;
  } else {
    throw std::invalid_argument("entropy-fit: unknown --method " + method);
  }
  const finite::FitParity fp = parity == "odd"    ? finite::FitParity::odd
                               : parity == "all"  ? finite::FitParity::all
                                                  : finite::FitParity::even;
  std::pair<int, int> window = finite::default_window(n);
  if (wlo > 0) window.first = wlo;
  if (whi > 0) window.second = whi;
  const auto fit = finite::fit_central_charge(prof, fp, window);
  std::cout << "c = " << fit.c << "  A = " << fit.a_const << "  residual = " << fit.residual
            << std::endl;
  if (!o.out.empty()) {
    auto meta = make_meta(o, "entropy-fit");
    meta.extra["method"] = method;
    meta.extra["fit_parity"] = parity;
    meta.extra["fit_window"] =
        std::to_string(window.first) + ".." + std::to_string(window.second);
    meta.extra["central_charge"] = std::to_string(fit.c);
    meta.extra["fit_constant"] = std::to_string(fit.a_const);
    std::ofstream os(o.out);
    os.precision(12);
    meta.write_csv_header(os);
    os << "L,S_L,fitted\n";
    for (int l = 1; l < n; ++l)
      os << l << ',' << prof.entropies[l - 1] << ','
         << fit.c / 6.0 * std::log2(n / kPi * std::sin(kPi * l / n)) + fit.a_const << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alternating Heisenberg chain ground states and phase diagrams"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts o;
  std::vector<int> sop_r;
  std::string axis_name = "b", what = "boundaries", boundary = "periodic", method = "tebd",
              parity = "even";
  double from = 0.0, to = 1.0, step = 0.02, radius = 0.8;
  double alpha_from = -kPi, alpha_to = kPi;
  double lf = -1.5, lt = 1.5, bf = 0.0, bt = 2.0;
  int samples = 81, ls = 31, bs = 41, n = 12, cold_every = 10, wlo = 0, whi = 0;
  bool surface = false;

  auto* ground = app.add_subcommand("ground", "iTEBD ground state at one parameter point");
  add_common(ground, o);
  ground->add_option("--sop-r", sop_r, "string-order distances to report");

  auto* scan = app.add_subcommand("scan", "sweep one axis, detect fidelity pinch points");
  add_common(scan, o);
  scan->add_option("--axis", axis_name, "b or lambda")->check(CLI::IsMember({"b", "lambda"}));
  scan->add_option("--from", from)->required();
  scan->add_option("--to", to)->required();
  scan->add_option("--step", step);
  scan->add_option("--cold-every", cold_every, "cold-start hysteresis check cadence");
  scan->add_option("--sop-r", sop_r, "string-order distances to record");
  scan->add_flag("--surface", surface, "also write the full d(x1,x2) fidelity surface");

  auto* loop = app.add_subcommand("loop", "scan the (R, alpha) loop path");
  add_common(loop, o);
  loop->add_option("--radius", radius);
  loop->add_option("--alpha-from", alpha_from);
  loop->add_option("--alpha-to", alpha_to);
  loop->add_option("--samples", samples);
  loop->add_option("--sop-r", sop_r);

  auto* grid = app.add_subcommand("grid", "full (lambda, B) table with boundary overlay");
  add_common(grid, o);
  grid->add_option("--lambda-from", lf);
  grid->add_option("--lambda-to", lt);
  grid->add_option("--lambda-steps", ls);
  grid->add_option("--b-from", bf);
  grid->add_option("--b-to", bt);
  grid->add_option("--b-steps", bs);

  auto* xxc = app.add_subcommand("xx-exact", "free-fermion oracle tables (Delta = 0)");
  add_common(xxc, o);
  xxc->add_option("--what", what, "dispersion | boundaries | energy | entropy");
  xxc->add_option("--n", n, "chain length");
  xxc->add_option("--lambda-from", lf);
  xxc->add_option("--lambda-to", lt);
  xxc->add_option("--steps", ls);
  xxc->add_option("--boundary", boundary, "periodic | open");

  auto* edc = app.add_subcommand("ed", "dense exact diagonalization (N <= 14)");
  add_common(edc, o);
  edc->add_option("--n", n, "chain length");
  edc->add_option("--boundary", boundary, "open | periodic");

  auto* efit = app.add_subcommand("entropy-fit", "entropy profile and central-charge fit");
  add_common(efit, o);
  efit->add_option("--n", n, "chain length");
  efit->add_option("--method", method, "tebd | xx");
  efit->add_option("--parity", parity, "even | odd | all");
  efit->add_option("--window-lo", wlo);
  efit->add_option("--window-hi", whi);

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto* sub : {ground, scan, loop, grid, xxc, edc, efit})
      if (sub->parsed()) merge_config(sub, o);
    if (ground->parsed()) return cmd_ground(o, sop_r);
    if (scan->parsed()) return cmd_scan(o, axis_name, from, to, step, cold_every, sop_r, surface);
    if (loop->parsed()) return cmd_loop(o, radius, alpha_from, alpha_to, samples, sop_r);
    if (grid->parsed()) return cmd_grid(o, lf, lt, ls, bf, bt, bs);
    if (xxc->parsed()) return cmd_xx(o, what, n, lf, lt, ls, boundary);
    if (edc->parsed()) return cmd_ed(o, n, boundary);
    if (efit->parsed()) return cmd_entropy_fit(o, n, method, parity, wlo, whi);
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"type", typeid(e).name()}, {"message", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
