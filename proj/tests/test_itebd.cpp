#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <fstream>

#include "altchain/ed.hpp"
#include "altchain/itebd.hpp"
#include "altchain/observables.hpp"

using namespace altchain;
using Catch::Approx;

namespace {

imps::IMPSState polarized_state() {
  imps::IMPSState s;
  s.chi_max = 1;
  s.weights[0] = s.weights[1] = Eigen::VectorXd::Ones(1);
  for (int site = 0; site < 2; ++site) {
    s.gamma[site][0] = Eigen::MatrixXcd::Ones(1, 1);
    s.gamma[site][1] = Eigen::MatrixXcd::Zero(1, 1);
  }
  return s;
}

imps::IMPSState singlet_dimer_state() {
  imps::IMPSState s;
  s.chi_max = 2;
  s.weights[0] = Eigen::Vector2d{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  s.weights[1] = Eigen::VectorXd::Ones(1);
  for (int p = 0; p < 2; ++p) {
    s.gamma[0][p] = Eigen::MatrixXcd::Zero(1, 2);
    s.gamma[0][p](0, p) = 1.0;
    s.gamma[1][p] = Eigen::MatrixXcd::Zero(2, 1);
  }
  s.gamma[1][0](1, 0) = -1.0;
  s.gamma[1][1](0, 0) = 1.0;
  return s;
}

itebd::Schedule quick_schedule(double floor = 1e-6, int cap = 800) {
  itebd::Schedule s;
  s.tau_floor = floor;
  s.sweeps_per_tau = cap;
  return s;
}

}  // namespace

TEST_CASE("energy per site on closed-form states") {
  SECTION("polarized product: Delta (1 + lambda) / 8 - B / 2") {
    auto s = polarized_state();
    for (auto [lam, delta, b] :
         std::vector<std::array<double, 3>>{{0.0, 1.0, 2.0}, {0.7, 0.4, 1.1}, {-1.0, 1.0, 3.0}}) {
      model::ModelParams p{1.0, lam, delta, b};
      CHECK(itebd::energy_per_site(s, p) ==
            Approx(delta * (1.0 + lam) / 8.0 - b / 2.0).margin(1e-12));
    }
  }

  SECTION("singlet dimers at lambda = 0: -3/8") {
    auto s = singlet_dimer_state();
    model::ModelParams p{1.0, 0.0, 1.0, 0.0};
    CHECK(itebd::energy_per_site(s, p) == Approx(-3.0 / 8).margin(1e-12));
  }
}

TEST_CASE("ground-state search") {
  SECTION("lambda = 0 dimer point") {
    model::ModelParams p{1.0, 0.0, 1.0, 0.0};
    auto r = itebd::ground_state(p, 4, quick_schedule(), 11);
    CHECK(r.energy_per_site == Approx(-3.0 / 8).margin(1e-8));
    CHECK(imps::bond_entropy(r.state, Parity::odd) == Approx(1.0).margin(1e-7));
    CHECK(imps::bond_entropy(r.state, Parity::even) == Approx(0.0).margin(1e-7));
  }

  SECTION("deep polarized phase collapses to the product state") {
    model::ModelParams p{1.0, 0.0, 1.0, 2.0};
    auto r = itebd::ground_state(p, 2, quick_schedule(), 4);
    CHECK(r.energy_per_site == Approx(1.0 / 8 - 1.0).margin(1e-8));
    auto rho = imps::rdm_site(r.state, Parity::odd);
    CHECK(std::abs(rho.matrix(0, 0) - cplx(1.0)) < 1e-8);
  }

  SECTION("Heisenberg point sanity at modest chi") {
    model::ModelParams p{1.0, 1.0, 1.0, 0.0};
    auto r = itebd::ground_state(p, 16, quick_schedule(1e-7, 1200), 1);
    CHECK(r.energy_per_site == Approx(0.25 - std::log(2.0)).margin(2e-4));
    CHECK(r.max_truncation_error < 1e-3);
  }

  SECTION("gapped point agrees with N = 12 dense diagonalization to 1e-3") {
    model::ModelParams p{1.0, 0.5, 1.0, 0.0};
    auto r = itebd::ground_state(p, 16, quick_schedule(1e-7, 1200), 2);
    auto e = ed::ed_ground_state(p, 12, ed::Boundary::periodic);
    CHECK(std::abs(r.energy_per_site - e.energy / 12) < 1e-3);
  }

  SECTION("chi < 1 rejected, bad schedule rejected") {
    model::ModelParams p{1.0, 0.5, 1.0, 0.0};
    CHECK_THROWS_AS(itebd::ground_state(p, 0, quick_schedule(), 1), std::invalid_argument);
    itebd::Schedule bad;
    bad.tau_shrink = 0.5;
    CHECK_THROWS_AS(itebd::ground_state(p, 4, bad, 1), std::invalid_argument);
  }
}

TEST_CASE("convergence bookkeeping") {
  model::ModelParams p{1.0, 0.5, 1.0, 0.0};

  SECTION("energy trace non-increasing within each tau stage") {
    auto r = itebd::ground_state(p, 12, quick_schedule(1e-6, 800), 3);
    REQUIRE(r.trace.size() > 3);
    for (size_t i = 1; i < r.trace.size(); ++i)
      if (r.trace[i].tau == r.trace[i - 1].tau)
        CHECK(r.trace[i].energy <= r.trace[i - 1].energy + 1e-9);
  }

  SECTION("energy independent of the seed at a gapped point") {
    std::vector<double> es;
    for (std::uint64_t seed : {1ull, 2ull, 3ull})
      es.push_back(itebd::ground_state(p, 12, quick_schedule(1e-8, 1500), seed).energy_per_site);
    CHECK(std::abs(es[0] - es[1]) < 1e-8);
    CHECK(std::abs(es[0] - es[2]) < 1e-8);
  }

  SECTION("converged state is invariant under one more gate pair at floor tau") {
    auto r = itebd::ground_state(p, 12, quick_schedule(1e-8, 1500), 7);
    CHECK(r.converged);
    const double tau_last = r.trace.back().tau;
    auto g_odd = model::trotter_gate(model::bond_hamiltonian(p, Parity::odd), tau_last);
    auto g_even = model::trotter_gate(model::bond_hamiltonian(p, Parity::even), tau_last);
    auto s1 = imps::apply_gate(r.state, g_odd, 12);
    auto s2 = imps::apply_gate(s1.state, g_even, 12);
    CHECK(std::abs(itebd::energy_per_site(s2.state, p) - r.energy_per_site) < 1e-10);
    CHECK(obs::fidelity_per_site(r.state, s2.state) > 1.0 - 1e-10);
  }

  SECTION("trace file round trip") {
    auto r = itebd::ground_state(p, 6, quick_schedule(1e-4, 200), 9);
    const std::string path = "trace_test.csv";
    itebd::write_trace_csv(r, path);
    std::ifstream is(path);
    REQUIRE(is.good());
    std::string header;
    std::getline(is, header);
    CHECK(header == "tau,iteration,energy,truncation_error");
    int lines = 0;
    for (std::string l; std::getline(is, l);) ++lines;
    CHECK(lines == static_cast<int>(r.trace.size()));
    std::remove(path.c_str());
  }
}

TEST_CASE("warm start reuses a previous state") {
  model::ModelParams p{1.0, 0.5, 1.0, 0.1};
  auto cold = itebd::ground_state(p, 10, quick_schedule(1e-7, 1000), 21);
  model::ModelParams p2 = p;
  p2.b = 0.12;
  itebd::Schedule warm = quick_schedule(1e-7, 1000);
  warm.tau_initial = 0.01;
  auto warmed = itebd::ground_state_from(cold.state, p2, 10, warm);
  auto cold2 = itebd::ground_state(p2, 10, quick_schedule(1e-7, 1500), 22);
  CHECK(std::abs(warmed.energy_per_site - cold2.energy_per_site) < 1e-6);
  CHECK(warmed.iterations < cold2.iterations);
}
