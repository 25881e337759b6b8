#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "altchain/imps.hpp"
#include "altchain/linalg.hpp"
#include "altchain/model.hpp"
#include "altchain/observables.hpp"

using namespace altchain;
using Catch::Approx;

namespace {

Eigen::Vector4cd singlet_vec() {
  return {0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0};
}

imps::DensityMatrix dm(const Eigen::MatrixXcd& m, const char* label = "test") {
  return {m, label};
}

/// Random density matrix from a Ginibre draw (deterministic in the rng).
imps::DensityMatrix random_dm(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return dm(rho, "random");
}

/// Wootters concurrence through the spin-flipped-state route:
/// R = sqrt(sqrt(rho) rho~ sqrt(rho)), C = max(0, 2 max_eig(R) - tr R).
double concurrence_flip_route(const imps::DensityMatrix& rho) {
  const auto op = model::spin_operators();
  const Eigen::Matrix4cd yy = model::kron2(2.0 * op.sy, 2.0 * op.sy);
  const Eigen::Matrix4cd flipped = yy * rho.matrix.conjugate() * yy;
  auto eig = linalg::herm_eig(rho.matrix);
  Eigen::Matrix4cd sqrt_rho = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i)
    sqrt_rho += std::sqrt(std::max(0.0, eig.values[i])) * eig.vectors.col(i) *
                eig.vectors.col(i).adjoint();
  auto eig2 = linalg::herm_eig(Eigen::MatrixXcd(sqrt_rho * flipped * sqrt_rho));
  double tr = 0.0, top = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double s = std::sqrt(std::max(0.0, eig2.values[i]));
    tr += s;
    top = std::max(top, s);
  }
  return std::max(0.0, 2.0 * top - tr);
}

}  // namespace

TEST_CASE("fidelity per site") {
  SECTION("a state with itself gives exactly one") {
    for (int chi : {1, 5, 12}) {
      auto s = imps::init_random(chi, 3 * chi + 1);
      CHECK(obs::fidelity_per_site(s, s) == Approx(1.0).margin(1e-10));
    }
  }

  SECTION("orthogonal product states give zero") {
    auto up = imps::init_random(1, 2);
    // overwrite with polarized products
    for (int site = 0; site < 2; ++site) {
      up.gamma[site][0] = Eigen::MatrixXcd::Ones(1, 1);
      up.gamma[site][1] = Eigen::MatrixXcd::Zero(1, 1);
    }
    auto down = up;
    for (int site = 0; site < 2; ++site) std::swap(down.gamma[site][0], down.gamma[site][1]);
    CHECK(obs::fidelity_per_site(up, down) == Approx(0.0).margin(1e-12));
  }

  SECTION("symmetric in its arguments") {
    auto a = imps::init_random(4, 19);
    auto b = imps::init_random(4, 20);
    const double dab = obs::fidelity_per_site(a, b);
    const double dba = obs::fidelity_per_site(b, a);
    CHECK(std::abs(dab - dba) < 1e-10);
    CHECK(dab >= 0.0);
    CHECK(dab <= 1.0);
  }
}

TEST_CASE("concurrence") {
  const Eigen::Vector4cd s = singlet_vec();

  SECTION("singlet projector: 1") {
    CHECK(obs::concurrence(dm(s * s.adjoint())) == Approx(1.0).margin(1e-12));
  }

  SECTION("product state: 0") {
    Eigen::Vector4cd up_down{0.0, 1.0, 0.0, 0.0};
    CHECK(obs::concurrence(dm(up_down * up_down.adjoint())) == Approx(0.0).margin(1e-12));
  }

  SECTION("Werner state p = 1/2: 1/4") {
    const Eigen::Matrix4cd rho =
        0.5 * (s * s.adjoint()) + 0.5 * Eigen::Matrix4cd::Identity() / 4.0;
    CHECK(obs::concurrence(dm(rho)) == Approx(0.25).margin(1e-12));
  }

  SECTION("agrees with the spin-flipped-state route on random density matrices") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 100; ++i) {
      auto rho = random_dm(rng, 4);
      CHECK(std::abs(obs::concurrence(rho) - concurrence_flip_route(rho)) < 1e-10);
    }
  }

  SECTION("non-positive input rejected") {
    Eigen::Matrix4cd bad = Eigen::Matrix4cd::Zero();
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(obs::concurrence(dm(bad)), std::invalid_argument);
  }

  SECTION("wrong dimension rejected") {
    CHECK_THROWS_AS(obs::concurrence(dm(Eigen::Matrix2cd::Identity() / 2.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("entropy") {
  SECTION("pure state: 0") {
    const Eigen::Vector4cd s = singlet_vec();
    CHECK(obs::entropy(dm(s * s.adjoint())) == Approx(0.0).margin(1e-12));
  }

  SECTION("maximally mixed qubit: 1 bit") {
    CHECK(obs::entropy(dm(Eigen::Matrix2cd::Identity() / 2.0)) == Approx(1.0).margin(1e-12));
  }

  SECTION("additive over tensor products") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
      auto a = random_dm(rng, 2);
      auto b = random_dm(rng, 4);
      imps::DensityMatrix ab = dm(Eigen::MatrixXcd(8, 8), "ab");
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          ab.matrix.block(4 * x, 4 * y, 4, 4) = a.matrix(x, y) * b.matrix;
      CHECK(std::abs(obs::entropy(ab) - obs::entropy(a) - obs::entropy(b)) < 1e-10);
    }
  }
}

TEST_CASE("l1 coherence") {
  SECTION("diagonal matrix: 0") {
    CHECK(obs::l1_coherence(dm(Eigen::Matrix4cd::Identity() / 4.0)) == 0.0);
  }

  SECTION("|+><+|: 1") {
    Eigen::Vector2cd plus{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    CHECK(obs::l1_coherence(dm(plus * plus.adjoint())) == Approx(1.0).margin(1e-12));
  }

  SECTION("singlet projector: 1, raw sum: -1") {
    const Eigen::Vector4cd s = singlet_vec();
    auto rho = dm(s * s.adjoint());
    CHECK(obs::l1_coherence(rho) == Approx(1.0).margin(1e-12));
    CHECK(std::abs(obs::l1_coherence_raw(rho) - cplx(-1.0)) < 1e-12);
  }
}

TEST_CASE("Wigner-Yanase skew information") {
  const auto op = model::spin_operators();
  const Eigen::Matrix2cd sigx = 2.0 * op.sx;

  SECTION("commuting pair: 0") {
    Eigen::Matrix2cd rho;
    rho << 0.7, 0.0, 0.0, 0.3;
    CHECK(obs::wysi(dm(rho), Eigen::Matrix2cd(2.0 * op.sz)) == Approx(0.0).margin(1e-14));
  }

  SECTION("|up><up| with sigma_x: 1/2") {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    rho(0, 0) = 1.0;
    CHECK(obs::wysi(dm(rho), sigx) == Approx(0.5).margin(1e-14));
  }

  SECTION("maximally mixed: 0 for any K") {
    CHECK(obs::wysi(dm(Eigen::Matrix2cd::Identity() / 2.0), sigx) == Approx(0.0).margin(1e-14));
  }

  SECTION("invariant under K -> K + c 1") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 20; ++i) {
      auto rho = random_dm(rng, 2);
      const double a = obs::wysi(rho, sigx);
      const double b = obs::wysi(rho, Eigen::Matrix2cd(sigx + 2.7 * Eigen::Matrix2cd::Identity()));
      CHECK(std::abs(a - b) < 1e-12);
    }
  }

  SECTION("dimension mismatch and non-Hermitian K rejected") {
    auto rho = dm(Eigen::Matrix2cd::Identity() / 2.0);
    CHECK_THROWS_AS(obs::wysi(rho, Eigen::Matrix4cd::Identity()), std::invalid_argument);
    Eigen::Matrix2cd nh;
    nh << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(obs::wysi(rho, nh), std::invalid_argument);
  }
}

TEST_CASE("string order parameter") {
  // exact singlet product (lambda = 0 dimer phase): O_x^even(r) = 1 for all odd r
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

  for (int r : {1, 3, 21, 41}) CHECK(obs::string_order(s, r) == Approx(1.0).margin(1e-10));
  CHECK_THROWS_AS(obs::string_order(s, 4), std::invalid_argument);
}
