#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pzlab/memory_kernel.hpp"

using namespace pzlab;
using Catch::Approx;

TEST_CASE("exponential kernel closed forms") {
  auto k = exponential_kernel(1.0, 2.0);
  CHECK(k.g(0.0) == Approx(1.0));
  CHECK(k.d_sigma == 2.0);
  CHECK(k.sigma_prime(0.7) == Approx(-2.0 * k.sigma(0.7)));  // Dafermos with equality

  auto k3 = exponential_kernel(3.0, 1.0);
  CHECK(k3.sigma(0.0) == Approx(3.0));
  CHECK(k3.g(1.0) == Approx(3.0 * std::exp(-1.0)));
}

TEST_CASE("exponential kernel rejects nonpositive arguments") {
  CHECK_THROWS_AS(exponential_kernel(0.0, 2.0), NonPositiveError);
  CHECK_THROWS_AS(exponential_kernel(1.0, -1.0), NonPositiveError);
}

TEST_CASE("quadrature mass within declared tolerance and tail") {
  auto k = exponential_kernel(1.0, 2.0);
  auto q = build_quadrature(k, 64, 10.0);
  double mass = q.mass(k) + q.tail_bound;
  CHECK(std::abs(mass - k.g0) <= q.mass_tol + q.tail_bound);
  CHECK(q.tail_bound == Approx(std::exp(-20.0)));
  for (double w : q.weights) CHECK(w > 0.0);
  for (int j = 1; j < q.count(); ++j) CHECK(q.nodes[j] > q.nodes[j - 1]);
  CHECK(q.nodes.front() == 0.0);
  CHECK(q.nodes.back() == 10.0);
}

TEST_CASE("degenerate two-node quadrature is valid") {
  auto k = exponential_kernel(1.0, 2.0);
  auto q = build_quadrature(k, 2, 10.0);
  REQUIRE(q.count() == 2);
  CHECK(q.nodes[0] == 0.0);
  CHECK(q.nodes[1] == 10.0);
  CHECK(q.weights[0] > 0.0);
  CHECK(q.weights[1] > 0.0);
}

TEST_CASE("doubling N_s at least halves the mass error") {
  auto k = exponential_kernel(1.0, 2.0);
  double prev = -1.0;
  for (int Ns : {16, 32, 64, 128}) {
    auto q = build_quadrature(k, Ns, 10.0);
    double err = std::abs(q.mass(k) + q.tail_bound - k.g0);
    if (prev > 0) CHECK(err <= 0.5 * prev);
    prev = err;
  }
}

TEST_CASE("mass error + tail monotone under refinement in N_s and S_max") {
  auto k = exponential_kernel(1.0, 2.0);
  double e1 = std::abs(build_quadrature(k, 32, 8.0).mass(k) +
                       build_quadrature(k, 32, 8.0).tail_bound - 1.0);
  double e2 = std::abs(build_quadrature(k, 64, 8.0).mass(k) +
                       build_quadrature(k, 64, 8.0).tail_bound - 1.0);
  double e3 = std::abs(build_quadrature(k, 64, 12.0).mass(k) +
                       build_quadrature(k, 64, 12.0).tail_bound - 1.0);
  CHECK(e2 <= e1 * (1 + 1e-12));
  CHECK(e3 <= e2 * (1 + 1e-9));
}

TEST_CASE("hypothesis check: exponential passes everything") {
  auto k = exponential_kernel(1.0, 2.0);
  auto q = build_quadrature(k, 64, 10.0);
  auto rep = check_hypothesis_H(k, q);
  CHECK(rep.mass_ok);
  CHECK(rep.monotone_ok);
  CHECK(rep.dafermos_ok);
  CHECK(rep.pass());
}

TEST_CASE("hypothesis check: polynomial tail fails exactly the Dafermos clause") {
  auto k = polynomial_kernel(1.0, 2.0);  // sigma = 1/(1+s)^2, g0 = 1
  CHECK(k.sigma(1.0) == Approx(0.25));
  auto q = build_quadrature(k, 96, 40.0);
  auto rep = check_hypothesis_H(k, q);
  CHECK(rep.mass_ok);
  CHECK(rep.monotone_ok);
  CHECK_FALSE(rep.dafermos_ok);
  // oracle: sigma'/sigma = -2/(1+s), so the worst violation on the nodes is
  // sigma'(S)+2 sigma(S) = sigma(S)(2 - 2/(1+S)) at the largest age
  double S = q.nodes.back();
  CHECK(rep.dafermos_margin ==
        Approx(k.sigma(S) * (k.d_sigma - 2.0 / (1.0 + S))).epsilon(1e-6));
}

TEST_CASE("hypothesis check: zero kernel fails the mass clause") {
  auto k = zero_kernel();
  auto q = build_quadrature(exponential_kernel(1.0, 2.0), 16, 5.0);
  auto rep = check_hypothesis_H(k, q);
  CHECK_FALSE(rep.mass_ok);
}

TEST_CASE("sampled kernel reproduces tabulated values") {
  std::vector<std::pair<double, double>> rows;
  for (int i = 0; i <= 200; ++i) {
    double s = i * 0.05;
    rows.emplace_back(s, 2.0 * std::exp(-2.0 * s));
  }
  auto k = sampled_kernel(rows);
  CHECK(k.sigma(0.5) == Approx(2.0 * std::exp(-1.0)).epsilon(1e-3));
  CHECK(k.g0 == Approx(1.0).epsilon(1e-3));
  CHECK(k.d_sigma == Approx(2.0).epsilon(0.1));
  auto q = build_quadrature(k, 48, 10.0);
  auto rep = check_hypothesis_H(k, q);
  CHECK(rep.monotone_ok);
}
