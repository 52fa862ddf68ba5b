#include "oracles.hpp"

#include "leaftree/bounds.hpp"
#include "leaftree/height_dp.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace leaftree;

namespace {

constexpr double kE = std::numbers::e;

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int n = lo; n <= hi; ++n) v.push_back(n);
  return v;
}

}  // namespace

TEST_CASE("psi envelope") {
  for (int n = 2; n <= 300; ++n) {
    CHECK(psi_envelope(SplitKernel::bst(), n) == doctest::Approx(2.0 / (n - 1)).epsilon(1e-14));
    CHECK(psi_envelope(SplitKernel::uniform(), n) >= 0.5);
  }
  const auto half = SplitKernel::binomial(0.5);
  CHECK(psi_envelope(half, 100) == doctest::Approx(2 * half.sigma(50, 50)).epsilon(1e-14));
  // Theta(n^-1/2): sqrt(n) * envelope settles near 2 sqrt(2/pi).
  const double scaled = psi_envelope(half, 4000) * std::sqrt(4000.0);
  CHECK(scaled == doctest::Approx(2 * std::sqrt(2 / std::numbers::pi)).epsilon(1e-3));
}

TEST_CASE("balance mass") {
  CHECK(phi_balance(SplitKernel::bst(), 9, 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi_balance(SplitKernel::binomial(0.5), 200, 0.4) >= 0.95);

  // Exact central mass of the uniform row, n = 400, k in [100, 300].
  oracle::Rational mass = 0;
  for (int k = 100; k <= 300; ++k) mass += oracle::uniform_sigma(k, 400 - k);
  const double uni = phi_balance(SplitKernel::uniform(), 400, 0.25);
  CHECK(uni == doctest::Approx(oracle::to_double(mass)).epsilon(1e-11));
  // The descriptor used for the uniform class sits below the exact mass; the
  // local-limit estimate with the (1 - gamma) factor is within 5 percent.
  const double descriptor = 0.5 / std::sqrt(std::numbers::pi * 0.25 * 400);
  CHECK(uni >= descriptor);
  const double local_limit = 0.5 / std::sqrt(std::numbers::pi * 0.25 * 0.75 * 400);
  CHECK(uni / local_limit >= 1 / 1.05);
  CHECK(uni / local_limit <= 1.05);
}

TEST_CASE("corollary closed forms") {
  for (int n : {2, 10, 1000, 1000000}) {
    CHECK(corollary_power_bound(2, 1, n) == doctest::Approx((2 * kE - 1) * std::log(n)).epsilon(1e-14));
    CHECK(corollary_power_bound(2, 1, n) / std::log(n) == doctest::Approx(2 * kE - 1).epsilon(1e-14));
    CHECK(corollary_power_bound(1.5, 1, n) / std::log(n) == doctest::Approx(1.5 * kE - 1).epsilon(1e-14));
  }
  CHECK(corollary_power_bound(1, 0, 100) == doctest::Approx(kE * 100).epsilon(1e-14));
  CHECK(corollary_power_bound(1 / kE, 0.5, 10000) == doctest::Approx(200).epsilon(1e-12));
  CHECK(2 * kE - 1 == doctest::Approx(4.436564).epsilon(1e-6));
}

TEST_CASE("theorem 1 certificate, alpha = 1") {
  const UpperBoundedParams p{2, 1, 2, 0};
  for (int n : {1, 2, 50, 1000}) {
    const auto cert = theorem1_certificate(p, n);
    CHECK(cert.log_theta_prime == doctest::Approx(std::log(2 * kE) + (2 * kE - 1) * std::log(n)));
    CHECK(cert.height_bound == doctest::Approx(std::log(2 * kE) + (2 * kE - 1) * std::log(n) + 2));
    CHECK(cert.log_moment_bound == doctest::Approx(2 + std::log(2 * kE) + (2 * kE - 1) * std::log(n)));
  }
  const auto cond = check_theorem1_conditions(p, 1000);
  CHECK(cond.increasing);
  CHECK(cond.at_one);
  CHECK(cond.dominates);
}

TEST_CASE("theorem 1 certificate, alpha < 1") {
  CHECK(std::exp(log_theta_prime(1 / kE, 0.5, 1.0)) == doctest::Approx(kE * kE));
  const UpperBoundedParams p{1 / kE, 0.5, 3, 0};
  CHECK(check_theorem1_conditions(p, 5000).all());
  for (double x : {1.5, 7.0, 300.0}) {
    // theta' is the derivative of theta.
    const double h = 1e-5 * x;
    const double numeric = (std::exp(log_theta(1 / kE, 0.5, x + h)) - std::exp(log_theta(1 / kE, 0.5, x - h))) / (2 * h);
    CHECK(numeric == doctest::Approx(std::exp(log_theta_prime(1 / kE, 0.5, x))).epsilon(1e-6));
  }
  CHECK_THROWS_AS(theorem1_certificate({0.2, 1, 2, 0}, 5), std::invalid_argument);
  CHECK_THROWS_AS(theorem1_certificate({1, 1.5, 2, 0}, 5), std::invalid_argument);
}

TEST_CASE("theorem 1 height bound grows like (2e - 1) ln n for any N") {
  const UpperBoundedParams p{2, 1, 1000, 0};
  const double a = theorem1_certificate(p, 1000).height_bound;
  const double b = theorem1_certificate(p, 1000000).height_bound;
  CHECK((b - a) / (std::log(1e6) - std::log(1e3)) == doctest::Approx(2 * kE - 1).epsilon(1e-12));
}

TEST_CASE("kappa") {
  CHECK(kappa(0.5, 0.25) == doctest::Approx(std::log(6.0) / std::log(4.0 / 3)).epsilon(1e-14));
  CHECK(kappa(0.5, 0.25) == doctest::Approx(6.2289).epsilon(1e-4));
  CHECK(kappa(1.0, 0.25) == doctest::Approx(4.8188).epsilon(1e-4));
  CHECK(std::log(4.0) / std::log(2.0) == doctest::Approx(2.0));
  CHECK(kappa(1.0, 0.4999999) == doctest::Approx(2.0).epsilon(1e-6));
  for (double g : {0.1, 0.2, 0.3, 0.4}) {
    for (double phi : {0.1, 0.3, 0.6, 0.9}) {
      CHECK(kappa(phi + 0.05, g) < kappa(phi, g));
      CHECK(kappa(phi, g + 0.05) < kappa(phi, g));
    }
  }
  CHECK_THROWS(kappa(0.0, 0.25));
}

TEST_CASE("theorem 2 certificate") {
  const WeaklyBalancedParams p{PhiFunction::constant(0.5), 0.25, 2};
  const double k = std::log(6.0) / std::log(4.0 / 3);
  for (int n : {2, 17, 1000}) {
    const auto cert = theorem2_certificate(p, n);
    CHECK(cert.beta == 1.5);
    CHECK(cert.kappa == doctest::Approx(k));
    CHECK(cert.log_moment_bound == doctest::Approx(2 * std::log(2.0) + k * std::log(n)));
    CHECK(cert.height_bound == doctest::Approx((k * std::log2(n) + 2) / std::log2(1.5)));
  }
  CHECK(k / std::log2(1.5) == doctest::Approx(10.65).epsilon(0.01 / 10.65));

  // Binomial(1/2) preset: leading constant kappa / log2(1 + phi) for phi = 0.9, gamma = 0.45.
  const double lead = kappa(0.9, 0.45) / std::log2(1.9);
  CHECK(lead >= 2.0);
  CHECK(lead <= 3.0);
}

TEST_CASE("phi descriptors") {
  CHECK(PhiFunction::constant(0.5)(10) == 0.5);
  CHECK(PhiFunction::inverse_sqrt(0.5)(4) == 0.25);
  const auto t = PhiFunction::table({0.9, 0.8, 0.7});
  CHECK(t(2) == 0.8);
  CHECK(t(50) == 0.7);
  CHECK_THROWS_AS(PhiFunction::constant(1.5)(3), std::domain_error);
  CHECK_THROWS_AS(PhiFunction::inverse_sqrt(2.0)(1), std::domain_error);
}

TEST_CASE("verify examples") {
  const auto up = verify_certificates(SplitKernel::bst(), UpperBoundedParams{2, 1, 2, 1}, range(2, 500));
  CHECK(up.pass);
  CHECK(up.rows.size() == 499);
  CHECK(up.log_base == "ln");

  const auto wb = verify_certificates(SplitKernel::bst(), WeaklyBalancedParams{PhiFunction::constant(0.5), 0.25, 2},
                                      range(2, 500));
  CHECK(wb.pass);
  CHECK(wb.log_base == "log2");
  for (const auto& r : wb.rows) CHECK(r.pass);

  const auto strict = verify_certificates(SplitKernel::bst(),
                                          WeaklyBalancedParams{PhiFunction::constant(0.99), 0.45, 2}, range(2, 100));
  CHECK_FALSE(strict.pass);
  bool any_failed = false;
  for (const auto& r : strict.rows) any_failed = any_failed || !r.membership_ok;
  CHECK(any_failed);
  CHECK_FALSE(strict.soundness_violation);
}

TEST_CASE("membership is cumulative") {
  // Table row at n = 6 breaks the balance condition; every later row inherits it.
  const auto k = SplitKernel::table({{6, {0.5, 0.0, 0.0, 0.0, 0.5}}}, KernelKind::bst);
  const auto r = verify_certificates(k, WeaklyBalancedParams{PhiFunction::constant(0.5), 0.25, 2}, range(2, 12));
  for (const auto& row : r.rows) CHECK(row.membership_ok == (row.n < 6));
}

TEST_CASE("certificate soundness") {
  struct Case {
    SplitKernel kernel;
    ClassParams params;
  };
  const std::vector<Case> cases = {
      {SplitKernel::bst(), UpperBoundedParams{2, 1, 2, 1}},
      {SplitKernel::bst(), UpperBoundedParams{3, 1, 2, 0}},
      {SplitKernel::bst(), WeaklyBalancedParams{PhiFunction::constant(0.5), 0.25, 2}},
      {SplitKernel::bst(), WeaklyBalancedParams{PhiFunction::constant(0.3), 0.1, 2}},
      {SplitKernel::binomial(0.5), UpperBoundedParams{1, 0.5, 2, 0}},
      {SplitKernel::binomial(0.5), WeaklyBalancedParams{PhiFunction::constant(0.6), 0.3, 2}},
      {SplitKernel::binomial(0.3), WeaklyBalancedParams{PhiFunction::constant(0.5), 0.2, 2}},
      {SplitKernel::uniform(), UpperBoundedParams{1, 0, 2, 0}},
      {SplitKernel::uniform(), WeaklyBalancedParams{PhiFunction::inverse_sqrt(0.5), 0.25, 2}},
  };
  for (const auto& c : cases) {
    const auto r = verify_certificates(c.kernel, c.params, range(2, 300));
    CAPTURE(r.kernel);
    CAPTURE(r.params);
    CHECK_FALSE(r.soundness_violation);
    for (const auto& row : r.rows) {
      if (row.membership_ok) {
        CHECK(row.moment_ok);
        CHECK(row.height_ok);
      }
    }
  }
}

TEST_CASE("presets") {
  CHECK(preset_names().size() == 4);
  for (const auto& name : preset_names()) {
    const auto p = make_preset(name, 600);
    CHECK(p.name == name);
    const auto r = verify_certificates(p.kernel, p.params, range(2, 600));
    CAPTURE(name);
    CHECK(r.pass);
  }
  const auto bin = make_preset("bin-wbal:0.3", 600);
  const auto& wb = std::get<WeaklyBalancedParams>(bin.params);
  CHECK(bin.N_empirical);
  CHECK(wb.gamma == doctest::Approx(0.27));
  for (int n = wb.N; n <= 600; ++n) CHECK(phi_balance(bin.kernel, n, wb.gamma) >= 0.9 - kBoundSlack);
  CHECK_THROWS(make_preset("nope", 100));
}
