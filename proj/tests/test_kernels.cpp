#include "oracles.hpp"

#include "leaftree/binary_tree.hpp"
#include "leaftree/split_kernel.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <doctest.h>

#include <cmath>

using namespace leaftree;

namespace {

std::vector<SplitKernel> builtin_kernels() {
  return {SplitKernel::bst(), SplitKernel::uniform(), SplitKernel::binomial(0.3),
          SplitKernel::binomial(0.5), SplitKernel::binomial(0.7)};
}

BinaryTree cherry() { return BinaryTree::node(BinaryTree::leaf(), BinaryTree::leaf()); }

void check_row(const std::vector<double>& got, const std::vector<double>& want, double eps) {
  REQUIRE(got.size() == want.size());
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(eps));
}

}  // namespace

TEST_CASE("sigma examples") {
  CHECK(SplitKernel::bst().sigma(3, 7) == doctest::Approx(1.0 / 9).epsilon(1e-15));
  CHECK(SplitKernel::uniform().sigma(1, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(SplitKernel::binomial(0.5).sigma(2, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(SplitKernel::bst().sigma(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(SplitKernel::binomial(1.5), KernelSpecError);
  CHECK_THROWS_AS(SplitKernel::binomial(0.0), KernelSpecError);
}

TEST_CASE("split pmf rows") {
  check_row(split_pmf(SplitKernel::bst(), 4), {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-15);
  check_row(split_pmf(SplitKernel::uniform(), 4), {0.4, 0.2, 0.4}, 1e-15);
  check_row(split_pmf(SplitKernel::binomial(0.5), 4), {0.25, 0.5, 0.25}, 1e-15);
  CHECK(split_pmf(SplitKernel::bst(), 2) == std::vector<double>{1.0});
}

TEST_CASE("uniform kernel matches exact Catalan ratios on both sides of the switchover") {
  const auto k = SplitKernel::uniform();
  for (int n = 2; n <= 34; ++n) {
    for (int i = 1; i < n; ++i) {
      const double want = oracle::to_double(oracle::uniform_sigma(i, n - i));
      CHECK(k.sigma(i, n - i) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  // A lower switchover must give the same numbers through the log-space path.
  const auto logspace = SplitKernel::uniform(KernelOptions{2, 4096});
  for (int n = 3; n <= 34; ++n) {
    for (int i = 1; i < n; ++i) {
      CHECK(logspace.sigma(i, n - i) == doctest::Approx(k.sigma(i, n - i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("binomial kernel against direct evaluation") {
  for (double p : {0.3, 0.5, 0.7}) {
    const auto k = SplitKernel::binomial(p);
    for (int n = 2; n <= 40; ++n) {
      for (int i = 1; i < n; ++i) {
        const double want = std::pow(p, i - 1) * std::pow(1 - p, n - i - 1) *
                            std::exp(std::lgamma(n - 1.0) - std::lgamma(static_cast<double>(i)) -
                                     std::lgamma(static_cast<double>(n - i)));
        CHECK(k.sigma(i, n - i) == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("large binomial rows against the library pdf") {
  for (double p : {0.05, 0.3, 0.5, 0.9}) {
    const auto row = split_pmf(SplitKernel::binomial(p), 3000);
    const boost::math::binomial_distribution<double> dist(2998, p);
    for (int k = 0; k <= 2998; ++k) {
      const double want = boost::math::pdf(dist, k);
      if (want < 1e-290) continue;
      CHECK(row[k] == doctest::Approx(want).epsilon(1e-11));
    }
  }
}

TEST_CASE("kernels beyond the row cache") {
  const auto k = SplitKernel::bst();
  CHECK(k.sigma(5000, 5001) == doctest::Approx(1.0 / 10000).epsilon(1e-15));
  const auto u = SplitKernel::uniform(KernelOptions{30, 64});
  CHECK(u.sigma(50, 50) == doctest::Approx(SplitKernel::uniform().sigma(50, 50)).epsilon(1e-12));
}

TEST_CASE("validate examples") {
  CHECK(validate_kernel(SplitKernel::bst(), 1000, 1e-12).pass);
  CHECK(validate_kernel(SplitKernel::binomial(0.3), 1000, 1e-9).pass);
  CHECK(validate_kernel(SplitKernel::uniform(), 1000, 1e-12).pass);

  const auto bad = SplitKernel::table({{5, {0.3, 0.3, 0.2, 0.1}}}, KernelKind::bst);
  const auto report = validate_kernel(bad, 10, 1e-9);
  CHECK_FALSE(report.pass);
  REQUIRE(report.first_failure);
  CHECK(*report.first_failure == 5);
  CHECK(report.rows.size() == 9);
  CHECK(report.rows[3].deviation == doctest::Approx(0.1));
}

TEST_CASE("table kernels fall back for uncovered sizes") {
  const auto t = SplitKernel::table({{3, {0.25, 0.75}}}, KernelKind::binomial, 0.3);
  CHECK(t.sigma(1, 2) == 0.25);
  CHECK(t.sigma(2, 1) == 0.75);
  CHECK(t.effective_kind(3) == KernelKind::table);
  CHECK(t.effective_kind(4) == KernelKind::binomial);
  CHECK(t.sigma(2, 2) == doctest::Approx(SplitKernel::binomial(0.3).sigma(2, 2)));
  CHECK(validate_kernel(t, 200, 1e-9).pass);
  CHECK_THROWS_AS(SplitKernel::table({{4, {0.5, 0.5}}}, KernelKind::bst), KernelSpecError);
  CHECK_THROWS_AS(SplitKernel::table({{3, {1.2, -0.2}}}, KernelKind::bst), KernelSpecError);
  CHECK_THROWS_AS(SplitKernel::table({}, KernelKind::table), KernelSpecError);
}

TEST_CASE("tree probability examples") {
  for (const auto& k : builtin_kernels()) {
    const auto p = tree_probability(k, BinaryTree::leaf());
    CHECK(p.probability == 1.0);
    CHECK(p.log_probability == 0.0);
  }
  const auto t = BinaryTree::node(cherry(), BinaryTree::leaf());
  CHECK(tree_probability(SplitKernel::bst(), t).probability == doctest::Approx(0.5).epsilon(1e-15));
  for (const auto& tree : enumerate_trees(5)) {
    CHECK(tree_probability(SplitKernel::uniform(), tree).probability ==
          doctest::Approx(1.0 / 14).epsilon(1e-15));
  }
}

TEST_CASE("normalization over all trees") {
  for (const auto& k : builtin_kernels()) {
    for (int n = 1; n <= 12; ++n) {
      double sum = 0.0, comp = 0.0;
      for_each_tree(n, [&](const BinaryTree& t) {
        const double y = tree_probability(k, t).probability - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
      });
      CAPTURE(k.label());
      CAPTURE(n);
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("uniform kernel gives every tree the same probability") {
  const auto k = SplitKernel::uniform();
  for (int n = 1; n <= 12; ++n) {
    const double want = 1.0 / static_cast<double>(oracle::catalan(n - 1));
    for_each_tree(n, [&](const BinaryTree& t) {
      CHECK(std::abs(tree_probability(k, t).probability - want) <= 1e-12);
    });
  }
}

TEST_CASE("kernel symmetry") {
  const auto p3 = SplitKernel::binomial(0.3);
  const auto p7 = SplitKernel::binomial(0.7);
  for (const auto& k : {SplitKernel::bst(), SplitKernel::uniform(), SplitKernel::binomial(0.5)}) {
    for (int n = 2; n <= 200; n += 7) {
      for (int i = 1; i < n; ++i) CHECK(k.sigma(i, n - i) == doctest::Approx(k.sigma(n - i, i)).epsilon(1e-13));
    }
  }
  for (int n = 2; n <= 200; n += 7) {
    for (int i = 1; i < n; ++i) CHECK(p3.sigma(i, n - i) == doctest::Approx(p7.sigma(n - i, i)).epsilon(1e-12));
  }
}

TEST_CASE("log probability agrees with the linear product") {
  for (const auto& k : builtin_kernels()) {
    for (int n = 2; n <= 9; ++n) {
      for_each_tree(n, [&](const BinaryTree& t) {
        const auto p = tree_probability(k, t);
        if (p.probability > 1e-300) {
          CHECK(std::exp(p.log_probability) == doctest::Approx(p.probability).epsilon(1e-9));
        }
      });
    }
  }
}

TEST_CASE("exact sigma") {
  CHECK(exact_sigma(SplitKernel::bst(), 3, 7) == oracle::Rational(1, 9));
  CHECK(exact_sigma(SplitKernel::uniform(), 2, 3) == oracle::uniform_sigma(2, 3));
  CHECK(exact_sigma(SplitKernel::binomial(0.5), 2, 2) == oracle::Rational(1, 2));
}

TEST_CASE("kernel spec JSON") {
  CHECK(parse_kernel_spec(R"({"kind":"bst"})").kind == KernelKind::bst);
  const auto bin = parse_kernel_spec(R"({"kind":"binomial","p":0.5})");
  CHECK(bin.kind == KernelKind::binomial);
  CHECK(bin.p == 0.5);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"kind":"binomial","p":1.5})"), KernelSpecError);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"kind":"binomial"})"), KernelSpecError);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"kind":"bst","p":0.5})"), KernelSpecError);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"kind":"nope"})"), KernelSpecError);
  CHECK_THROWS_AS(parse_kernel_spec("[1,2"), KernelSpecError);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"kind":"table","rows":{"3":[0.5,0.5]}})"), KernelSpecError);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"kind":"table","rows":{"3":[0.5,0.5]},"fallback":"bst","fallback_p":0.2})"),
                  KernelSpecError);

  try {
    parse_kernel_spec(R"({"kind":"table","fallback":"bst","rows":{"3":[0.5,0.5],"7":[0.1,0.1,0.1,0.1,0.1,0.4]}})");
    FAIL("expected a row error");
  } catch (const KernelRowError& e) {
    CHECK(e.n() == 7);
    CHECK(std::string(e.what()).find("n = 7") != std::string::npos);
  }

  const std::vector<KernelSpec> specs = {
      SplitKernel::bst().spec(), SplitKernel::uniform().spec(), SplitKernel::binomial(0.3).spec(),
      SplitKernel::table({{3, {0.25, 0.75}}, {4, {0.2, 0.6, 0.2}}}, KernelKind::binomial, 0.7).spec(),
      SplitKernel::table({{2, {1.0}}}, KernelKind::uniform).spec()};
  for (const auto& spec : specs) {
    CHECK(parse_kernel_spec(render_kernel_spec(spec)) == spec);
  }
}
