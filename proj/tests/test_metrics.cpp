#include <catch2/catch_amalgamated.hpp>

#include "predsym/metrics.hpp"
#include "predsym/rng.hpp"

#include "helpers.hpp"

using namespace predsym;

TEST_CASE("correlation on small hand-checkable vectors") {
  auto res = pearson({1, 2, 3, 4}, {1, 3, 2, 4});
  CHECK(res.r == Catch::Approx(0.8).margin(1e-9));
  CHECK(res.p == Catch::Approx(0.2).margin(1e-9));
  CHECK(res.n == 4);

  CHECK(pearson({1, 2, 3}, {1, 2, 3}).r == Catch::Approx(1.0).margin(1e-12));
  CHECK(pearson({1, 2, 3}, {1, 2, 3}).p == 0.0);
  CHECK(pearson({1, 2, 3}, {3, 2, 1}).r == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("correlation matches the reference implementation on a 10-pair set") {
  std::vector<double> a = {2.1, 3.4, 1.2, 4.8, 3.3, 2.2, 4.9, 0.7, 3.1, 2.6};
  std::vector<double> b = {1.9, 3.0, 1.5, 4.1, 3.6, 2.0, 4.4, 1.1, 2.7, 3.2};
  auto res = pearson(a, b);
  CHECK(res.r == Catch::Approx(0.957801652338).epsilon(1e-9));
  CHECK(res.p == Catch::Approx(1.318245605723e-05).epsilon(1e-9));
}

TEST_CASE("correlation is invariant under positive affine maps") {
  Rng rng(11);
  std::vector<double> a(20);
  for (auto &x : a) x = rng.u01();
  std::vector<double> up(20), down(20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    up[i] = 3.0 * a[i] + 2.0;
    down[i] = -2.0 * a[i] + 5.0;
  }
  CHECK(pearson(a, up).r == Catch::Approx(1.0).margin(1e-12));
  CHECK(pearson(a, down).r == Catch::Approx(-1.0).margin(1e-12));
  CHECK(pearson(a, up).p == 0.0);
}

TEST_CASE("correlation input validation") {
  try {
    pearson({1, 1, 1, 1}, {1, 2, 3, 4});
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.code() == Code::ConstantInput);
  }
  CHECK_THROWS_AS(pearson({1, 2, 3, 4}, {1, 1, 1, 1}), Error);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2}), Error);  // too few pairs
}

TEST_CASE("t distribution tail probabilities match reference values") {
  CHECK(t_two_sided_p(2.5, 8) == Catch::Approx(3.694203771362e-02).epsilon(1e-8));
  CHECK(t_two_sided_p(0.3, 38) == Catch::Approx(7.658121779878e-01).epsilon(1e-8));
  CHECK(t_two_sided_p(12.0, 398) == Catch::Approx(1.575674340636e-28).epsilon(1e-8));
  CHECK(t_two_sided_p(1.96, 100) == Catch::Approx(5.277890136623e-02).epsilon(1e-8));
  CHECK(t_two_sided_p(0.0, 10) == Catch::Approx(1.0).margin(1e-12));
  CHECK(t_two_sided_p(-2.5, 8) == Catch::Approx(t_two_sided_p(2.5, 8)).epsilon(1e-12));
}

TEST_CASE("regularized incomplete beta: reference values and identities") {
  // closed form: I_x(2,3) = 1 - (1-x)^3 (1+3x)
  CHECK(betainc_reg(2, 3, 0.3) == Catch::Approx(0.3483).epsilon(1e-10));
  CHECK(betainc_reg(0.5, 19, 0.72) == Catch::Approx(9.999999999953e-01).epsilon(1e-8));
  CHECK(betainc_reg(19, 0.5, 0.05) == Catch::Approx(2.512985564357e-26).epsilon(1e-8));
  CHECK(betainc_reg(9, 0.5, 0.5) == Catch::Approx(4.895949065736e-04).epsilon(1e-8));

  CHECK(betainc_reg(2, 3, 0.0) == 0.0);
  CHECK(betainc_reg(2, 3, 1.0) == 1.0);
  CHECK(betainc_reg(1, 1, 0.42) == Catch::Approx(0.42).epsilon(1e-12));  // uniform

  // reflection: I_x(a,b) + I_{1-x}(b,a) = 1
  for (double a : {0.5, 2.0, 7.5}) {
    for (double b : {1.0, 3.5, 12.0}) {
      for (double x : {0.1, 0.35, 0.6, 0.9}) {
        CAPTURE(a, b, x);
        CHECK(betainc_reg(a, b, x) + betainc_reg(b, a, 1.0 - x) ==
              Catch::Approx(1.0).margin(1e-10));
      }
    }
  }
}

TEST_CASE("mean squared error identities") {
  CHECK(mse({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(mse({2, 2}, {1, 3}) == 1.0);
  CHECK(mse({0, 0, 0, 0}, {2, 2, 2, 2}) == 4.0);

  Rng rng(5);
  std::vector<double> p(10), t(10);
  for (std::size_t i = 0; i < 10; ++i) {
    p[i] = rng.u01() * 4 + 1;
    t[i] = rng.u01() * 4 + 1;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < 10; ++i) acc += (p[i] - t[i]) * (p[i] - t[i]);
  CHECK(mse(p, t) == Catch::Approx(acc / 10.0).epsilon(1e-14));

  // zero only when vectors coincide
  auto q = p;
  q[3] += 1e-6;
  CHECK(mse(p, q) > 0.0);

  CHECK_THROWS_AS(mse({1, 2}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(mse({}, {}), Error);
}

TEST_CASE("chance-corrected agreement") {
  CHECK(cohens_kappa<int>({1, 2, 3, 1}, {1, 2, 3, 1}) == 1.0);
  // agreement exactly at chance level
  CHECK(cohens_kappa<int>({1, 1, 2, 2}, {1, 2, 1, 2}) == Catch::Approx(0.0).margin(1e-12));
  // five of six agree, balanced marginals: kappa 2/3
  CHECK(cohens_kappa<int>({1, 1, 2, 2, 2, 1}, {1, 1, 2, 2, 1, 1}) ==
        Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  // both raters constant on the same category
  CHECK(cohens_kappa<int>({1, 1, 1}, {1, 1, 1}) == 1.0);
  // disjoint label sets: no expected agreement, none observed
  CHECK(cohens_kappa<int>({1, 1}, {2, 2}) == Catch::Approx(0.0).margin(1e-12));

  CHECK(cohens_kappa<std::string>({"a", "a", "b", "b"}, {"a", "b", "a", "b"}) ==
        Catch::Approx(0.0).margin(1e-12));

  CHECK_THROWS_AS(cohens_kappa<int>({1}, {1, 2}), Error);
  CHECK_THROWS_AS(cohens_kappa<int>({}, {}), Error);
}
