#include <cmath>

#include "doctest.h"
#include "oracles.h"
#include "tlp/error.h"
#include "tlp/metrics.h"

using namespace tlp;
using namespace tlp::eval;

TEST_SUITE("eval") {
  TEST_CASE("auc examples") {
    CHECK(auc(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}).auc == 1.0);
    CHECK(auc(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}).auc == 0.5);
    const auto r = auc(std::vector<double>{0.8, 0.8, 0.6, 0.2}, std::vector<int>{1, 0, 1, 0});
    CHECK(r.auc == 0.625);
    CHECK(r.n_pos == 2);
    CHECK(r.n_neg == 2);
  }

  TEST_CASE("auc rejects single-class input and length mismatch") {
    CHECK_THROWS_WITH_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}),
                         doctest::Contains("AUC undefined"), Error);
    CHECK_THROWS_AS(auc(std::vector<double>{0.1}, std::vector<int>{1, 0}), Error);
  }

  TEST_CASE("auc matches the pairwise oracle, monotone transforms and label flips") {
    Rng rng(8);
    for (int t = 0; t < 300; ++t) {
      const std::size_t n = 2 + rng.uniform_index(120);
      std::vector<double> s(n);
      std::vector<int> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(rng.uniform_index(t % 2 ? 5 : 1000)) / 7.0;
        y[i] = static_cast<int>(rng.uniform_index(2));
      }
      y[0] = 1;
      y[1] = 0;
      const double a = auc(s, y).auc;
      CHECK(std::abs(a - oracle::pairwise_auc(s, y)) <= 1e-12);

      std::vector<double> warped(n);
      for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(s[i]) * 3.0 - 1.0;
      CHECK(auc(warped, y).auc == doctest::Approx(a).epsilon(1e-15));

      std::vector<int> flipped(n);
      for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - y[i];
      if (t % 2 == 0) {
        // Scores drawn from 1000 values have few ties; the identity holds
        // with ties too since each tie contributes 0.5 to both sides.
        CHECK(a + auc(s, flipped).auc == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("tscore examples") {
    CHECK(tscore({0.75, {0.5, 0.75}}) == 0.6);          // mean 0.625, std 0.125
    CHECK(tscore({0.625, {0.5, 0.625, 0.75}}) == 0.5);  // self at the mean
    CHECK(tscore({0.8, {0.6, 0.8}}) == doctest::Approx(0.6).epsilon(1e-12));
  }

  TEST_CASE("tscore sample std and errors") {
    // mean 0.625, sample std = sqrt(2 * 0.125^2) = 0.1767767
    CHECK(tscore({0.75, {0.5, 0.75}}, StdKind::kSample) ==
          doctest::Approx(0.125 / std::sqrt(2.0 * 0.015625) * 0.1 + 0.5));
    CHECK_THROWS_AS(tscore({0.7, {0.7, 0.7}}), Error);
    CHECK_THROWS_AS(tscore({0.9, {0.7, 0.8}}), Error);
  }

  TEST_CASE("tscore increases with auc_self") {
    const std::vector<double> others = {0.55, 0.61, 0.7, 0.72};
    double prev = -1e9;
    for (double self = 0.5; self <= 0.95; self += 0.05) {
      auto all = others;
      all.push_back(self);
      const double t = tscore({self, all});
      CHECK(t > prev);
      prev = t;
    }
  }

  TEST_CASE("average tscore") {
    CHECK(average_tscore(0.5, 0.5) == 0.5);
    CHECK(average_tscore(0.6, 0.4) == 0.5);
  }

  TEST_CASE("auc formatting uses nine decimals") {
    const AucResult r{0.625, 2, 2};
    CHECK(format_auc(r, false).find("0.625000000") != std::string::npos);
    CHECK(format_auc(r, true).find(',') != std::string::npos);
  }
}
