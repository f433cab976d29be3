#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bcfb/channels.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bcfb;

namespace {

JointPmf delta_noise() {
  std::vector<double> mass(8, 0.0);
  mass[0] = 1.0;
  return JointPmf({{"Z0", 2}, {"Z1", 2}, {"Z2", 2}}, mass);
}

// Z0 = 0, Z1 = Z2 ~ Bern(1/2)
JointPmf correlated_noise() {
  std::vector<double> mass(8, 0.0);
  mass[0] = 0.5;  // (0,0,0)
  mass[3] = 0.5;  // (0,1,1)
  return JointPmf({{"Z0", 2}, {"Z1", 2}, {"Z2", 2}}, mass);
}

}  // namespace

TEST_CASE("noise free three bit pipe is deterministic") {
  Dmbc ch = make_dueck({delta_noise(), {FeedbackConfig::kNoiseless}});
  CHECK(ch.in.size == 8);
  CHECK(ch.out1.size == 4);
  CHECK(ch.fb.size == 8);
  for (int x = 0; x < 8; ++x) {
    int x1 = (x >> 2) & 1, x0 = (x >> 1) & 1, x2 = x & 1;
    int y1 = x1 * 2 + x0, y2 = x0 * 2 + x2, yt = x1 * 4 + x0 * 2 + x2;
    std::size_t col = (static_cast<std::size_t>(y1) * 4 + y2) * 8 + yt;
    CHECK(ch.law.prob(x, col) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("correlated noise marginals") {
  Dmbc ch = make_dueck({correlated_noise(), {FeedbackConfig::kNone}});
  ConditionalPmf m1 = marginal_channel(ch, 1);
  // shared bit arrives clean, the private bit is fully scrambled
  for (int x = 0; x < 8; ++x) {
    int x0 = (x >> 1) & 1;
    for (int y11 = 0; y11 < 2; ++y11)
      CHECK(m1.prob(x, y11 * 2 + x0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  ConditionalPmf m2 = marginal_channel(ch, 2);
  for (int x = 0; x < 8; ++x) {
    int x0 = (x >> 1) & 1;
    for (int y22 = 0; y22 < 2; ++y22)
      CHECK(m2.prob(x, x0 * 2 + y22) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("pairwise noise entropy condition") {
  CHECK(dueck_condition_holds(delta_noise()));
  CHECK(dueck_condition_holds(correlated_noise()));
  // independent fair bits on Z0 and Z1 push H(Z0,Z1) to 2
  std::vector<double> mass(8, 0.0);
  mass[0] = mass[2] = mass[4] = mass[6] = 0.25;  // Z0, Z1 uniform, Z2 = 0
  CHECK(!dueck_condition_holds(
      JointPmf({{"Z0", 2}, {"Z1", 2}, {"Z2", 2}}, mass)));
}

TEST_CASE("ternary input shared noise channel") {
  Dmbc ch = make_blackwell({0.0, {FeedbackConfig::kNone}});
  auto mass_at = [&](int x, int y1, int y2) {
    return ch.law.prob(x, (static_cast<std::size_t>(y1) * 2 + y2) * 1 + 0);
  };
  CHECK(mass_at(0, 0, 0) == doctest::Approx(1.0));
  CHECK(mass_at(1, 1, 0) == doctest::Approx(1.0));
  CHECK(mass_at(2, 1, 1) == doctest::Approx(1.0));

  Dmbc noisy = make_blackwell({0.3, {FeedbackConfig::kNone}});
  ConditionalPmf m1 = marginal_channel(noisy, 1);
  CHECK(m1.prob(0, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(m1.prob(1, 1) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(m1.prob(2, 1) == doctest::Approx(0.7).epsilon(1e-12));
  ConditionalPmf m2 = marginal_channel(noisy, 2);
  CHECK(m2.prob(0, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(m2.prob(1, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(m2.prob(2, 1) == doctest::Approx(0.7).epsilon(1e-12));

  CHECK_THROWS_AS(make_blackwell({0.5, {}}), std::invalid_argument);
  CHECK_THROWS_AS(make_blackwell({-0.1, {}}), std::invalid_argument);
}

TEST_CASE("feedback signal is conditionally independent of the input") {
  FeedbackConfig noisy{FeedbackConfig::kNoisy, {0.05, 0.1, 0.2}};
  CHECK(feedback_markov_holds(make_dueck({correlated_noise(), noisy})));
  CHECK(feedback_markov_holds(
      make_dueck({correlated_noise(), {FeedbackConfig::kNoiseless}})));
  CHECK(feedback_markov_holds(make_blackwell({0.2, noisy})));

  // hand-made violation: feedback reveals the input directly
  std::vector<double> mass;
  for (int x = 0; x < 2; ++x)
    for (int y1 = 0; y1 < 2; ++y1)
      for (int y2 = 0; y2 < 2; ++y2)
        for (int yt = 0; yt < 2; ++yt)
          mass.push_back(y1 == 0 && y2 == 0 && yt == x ? 1.0 : 0.0);
  Dmbc leaky;
  leaky.in = {"X", 2};
  leaky.out1 = {"Y1", 2};
  leaky.out2 = {"Y2", 2};
  leaky.fb = {"Yt", 2};
  leaky.law = ConditionalPmf({leaky.in}, {leaky.out1, leaky.out2, leaky.fb},
                             std::move(mass));
  CHECK(!feedback_markov_holds(leaky));
}

TEST_CASE("sampling matches the law and is reproducible") {
  Dmbc ch = make_blackwell({0.25, {FeedbackConfig::kNoiseless}});
  RngStream rng(1234);
  int ones = 0, n = 20000;
  for (int i = 0; i < n; ++i) ones += sample(ch, 0, rng).y1;
  CHECK(std::fabs(ones / static_cast<double>(n) - 0.25) < 0.01);

  RngStream again(1234);
  ChannelSample first = sample(ch, 0, again);
  RngStream third(1234);
  ChannelSample repeat = sample(ch, 0, third);
  CHECK(first.y1 == repeat.y1);
  CHECK(first.y2 == repeat.y2);
  CHECK(first.yt == repeat.yt);
  // feedback reports both outputs under the noiseless config
  CHECK(first.yt == first.y1 * 2 + first.y2);
}

TEST_CASE("channel json round trips by family tag") {
  nlohmann::json jd = {{"type", "dueck"},
                       {"noise", correlated_noise()},
                       {"feedback", {{"kind", "noiseless"}}}};
  Dmbc ch = jd.get<Dmbc>();
  Dmbc want = make_dueck({correlated_noise(), {FeedbackConfig::kNoiseless}});
  REQUIRE(ch.law.cols() == want.law.cols());
  for (std::size_t r = 0; r < ch.law.rows(); ++r)
    for (std::size_t c = 0; c < ch.law.cols(); ++c)
      CHECK(ch.law.prob(r, c) ==
            doctest::Approx(want.law.prob(r, c)).epsilon(1e-12));

  nlohmann::json jc = want;  // custom dump
  Dmbc back = jc.get<Dmbc>();
  CHECK(back.in.size == 8);
  CHECK(back.fb.size == 8);
  CHECK(back.law.prob(3, 0) ==
        doctest::Approx(want.law.prob(3, 0)).epsilon(1e-12));
}
