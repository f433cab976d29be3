#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bcfb/info.hpp"
#include "bcfb/rng.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bcfb;
using bcfb::testing::random_channel;
using bcfb::testing::random_pmf;

TEST_CASE("entropy of simple laws") {
  JointPmf uniform({{"X", 2}, {"Y", 2}},
                   {0.25, 0.25, 0.25, 0.25});
  CHECK(entropy(uniform, {"X", "Y"}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(entropy(uniform, {"X"}) == doctest::Approx(1.0).epsilon(1e-12));

  // dyadic masses give exact sums of powers of two
  JointPmf dyadic({{"S", 4}}, {0.5, 0.25, 0.125, 0.125});
  CHECK(entropy(dyadic, {"S"}) == doctest::Approx(1.75).epsilon(1e-12));
  JointPmf dyadic3({{"S", 3}}, {0.5, 0.25, 0.25});
  CHECK(entropy(dyadic3, {"S"}) == doctest::Approx(1.5).epsilon(1e-12));

  CHECK(entropy(uniform, {}) == 0.0);
}

TEST_CASE("binary helpers") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.25) ==
        doctest::Approx(0.8112781244591329).epsilon(1e-12));
  CHECK(binary_convolution(0.1, 0.2) == doctest::Approx(0.26).epsilon(1e-15));
  CHECK(binary_convolution(0.5, 0.3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(binary_entropy(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(binary_convolution(1.2, 0.0), std::invalid_argument);
}

TEST_CASE("mutual information of a binary symmetric pair") {
  // uniform input through a flip probability 0.1 pipe
  JointPmf joint({{"X", 2}, {"Y", 2}}, {0.45, 0.05, 0.05, 0.45});
  double want = 1.0 - binary_entropy(0.1);
  CHECK(mutual_information(joint, {"X"}, {"Y"}) ==
        doctest::Approx(want).epsilon(1e-12));
  // conditioning on an independent coin changes nothing
  JointPmf with_coin = compose(
      joint, ConditionalPmf({}, {{"C", 2}}, {0.5, 0.5}));
  CHECK(mutual_information(with_coin, {"X"}, {"Y"}, {"C"}) ==
        doctest::Approx(want).epsilon(1e-11));
  CHECK(mutual_information(with_coin, {"X"}, {"C"}) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("validation rejects bad inputs") {
  CHECK_THROWS_AS(JointPmf({{"X", 2}}, {0.6, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(JointPmf({{"X", 2}}, {1.1, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(JointPmf({{"X", 2}}, {0.5, 0.5 + 5e-9}),
                  std::invalid_argument);
  CHECK_THROWS_AS(JointPmf({{"X", 2}, {"X", 2}}, {0.25, 0.25, 0.25, 0.25}),
                  std::invalid_argument);
  CHECK_THROWS_AS(JointPmf({{"X", 17}}, std::vector<double>(17, 1.0 / 17)),
                  std::invalid_argument);
  CHECK_NOTHROW(JointPmf({{"X", 2}}, {0.5, 0.5 + 5e-10}));
  CHECK_THROWS_AS(
      ConditionalPmf({{"A", 2}}, {{"B", 2}}, {0.5, 0.4, 0.5, 0.5}),
      std::invalid_argument);
}

TEST_CASE("condition and marginalize") {
  JointPmf joint({{"X", 2}, {"Y", 2}}, {0.45, 0.05, 0.05, 0.45});
  JointPmf given0 = condition(joint, "X", 0);
  CHECK(given0.axes().size() == 1);
  CHECK(given0[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(given0[1] == doctest::Approx(0.1).epsilon(1e-12));

  JointPmf zero({{"X", 2}, {"Y", 2}}, {0.5, 0.5, 0.0, 0.0});
  CHECK_THROWS_AS(condition(zero, "X", 1), std::domain_error);

  JointPmf mx = marginalize(joint, {"Y", "X"});  // reordered keep list
  CHECK(mx.axes()[0].name == "Y");
  CHECK(mx[1] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("compose against hand-expanded product") {
  JointPmf prior({{"X", 2}}, {0.3, 0.7});
  ConditionalPmf pipe({{"X", 2}}, {{"Y", 2}}, {0.9, 0.1, 0.2, 0.8});
  JointPmf joint = compose(prior, pipe);
  CHECK(joint[0] == doctest::Approx(0.27).epsilon(1e-14));
  CHECK(joint[1] == doctest::Approx(0.03).epsilon(1e-14));
  CHECK(joint[2] == doctest::Approx(0.14).epsilon(1e-14));
  CHECK(joint[3] == doctest::Approx(0.56).epsilon(1e-14));
  CHECK_THROWS_AS(compose(joint, pipe), std::invalid_argument);
}

TEST_CASE("chain rule and nonnegativity on random laws") {
  RngStream rng(20260823);
  for (int trial = 0; trial < 50; ++trial) {
    RngStream r = rng.child(trial);
    JointPmf p = random_pmf(r, {{"A", 3}, {"B", 2}, {"C", 4}});
    double hab = entropy(p, {"A", "B"});
    double ha = entropy(p, {"A"});
    double hb_given_a = hab - ha;
    // conditional entropy via explicit conditioning
    JointPmf pa = marginalize(p, {"A"});
    double acc = 0.0;
    for (int v = 0; v < 3; ++v)
      if (pa[v] > 0) acc += pa[v] * entropy(condition(p, "A", v), {"B"});
    CHECK(acc == doctest::Approx(hb_given_a).epsilon(1e-9));

    CHECK(mutual_information(p, {"A"}, {"B"}, {"C"}) >= 0.0);
    CHECK(entropy(p, {"A", "B", "C"}) <= hab + entropy(p, {"C"}) + 1e-12);
  }
}

TEST_CASE("data processing along a composed chain") {
  RngStream rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    RngStream r = rng.child(trial);
    JointPmf px = random_pmf(r, {{"X", 3}});
    ConditionalPmf xy = random_channel(r, {{"X", 3}}, {{"Y", 3}});
    ConditionalPmf yz = random_channel(r, {{"Y", 3}}, {{"Z", 3}});
    JointPmf pxyz = compose(compose(px, xy), yz);
    double ixy = mutual_information(pxyz, {"X"}, {"Y"});
    double ixz = mutual_information(pxyz, {"X"}, {"Z"});
    CHECK(ixz <= ixy + 1e-10);
    CHECK(mutual_information(pxyz, {"X"}, {"Z"}, {"Y"}) ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("json round trip") {
  RngStream rng(99);
  JointPmf p = random_pmf(rng, {{"A", 2}, {"B", 3}});
  nlohmann::json j = p;
  JointPmf back = j.get<JointPmf>();
  REQUIRE(back.cells() == p.cells());
  for (std::size_t i = 0; i < p.cells(); ++i)
    CHECK(back[i] == doctest::Approx(p[i]).epsilon(1e-15));

  ConditionalPmf c = random_channel(rng, {{"G", 2}}, {{"O", 4}});
  nlohmann::json jc = c;
  ConditionalPmf cback = jc.get<ConditionalPmf>();
  CHECK(cback.rows() == 2);
  CHECK(cback.cols() == 4);
  CHECK(cback.prob(1, 2) == doctest::Approx(c.prob(1, 2)).epsilon(1e-15));
}

TEST_CASE("indexing helpers round trip") {
  JointPmf p({{"A", 2}, {"B", 3}, {"C", 2}},
             std::vector<double>(12, 1.0 / 12));
  std::vector<int> sym;
  for (std::size_t i = 0; i < p.cells(); ++i) {
    p.unflatten(i, sym);
    CHECK(p.flatten(sym) == i);
  }
}
