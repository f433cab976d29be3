#pragma once

#include <array>

#include "bcfb/info.hpp"
#include "bcfb/rng.hpp"
#include "json.hpp"

namespace bcfb {

struct FeedbackConfig {
  enum Kind { kNone, kNoiseless, kNoisy };
  Kind kind = kNone;
  // flip probabilities for the noisy case, one per feedback bit track
  std::array<double, 3> flip = {0.0, 0.0, 0.0};
};

// Two-receiver discrete memoryless broadcast channel with a transmitter-side
// feedback signal Yt.  When feedback is off the Yt alphabet collapses to one
// symbol.
struct Dmbc {
  Alphabet in;
  Alphabet out1, out2;
  Alphabet fb;
  ConditionalPmf law;  // given {X}, outputs {Y1, Y2, Yt}
};

struct DueckParams {
  JointPmf noise;  // axes Z0, Z1, Z2, each binary
  FeedbackConfig feedback;
};

struct BlackwellParams {
  double p = 0.0;  // shared noise bias, must lie in [0, 1/2)
  FeedbackConfig feedback;
};

// X carries three bits (X1, X0, X2) big-endian; receiver 1 sees
// (X1^Z1, X0^Z0), receiver 2 sees (X0^Z0, X2^Z2).  Noiseless feedback
// returns the three distinct output bits (Y11, Y10, Y22); noisy feedback
// flips them independently with the configured probabilities (W0 acts on the
// shared bit).
Dmbc make_dueck(const DueckParams& params);

// Ternary-input channel driven by one shared binary noise Z with bias p:
// Y1 = Z unless X = 0 is false (X in {1,2} inverts), Y2 inverts only on X = 2.
Dmbc make_blackwell(const BlackwellParams& params);

// both pairwise noise entropies at most one bit (within kNumTol)
bool dueck_condition_holds(const JointPmf& noise);

struct ChannelSample {
  int y1 = 0, y2 = 0, yt = 0;
};

ChannelSample sample(const Dmbc& ch, int x, RngStream& rng);

ConditionalPmf marginal_channel(const Dmbc& ch, int receiver);

// does the law factor as X - (Y1,Y2) - Yt?
bool feedback_markov_holds(const Dmbc& ch, double tol = kNumTol);

void to_json(nlohmann::json& j, const FeedbackConfig& f);
void from_json(const nlohmann::json& j, FeedbackConfig& f);
void to_json(nlohmann::json& j, const Dmbc& ch);
void from_json(const nlohmann::json& j, Dmbc& ch);

}  // namespace bcfb
