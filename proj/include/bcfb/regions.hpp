#pragma once

#include <array>
#include <optional>

#include "bcfb/channels.hpp"
#include "bcfb/info.hpp"
#include "bcfb/polytope.hpp"
#include "bcfb/rng.hpp"

namespace bcfb {

// Auxiliary randomization for superposition-plus-binning codes: a joint law
// on (U0,U1,U2) and the deterministic symbol map into X.
struct AuxScheme {
  std::array<Alphabet, 3> u;
  JointPmf law;        // axes U0, U1, U2
  std::vector<int> f;  // x = f[flat(u0,u1,u2)], row-major over the U axes
};

// Decoder-update descriptions.  The full variant conditions on everything the
// encoder knows, the star variant only on (X, Yt).
struct UpdateScheme {
  enum Variant { kFull, kStar };
  Variant variant = kFull;
  std::array<Alphabet, 3> v;
  ConditionalPmf law;  // full: given {U0,U1,U2,Yt}; star: given {X,Yt}
};

// Descriptions for the two-decoder lossy common/private source code: three
// description channels applied to the source X.
struct LgwScheme {
  std::array<Alphabet, 3> v;
  ConditionalPmf law;  // given {X}, out {V0,V1,V2}
};

enum class LgwVariant { kInner, kStar };

// joint law over (U0,U1,U2,X,Y1,Y2,Yt[,V0,V1,V2])
JointPmf induced_joint(const AuxScheme& aux, const UpdateScheme* upd,
                       const Dmbc& ch);

RateRegion3 marton_region(const AuxScheme& aux, const Dmbc& ch);
RateRegion3 lgw_inner(const LgwScheme& scheme, const JointPmf& source,
                      LgwVariant variant);
RateRegion3 feedback_inner(const AuxScheme& aux, const UpdateScheme& upd,
                           const Dmbc& ch);

// ---------------------------------------------------------------------------
// pre-split systems and their closed-form projections, parameterized by
// information constants measured from genuine distributions

struct MartonConstants {
  double a, b1, b2, c1, c2;
};

struct LgwConstants {
  double g0, g1, g2, m01, m02, m1, m2;
};

struct CombinedConstants {
  double K0, K1, K2, c1, c2, a, L1, L2, L01, L02;
  double K3() const { return c1 + c2 + K0 - a; }
};

LinIneqSystem presplit_system(const MartonConstants& k);
LinIneqSystem presplit_system(const LgwConstants& k);
LinIneqSystem presplit_system(const CombinedConstants& k);

RateRegion3 closed_form(const MartonConstants& k);
RateRegion3 closed_form(const LgwConstants& k);
RateRegion3 closed_form(const CombinedConstants& k);

// eliminate every auxiliary split/bin variable, keeping (R0,R1,R2)
RateRegion3 project_presplit(const LinIneqSystem& sys);

// constants drawn from random genuine distributions (see each impl note)
MartonConstants random_marton_constants(RngStream& rng);
LgwConstants random_lgw_constants(RngStream& rng);
CombinedConstants random_combined_constants(RngStream& rng);

// ---------------------------------------------------------------------------
// three-bit-pipe channel family anchors

// capacity region at zero common rate; throws std::domain_error when a
// pairwise noise entropy exceeds one bit
RateRegion3 dueck_capacity(const JointPmf& noise, bool with_feedback);

// I(Z1;Z2|Z0) below tolerance
bool z_markov_chain_holds(const JointPmf& noise);

// random noise laws inside the pairwise-entropy condition; force_markov
// builds Z1 - Z0 - Z2 product laws
JointPmf random_dueck_noise(RngStream& rng, bool force_markov);

// canonical schemes for the three-bit pipe with noiseless feedback
AuxScheme dueck_aux();
UpdateScheme dueck_update(int which_v0);  // 1 or 2: V0 tracks (Z0,Z_i)

// ---------------------------------------------------------------------------
// ternary-input shared-noise channel bounds

struct BlackwellBounds {
  double fb_lower = 0.0;
  double nofb_upper = 0.0;
  double fb_cutset = 0.0;
};

// closed-form feedback sum-rate bound (grid plus local refinement) and the
// two cut-set style oracles via capacity iterations
BlackwellBounds blackwell_bounds(double p, int grid_steps = 200);

AuxScheme blackwell_aux(double alpha, double beta);
UpdateScheme blackwell_update();

struct SchemeSearchResult {
  double alpha = 0.0, beta = 0.0;
  double sum_rate = 0.0;
  RateRegion3 region;
};

// grid search over the (alpha,beta) scheme family evaluated through
// feedback_inner; ties keep the lexicographically first argument
SchemeSearchResult blackwell_scheme_search(double p, int grid_steps,
                                           bool refine);

UpdateScheme const_update(const AuxScheme& aux, const Dmbc& ch,
                          UpdateScheme::Variant variant);

// ---------------------------------------------------------------------------
// small parametric scheme searches

enum class AuxFamily {
  kBlackwellPair,  // the (alpha,beta) corner family on the ternary channel
  kDueckHull,      // the two shared-noise trackers on the three-bit pipe
  kFreeSimplex,    // seeded draws of (law, symbol map) with constant V's
};

enum class SearchObjective { kSumRate, kWeighted };

struct AuxSearchSpec {
  AuxFamily family = AuxFamily::kFreeSimplex;
  SearchObjective objective = SearchObjective::kSumRate;
  int steps = 24;         // triangle grid resolution (pair family)
  int refine_rounds = 4;  // local zoom passes after the grid
  int samples = 64;       // candidate count (free family)
  std::uint64_t seed = 1;
  std::array<int, 3> sizes = {2, 2, 2};           // free-family U alphabets
  std::array<double, 3> weights = {0.0, 1.0, 1.0};  // weighted objective
};

struct AuxSearchResult {
  AuxScheme aux;
  UpdateScheme upd;
  RateRegion3 region;  // hull of both trackers for the pipe family
  double value = -1.0;  // stays negative when nothing feasible was seen
};

// deterministic for a fixed spec; the earliest candidate wins ties
AuxSearchResult aux_grid_search(const Dmbc& ch, const AuxSearchSpec& spec);

void to_json(nlohmann::json& j, const AuxScheme& a);
void from_json(const nlohmann::json& j, AuxScheme& a);
void to_json(nlohmann::json& j, const UpdateScheme& u);
void from_json(const nlohmann::json& j, UpdateScheme& u);
void to_json(nlohmann::json& j, const LgwScheme& s);
void from_json(const nlohmann::json& j, LgwScheme& s);
void to_json(nlohmann::json& j, const MartonConstants& k);
void from_json(const nlohmann::json& j, MartonConstants& k);
void to_json(nlohmann::json& j, const LgwConstants& k);
void from_json(const nlohmann::json& j, LgwConstants& k);
void to_json(nlohmann::json& j, const CombinedConstants& k);
void from_json(const nlohmann::json& j, CombinedConstants& k);

}  // namespace bcfb
