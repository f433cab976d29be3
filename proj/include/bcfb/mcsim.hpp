#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bcfb/regions.hpp"

namespace bcfb {

// ---------------------------------------------------------------------------
// robust joint typicality

// A sequence tuple is typical when every joint cell's empirical count stays
// within a relative eps band of its expectation, and cells of probability
// zero never occur.  seqs[k] is the length-n sequence for axis k of the law.
bool is_jointly_typical(const std::vector<const std::vector<int>*>& seqs,
                        const JointPmf& law, double eps);

// Encoders and decoders rarely test candidates against one monolithic joint
// law.  A typicality model lists independent tracks; each track maps a subset
// of the available sequences through per-symbol tables and checks the mapped
// tuple against its own law.  The default model is a single identity track
// carrying the full joint.
struct SymbolMap {
  int role = 0;            // which sequence the map reads
  std::vector<int> table;  // symbol translation; empty means identity
};

struct TypTrack {
  std::vector<SymbolMap> maps;  // one per axis of law, in axis order
  JointPmf law;
};

struct TypicalityModel {
  std::vector<TypTrack> tracks;
};

// single identity track over roles 0..k-1 in law axis order
TypicalityModel full_model(const JointPmf& law);

bool model_typical(const TypicalityModel& model,
                   const std::vector<const std::vector<int>*>& seqs,
                   double eps);

// ---------------------------------------------------------------------------
// resource accounting

// Candidate budget for a single encoder search or decoder scan.  Reads the
// BCFB_RESOURCE_CAP environment variable once, defaulting to 1 << 22.
std::int64_t resource_cap();

struct ResourceCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// lazily generated iid codebooks

// A codebook whose content is a pure function of (key, codeword index).
// Symbols come from a counter-mode generator, so codewords can be streamed,
// revisited, or skipped without storing anything.  Books over a binary
// alphabet with fair rows pack 64 symbols per generator word, which lets
// scans compare whole words at a time; for those books the packed words are
// the definition of the content.
class LazyBook {
 public:
  LazyBook() = default;
  // rows is an (nrows x alphabet) row-major stack of pmf rows; unconditional
  // books have one row, conditional books one row per conditioning symbol.
  LazyBook(std::uint64_t key, int n, int alphabet, std::vector<double> rows);

  int n() const { return n_; }
  int alphabet() const { return alphabet_; }
  bool packed() const { return packed_; }

  struct Cursor {
    std::uint64_t key = 0;
  };
  Cursor at(std::int64_t codeword) const;

  // packed content, 64 symbols per word (packed books only)
  std::uint64_t word(Cursor c, int w) const;
  // row selects the conditioning symbol for conditional books
  int symbol(Cursor c, int j, int row = 0) const;
  // cond[j] is the conditioning symbol at position j; null for one-row books
  std::vector<int> fill(std::int64_t codeword,
                        const std::vector<int>* cond = nullptr) const;

 private:
  std::uint64_t key_ = 0;
  int n_ = 0;
  int alphabet_ = 0;
  int rows_ = 1;
  bool packed_ = false;
  std::vector<double> cdf_;  // per-row cumulative sums
};

// floor(2^(n * rate)), at least 1; rejects negative rates
std::int64_t rate_count(int n, double rate);

// ---------------------------------------------------------------------------
// superposition-plus-binning code (two receivers, common layer plus two
// binned private satellites)

struct MartonRates {
  double r0 = 0, r1c = 0, r2c = 0;  // common layer components
  double r1p = 0, r2p = 0;          // private messages
  double r1b = 0, r2b = 0;          // bin depth (extra satellite indices)
};

struct MartonSizes {
  std::int64_t m0 = 1, m1c = 1, m2c = 1;  // common payload factors
  std::int64_t m1p = 1, m2p = 1;          // private bins per common index
  std::int64_t l1 = 1, l2 = 1;            // codewords per bin
  std::int64_t common() const { return m0 * m1c * m2c; }
};

MartonSizes marton_sizes(const MartonRates& r, int n);

struct MartonCode {
  AuxScheme aux;
  MartonSizes sizes;
  int n = 0;
  std::uint64_t seed = 0;
  LazyBook c0;      // cloud centers, law P(U0)
  LazyBook c1, c2;  // satellites, law P(Ui|U0), keyed by (common, bin, index)

  // encoder roles: 0=U0 1=U1 2=U2
  TypicalityModel enc_model;
  // decoder roles: 0=U0 1=Ui, then one role per observation component
  std::array<TypicalityModel, 2> dec_model;

  std::vector<int> u0_seq(std::int64_t mc) const;
  std::vector<int> ui_seq(int i, std::int64_t mc, std::int64_t bin,
                          std::int64_t idx, const std::vector<int>& u0) const;
  std::int64_t sat_index(int i, std::int64_t mc, std::int64_t bin,
                         std::int64_t idx) const;
};

// Models default to the laws induced by aux and the channel: the full
// (U0,U1,U2) law for the encoder and P(U0,Ui,Yi) per receiver.
MartonCode gen_marton_code(const AuxScheme& aux, const Dmbc& ch,
                           const MartonRates& rates, int n,
                           std::uint64_t seed);

struct MartonMessages {
  std::int64_t m0 = 0, m1c = 0, m2c = 0, m1p = 0, m2p = 0;
};

struct MartonEncodeResult {
  std::vector<int> x;
  std::int64_t l1 = 0, l2 = 0;
  bool fallback = false;  // no jointly typical bin pair, indices drawn blind
};

// Searches the two bins for a typical satellite pair at eps/32, picks
// uniformly among successes, and maps through the aux symbol table.
MartonEncodeResult marton_encode(const MartonCode& code,
                                 const MartonMessages& msg, double eps,
                                 RngStream& rng);

struct MartonDecodeResult {
  std::int64_t m0 = 0, m1c = 0, m2c = 0;  // parsed common payload
  std::int64_t mp = 0;                    // this receiver's private message
  std::int64_t l = 0;                     // bin member that matched
  std::int64_t matches = 0;
  bool guessed = false;  // empty list, uniform guess over the index space
};

// obs holds the receiver's sequences in dec_model role order starting at
// role 2.  Scans every (common, bin, index) tuple the model links together,
// choosing uniformly among typical tuples.  When the model splits into
// common-only and satellite-only tracks the scan runs hierarchically:
// common index first, then the satellite inside the winner's bins.
MartonDecodeResult marton_decode(const MartonCode& code, int receiver,
                                 const std::vector<const std::vector<int>*>& obs,
                                 double eps, RngStream& rng);

// ---------------------------------------------------------------------------
// binned description code (three descriptions of a source tuple; receivers
// recover the common description and their own from bin indices plus side
// information)

struct LgwSizes {
  std::array<std::int64_t, 3> bins{1, 1, 1};
  std::array<std::int64_t, 3> per{1, 1, 1};  // codewords per bin
};

LgwSizes lgw_sizes(const std::array<double, 3>& bin_rate,
                   const std::array<double, 3>& in_rate, int n);

struct LgwCode {
  std::array<Alphabet, 3> v;
  LgwSizes sizes;
  int n = 0;
  std::uint64_t seed = 0;
  std::array<LazyBook, 3> books;  // iid from each description's marginal

  // encoder roles: 0..2 the candidate descriptions, 3.. source components
  TypicalityModel enc_model;
  // decoder roles: 0=V0 1=Vi, then side information components
  std::array<TypicalityModel, 2> dec_model;
};

LgwCode gen_lgw_code(const std::array<Alphabet, 3>& v,
                     const std::array<std::vector<double>, 3>& pmf,
                     const LgwSizes& sizes, int n, std::uint64_t seed);

struct LgwEncodeResult {
  std::array<std::int64_t, 3> bin{0, 0, 0};
  std::array<std::int64_t, 3> idx{0, 0, 0};
  std::array<bool, 3> fallback{false, false, false};
};

// Covers the source with one codeword per description at eps/2.  When every
// model track touches a single description the three searches run
// independently; otherwise the triple product is scanned jointly.
LgwEncodeResult lgw_encode(const LgwCode& code,
                           const std::vector<const std::vector<int>*>& source,
                           double eps, RngStream& rng);

struct LgwDecodeResult {
  std::vector<int> v0, vi;
  std::int64_t l0 = 0, li = 0;
  std::int64_t matches = 0;
  bool unique = false;  // exactly one typical pair; otherwise a random pair
};

LgwDecodeResult lgw_decode(const LgwCode& code, int receiver, std::int64_t k0,
                           std::int64_t ki,
                           const std::vector<const std::vector<int>*>& side,
                           double eps, RngStream& rng);

// ---------------------------------------------------------------------------
// block-Markov chaining with decoder updates

// extra encoder-side sequence computed per position from the aux symbols and
// the returned channel symbol
struct DerivedComp {
  int alphabet = 2;
  std::vector<int> table;  // index = flat(u0, u1, u2, yt)
};

struct BlockMarkovConfig {
  AuxScheme aux;
  Dmbc ch;
  std::array<std::int64_t, 3> messages{1, 1, 1};  // fresh payload per block
  std::array<double, 3> bin_rate{0, 0, 0};        // update description bins
  std::array<double, 3> in_rate{0, 0, 0};         // codewords per bin
  std::array<Alphabet, 3> v;
  std::array<std::vector<double>, 3> v_pmf;
  std::vector<DerivedComp> derived;

  TypicalityModel marton_enc;                // roles U0,U1,U2
  std::array<TypicalityModel, 2> marton_dec; // roles U0,Ui,Y,V0hat,Vihat
  TypicalityModel lgw_enc;                   // roles V0,V1,V2,U0,U1,U2,Yt,derived
  std::array<TypicalityModel, 2> lgw_dec;    // roles V0,Vi,Y
  AuxScheme slice_aux;                       // all-common code for the flush
  std::array<TypicalityModel, 2> slice_dec;  // roles U0,Ui,Y

  int B = 2;      // data blocks
  int gamma = 4;  // flush stretch: bin triple sent as gamma plain sub-blocks
  int n = 16;
  // above 1 the lower count windows stop binding, which the short blocks
  // here need; zero-probability cells stay forbidden at any eps
  double eps = 1.2;
  std::uint64_t seed = 1;
};

struct TrialReport {
  std::vector<std::array<bool, 2>> block_error;  // data block x receiver
  std::array<bool, 2> receiver_error{false, false};
  bool error = false;
  std::int64_t marton_fallbacks = 0;
  std::int64_t lgw_fallbacks = 0;
  std::int64_t trials = 1;  // merge weight when reports are summed
};

// One full chain: B data blocks carrying fresh messages plus the previous
// block's description bins, then the final bin triple flushed as gamma
// all-common sub-blocks.  Receivers decode backwards, augmenting each
// block's output with the descriptions recovered from the next.
TrialReport block_markov_trial(const BlockMarkovConfig& cfg,
                               std::int64_t trial);

// Two-receiver binary-pipes instance with additive noise feeding both pipes
// equally.  With feedback on, decoders describe the noise back through the
// update descriptions; with feedback off the updates are empty and the chain
// degenerates to independent blocks.  sum_rate is split evenly across the
// two private messages.
BlockMarkovConfig dueck_block_markov_config(int n, bool with_feedback,
                                            double sum_rate = 1.2,
                                            int B = 2, int gamma = 4);

// ---------------------------------------------------------------------------
// experiments

struct ExperimentPoint {
  int n = 0;
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  std::int64_t fallbacks = 0;
  double error_rate = 0;
  double fallback_rate = 0;
};

struct MartonExperiment {
  AuxScheme aux;
  Dmbc ch;
  MartonRates rates;
  std::vector<int> n_list;
  std::int64_t trials = 2000;
  double eps = 0.15;
  std::uint64_t seed = 1;
  int workers = 1;
};

// per n: fresh code and messages each trial, error when either receiver
// mistakes its message triple
std::vector<ExperimentPoint> run_marton_experiment(const MartonExperiment& ex);

struct LgwExperiment {
  LgwScheme scheme;
  JointPmf source;  // axes X, Y1, Y2; Yi is receiver i's side information
  std::array<double, 3> bin_rate{0, 0, 0};
  std::array<double, 3> in_rate{0, 0, 0};
  std::vector<int> n_list;
  std::int64_t trials = 2000;
  double eps = 0.25;
  std::uint64_t seed = 1;
  int workers = 1;
};

// error when a receiver's recovered descriptions are atypical with the
// source; fallbacks count covering misses
std::vector<ExperimentPoint> run_lgw_experiment(const LgwExperiment& ex);

struct BlockMarkovExperiment {
  std::vector<int> n_list;
  std::int64_t trials = 500;
  int B = 2;
  int gamma = 4;
  double sum_rate = 1.2;
  bool with_feedback = true;
  double eps = 1.2;
  std::uint64_t seed = 1;
  int workers = 1;
};

// chains dueck_block_markov_config over n_list; errors are end-to-end
std::vector<ExperimentPoint> run_block_markov(const BlockMarkovExperiment& ex);

// ---------------------------------------------------------------------------
// one-shot existence experiments behind the achievability proofs

enum class LemmaKind { kCovering, kPacking, kMvPacking };

// Covering: does some codeword of a 2^(n rate) book land jointly typical
// with a drawn source sequence (errors count misses).  Packing: does some
// codeword collide with an independent sequence (errors count collisions).
// MvPacking: three-way variant where the candidate must complete a forced
// parity triple.  Event probabilities are computed exactly per drawn
// sequence, so trials are cheap and n can be large.  Covering and packing
// need a binary first axis; mv_packing needs the parity-triple law.
struct LemmaSpec {
  LemmaKind kind = LemmaKind::kCovering;
  JointPmf law;
  double rate = 0;
  std::vector<int> n_list;
  std::int64_t trials = 2000;
  double eps = 0.25;
  std::uint64_t seed = 1;
  int workers = 1;
};

std::vector<ExperimentPoint> lemma_experiment(const LemmaSpec& spec);

// fraction of iid length-n draws that are eps-typical, one entry per n
std::vector<double> typical_fraction(const JointPmf& law, double eps,
                                     const std::vector<int>& n_list,
                                     std::int64_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const MartonExperiment& ex);
void from_json(const nlohmann::json& j, MartonExperiment& ex);
void to_json(nlohmann::json& j, const LgwExperiment& ex);
void from_json(const nlohmann::json& j, LgwExperiment& ex);
void to_json(nlohmann::json& j, const BlockMarkovExperiment& ex);
void from_json(const nlohmann::json& j, BlockMarkovExperiment& ex);
void to_json(nlohmann::json& j, const LemmaSpec& spec);
void from_json(const nlohmann::json& j, LemmaSpec& spec);

}  // namespace bcfb
