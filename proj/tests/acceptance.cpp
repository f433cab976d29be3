// End-to-end acceptance gate.  Each numbered check prints one line; any
// failure flips the exit code.  Tolerances and budgets are pinned here on
// purpose: when one drifts, the line tells you which quantity moved.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "bcfb/channels.hpp"
#include "bcfb/mcsim.hpp"
#include "bcfb/regions.hpp"

using namespace bcfb;

namespace {

int g_failures = 0;

struct Criterion {
  bool ok = true;
  std::string why;
  std::string note;

  void require(bool cond, const std::string& msg) {
    if (ok && !cond) {
      ok = false;
      why = msg;
    }
  }
};

double now_s() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

template <typename Fn>
void run_criterion(const char* label, Fn fn) {
  Criterion c;
  double t0 = now_s();
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.why = std::string("unexpected exception: ") + e.what();
  }
  double dt = now_s() - t0;
  if (c.ok) {
    std::printf("[PASS] %s%s%s (%.1fs)\n", label, c.note.empty() ? "" : ": ",
                c.note.c_str(), dt);
  } else {
    std::printf("[FAIL] %s: %s (%.1fs)\n", label, c.why.c_str(), dt);
    ++g_failures;
  }
  std::fflush(stdout);
}

int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(std::min(4u, hw));
}

std::string fmt(const char* pattern, double a, double b = 0, double e = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, e);
  return buf;
}

// ---------------------------------------------------------------------------
// shared fixtures

JointPmf correlated_noise() {
  std::vector<double> mass(8, 0.0);
  mass[0] = 0.5;
  mass[3] = 0.5;
  return JointPmf({{"Z0", 2}, {"Z1", 2}, {"Z2", 2}}, mass);
}

JointPmf silent_noise() {
  std::vector<double> mass(8, 0.0);
  mass[0] = 1.0;
  return JointPmf({{"Z0", 2}, {"Z1", 2}, {"Z2", 2}}, mass);
}

Dmbc dueck_channel(const JointPmf& noise, double link_flip) {
  DueckParams params;
  params.noise = noise;
  if (link_flip == 0.0) {
    params.feedback.kind = FeedbackConfig::kNoiseless;
  } else {
    params.feedback.kind = FeedbackConfig::kNoisy;
    params.feedback.flip = {link_flip, link_flip, link_flip};
  }
  return make_dueck(params);
}

// two independent asymmetric bit pipes: a zero goes through clean, a one
// survives with probability 1-q
Dmbc z_pipe_pair(double q) {
  Dmbc ch;
  ch.in = {"X", 4};
  ch.out1 = {"Y1", 2};
  ch.out2 = {"Y2", 2};
  ch.fb = {"Yt", 1};
  std::vector<double> mass(16, 0.0);
  for (int x = 0; x < 4; ++x) {
    int a = (x >> 1) & 1, b = x & 1;
    for (int y1 = 0; y1 < 2; ++y1)
      for (int y2 = 0; y2 < 2; ++y2) {
        double p1 = a ? (y1 ? 1.0 - q : q) : (y1 ? 0.0 : 1.0);
        double p2 = b ? (y2 ? 1.0 - q : q) : (y2 ? 0.0 : 1.0);
        mass[static_cast<std::size_t>((x * 2 + y1) * 2 + y2)] = p1 * p2;
      }
  }
  ch.law = ConditionalPmf({ch.in}, {ch.out1, ch.out2, ch.fb}, std::move(mass));
  return ch;
}

AuxScheme z_pipe_aux(double p1) {
  AuxScheme aux;
  aux.u = {Alphabet{"U0", 1}, Alphabet{"U1", 2}, Alphabet{"U2", 2}};
  std::vector<double> mass(4);
  for (int u1 = 0; u1 < 2; ++u1)
    for (int u2 = 0; u2 < 2; ++u2)
      mass[static_cast<std::size_t>(u1 * 2 + u2)] =
          (u1 ? p1 : 1 - p1) * (u2 ? p1 : 1 - p1);
  aux.law = JointPmf({{"U0", 1}, {"U1", 2}, {"U2", 2}}, std::move(mass));
  aux.f = {0, 1, 2, 3};
  return aux;
}

JointPmf bsc_pair_law() {
  return JointPmf({{"X", 2}, {"Y", 2}}, {0.445, 0.055, 0.055, 0.445});
}

JointPmf parity_triple_law() {
  std::vector<double> mass(8, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      mass[static_cast<std::size_t>((i * 2 + j) * 2 + (i ^ j))] = 0.25;
  return JointPmf({{"V0", 2}, {"V1", 2}, {"V2", 2}}, mass);
}

bool region_subset(const RateRegion3& a, const RateRegion3& b, double tol) {
  for (const auto& v : vertices(a))
    if (!contains_point(b, v, tol)) return false;
  return true;
}

// star-variant table re-expressed as a full-variant law through the symbol map
UpdateScheme widen_star_update(const UpdateScheme& star, const AuxScheme& aux,
                               const Dmbc& ch) {
  UpdateScheme full;
  full.variant = UpdateScheme::kFull;
  full.v = star.v;
  std::vector<Alphabet> given = {aux.u[0], aux.u[1], aux.u[2], ch.fb};
  std::size_t ucells = aux.f.size();
  std::size_t cols = star.law.cols();
  std::vector<double> mass(ucells * ch.fb.size * cols, 0.0);
  std::size_t r = 0;
  for (std::size_t u = 0; u < ucells; ++u)
    for (int yt = 0; yt < ch.fb.size; ++yt, ++r) {
      std::size_t srow = static_cast<std::size_t>(aux.f[u]) * ch.fb.size + yt;
      for (std::size_t col = 0; col < cols; ++col)
        mass[r * cols + col] = star.law.prob(srow, col);
    }
  full.law = ConditionalPmf(std::move(given), star.law.out(), std::move(mass));
  return full;
}

// ---------------------------------------------------------------------------
// criteria

void c01_split_projection(Criterion& c) {
  const double tol = 1e-9;
  const double budget_s = 1.0;
  double t0 = now_s();
  RngStream rng(101);
  for (int i = 0; i < 10; ++i) {
    MartonConstants k = random_marton_constants(rng);
    RateRegion3 projected = project_presplit(presplit_system(k));
    c.require(region_equal(projected, closed_form(k), tol),
              "projected split system differs from the closed form, draw " +
                  std::to_string(i));
  }
  double dt = now_s() - t0;
  c.require(dt < budget_s, fmt("projection pass took %.2fs, budget %.1fs", dt,
                               budget_s));
  c.note = fmt("10 random constant draws, tolerance %.0e, %.2fs", tol, dt);
}

void c02_description_projections(Criterion& c) {
  const double tol = 1e-9;
  RngStream rng(202);
  for (int i = 0; i < 10; ++i) {
    LgwConstants k = random_lgw_constants(rng);
    c.require(region_equal(project_presplit(presplit_system(k)),
                           closed_form(k), tol),
              "description split differs from its closed form, draw " +
                  std::to_string(i));
  }
  for (int i = 0; i < 10; ++i) {
    CombinedConstants k = random_combined_constants(rng);
    c.require(region_equal(project_presplit(presplit_system(k)),
                           closed_form(k), tol),
              "combined split differs from its closed form, draw " +
                  std::to_string(i));
  }
  c.note = fmt("10 description + 10 combined draws, tolerance %.0e", tol);
}

void c03_pipe_anchors(Criterion& c) {
  JointPmf corr = correlated_noise();
  double with_link = sum_rate_max(dueck_capacity(corr, true)).value;
  double without = sum_rate_max(dueck_capacity(corr, false)).value;
  c.require(std::fabs(with_link - 2.0) <= 1e-9,
            fmt("shared-noise feedback sum %.6f, want 2.000000", with_link));
  c.require(std::fabs(without - 1.0) <= 1e-9,
            fmt("shared-noise silent sum %.6f, want 1.000000", without));

  Dmbc ch = dueck_channel(corr, 0.0);
  RateRegion3 hull =
      convex_hull_union(feedback_inner(dueck_aux(), dueck_update(1), ch),
                        feedback_inner(dueck_aux(), dueck_update(2), ch));
  SumRate s = sum_rate_max(hull);
  c.require(s.feasible && std::fabs(s.value - 2.0) <= 1e-6,
            fmt("tracker hull sum %.6f, want 2.0 within 1e-6", s.value));

  JointPmf quiet = silent_noise();
  RateRegion3 expected = make_region({{{1, 0, 0}, 0.0},
                                      {{0, 1, 0}, 2.0},
                                      {{0, 0, 1}, 2.0},
                                      {{0, 1, 1}, 3.0}});
  c.require(region_equal(dueck_capacity(quiet, true), expected, 1e-9),
            "clean pipes with the link: region is not {R1<=2, R2<=2, R1+R2<=3}");
  c.require(region_equal(dueck_capacity(quiet, false), expected, 1e-9),
            "clean pipes without the link: region moved");
  c.note = fmt("feedback sum %.6f, silent sum %.6f, hull sum %.6f", with_link,
               without, s.value);
}

void c04_chain_condition(Criterion& c) {
  RngStream rng(2026);
  int broken = 0;
  for (int i = 0; i < 50; ++i) {
    JointPmf noise = random_dueck_noise(rng, i % 2 == 1);
    bool chain = z_markov_chain_holds(noise);
    double gap = sum_rate_max(dueck_capacity(noise, true)).value -
                 sum_rate_max(dueck_capacity(noise, false)).value;
    c.require(chain == (gap <= 1e-9),
              fmt("law %d: chain=%d but sum-rate gap %.3e",
                  static_cast<double>(i), chain ? 1.0 : 0.0, gap));
    broken += chain ? 0 : 1;
  }
  c.note = fmt("50 noise laws, %g with a live gap, threshold 1e-9",
               static_cast<double>(broken));
}

void c05_ternary_bounds(Criterion& c) {
  const double budget_s = 30.0;
  double t0 = now_s();
  double at_zero = 0.0;
  for (int k = 0; k <= 18; ++k) {
    double p = 0.025 * k;
    BlackwellBounds b = blackwell_bounds(p, 200);
    c.require(b.fb_lower <= b.fb_cutset + 1e-9,
              fmt("p=%.3f: feedback lower bound %.6f above cut-set %.6f", p,
                  b.fb_lower, b.fb_cutset));
    if (k == 0) at_zero = b.fb_lower;
  }
  c.require(std::fabs(at_zero - std::log2(3.0)) <= 1e-4,
            fmt("p=0 lower bound %.6f, want log2(3)=%.6f", at_zero,
                std::log2(3.0)));
  for (double p : {0.1, 0.2, 0.3}) {
    BlackwellBounds b = blackwell_bounds(p, 200);
    c.require(b.fb_lower > b.nofb_upper + 1e-3,
              fmt("p=%.2f: no strict window, lower %.6f vs upper %.6f", p,
                  b.fb_lower, b.nofb_upper));
  }
  double dt = now_s() - t0;
  c.require(dt < budget_s, fmt("bound sweep took %.1fs, budget %.0fs", dt,
                               budget_s));
  c.note = fmt("19 bias points, p=0 lower %.6f, window at p=0.1..0.3", at_zero);
}

void c06_noisy_link(Criterion& c) {
  Dmbc ch = dueck_channel(correlated_noise(), 1e-3);
  double sum =
      sum_rate_max(feedback_inner(dueck_aux(), dueck_update(1), ch)).value;
  c.require(sum > 1.0 + 1e-3,
            fmt("sum %.6f does not clear the silent-link 1.0 by 1e-3", sum));
  c.note = fmt("flip 1e-3 keeps sum %.6f above the silent link", sum);
}

void c07_existence_suite(Criterion& c) {
  const double budget_s = 300.0;
  double t0 = now_s();
  double info = 1.0 - binary_entropy(0.11);

  LemmaSpec spec;
  spec.law = bsc_pair_law();
  spec.n_list = {50, 100, 200};
  spec.trials = 2000;
  spec.eps = 0.25;
  spec.seed = 99;
  spec.workers = worker_count();

  auto last = [&](const LemmaSpec& s) { return lemma_experiment(s)[2].error_rate; };

  spec.kind = LemmaKind::kCovering;
  spec.rate = info + 0.2;
  double cov_good = last(spec);
  spec.rate = info - 0.2;
  double cov_bad = last(spec);
  c.require(cov_good < 0.05,
            fmt("covering at rate+0.2: miss rate %.3f at n=200", cov_good));
  c.require(cov_bad > 0.5,
            fmt("covering at rate-0.2: miss rate %.3f at n=200", cov_bad));

  spec.kind = LemmaKind::kPacking;
  spec.rate = info - 0.2;
  double pack_good = last(spec);
  spec.rate = info + 0.2;
  double pack_bad = last(spec);
  c.require(pack_good < 0.05,
            fmt("packing at rate-0.2: collision rate %.3f at n=200", pack_good));
  c.require(pack_bad > 0.5,
            fmt("packing at rate+0.2: collision rate %.3f at n=200", pack_bad));

  spec.kind = LemmaKind::kMvPacking;
  spec.law = parity_triple_law();
  spec.rate = 0.8;
  double mv_good = last(spec);
  spec.rate = 1.2;
  double mv_bad = last(spec);
  c.require(mv_good < 0.05,
            fmt("parity packing at 0.8: collision rate %.3f at n=200", mv_good));
  c.require(mv_bad > 0.5,
            fmt("parity packing at 1.2: collision rate %.3f at n=200", mv_bad));

  double dt = now_s() - t0;
  c.require(dt < budget_s, fmt("suite took %.1fs, budget %.0fs", dt, budget_s));
  c.note = fmt("cover %.3f/%.3f pack %.3f/" , cov_good, cov_bad, pack_good) +
           fmt("%.3f parity %.3f/%.3f", pack_bad, mv_good, mv_bad);
}

void c08_superposition_monte_carlo(Criterion& c) {
  const double q = 0.7, bias = 0.6;
  MartonExperiment ex;
  ex.ch = z_pipe_pair(q);
  ex.aux = z_pipe_aux(bias);
  double info =
      mutual_information(induced_joint(ex.aux, nullptr, ex.ch), {"U1"}, {"Y1"});
  ex.rates.r1p = 0.9 * info;
  ex.rates.r2p = 0.9 * info;
  ex.n_list = {20, 40, 80};
  ex.trials = 2000;
  ex.eps = 0.40;
  ex.seed = 20260823;
  ex.workers = worker_count();
  auto pts = run_marton_experiment(ex);
  c.require(pts[0].error_rate > pts[1].error_rate &&
                pts[1].error_rate > pts[2].error_rate,
            fmt("inside rates: error %.3f/%.3f/%.3f not strictly decreasing",
                pts[0].error_rate, pts[1].error_rate, pts[2].error_rate));

  // a single-letter bound on each pipe caps the sum; 10% beyond it the
  // decoder has to fail more often than not
  double cap = std::log2(1.0 + (1.0 - q) * std::pow(q, q / (1.0 - q)));
  MartonExperiment over = ex;
  over.rates.r1p = 1.1 * cap;
  over.rates.r2p = 1.1 * cap;
  over.n_list = {80};
  auto opts = run_marton_experiment(over);
  c.require(opts[0].error_rate >= 0.5,
            fmt("10%% past the pipe cap: error %.3f at n=80 below 0.5",
                opts[0].error_rate));
  c.note =
      fmt("inside errors %.3f/%.3f/%.3f, ", pts[0].error_rate,
          pts[1].error_rate, pts[2].error_rate) +
      fmt("past-cap error %.3f at n=80", opts[0].error_rate);
}

void c09_block_chain(Criterion& c) {
  const double budget_s = 900.0;
  double t0 = now_s();
  BlockMarkovExperiment ex;
  ex.n_list = {12, 16, 20};
  ex.trials = 1000;
  ex.sum_rate = 1.2;
  ex.seed = 777;
  ex.workers = worker_count();
  ex.with_feedback = true;
  auto fb = run_block_markov(ex);
  ex.with_feedback = false;
  auto base = run_block_markov(ex);

  c.require(fb[0].error_rate > fb[1].error_rate &&
                fb[1].error_rate > fb[2].error_rate,
            fmt("feedback chain error %.3f/%.3f/%.3f not strictly decreasing",
                fb[0].error_rate, fb[1].error_rate, fb[2].error_rate));
  for (int i = 0; i < 3; ++i)
    c.require(fb[static_cast<std::size_t>(i)].error_rate <
                  base[static_cast<std::size_t>(i)].error_rate,
              fmt("n=%g: feedback %.3f not below the matched no-feedback %.3f",
                  static_cast<double>(ex.n_list[static_cast<std::size_t>(i)]),
                  fb[static_cast<std::size_t>(i)].error_rate,
                  base[static_cast<std::size_t>(i)].error_rate));
  double dt = now_s() - t0;
  c.require(dt < budget_s, fmt("chain runs took %.0fs, budget %.0fs", dt,
                               budget_s));
  c.note = fmt("sum 1.2 over pipes worth 1.0: feedback %.3f/%.3f/%.3f, ",
               fb[0].error_rate, fb[1].error_rate, fb[2].error_rate) +
           fmt("baseline %.3f/%.3f/%.3f", base[0].error_rate,
               base[1].error_rate, base[2].error_rate);
}

void c10_invariants(Criterion& c) {
  // information identities on random laws
  RngStream rng(515);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> mass(8);
    double total = 0.0;
    for (auto& m : mass) {
      m = -std::log(1.0 - rng.next_double());
      total += m;
    }
    for (auto& m : mass) m /= total;
    JointPmf p({{"A", 2}, {"B", 2}, {"C", 2}}, mass);
    double mi = mutual_information(p, {"A"}, {"B"});
    double viaH = entropy(p, {"A"}) + entropy(p, {"B"}) - entropy(p, {"A", "B"});
    c.require(std::fabs(mi - viaH) <= 1e-12, "information chain rule broke");
    c.require(mi >= -1e-12, "negative mutual information");
    c.require(mutual_information(p, {"A"}, {"B"}, {"C"}) >= -1e-12,
              "negative conditional mutual information");
  }

  // a constant update adds nothing: the feedback region collapses to the
  // plain superposition region
  Dmbc ch = dueck_channel(correlated_noise(), 0.0);
  AuxScheme aux = dueck_aux();
  UpdateScheme constant = const_update(aux, ch, UpdateScheme::kFull);
  c.require(region_equal(feedback_inner(aux, constant, ch),
                         marton_region(aux, ch), 1e-7),
            "constant-update feedback region differs from the plain region");

  // the starred update conditions on less and can only shrink the region
  BlackwellParams bp;
  bp.p = 0.2;
  bp.feedback.kind = FeedbackConfig::kNoiseless;
  Dmbc tch = make_blackwell(bp);
  AuxScheme taux = blackwell_aux(0.3, 0.25);
  UpdateScheme star = blackwell_update();
  UpdateScheme widened = widen_star_update(star, taux, tch);
  c.require(region_subset(feedback_inner(taux, star, tch),
                          feedback_inner(taux, widened, tch), 1e-7),
            "starred update region escapes the full update region");

  // typicality only ever widens with eps
  std::vector<int> xs{0, 1, 1, 0, 1, 0, 0, 0};
  std::vector<int> ys{0, 1, 0, 0, 1, 1, 0, 0};
  JointPmf law({{"X", 2}, {"Y", 2}}, {0.4, 0.1, 0.1, 0.4});
  bool prev = false;
  for (double eps = 0.0; eps <= 2.0; eps += 0.05) {
    bool cur = is_jointly_typical({&xs, &ys}, law, eps);
    c.require(!prev || cur, fmt("typicality flipped back off at eps=%.2f", eps));
    prev = cur;
  }

  // fixed seeds reproduce monte carlo counts exactly
  LgwExperiment lex;
  lex.scheme.v = {Alphabet{"V0", 2}, Alphabet{"V1", 1}, Alphabet{"V2", 1}};
  std::vector<double> cmass{1.0, 0.0, 0.0, 1.0};
  lex.scheme.law =
      ConditionalPmf({{"X", 2}}, {{"V0", 2}, {"V1", 1}, {"V2", 1}}, cmass);
  std::vector<double> smass(18, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y1 : {x, 2})
      for (int y2 : {x, 2})
        smass[static_cast<std::size_t>((x * 3 + y1) * 3 + y2)] = 0.125;
  lex.source = JointPmf({{"X", 2}, {"Y1", 3}, {"Y2", 3}}, smass);
  lex.bin_rate = {0.85, 0, 0};
  lex.in_rate = {0.2, 0, 0};
  lex.n_list = {12};
  lex.trials = 200;
  lex.eps = 1.2;
  lex.seed = 4242;
  lex.workers = worker_count();
  auto one = run_lgw_experiment(lex);
  auto two = run_lgw_experiment(lex);
  c.require(one[0].errors == two[0].errors &&
                one[0].fallbacks == two[0].fallbacks,
            "repeated seeded runs disagree");
  c.note = "identities, collapse, inclusion, monotonicity, determinism";
}

}  // namespace

int main() {
  std::printf("acceptance gate, %d workers\n", worker_count());
  run_criterion("01 split projections match their closed forms",
                c01_split_projection);
  run_criterion("02 description and combined projections match",
                c02_description_projections);
  run_criterion("03 three-bit pipe anchors", c03_pipe_anchors);
  run_criterion("04 sum-rate gap tracks the noise chain condition",
                c04_chain_condition);
  run_criterion("05 ternary channel bound ordering", c05_ternary_bounds);
  run_criterion("06 noisy return link keeps the gain", c06_noisy_link);
  run_criterion("07 existence probabilities split at the rate",
                c07_existence_suite);
  run_criterion("08 superposition code error trend and converse",
                c08_superposition_monte_carlo);
  run_criterion("09 block chain beats its no-feedback twin", c09_block_chain);
  run_criterion("10 module invariants", c10_invariants);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
