#include "bcfb/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace bcfb {
namespace {

// Counts are integers, expectations are not; a hair of slack keeps the
// comparison from flipping on representation noise.
constexpr double kCountSlack = 1e-9;

bool count_ok(double count, double want, double eps) {
  return std::fabs(count - want) <= eps * want + kCountSlack;
}

double unit_double(std::uint64_t w) {
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
  if (a > 0 && b > std::numeric_limits<std::int64_t>::max() / a)
    throw ResourceCapError(std::string(what) + ": index space overflows");
  return a * b;
}

// per-candidate budget accounting; throws once a scan stage overruns
void charge(std::int64_t& budget, std::int64_t amount) {
  budget -= amount;
  if (budget < 0)
    throw ResourceCapError(
        "candidate scan exceeded the resource budget; lower the rates or "
        "raise BCFB_RESOURCE_CAP");
}

int mapped_sym(const SymbolMap& m, int s) {
  return m.table.empty() ? s : m.table.at(static_cast<std::size_t>(s));
}

void validate_map(const SymbolMap& m, int source_alpha, int target_alpha) {
  if (m.table.empty()) {
    if (source_alpha > target_alpha)
      throw std::invalid_argument(
          "typicality map: identity map cannot shrink the alphabet");
    return;
  }
  if (static_cast<int>(m.table.size()) < source_alpha)
    throw std::invalid_argument("typicality map: table shorter than alphabet");
  for (int v : m.table)
    if (v < 0 || v >= target_alpha)
      throw std::invalid_argument("typicality map: table entry out of range");
}

// all roles pinned; counts the mapped tuple against the track law
bool track_typical(const TypTrack& track,
                   const std::vector<const std::vector<int>*>& seqs, int n,
                   double eps) {
  const JointPmf& law = track.law;
  std::size_t k = law.axes().size();
  if (track.maps.size() != k)
    throw std::invalid_argument("typicality track: one map per law axis");
  std::vector<std::size_t> strides(k, 1);
  for (int a = static_cast<int>(k) - 2; a >= 0; --a)
    strides[a] = strides[a + 1] *
                 static_cast<std::size_t>(law.axes()[a + 1].size);

  std::vector<std::int64_t> counts(law.cells(), 0);
  for (int j = 0; j < n; ++j) {
    std::size_t cell = 0;
    for (std::size_t a = 0; a < k; ++a) {
      const SymbolMap& m = track.maps[a];
      if (m.role < 0 || static_cast<std::size_t>(m.role) >= seqs.size())
        throw std::invalid_argument("typicality track: missing sequence");
      const std::vector<int>* s = seqs[static_cast<std::size_t>(m.role)];
      if (s == nullptr)
        throw std::invalid_argument("typicality track: missing sequence");
      int sym = (*s)[static_cast<std::size_t>(j)];
      int t = mapped_sym(m, sym);
      if (t < 0 || t >= law.axes()[a].size)
        throw std::invalid_argument("typicality track: symbol out of range");
      cell += strides[a] * static_cast<std::size_t>(t);
    }
    ++counts[cell];
  }
  for (std::size_t c = 0; c < law.cells(); ++c)
    if (!count_ok(static_cast<double>(counts[c]), n * law[c], eps))
      return false;
  return true;
}

// One candidate role swept against pinned sequences.  Preparation folds the
// pinned symbols into per-position cell offsets, derives which candidate
// symbols are even possible at each position (zero-mass cells), and sets the
// count windows.  check() then streams one codeword with early abort; for
// packed binary books the forced positions collapse to a masked word
// comparison before any per-symbol work.
class CandidateScan {
 public:
  CandidateScan(const std::vector<const TypTrack*>& tracks, int cand_role,
                int cand_alpha,
                const std::vector<const std::vector<int>*>& seqs, int n,
                double eps)
      : n_(n), alpha_(cand_alpha) {
    allowed_.assign(static_cast<std::size_t>(n) * cand_alpha, 1);
    for (const TypTrack* track : tracks) {
      bool touches = false;
      for (const auto& m : track->maps) touches |= m.role == cand_role;
      if (!touches) {
        feasible_ = feasible_ && track_typical(*track, seqs, n, eps);
        continue;
      }
      prepare_track(*track, cand_role, seqs, eps);
    }
    for (int j = 0; feasible_ && j < n_; ++j) {
      bool any = false;
      for (int s = 0; s < alpha_; ++s)
        any |= allowed_[static_cast<std::size_t>(j) * alpha_ + s] != 0;
      feasible_ = any;
    }
    if (alpha_ == 2) build_masks();
  }

  bool feasible() const { return feasible_; }

  bool check(const LazyBook& book, LazyBook::Cursor cur,
             const std::vector<int>* cond) {
    if (!feasible_) return false;
    ++epoch_;
    if (book.packed() && alpha_ == 2) {
      int words = (n_ + 63) / 64;
      for (int w = 0; w < words; ++w) {
        std::uint64_t x = book.word(cur, w);
        if ((x & mask_[w]) != pattern_[w]) return false;
        scratch_[w] = x;
      }
      for (int j = 0; j < n_; ++j) {
        int s = static_cast<int>((scratch_[j >> 6] >> (j & 63)) & 1);
        for (auto& tr : tracks_) bump(tr, j, s);
      }
    } else {
      for (int j = 0; j < n_; ++j) {
        int s = book.symbol(cur, j, cond ? (*cond)[j] : 0);
        if (!allowed_[static_cast<std::size_t>(j) * alpha_ + s]) return false;
        for (auto& tr : tracks_) bump(tr, j, s);
      }
    }
    for (const auto& tr : tracks_) {
      for (std::size_t c = 0; c < tr.lo.size(); ++c) {
        double v = tr.stamp[c] == epoch_ ? tr.counts[c] : 0.0;
        if (v < tr.lo[c] || v > tr.hi[c]) return false;
      }
    }
    return true;
  }

 private:
  struct Tr {
    const JointPmf* law;
    std::vector<std::int32_t> base;  // pinned-part cell per position
    std::size_t stride = 0;          // candidate axis stride
    std::vector<int> cmap;           // candidate symbol map; empty = identity
    std::vector<double> lo, hi;
    std::vector<std::int32_t> counts;
    std::vector<std::int64_t> stamp;
  };

  void bump(Tr& tr, int j, int s) {
    int t = tr.cmap.empty() ? s : tr.cmap[static_cast<std::size_t>(s)];
    std::size_t cell =
        static_cast<std::size_t>(tr.base[j]) + tr.stride * t;
    if (tr.stamp[cell] != epoch_) {
      tr.stamp[cell] = epoch_;
      tr.counts[cell] = 0;
    }
    ++tr.counts[cell];
  }

  void prepare_track(const TypTrack& track, int cand_role,
                     const std::vector<const std::vector<int>*>& seqs,
                     double eps) {
    const JointPmf& law = track.law;
    std::size_t k = law.axes().size();
    if (track.maps.size() != k)
      throw std::invalid_argument("typicality track: one map per law axis");
    std::vector<std::size_t> strides(k, 1);
    for (int a = static_cast<int>(k) - 2; a >= 0; --a)
      strides[a] = strides[a + 1] *
                   static_cast<std::size_t>(law.axes()[a + 1].size);

    Tr tr;
    tr.law = &law;
    tr.base.assign(n_, 0);
    int cand_axis = -1;
    for (std::size_t a = 0; a < k; ++a) {
      const SymbolMap& m = track.maps[a];
      if (m.role == cand_role) {
        if (cand_axis >= 0)
          throw std::invalid_argument(
              "typicality track: candidate role appears twice");
        cand_axis = static_cast<int>(a);
        tr.stride = strides[a];
        validate_map(m, alpha_, law.axes()[a].size);
        tr.cmap = m.table;
        continue;
      }
      if (m.role < 0 || static_cast<std::size_t>(m.role) >= seqs.size())
        throw std::invalid_argument("typicality track: missing sequence");
      const std::vector<int>* s = seqs[static_cast<std::size_t>(m.role)];
      if (s == nullptr)
        throw std::invalid_argument("typicality track: missing sequence");
      if (static_cast<int>(s->size()) != n_)
        throw std::invalid_argument("typicality track: length mismatch");
      for (int j = 0; j < n_; ++j) {
        int t = mapped_sym(m, (*s)[static_cast<std::size_t>(j)]);
        if (t < 0 || t >= law.axes()[a].size)
          throw std::invalid_argument(
              "typicality track: symbol out of range");
        tr.base[j] += static_cast<std::int32_t>(strides[a] *
                                                static_cast<std::size_t>(t));
      }
    }

    tr.lo.resize(law.cells());
    tr.hi.resize(law.cells());
    for (std::size_t c = 0; c < law.cells(); ++c) {
      double want = n_ * law[c];
      tr.lo[c] = want - eps * want - kCountSlack;
      tr.hi[c] = want + eps * want + kCountSlack;
    }
    for (int j = 0; j < n_; ++j)
      for (int s = 0; s < alpha_; ++s) {
        int t = tr.cmap.empty() ? s : tr.cmap[static_cast<std::size_t>(s)];
        std::size_t cell =
            static_cast<std::size_t>(tr.base[j]) + tr.stride * t;
        if (law[cell] == 0.0)
          allowed_[static_cast<std::size_t>(j) * alpha_ + s] = 0;
      }
    tr.counts.assign(law.cells(), 0);
    tr.stamp.assign(law.cells(), -1);
    tracks_.push_back(std::move(tr));
  }

  void build_masks() {
    int words = (n_ + 63) / 64;
    mask_.assign(words, 0);
    pattern_.assign(words, 0);
    scratch_.assign(words, 0);
    for (int j = 0; j < n_; ++j) {
      bool a0 = allowed_[static_cast<std::size_t>(j) * 2] != 0;
      bool a1 = allowed_[static_cast<std::size_t>(j) * 2 + 1] != 0;
      if (a0 && a1) continue;
      mask_[j >> 6] |= 1ull << (j & 63);
      if (a1) pattern_[j >> 6] |= 1ull << (j & 63);
    }
  }

  int n_, alpha_;
  bool feasible_ = true;
  std::vector<Tr> tracks_;
  std::vector<std::uint8_t> allowed_;
  std::vector<std::uint64_t> mask_, pattern_, scratch_;
  std::int64_t epoch_ = 0;
};

std::vector<const TypTrack*> track_ptrs(const TypicalityModel& m) {
  std::vector<const TypTrack*> out;
  for (const auto& t : m.tracks) out.push_back(&t);
  return out;
}

bool track_uses(const TypTrack& t, int role) {
  for (const auto& m : t.maps)
    if (m.role == role) return true;
  return false;
}

// ---------------------------------------------------------------------------
// worker pool

struct TrialSums {
  std::int64_t errors = 0;
  std::int64_t fallbacks = 0;
};

TrialSums run_trials(std::int64_t trials, int workers,
                     const std::function<TrialSums(std::int64_t)>& one) {
  if (trials < 0) throw std::invalid_argument("trial count must be >= 0");
  if (workers < 1) workers = 1;
  if (workers == 1) {
    TrialSums total;
    for (std::int64_t t = 0; t < trials; ++t) {
      TrialSums s = one(t);
      total.errors += s.errors;
      total.fallbacks += s.fallbacks;
    }
    return total;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex merge;
  TrialSums total;
  std::exception_ptr first_error;
  auto body = [&]() {
    TrialSums local;
    try {
      for (;;) {
        std::int64_t t = next.fetch_add(1);
        if (t >= trials) break;
        TrialSums s = one(t);
        local.errors += s.errors;
        local.fallbacks += s.fallbacks;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(merge);
      if (!first_error) first_error = std::current_exception();
      return;
    }
    std::lock_guard<std::mutex> lock(merge);
    total.errors += local.errors;
    total.fallbacks += local.fallbacks;
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return total;
}

ExperimentPoint make_point(int n, std::int64_t trials, TrialSums sums,
                           std::int64_t fallback_slots) {
  ExperimentPoint p;
  p.n = n;
  p.trials = trials;
  p.errors = sums.errors;
  p.fallbacks = sums.fallbacks;
  p.error_rate = trials ? static_cast<double>(sums.errors) / trials : 0.0;
  p.fallback_rate =
      fallback_slots ? static_cast<double>(sums.fallbacks) / fallback_slots
                     : 0.0;
  return p;
}

// cumulative cells of a joint law, for direct iid sampling
std::vector<double> law_cdf(const JointPmf& law) {
  std::vector<double> cdf(law.cells());
  double acc = 0.0;
  for (std::size_t c = 0; c < law.cells(); ++c) {
    acc += law[c];
    cdf[c] = acc;
  }
  return cdf;
}

std::size_t draw_cell(const std::vector<double>& cdf, RngStream& rng) {
  double u = rng.next_double();
  for (std::size_t c = 0; c < cdf.size(); ++c)
    if (u < cdf[c]) return c;
  return cdf.size() - 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// typicality

bool is_jointly_typical(const std::vector<const std::vector<int>*>& seqs,
                        const JointPmf& law, double eps) {
  if (eps < 0) throw std::invalid_argument("typicality: eps must be >= 0");
  if (seqs.size() != law.axes().size())
    throw std::invalid_argument("typicality: one sequence per law axis");
  TypTrack track;
  track.law = law;
  for (std::size_t a = 0; a < seqs.size(); ++a)
    track.maps.push_back({static_cast<int>(a), {}});
  int n = -1;
  for (const auto* s : seqs) {
    if (s == nullptr) throw std::invalid_argument("typicality: null sequence");
    if (n < 0) n = static_cast<int>(s->size());
    if (static_cast<int>(s->size()) != n)
      throw std::invalid_argument("typicality: sequence lengths differ");
  }
  if (n <= 0) throw std::invalid_argument("typicality: empty sequences");
  return track_typical(track, seqs, n, eps);
}

TypicalityModel full_model(const JointPmf& law) {
  TypicalityModel m;
  TypTrack t;
  t.law = law;
  for (std::size_t a = 0; a < law.axes().size(); ++a)
    t.maps.push_back({static_cast<int>(a), {}});
  m.tracks.push_back(std::move(t));
  return m;
}

bool model_typical(const TypicalityModel& model,
                   const std::vector<const std::vector<int>*>& seqs,
                   double eps) {
  if (eps < 0) throw std::invalid_argument("typicality: eps must be >= 0");
  int n = -1;
  for (const auto* s : seqs)
    if (s != nullptr) {
      n = static_cast<int>(s->size());
      break;
    }
  if (n < 0) {
    if (!model.tracks.empty())
      throw std::invalid_argument("typicality: no sequences supplied");
    return true;
  }
  for (const auto& track : model.tracks)
    if (!track_typical(track, seqs, n, eps)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// resource cap

std::int64_t resource_cap() {
  static const std::int64_t cap = [] {
    const char* env = std::getenv("BCFB_RESOURCE_CAP");
    std::int64_t v = std::int64_t{1} << 22;
    if (env != nullptr && *env != '\0') {
      char* end = nullptr;
      long long parsed = std::strtoll(env, &end, 10);
      if (end != nullptr && *end == '\0' && parsed > 0) v = parsed;
    }
    // keep index-space products inside int64
    return std::min<std::int64_t>(v, std::int64_t{1} << 30);
  }();
  return cap;
}

// ---------------------------------------------------------------------------
// lazy codebooks

LazyBook::LazyBook(std::uint64_t key, int n, int alphabet,
                   std::vector<double> rows)
    : key_(key), n_(n), alphabet_(alphabet) {
  if (n < 1) throw std::invalid_argument("codebook: length must be positive");
  if (alphabet < 1)
    throw std::invalid_argument("codebook: alphabet must be positive");
  if (rows.empty() || rows.size() % static_cast<std::size_t>(alphabet) != 0)
    throw std::invalid_argument("codebook: rows must stack full pmfs");
  rows_ = static_cast<int>(rows.size() / static_cast<std::size_t>(alphabet));
  cdf_.resize(rows.size());
  packed_ = alphabet == 2;
  for (int r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (int s = 0; s < alphabet; ++s) {
      double p = rows[static_cast<std::size_t>(r) * alphabet + s];
      if (p < 0) throw std::invalid_argument("codebook: negative mass");
      acc += p;
      cdf_[static_cast<std::size_t>(r) * alphabet + s] = acc;
    }
    if (std::fabs(acc - 1.0) > kNormTol)
      throw std::invalid_argument("codebook: row does not sum to one");
    if (packed_ &&
        std::fabs(rows[static_cast<std::size_t>(r) * 2] - 0.5) > 1e-12)
      packed_ = false;
  }
}

LazyBook::Cursor LazyBook::at(std::int64_t codeword) const {
  return {derive_key(key_, static_cast<std::uint64_t>(codeword))};
}

std::uint64_t LazyBook::word(Cursor c, int w) const {
  return prf_word(c.key, static_cast<std::uint64_t>(w));
}

int LazyBook::symbol(Cursor c, int j, int row) const {
  if (packed_)
    return static_cast<int>((word(c, j >> 6) >> (j & 63)) & 1);
  double u = unit_double(prf_word(c.key, static_cast<std::uint64_t>(j)));
  const double* cdf = cdf_.data() + static_cast<std::size_t>(row) * alphabet_;
  for (int s = 0; s + 1 < alphabet_; ++s)
    if (u < cdf[s]) return s;
  return alphabet_ - 1;
}

std::vector<int> LazyBook::fill(std::int64_t codeword,
                                const std::vector<int>* cond) const {
  if (rows_ > 1 && cond == nullptr)
    throw std::invalid_argument("codebook: conditional book needs a sequence");
  if (cond != nullptr && static_cast<int>(cond->size()) != n_)
    throw std::invalid_argument("codebook: conditioning length mismatch");
  Cursor c = at(codeword);
  std::vector<int> out(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    int row = cond ? (*cond)[static_cast<std::size_t>(j)] : 0;
    if (row < 0 || row >= rows_)
      throw std::invalid_argument("codebook: conditioning symbol out of range");
    out[static_cast<std::size_t>(j)] = symbol(c, j, row);
  }
  return out;
}

std::int64_t rate_count(int n, double rate) {
  if (n < 1) throw std::invalid_argument("rate_count: length must be positive");
  if (rate < 0) throw std::invalid_argument("rate_count: negative rate");
  long double v = std::exp2(static_cast<long double>(n) * rate);
  if (v > 4.5e18L)
    throw ResourceCapError("rate_count: index space exceeds 2^62");
  std::int64_t c = static_cast<std::int64_t>(std::floor(v + 1e-6L));
  return c < 1 ? 1 : c;
}

// ---------------------------------------------------------------------------
// superposition code

MartonSizes marton_sizes(const MartonRates& r, int n) {
  MartonSizes s;
  s.m0 = rate_count(n, r.r0);
  s.m1c = rate_count(n, r.r1c);
  s.m2c = rate_count(n, r.r2c);
  s.m1p = rate_count(n, r.r1p);
  s.m2p = rate_count(n, r.r2p);
  s.l1 = rate_count(n, r.r1b);
  s.l2 = rate_count(n, r.r2b);
  return s;
}

namespace {

void validate_aux(const AuxScheme& aux) {
  if (aux.law.axes().size() != 3)
    throw std::invalid_argument("aux scheme: law needs three axes");
  std::size_t cells = 1;
  for (int a = 0; a < 3; ++a) {
    if (aux.u[a].size != aux.law.axes()[a].size)
      throw std::invalid_argument("aux scheme: alphabet sizes disagree");
    cells *= static_cast<std::size_t>(aux.u[a].size);
  }
  if (aux.f.size() != cells)
    throw std::invalid_argument("aux scheme: symbol map size mismatch");
}

void build_marton_books(MartonCode& code) {
  const JointPmf& law = code.aux.law;
  int a0 = law.axes()[0].size, a1 = law.axes()[1].size,
      a2 = law.axes()[2].size;
  std::vector<double> p0(a0, 0.0);
  std::vector<double> rows1(static_cast<std::size_t>(a0) * a1, 0.0);
  std::vector<double> rows2(static_cast<std::size_t>(a0) * a2, 0.0);
  std::vector<int> sym;
  for (std::size_t c = 0; c < law.cells(); ++c) {
    law.unflatten(c, sym);
    p0[sym[0]] += law[c];
    rows1[static_cast<std::size_t>(sym[0]) * a1 + sym[1]] += law[c];
    rows2[static_cast<std::size_t>(sym[0]) * a2 + sym[2]] += law[c];
  }
  auto normalize = [](std::vector<double>& rows, int alpha) {
    int nrows = static_cast<int>(rows.size()) / alpha;
    for (int r = 0; r < nrows; ++r) {
      double tot = 0.0;
      for (int s = 0; s < alpha; ++s)
        tot += rows[static_cast<std::size_t>(r) * alpha + s];
      for (int s = 0; s < alpha; ++s) {
        double& v = rows[static_cast<std::size_t>(r) * alpha + s];
        // unreachable conditioning symbols get a uniform placeholder row
        v = tot > 0 ? v / tot : 1.0 / alpha;
      }
    }
  };
  normalize(rows1, a1);
  normalize(rows2, a2);
  code.c0 = LazyBook(derive_key(code.seed, 0), code.n, a0, p0);
  code.c1 = LazyBook(derive_key(code.seed, 1), code.n, a1, rows1);
  code.c2 = LazyBook(derive_key(code.seed, 2), code.n, a2, rows2);
}

}  // namespace

std::vector<int> MartonCode::u0_seq(std::int64_t mc) const {
  return c0.fill(mc);
}

std::int64_t MartonCode::sat_index(int i, std::int64_t mc, std::int64_t bin,
                                   std::int64_t idx) const {
  std::int64_t bins = i == 1 ? sizes.m1p : sizes.m2p;
  std::int64_t per = i == 1 ? sizes.l1 : sizes.l2;
  return (mc * bins + bin) * per + idx;
}

std::vector<int> MartonCode::ui_seq(int i, std::int64_t mc, std::int64_t bin,
                                    std::int64_t idx,
                                    const std::vector<int>& u0) const {
  const LazyBook& b = i == 1 ? c1 : c2;
  return b.fill(sat_index(i, mc, bin, idx), &u0);
}

MartonCode gen_marton_code(const AuxScheme& aux, const Dmbc& ch,
                           const MartonRates& rates, int n,
                           std::uint64_t seed) {
  validate_aux(aux);
  MartonCode code;
  code.aux = aux;
  code.n = n;
  code.seed = seed;
  code.sizes = marton_sizes(rates, n);
  // every decoder must at least sweep one common layer and one bin level
  std::int64_t cap = resource_cap();
  std::int64_t common =
      checked_mul(checked_mul(code.sizes.m0, code.sizes.m1c, "common layer"),
                  code.sizes.m2c, "common layer");
  if (common > cap)
    throw ResourceCapError("common layer larger than the resource budget");
  if (checked_mul(code.sizes.m1p, code.sizes.l1, "satellite 1") > cap ||
      checked_mul(code.sizes.m2p, code.sizes.l2, "satellite 2") > cap)
    throw ResourceCapError("satellite level larger than the resource budget");
  build_marton_books(code);
  JointPmf joint = induced_joint(aux, nullptr, ch);
  code.enc_model = full_model(aux.law);
  code.dec_model[0] = full_model(marginalize(joint, {"U0", "U1", "Y1"}));
  code.dec_model[1] = full_model(marginalize(joint, {"U0", "U2", "Y2"}));
  return code;
}

MartonEncodeResult marton_encode(const MartonCode& code,
                                 const MartonMessages& msg, double eps,
                                 RngStream& rng) {
  const MartonSizes& sz = code.sizes;
  if (msg.m0 < 0 || msg.m0 >= sz.m0 || msg.m1c < 0 || msg.m1c >= sz.m1c ||
      msg.m2c < 0 || msg.m2c >= sz.m2c || msg.m1p < 0 || msg.m1p >= sz.m1p ||
      msg.m2p < 0 || msg.m2p >= sz.m2p)
    throw std::invalid_argument("encode: message outside the index space");
  double enc_eps = eps / 32;
  std::int64_t mc = (msg.m0 * sz.m1c + msg.m1c) * sz.m2c + msg.m2c;
  std::vector<int> u0 = code.u0_seq(mc);

  MartonEncodeResult out;
  if (sz.l1 == 1 && sz.l2 == 1) {
    std::vector<int> u1 = code.ui_seq(1, mc, msg.m1p, 0, u0);
    std::vector<int> u2 = code.ui_seq(2, mc, msg.m2p, 0, u0);
    out.fallback = !model_typical(code.enc_model, {&u0, &u1, &u2}, enc_eps);
  } else {
    std::int64_t budget = resource_cap();
    std::int64_t matches = 0;
    int a2 = code.aux.u[2].size;
    for (std::int64_t l1 = 0; l1 < sz.l1; ++l1) {
      std::vector<int> u1 = code.ui_seq(1, mc, msg.m1p, l1, u0);
      CandidateScan scan(track_ptrs(code.enc_model), 2, a2,
                         {&u0, &u1, nullptr}, code.n, enc_eps);
      if (!scan.feasible()) {
        charge(budget, 1);
        continue;
      }
      for (std::int64_t l2 = 0; l2 < sz.l2; ++l2) {
        charge(budget, 1);
        std::int64_t id = code.sat_index(2, mc, msg.m2p, l2);
        if (!scan.check(code.c2, code.c2.at(id), &u0)) continue;
        ++matches;
        if (rng.next_below(static_cast<std::uint64_t>(matches)) == 0) {
          out.l1 = l1;
          out.l2 = l2;
        }
      }
    }
    if (matches == 0) {
      out.fallback = true;
      out.l1 = static_cast<std::int64_t>(
          rng.next_below(static_cast<std::uint64_t>(sz.l1)));
      out.l2 = static_cast<std::int64_t>(
          rng.next_below(static_cast<std::uint64_t>(sz.l2)));
    }
  }

  std::vector<int> u1 = code.ui_seq(1, mc, msg.m1p, out.l1, u0);
  std::vector<int> u2 = code.ui_seq(2, mc, msg.m2p, out.l2, u0);
  int a1 = code.aux.u[1].size, a2 = code.aux.u[2].size;
  out.x.resize(u0.size());
  for (std::size_t j = 0; j < u0.size(); ++j)
    out.x[j] = code.aux.f[static_cast<std::size_t>(
        (u0[j] * a1 + u1[j]) * a2 + u2[j])];
  return out;
}

MartonDecodeResult marton_decode(const MartonCode& code, int receiver,
                                 const std::vector<const std::vector<int>*>& obs,
                                 double eps, RngStream& rng) {
  if (receiver != 1 && receiver != 2)
    throw std::invalid_argument("decode: receiver must be 1 or 2");
  const TypicalityModel& model = code.dec_model[receiver - 1];
  const MartonSizes& sz = code.sizes;
  const LazyBook& sat = receiver == 1 ? code.c1 : code.c2;
  std::int64_t bins = receiver == 1 ? sz.m1p : sz.m2p;
  std::int64_t per = receiver == 1 ? sz.l1 : sz.l2;
  std::int64_t level = bins * per;
  int a0 = code.aux.u[0].size;
  int ai = code.aux.u[receiver].size;

  std::vector<const std::vector<int>*> seqs(2 + obs.size(), nullptr);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (obs[k] == nullptr || static_cast<int>(obs[k]->size()) != code.n)
      throw std::invalid_argument("decode: bad observation sequence");
    seqs[2 + k] = obs[k];
  }
  for (const auto& track : model.tracks)
    for (const auto& m : track.maps)
      if (m.role >= static_cast<int>(seqs.size()))
        throw std::invalid_argument("decode: model wants a missing sequence");

  bool mixed = false;
  for (const auto& track : model.tracks)
    mixed |= track_uses(track, 0) && track_uses(track, 1);

  MartonDecodeResult res;
  std::int64_t mc_hat = -1, flat_hat = -1;
  auto parse = [&]() {
    res.m2c = mc_hat % sz.m2c;
    res.m1c = (mc_hat / sz.m2c) % sz.m1c;
    res.m0 = mc_hat / (sz.m2c * sz.m1c);
    res.mp = flat_hat / per;
    res.l = flat_hat % per;
    return res;
  };

  if (!mixed) {
    std::vector<const TypTrack*> ctracks, itracks;
    for (const auto& track : model.tracks) {
      if (track_uses(track, 1))
        itracks.push_back(&track);
      else
        ctracks.push_back(&track);  // common tracks plus pure checks
    }
    std::int64_t budget = resource_cap();
    CandidateScan cscan(ctracks, 0, a0, seqs, code.n, eps);
    std::int64_t cmatches = 0;
    for (std::int64_t mc = 0; mc < sz.common(); ++mc) {
      charge(budget, 1);
      if (!cscan.check(code.c0, code.c0.at(mc), nullptr)) continue;
      ++cmatches;
      if (rng.next_below(static_cast<std::uint64_t>(cmatches)) == 0)
        mc_hat = mc;
    }
    if (cmatches == 0) {
      res.guessed = true;
      mc_hat = static_cast<std::int64_t>(
          rng.next_below(static_cast<std::uint64_t>(sz.common())));
      flat_hat = static_cast<std::int64_t>(
          rng.next_below(static_cast<std::uint64_t>(level)));
      return parse();
    }
    std::vector<int> u0 = code.u0_seq(mc_hat);
    seqs[0] = &u0;
    budget = resource_cap();
    CandidateScan iscan(itracks, 1, ai, seqs, code.n, eps);
    std::int64_t imatches = 0;
    for (std::int64_t flat = 0; flat < level; ++flat) {
      charge(budget, 1);
      std::int64_t id = mc_hat * level + flat;
      if (!iscan.check(sat, sat.at(id), &u0)) continue;
      ++imatches;
      if (rng.next_below(static_cast<std::uint64_t>(imatches)) == 0)
        flat_hat = flat;
    }
    if (imatches == 0) {
      res.guessed = true;
      flat_hat = static_cast<std::int64_t>(
          rng.next_below(static_cast<std::uint64_t>(level)));
    }
    res.matches = cmatches == 0 ? 0 : imatches;
    return parse();
  }

  // joint sweep: some track couples the common layer to the satellite
  std::int64_t budget = resource_cap();
  std::int64_t matches = 0;
  for (std::int64_t mc = 0; mc < sz.common(); ++mc) {
    std::vector<int> u0 = code.u0_seq(mc);
    seqs[0] = &u0;
    CandidateScan scan(track_ptrs(model), 1, ai, seqs, code.n, eps);
    if (!scan.feasible()) {
      charge(budget, 1);
      continue;
    }
    for (std::int64_t flat = 0; flat < level; ++flat) {
      charge(budget, 1);
      std::int64_t id = mc * level + flat;
      if (!scan.check(sat, sat.at(id), &u0)) continue;
      ++matches;
      if (rng.next_below(static_cast<std::uint64_t>(matches)) == 0) {
        mc_hat = mc;
        flat_hat = flat;
      }
    }
  }
  res.matches = matches;
  if (matches == 0) {
    res.guessed = true;
    mc_hat = static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(sz.common())));
    flat_hat = static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(level)));
  }
  return parse();
}

// ---------------------------------------------------------------------------
// binned description code

LgwSizes lgw_sizes(const std::array<double, 3>& bin_rate,
                   const std::array<double, 3>& in_rate, int n) {
  LgwSizes s;
  for (int c = 0; c < 3; ++c) {
    s.bins[c] = rate_count(n, bin_rate[c]);
    s.per[c] = rate_count(n, in_rate[c]);
  }
  return s;
}

LgwCode gen_lgw_code(const std::array<Alphabet, 3>& v,
                     const std::array<std::vector<double>, 3>& pmf,
                     const LgwSizes& sizes, int n, std::uint64_t seed) {
  LgwCode code;
  code.v = v;
  code.sizes = sizes;
  code.n = n;
  code.seed = seed;
  std::int64_t cap = resource_cap();
  for (int c = 0; c < 3; ++c) {
    if (static_cast<int>(pmf[c].size()) != v[c].size)
      throw std::invalid_argument("description code: pmf size mismatch");
    if (checked_mul(sizes.bins[c], sizes.per[c], "description book") > cap)
      throw ResourceCapError("description book larger than the budget");
    code.books[c] = LazyBook(derive_key(seed, static_cast<std::uint64_t>(c)),
                             n, v[c].size, pmf[c]);
  }
  return code;
}

LgwEncodeResult lgw_encode(const LgwCode& code,
                           const std::vector<const std::vector<int>*>& source,
                           double eps, RngStream& rng) {
  double enc_eps = eps / 2;
  std::vector<const std::vector<int>*> seqs(3 + source.size(), nullptr);
  for (std::size_t k = 0; k < source.size(); ++k) {
    if (source[k] == nullptr ||
        static_cast<int>(source[k]->size()) != code.n)
      throw std::invalid_argument("encode: bad source sequence");
    seqs[3 + k] = source[k];
  }
  for (const auto& track : code.enc_model.tracks)
    for (const auto& m : track.maps)
      if (m.role >= static_cast<int>(seqs.size()))
        throw std::invalid_argument("encode: model wants a missing sequence");

  // single-symbol descriptions have constant codewords, so treat them as
  // pinned instead of letting them drag the search into the joint product
  std::vector<int> zeros;
  std::array<bool, 3> pinned{false, false, false};
  for (int c = 0; c < 3; ++c)
    if (code.v[static_cast<std::size_t>(c)].size == 1) {
      if (zeros.empty()) zeros.assign(static_cast<std::size_t>(code.n), 0);
      seqs[static_cast<std::size_t>(c)] = &zeros;
      pinned[static_cast<std::size_t>(c)] = true;
    }

  // partition tracks by which free description they constrain
  std::array<std::vector<const TypTrack*>, 3> comp;
  std::vector<const TypTrack*> fixed;
  bool joint = false;
  for (const auto& track : code.enc_model.tracks) {
    int hits = 0, which = -1;
    for (int c = 0; c < 3; ++c)
      if (!pinned[static_cast<std::size_t>(c)] && track_uses(track, c)) {
        ++hits;
        which = c;
      }
    if (hits == 0)
      fixed.push_back(&track);
    else if (hits == 1)
      comp[static_cast<std::size_t>(which)].push_back(&track);
    else
      joint = true;
  }

  LgwEncodeResult out;
  auto blind = [&](int c) {
    out.fallback[c] = true;
    out.bin[c] = static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(code.sizes.bins[c])));
    out.idx[c] = static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(code.sizes.per[c])));
  };

  if (joint) {
    std::int64_t budget = resource_cap();
    std::int64_t s0 = code.sizes.bins[0] * code.sizes.per[0];
    std::int64_t s1 = code.sizes.bins[1] * code.sizes.per[1];
    std::int64_t s2 = code.sizes.bins[2] * code.sizes.per[2];
    std::int64_t matches = 0;
    std::array<std::int64_t, 3> pick{0, 0, 0};
    std::vector<const TypTrack*> all = track_ptrs(code.enc_model);
    for (std::int64_t id0 = 0; id0 < s0; ++id0) {
      std::vector<int> v0 = code.books[0].fill(id0);
      seqs[0] = &v0;
      for (std::int64_t id1 = 0; id1 < s1; ++id1) {
        std::vector<int> v1 = code.books[1].fill(id1);
        seqs[1] = &v1;
        CandidateScan scan(all, 2, code.v[2].size, seqs, code.n, enc_eps);
        if (!scan.feasible()) {
          charge(budget, 1);
          continue;
        }
        for (std::int64_t id2 = 0; id2 < s2; ++id2) {
          charge(budget, 1);
          if (!scan.check(code.books[2], code.books[2].at(id2), nullptr))
            continue;
          ++matches;
          if (rng.next_below(static_cast<std::uint64_t>(matches)) == 0)
            pick = {id0, id1, id2};
        }
      }
    }
    if (matches == 0) {
      for (int c = 0; c < 3; ++c) blind(c);
    } else {
      for (int c = 0; c < 3; ++c) {
        out.bin[c] = pick[c] / code.sizes.per[c];
        out.idx[c] = pick[c] % code.sizes.per[c];
      }
    }
    return out;
  }

  bool fixed_ok = true;
  for (const TypTrack* t : fixed)
    fixed_ok = fixed_ok && track_typical(*t, seqs, code.n, enc_eps);

  for (int c = 0; c < 3; ++c) {
    if (!fixed_ok) {
      blind(c);
      continue;
    }
    std::int64_t space = code.sizes.bins[c] * code.sizes.per[c];
    if (comp[c].empty()) {
      // vacuous covering constraint; any codeword serves
      out.bin[c] = static_cast<std::int64_t>(
          rng.next_below(static_cast<std::uint64_t>(code.sizes.bins[c])));
      out.idx[c] = static_cast<std::int64_t>(
          rng.next_below(static_cast<std::uint64_t>(code.sizes.per[c])));
      continue;
    }
    std::int64_t budget = resource_cap();
    CandidateScan scan(comp[c], c, code.v[c].size, seqs, code.n, enc_eps);
    std::int64_t matches = 0, choice = 0;
    if (scan.feasible()) {
      for (std::int64_t id = 0; id < space; ++id) {
        charge(budget, 1);
        if (!scan.check(code.books[c], code.books[c].at(id), nullptr))
          continue;
        ++matches;
        if (rng.next_below(static_cast<std::uint64_t>(matches)) == 0)
          choice = id;
      }
    }
    if (matches == 0) {
      blind(c);
    } else {
      out.bin[c] = choice / code.sizes.per[c];
      out.idx[c] = choice % code.sizes.per[c];
    }
  }
  return out;
}

LgwDecodeResult lgw_decode(const LgwCode& code, int receiver, std::int64_t k0,
                           std::int64_t ki,
                           const std::vector<const std::vector<int>*>& side,
                           double eps, RngStream& rng) {
  if (receiver != 1 && receiver != 2)
    throw std::invalid_argument("decode: receiver must be 1 or 2");
  if (k0 < 0 || k0 >= code.sizes.bins[0] || ki < 0 ||
      ki >= code.sizes.bins[receiver])
    throw std::invalid_argument("decode: bin index out of range");
  const TypicalityModel& model = code.dec_model[receiver - 1];
  std::vector<const std::vector<int>*> seqs(2 + side.size(), nullptr);
  for (std::size_t k = 0; k < side.size(); ++k) {
    if (side[k] == nullptr || static_cast<int>(side[k]->size()) != code.n)
      throw std::invalid_argument("decode: bad side sequence");
    seqs[2 + k] = side[k];
  }
  for (const auto& track : model.tracks)
    for (const auto& m : track.maps)
      if (m.role >= static_cast<int>(seqs.size()))
        throw std::invalid_argument("decode: model wants a missing sequence");

  const LazyBook& b0 = code.books[0];
  const LazyBook& bi = code.books[receiver];
  std::int64_t per0 = code.sizes.per[0];
  std::int64_t peri = code.sizes.per[receiver];

  std::int64_t budget = resource_cap();
  LgwDecodeResult res;
  std::int64_t l0_hat = -1, li_hat = -1;
  std::vector<const TypTrack*> all = track_ptrs(model);
  for (std::int64_t l0 = 0; l0 < per0; ++l0) {
    std::vector<int> v0 = b0.fill(k0 * per0 + l0);
    seqs[0] = &v0;
    CandidateScan scan(all, 1, code.v[receiver].size, seqs, code.n, eps);
    if (!scan.feasible()) {
      charge(budget, 1);
      continue;
    }
    for (std::int64_t li = 0; li < peri; ++li) {
      charge(budget, 1);
      if (!scan.check(bi, bi.at(ki * peri + li), nullptr)) continue;
      if (++res.matches == 1) {
        l0_hat = l0;
        li_hat = li;
      }
    }
  }
  res.unique = res.matches == 1;
  if (!res.unique) {
    l0_hat = static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(per0)));
    li_hat = static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(peri)));
  }
  res.l0 = l0_hat;
  res.li = li_hat;
  res.v0 = b0.fill(k0 * per0 + l0_hat);
  res.vi = bi.fill(ki * peri + li_hat);
  return res;
}

// ---------------------------------------------------------------------------
// block-Markov chaining

namespace {

bool ipow_at_least(std::int64_t d, int g, std::int64_t target) {
  // long double dodges the overflow question for any realistic d^g
  long double v = 1.0L;
  for (int i = 0; i < g; ++i) v *= static_cast<long double>(d);
  return v >= static_cast<long double>(target);
}

std::int64_t nth_root_ceil(std::int64_t v, int g) {
  if (v <= 1) return 1;
  std::int64_t d = static_cast<std::int64_t>(
      std::ceil(std::pow(static_cast<long double>(v), 1.0L / g)));
  if (d < 1) d = 1;
  while (d > 1 && ipow_at_least(d - 1, g, v)) --d;
  while (!ipow_at_least(d, g, v)) ++d;
  return d;
}

MartonCode assemble_marton(const AuxScheme& aux, MartonSizes sizes, int n,
                           std::uint64_t seed,
                           const TypicalityModel& enc_model,
                           const std::array<TypicalityModel, 2>& dec_model) {
  validate_aux(aux);
  MartonCode code;
  code.aux = aux;
  code.sizes = sizes;
  code.n = n;
  code.seed = seed;
  build_marton_books(code);
  code.enc_model = enc_model;
  code.dec_model = dec_model;
  return code;
}

}  // namespace

TrialReport block_markov_trial(const BlockMarkovConfig& cfg,
                               std::int64_t trial) {
  if (cfg.B < 1 || cfg.gamma < 1 || cfg.n < 1)
    throw std::invalid_argument("block chain: B, gamma, n must be positive");
  validate_aux(cfg.aux);
  validate_aux(cfg.slice_aux);
  const int n = cfg.n;
  const int B = cfg.B;
  std::uint64_t root = derive_key(cfg.seed, static_cast<std::uint64_t>(trial));
  LgwSizes lsz = lgw_sizes(cfg.bin_rate, cfg.in_rate, n);
  std::int64_t tspace = checked_mul(
      checked_mul(lsz.bins[0], lsz.bins[1], "bin triple"), lsz.bins[2],
      "bin triple");
  if (tspace > (std::int64_t{1} << 60))
    throw ResourceCapError("bin triple too large to flush");
  std::int64_t d = nth_root_ceil(tspace, cfg.gamma);

  RngStream msg_rng(derive_key(root, 1));
  RngStream ch_rng(derive_key(root, 2));
  RngStream enc_rng(derive_key(root, 3));
  std::array<RngStream, 2> dec_rng{RngStream(derive_key(root, 4)),
                                   RngStream(derive_key(root, 5))};

  TrialReport rep;
  rep.block_error.assign(static_cast<std::size_t>(B), {false, false});

  struct Block {
    MartonCode code;
    LgwCode lgw;
    std::array<std::int64_t, 3> data{0, 0, 0};
    MartonMessages msg;
    std::vector<int> y1, y2;
  };
  std::vector<Block> blocks(static_cast<std::size_t>(B));
  std::array<std::int64_t, 3> kprev{0, 0, 0};

  auto prev_space = [&](int b, int c) {
    return b == 1 ? std::int64_t{1} : lsz.bins[static_cast<std::size_t>(c)];
  };

  // forward pass: superposition block, then describe what the return link
  // showed so the next block can carry the bins
  for (int b = 1; b <= B; ++b) {
    Block& blk = blocks[static_cast<std::size_t>(b - 1)];
    MartonSizes sz;
    sz.m0 = checked_mul(cfg.messages[0], prev_space(b, 0), "common payload");
    sz.m1p = checked_mul(cfg.messages[1], prev_space(b, 1), "satellite 1");
    sz.m2p = checked_mul(cfg.messages[2], prev_space(b, 2), "satellite 2");
    blk.code = assemble_marton(cfg.aux, sz, n,
                               derive_key(root, 100 + static_cast<std::uint64_t>(b)),
                               cfg.marton_enc, cfg.marton_dec);
    for (int c = 0; c < 3; ++c)
      blk.data[c] = static_cast<std::int64_t>(msg_rng.next_below(
          static_cast<std::uint64_t>(cfg.messages[c])));
    blk.msg.m0 = blk.data[0] * prev_space(b, 0) + kprev[0];
    blk.msg.m1p = blk.data[1] * prev_space(b, 1) + kprev[1];
    blk.msg.m2p = blk.data[2] * prev_space(b, 2) + kprev[2];
    MartonEncodeResult enc = marton_encode(blk.code, blk.msg, cfg.eps, enc_rng);
    rep.marton_fallbacks += enc.fallback ? 1 : 0;

    std::vector<int> yt(static_cast<std::size_t>(n));
    blk.y1.resize(static_cast<std::size_t>(n));
    blk.y2.resize(static_cast<std::size_t>(n));
    std::int64_t mc = (blk.msg.m0 * sz.m1c + blk.msg.m1c) * sz.m2c + blk.msg.m2c;
    std::vector<int> u0 = blk.code.u0_seq(mc);
    std::vector<int> u1 = blk.code.ui_seq(1, mc, blk.msg.m1p, enc.l1, u0);
    std::vector<int> u2 = blk.code.ui_seq(2, mc, blk.msg.m2p, enc.l2, u0);
    for (int j = 0; j < n; ++j) {
      ChannelSample s = sample(cfg.ch, enc.x[static_cast<std::size_t>(j)], ch_rng);
      blk.y1[static_cast<std::size_t>(j)] = s.y1;
      blk.y2[static_cast<std::size_t>(j)] = s.y2;
      yt[static_cast<std::size_t>(j)] = s.yt;
    }

    blk.lgw = gen_lgw_code(cfg.v, cfg.v_pmf, lsz, n,
                           derive_key(root, 200 + static_cast<std::uint64_t>(b)));
    blk.lgw.enc_model = cfg.lgw_enc;
    blk.lgw.dec_model = cfg.lgw_dec;

    int a1 = cfg.aux.u[1].size, a2 = cfg.aux.u[2].size;
    int fb = cfg.ch.fb.size;
    std::vector<std::vector<int>> derived(cfg.derived.size());
    for (std::size_t dcomp = 0; dcomp < cfg.derived.size(); ++dcomp) {
      const DerivedComp& dc = cfg.derived[dcomp];
      derived[dcomp].resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        std::size_t cell = static_cast<std::size_t>(
            ((u0[static_cast<std::size_t>(j)] * a1 +
              u1[static_cast<std::size_t>(j)]) *
                 a2 +
             u2[static_cast<std::size_t>(j)]) *
                fb +
            yt[static_cast<std::size_t>(j)]);
        derived[dcomp][static_cast<std::size_t>(j)] = dc.table.at(cell);
      }
    }
    std::vector<const std::vector<int>*> src{&u0, &u1, &u2, &yt};
    for (const auto& dseq : derived) src.push_back(&dseq);
    LgwEncodeResult lenc = lgw_encode(blk.lgw, src, cfg.eps, enc_rng);
    for (int c = 0; c < 3; ++c) rep.lgw_fallbacks += lenc.fallback[c] ? 1 : 0;
    kprev = lenc.bin;
  }

  // flush: the final bin triple rides gamma all-common sub-blocks
  std::int64_t t_true =
      (kprev[0] * lsz.bins[1] + kprev[1]) * lsz.bins[2] + kprev[2];
  std::vector<MartonCode> slices(static_cast<std::size_t>(cfg.gamma));
  std::vector<std::vector<int>> sy1(static_cast<std::size_t>(cfg.gamma)),
      sy2(static_cast<std::size_t>(cfg.gamma));
  std::int64_t tmp = t_true;
  for (int s = 0; s < cfg.gamma; ++s) {
    MartonSizes ssz;
    ssz.m0 = d;
    slices[static_cast<std::size_t>(s)] = assemble_marton(
        cfg.slice_aux, ssz, n,
        derive_key(root, 300 + static_cast<std::uint64_t>(s)),
        TypicalityModel{}, cfg.slice_dec);
    MartonMessages smsg;
    smsg.m0 = tmp % d;
    tmp /= d;
    MartonEncodeResult enc =
        marton_encode(slices[static_cast<std::size_t>(s)], smsg, cfg.eps,
                      enc_rng);
    sy1[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(n));
    sy2[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      ChannelSample smp = sample(cfg.ch, enc.x[static_cast<std::size_t>(j)], ch_rng);
      sy1[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = smp.y1;
      sy2[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = smp.y2;
    }
  }

  // backward pass per receiver: digits, then block by block
  for (int rcv = 1; rcv <= 2; ++rcv) {
    RngStream& rng = dec_rng[static_cast<std::size_t>(rcv - 1)];
    std::int64_t t_hat = 0;
    std::vector<std::int64_t> digits(static_cast<std::size_t>(cfg.gamma));
    for (int s = 0; s < cfg.gamma; ++s) {
      const std::vector<int>& ys =
          rcv == 1 ? sy1[static_cast<std::size_t>(s)]
                   : sy2[static_cast<std::size_t>(s)];
      MartonDecodeResult r = marton_decode(
          slices[static_cast<std::size_t>(s)], rcv, {&ys}, cfg.eps, rng);
      digits[static_cast<std::size_t>(s)] = r.m0;
    }
    for (int s = cfg.gamma - 1; s >= 0; --s)
      t_hat = t_hat * d + digits[static_cast<std::size_t>(s)];
    t_hat %= tspace;
    std::int64_t k0 = t_hat / (lsz.bins[1] * lsz.bins[2]);
    std::int64_t k1 = (t_hat / lsz.bins[2]) % lsz.bins[1];
    std::int64_t k2 = t_hat % lsz.bins[2];
    std::int64_t k0_hat = k0;
    std::int64_t ki_hat = rcv == 1 ? k1 : k2;

    for (int b = B; b >= 1; --b) {
      Block& blk = blocks[static_cast<std::size_t>(b - 1)];
      const std::vector<int>& y = rcv == 1 ? blk.y1 : blk.y2;
      LgwDecodeResult ld =
          lgw_decode(blk.lgw, rcv, k0_hat, ki_hat, {&y}, cfg.eps, rng);
      MartonDecodeResult md = marton_decode(blk.code, rcv,
                                            {&y, &ld.v0, &ld.vi}, cfg.eps, rng);
      std::int64_t p0 = prev_space(b, 0), pi = prev_space(b, rcv);
      std::int64_t d0 = md.m0 / p0;
      k0_hat = md.m0 % p0;
      std::int64_t di = md.mp / pi;
      ki_hat = md.mp % pi;
      bool bad = d0 != blk.data[0] ||
                 di != blk.data[static_cast<std::size_t>(rcv)];
      rep.block_error[static_cast<std::size_t>(b - 1)]
                     [static_cast<std::size_t>(rcv - 1)] = bad;
      rep.receiver_error[static_cast<std::size_t>(rcv - 1)] =
          rep.receiver_error[static_cast<std::size_t>(rcv - 1)] || bad;
    }
  }
  rep.error = rep.receiver_error[0] || rep.receiver_error[1];
  return rep;
}

namespace {

JointPmf diag2(const std::string& a, const std::string& b) {
  return JointPmf({{a, 2}, {b, 2}}, {0.5, 0.0, 0.0, 0.5});
}

JointPmf parity3(const std::string& a, const std::string& b,
                 const std::string& c) {
  std::vector<double> mass(8, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) mass[static_cast<std::size_t>((i * 2 + j) * 2 + (i ^ j))] = 0.25;
  return JointPmf({{a, 2}, {b, 2}, {c, 2}}, mass);
}

JointPmf uniform2(const std::string& a, const std::string& b) {
  return JointPmf({{a, 2}, {b, 2}}, {0.25, 0.25, 0.25, 0.25});
}

}  // namespace

BlockMarkovConfig dueck_block_markov_config(int n, bool with_feedback,
                                            double sum_rate, int B,
                                            int gamma) {
  if (n < 1) throw std::invalid_argument("block chain: n must be positive");
  BlockMarkovConfig cfg;
  cfg.n = n;
  cfg.B = B;
  cfg.gamma = gamma;

  JointPmf noise({{"Z0", 2}, {"Z1", 2}, {"Z2", 2}},
                 {0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0});
  DueckParams dp;
  dp.noise = noise;
  dp.feedback.kind =
      with_feedback ? FeedbackConfig::kNoiseless : FeedbackConfig::kNone;
  cfg.ch = make_dueck(dp);

  cfg.aux.u = {Alphabet{"U0", 2}, Alphabet{"U1", 2}, Alphabet{"U2", 2}};
  cfg.aux.law = JointPmf({{"U0", 2}, {"U1", 2}, {"U2", 2}},
                         std::vector<double>(8, 0.125));
  cfg.aux.f.resize(8);
  for (int u0 = 0; u0 < 2; ++u0)
    for (int u1 = 0; u1 < 2; ++u1)
      for (int u2 = 0; u2 < 2; ++u2)
        cfg.aux.f[static_cast<std::size_t>((u0 * 2 + u1) * 2 + u2)] =
            u1 * 4 + u0 * 2 + u2;
  cfg.messages = {1, rate_count(n, sum_rate / 2), rate_count(n, sum_rate / 2)};
  cfg.marton_enc = full_model(cfg.aux.law);

  // received-symbol bit extractors; receiver 2 sees the shared bit first
  std::vector<int> y1_shared{0, 1, 0, 1}, y1_own{0, 0, 1, 1};
  std::vector<int> y2_shared{0, 0, 1, 1}, y2_own{0, 1, 0, 1};

  if (with_feedback) {
    cfg.bin_rate = {0.965, 0.30, 0.30};
    cfg.in_rate = {0.11, 0.775, 0.775};
    cfg.v = {Alphabet{"V0", 2}, Alphabet{"V1", 2}, Alphabet{"V2", 2}};
    cfg.v_pmf = {std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5},
                 std::vector<double>{0.5, 0.5}};
    // the transmitter reads the shared noise bit off the return link
    DerivedComp z;
    z.alphabet = 2;
    z.table.resize(64);
    for (int cell = 0; cell < 64; ++cell) {
      int yt = cell % 8;
      int u1 = (cell / 8 / 2) % 2;
      z.table[static_cast<std::size_t>(cell)] = ((yt >> 2) & 1) ^ u1;
    }
    cfg.derived = {z};

    cfg.lgw_enc.tracks = {
        TypTrack{{{0, {}}, {7, {}}}, diag2("V0", "Z")},
        TypTrack{{{1, {}}, {4, {}}}, diag2("V1", "U1")},
        TypTrack{{{2, {}}, {5, {}}}, diag2("V2", "U2")}};
    cfg.lgw_dec[0].tracks = {
        TypTrack{{{0, {}}, {1, {}}, {2, y1_own}}, parity3("V0", "V1", "S")}};
    cfg.lgw_dec[1].tracks = {
        TypTrack{{{0, {}}, {1, {}}, {2, y2_own}}, parity3("V0", "V2", "S")}};
    cfg.marton_dec[0].tracks = {
        TypTrack{{{0, {}}, {2, y1_shared}}, diag2("U0", "S")},
        TypTrack{{{1, {}}, {4, {}}}, diag2("U1", "V1")}};
    cfg.marton_dec[1].tracks = {
        TypTrack{{{0, {}}, {2, y2_shared}}, diag2("U0", "S")},
        TypTrack{{{1, {}}, {4, {}}}, diag2("U2", "V2")}};
  } else {
    cfg.bin_rate = {0, 0, 0};
    cfg.in_rate = {0, 0, 0};
    cfg.v = {Alphabet{"V0", 1}, Alphabet{"V1", 1}, Alphabet{"V2", 1}};
    cfg.v_pmf = {std::vector<double>{1.0}, std::vector<double>{1.0},
                 std::vector<double>{1.0}};
    cfg.marton_dec[0].tracks = {
        TypTrack{{{0, {}}, {2, y1_shared}}, diag2("U0", "S")},
        TypTrack{{{1, {}}, {2, y1_own}}, uniform2("U1", "W")}};
    cfg.marton_dec[1].tracks = {
        TypTrack{{{0, {}}, {2, y2_shared}}, diag2("U0", "S")},
        TypTrack{{{1, {}}, {2, y2_own}}, uniform2("U2", "W")}};
  }

  cfg.slice_aux.u = {Alphabet{"U0", 8}, Alphabet{"U1", 1}, Alphabet{"U2", 1}};
  cfg.slice_aux.law =
      JointPmf({{"U0", 8}, {"U1", 1}, {"U2", 1}}, std::vector<double>(8, 0.125));
  cfg.slice_aux.f.resize(8);
  for (int u0 = 0; u0 < 8; ++u0)
    cfg.slice_aux.f[static_cast<std::size_t>(u0)] = u0;
  std::vector<int> u0_shared(8);
  for (int u0 = 0; u0 < 8; ++u0) u0_shared[static_cast<std::size_t>(u0)] = (u0 >> 1) & 1;
  cfg.slice_dec[0].tracks = {
      TypTrack{{{0, u0_shared}, {2, y1_shared}}, diag2("U0", "S")}};
  cfg.slice_dec[1].tracks = {
      TypTrack{{{0, u0_shared}, {2, y2_shared}}, diag2("U0", "S")}};
  return cfg;
}

// ---------------------------------------------------------------------------
// experiments

std::vector<ExperimentPoint> run_marton_experiment(const MartonExperiment& ex) {
  if (ex.n_list.empty())
    throw std::invalid_argument("experiment: empty block length list");
  std::vector<ExperimentPoint> points;
  for (int n : ex.n_list) {
    std::uint64_t nseed = derive_key(ex.seed, static_cast<std::uint64_t>(n));
    auto one = [&, n, nseed](std::int64_t t) {
      std::uint64_t root = derive_key(nseed, static_cast<std::uint64_t>(t));
      MartonCode code =
          gen_marton_code(ex.aux, ex.ch, ex.rates, n, derive_key(root, 0));
      RngStream msg_rng(derive_key(root, 1));
      RngStream ch_rng(derive_key(root, 2));
      RngStream enc_rng(derive_key(root, 3));
      std::array<RngStream, 2> dec_rng{RngStream(derive_key(root, 4)),
                                       RngStream(derive_key(root, 5))};
      MartonMessages msg;
      msg.m0 = static_cast<std::int64_t>(
          msg_rng.next_below(static_cast<std::uint64_t>(code.sizes.m0)));
      msg.m1c = static_cast<std::int64_t>(
          msg_rng.next_below(static_cast<std::uint64_t>(code.sizes.m1c)));
      msg.m2c = static_cast<std::int64_t>(
          msg_rng.next_below(static_cast<std::uint64_t>(code.sizes.m2c)));
      msg.m1p = static_cast<std::int64_t>(
          msg_rng.next_below(static_cast<std::uint64_t>(code.sizes.m1p)));
      msg.m2p = static_cast<std::int64_t>(
          msg_rng.next_below(static_cast<std::uint64_t>(code.sizes.m2p)));
      MartonEncodeResult enc = marton_encode(code, msg, ex.eps, enc_rng);
      std::vector<int> y1(static_cast<std::size_t>(n)),
          y2(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        ChannelSample s = sample(ex.ch, enc.x[static_cast<std::size_t>(j)], ch_rng);
        y1[static_cast<std::size_t>(j)] = s.y1;
        y2[static_cast<std::size_t>(j)] = s.y2;
      }
      MartonDecodeResult d1 = marton_decode(code, 1, {&y1}, ex.eps, dec_rng[0]);
      MartonDecodeResult d2 = marton_decode(code, 2, {&y2}, ex.eps, dec_rng[1]);
      bool ok1 = d1.m0 == msg.m0 && d1.m1c == msg.m1c && d1.m2c == msg.m2c &&
                 d1.mp == msg.m1p;
      bool ok2 = d2.m0 == msg.m0 && d2.m1c == msg.m1c && d2.m2c == msg.m2c &&
                 d2.mp == msg.m2p;
      TrialSums s;
      s.errors = (ok1 && ok2) ? 0 : 1;
      s.fallbacks = enc.fallback ? 1 : 0;
      return s;
    };
    TrialSums sums = run_trials(ex.trials, ex.workers, one);
    points.push_back(make_point(n, ex.trials, sums, ex.trials));
  }
  return points;
}

std::vector<ExperimentPoint> run_lgw_experiment(const LgwExperiment& ex) {
  if (ex.n_list.empty())
    throw std::invalid_argument("experiment: empty block length list");
  if (ex.source.axes().size() != 3)
    throw std::invalid_argument("experiment: source needs axes X, Y1, Y2");

  // joint over (X, Y1, Y2, V0, V1, V2)
  JointPmf big = compose(ex.source, ex.scheme.law);
  std::array<std::vector<double>, 3> pmf;
  for (int c = 0; c < 3; ++c) {
    JointPmf m = marginalize(big, {ex.scheme.v[static_cast<std::size_t>(c)].name});
    pmf[static_cast<std::size_t>(c)] = m.mass();
  }
  std::string v0 = ex.scheme.v[0].name, v1 = ex.scheme.v[1].name,
              v2 = ex.scheme.v[2].name;
  std::string x = ex.source.axes()[0].name, y1 = ex.source.axes()[1].name,
              y2 = ex.source.axes()[2].name;
  TypicalityModel enc_model =
      full_model(marginalize(big, {v0, v1, v2, x}));
  std::array<TypicalityModel, 2> dec_model{
      full_model(marginalize(big, {v0, v1, y1})),
      full_model(marginalize(big, {v0, v2, y2}))};
  std::array<JointPmf, 2> goal{marginalize(big, {x, v0, v1}),
                               marginalize(big, {x, v0, v2})};
  std::vector<double> cdf = law_cdf(ex.source);

  std::vector<ExperimentPoint> points;
  for (int n : ex.n_list) {
    std::uint64_t nseed = derive_key(ex.seed, static_cast<std::uint64_t>(n));
    LgwSizes nsizes = lgw_sizes(ex.bin_rate, ex.in_rate, n);
    auto one = [&, n, nseed, nsizes](std::int64_t t) {
      std::uint64_t root = derive_key(nseed, static_cast<std::uint64_t>(t));
      LgwCode code = gen_lgw_code(ex.scheme.v, pmf, nsizes, n,
                                  derive_key(root, 0));
      code.enc_model = enc_model;
      code.dec_model = dec_model;
      RngStream src_rng(derive_key(root, 1));
      RngStream enc_rng(derive_key(root, 2));
      std::array<RngStream, 2> dec_rng{RngStream(derive_key(root, 3)),
                                       RngStream(derive_key(root, 4))};
      std::vector<int> xs(static_cast<std::size_t>(n)),
          y1s(static_cast<std::size_t>(n)), y2s(static_cast<std::size_t>(n));
      std::vector<int> sym;
      for (int j = 0; j < n; ++j) {
        ex.source.unflatten(draw_cell(cdf, src_rng), sym);
        xs[static_cast<std::size_t>(j)] = sym[0];
        y1s[static_cast<std::size_t>(j)] = sym[1];
        y2s[static_cast<std::size_t>(j)] = sym[2];
      }
      LgwEncodeResult enc = lgw_encode(code, {&xs}, ex.eps, enc_rng);
      TrialSums s;
      for (int c = 0; c < 3; ++c) s.fallbacks += enc.fallback[static_cast<std::size_t>(c)] ? 1 : 0;
      bool bad = false;
      for (int rcv = 1; rcv <= 2; ++rcv) {
        const std::vector<int>& ys = rcv == 1 ? y1s : y2s;
        LgwDecodeResult dr = lgw_decode(code, rcv, enc.bin[0],
                                        enc.bin[static_cast<std::size_t>(rcv)],
                                        {&ys}, ex.eps,
                                        dec_rng[static_cast<std::size_t>(rcv - 1)]);
        if (!is_jointly_typical({&xs, &dr.v0, &dr.vi},
                                goal[static_cast<std::size_t>(rcv - 1)], ex.eps))
          bad = true;
      }
      s.errors = bad ? 1 : 0;
      return s;
    };
    TrialSums sums = run_trials(ex.trials, ex.workers, one);
    points.push_back(make_point(n, ex.trials, sums, 3 * ex.trials));
  }
  return points;
}

std::vector<ExperimentPoint> run_block_markov(const BlockMarkovExperiment& ex) {
  if (ex.n_list.empty())
    throw std::invalid_argument("experiment: empty block length list");
  std::vector<ExperimentPoint> points;
  for (int n : ex.n_list) {
    BlockMarkovConfig cfg = dueck_block_markov_config(
        n, ex.with_feedback, ex.sum_rate, ex.B, ex.gamma);
    cfg.eps = ex.eps;
    cfg.seed = derive_key(ex.seed, static_cast<std::uint64_t>(n));
    auto one = [&cfg](std::int64_t t) {
      TrialReport rep = block_markov_trial(cfg, t);
      TrialSums s;
      s.errors = rep.error ? 1 : 0;
      s.fallbacks = rep.lgw_fallbacks;
      return s;
    };
    TrialSums sums = run_trials(ex.trials, ex.workers, one);
    points.push_back(make_point(n, ex.trials, sums, 3 * ex.B * ex.trials));
  }
  return points;
}

// ---------------------------------------------------------------------------
// existence experiments

namespace {

struct LogFactorials {
  std::vector<long double> lf;
  explicit LogFactorials(int n) : lf(static_cast<std::size_t>(n) + 1, 0.0L) {
    for (int i = 1; i <= n; ++i)
      lf[static_cast<std::size_t>(i)] = lf[static_cast<std::size_t>(i - 1)] +
                                        std::log(static_cast<long double>(i));
  }
  long double choose(int n, int k) const {
    return lf[static_cast<std::size_t>(n)] - lf[static_cast<std::size_t>(k)] -
           lf[static_cast<std::size_t>(n - k)];
  }
};

// probability that Bin(k, p) lands in [lo, hi]
long double binom_window(const LogFactorials& lf, int k, long double p,
                         int lo, int hi) {
  lo = std::max(lo, 0);
  hi = std::min(hi, k);
  if (lo > hi) return 0.0L;
  if (p <= 0.0L) return lo == 0 ? 1.0L : 0.0L;
  if (p >= 1.0L) return hi == k ? 1.0L : 0.0L;
  long double total = 0.0L;
  for (int a = lo; a <= hi; ++a)
    total += std::exp(lf.choose(k, a) + a * std::log(p) +
                      (k - a) * std::log(1.0L - p));
  return total;
}

// integer count window for one law cell
void cell_window(double mass, int n, double eps, int& lo, int& hi) {
  double want = n * mass;
  double l = want - eps * want - kCountSlack;
  double h = want + eps * want + kCountSlack;
  lo = static_cast<int>(std::ceil(l));
  hi = static_cast<int>(std::floor(h));
}

long double event_probability(long double q, int n, double rate, bool miss) {
  long double m =
      std::floor(std::exp2(static_cast<long double>(n) * rate) + 1e-6L);
  if (m < 1.0L) m = 1.0L;
  if (q <= 0.0L) return miss ? 1.0L : 0.0L;
  if (q >= 1.0L) return miss ? 0.0L : 1.0L;
  long double p_none = std::exp(m * std::log1p(-q));
  return miss ? p_none : 1.0L - p_none;
}

}  // namespace

std::vector<ExperimentPoint> lemma_experiment(const LemmaSpec& spec) {
  if (spec.n_list.empty())
    throw std::invalid_argument("experiment: empty block length list");
  if (spec.rate < 0) throw std::invalid_argument("experiment: negative rate");
  const JointPmf& law = spec.law;

  bool pairwise = spec.kind != LemmaKind::kMvPacking;
  if (pairwise) {
    if (law.axes().size() != 2 || law.axes()[0].size != 2)
      throw std::invalid_argument(
          "covering/packing law needs a binary first axis and one partner");
  } else {
    if (law.axes().size() != 3)
      throw std::invalid_argument("three-way packing law needs three axes");
    for (const auto& a : law.axes())
      if (a.size != 2)
        throw std::invalid_argument("three-way packing law must be binary");
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          double m = law[static_cast<std::size_t>((i * 2 + j) * 2 + k)];
          double want = k == (i ^ j) ? 0.25 : 0.0;
          if (std::fabs(m - want) > kNumTol)
            throw std::invalid_argument(
                "three-way packing law must be the uniform parity triple");
        }
  }

  std::vector<ExperimentPoint> points;
  for (int n : spec.n_list) {
    LogFactorials lf(n);
    std::uint64_t nseed = derive_key(spec.seed, static_cast<std::uint64_t>(n));
    auto one = [&, n, nseed](std::int64_t t) {
      RngStream rng(derive_key(nseed, static_cast<std::uint64_t>(t)));
      long double q = 0.0L;
      if (pairwise) {
        int ny = law.axes()[1].size;
        // partner marginal and codeword-bit marginal
        std::vector<double> py(static_cast<std::size_t>(ny), 0.0);
        double px1 = 0.0;
        for (int s = 0; s < ny; ++s) {
          py[static_cast<std::size_t>(s)] =
              law[static_cast<std::size_t>(s)] +
              law[static_cast<std::size_t>(ny + s)];
          px1 += law[static_cast<std::size_t>(ny + s)];
        }
        std::vector<double> ycdf(static_cast<std::size_t>(ny));
        double acc = 0.0;
        for (int s = 0; s < ny; ++s) {
          acc += py[static_cast<std::size_t>(s)];
          ycdf[static_cast<std::size_t>(s)] = acc;
        }
        std::vector<int> k(static_cast<std::size_t>(ny), 0);
        for (int j = 0; j < n; ++j)
          ++k[draw_cell(ycdf, rng)];
        // independent iid codeword: per partner value the count of ones is
        // binomial, and the joint windows pin it to an interval
        q = 1.0L;
        for (int s = 0; s < ny && q > 0.0L; ++s) {
          int lo1, hi1, lo0, hi0;
          cell_window(law[static_cast<std::size_t>(ny + s)], n, spec.eps, lo1, hi1);
          cell_window(law[static_cast<std::size_t>(s)], n, spec.eps, lo0, hi0);
          int ks = k[static_cast<std::size_t>(s)];
          int lo = std::max(lo1, ks - hi0);
          int hi = std::min(hi1, ks - lo0);
          q *= binom_window(lf, ks, static_cast<long double>(px1), lo, hi);
        }
      } else {
        // draw the two free components; the candidate must match their parity
        std::array<std::array<int, 2>, 2> counts{{{0, 0}, {0, 0}}};
        for (int j = 0; j < n; ++j) {
          int b = static_cast<int>(rng.next_below(2));
          int c = static_cast<int>(rng.next_below(2));
          ++counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
        }
        bool box = true;
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c) {
            int lo, hi;
            cell_window(0.25, n, spec.eps, lo, hi);
            int v = counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
            box = box && v >= lo && v <= hi;
          }
        q = box ? std::exp2(static_cast<long double>(-n)) : 0.0L;
      }
      bool miss_side = spec.kind == LemmaKind::kCovering;
      long double pe = event_probability(q, n, spec.rate, miss_side);
      TrialSums s;
      s.errors = rng.next_double() < static_cast<double>(pe) ? 1 : 0;
      return s;
    };
    TrialSums sums = run_trials(spec.trials, spec.workers, one);
    points.push_back(make_point(n, spec.trials, sums, 0));
  }
  return points;
}

std::vector<double> typical_fraction(const JointPmf& law, double eps,
                                     const std::vector<int>& n_list,
                                     std::int64_t trials, std::uint64_t seed) {
  std::vector<double> cdf = law_cdf(law);
  std::vector<double> out;
  for (int n : n_list) {
    std::uint64_t nseed = derive_key(seed, static_cast<std::uint64_t>(n));
    std::int64_t hits = 0;
    std::vector<std::int64_t> counts(law.cells());
    for (std::int64_t t = 0; t < trials; ++t) {
      RngStream rng(derive_key(nseed, static_cast<std::uint64_t>(t)));
      std::fill(counts.begin(), counts.end(), 0);
      for (int j = 0; j < n; ++j) ++counts[draw_cell(cdf, rng)];
      bool ok = true;
      for (std::size_t c = 0; c < law.cells(); ++c)
        ok = ok && count_ok(static_cast<double>(counts[c]), n * law[c], eps);
      hits += ok ? 1 : 0;
    }
    out.push_back(trials ? static_cast<double>(hits) / trials : 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

void rates_to_json(nlohmann::json& j, const MartonRates& r) {
  j = nlohmann::json{{"r0", r.r0},   {"r1c", r.r1c}, {"r2c", r.r2c},
                     {"r1p", r.r1p}, {"r2p", r.r2p}, {"r1b", r.r1b},
                     {"r2b", r.r2b}};
}

void rates_from_json(const nlohmann::json& j, MartonRates& r) {
  r.r0 = j.value("r0", 0.0);
  r.r1c = j.value("r1c", 0.0);
  r.r2c = j.value("r2c", 0.0);
  r.r1p = j.value("r1p", 0.0);
  r.r2p = j.value("r2p", 0.0);
  r.r1b = j.value("r1b", 0.0);
  r.r2b = j.value("r2b", 0.0);
}

}  // namespace

void to_json(nlohmann::json& j, const MartonExperiment& ex) {
  nlohmann::json rates;
  rates_to_json(rates, ex.rates);
  j = nlohmann::json{{"aux", ex.aux},       {"channel", ex.ch},
                     {"rates", rates},      {"n_list", ex.n_list},
                     {"trials", ex.trials}, {"eps", ex.eps},
                     {"seed", ex.seed},     {"workers", ex.workers}};
}

void from_json(const nlohmann::json& j, MartonExperiment& ex) {
  j.at("aux").get_to(ex.aux);
  j.at("channel").get_to(ex.ch);
  rates_from_json(j.at("rates"), ex.rates);
  j.at("n_list").get_to(ex.n_list);
  ex.trials = j.value("trials", std::int64_t{2000});
  ex.eps = j.value("eps", 0.15);
  ex.seed = j.value("seed", std::uint64_t{1});
  ex.workers = j.value("workers", 1);
}

void to_json(nlohmann::json& j, const LgwExperiment& ex) {
  j = nlohmann::json{{"scheme", ex.scheme},     {"source", ex.source},
                     {"bin_rate", ex.bin_rate}, {"in_rate", ex.in_rate},
                     {"n_list", ex.n_list},     {"trials", ex.trials},
                     {"eps", ex.eps},           {"seed", ex.seed},
                     {"workers", ex.workers}};
}

void from_json(const nlohmann::json& j, LgwExperiment& ex) {
  j.at("scheme").get_to(ex.scheme);
  j.at("source").get_to(ex.source);
  j.at("bin_rate").get_to(ex.bin_rate);
  j.at("in_rate").get_to(ex.in_rate);
  j.at("n_list").get_to(ex.n_list);
  ex.trials = j.value("trials", std::int64_t{2000});
  ex.eps = j.value("eps", 0.25);
  ex.seed = j.value("seed", std::uint64_t{1});
  ex.workers = j.value("workers", 1);
}

void to_json(nlohmann::json& j, const BlockMarkovExperiment& ex) {
  j = nlohmann::json{{"n_list", ex.n_list},
                     {"trials", ex.trials},
                     {"blocks", ex.B},
                     {"stretch", ex.gamma},
                     {"sum_rate", ex.sum_rate},
                     {"feedback", ex.with_feedback},
                     {"eps", ex.eps},
                     {"seed", ex.seed},
                     {"workers", ex.workers}};
}

void from_json(const nlohmann::json& j, BlockMarkovExperiment& ex) {
  j.at("n_list").get_to(ex.n_list);
  ex.trials = j.value("trials", std::int64_t{500});
  ex.B = j.value("blocks", 2);
  ex.gamma = j.value("stretch", 4);
  ex.sum_rate = j.value("sum_rate", 1.2);
  ex.with_feedback = j.value("feedback", true);
  ex.eps = j.value("eps", 1.2);
  ex.seed = j.value("seed", std::uint64_t{1});
  ex.workers = j.value("workers", 1);
}

void to_json(nlohmann::json& j, const LemmaSpec& spec) {
  const char* kind = spec.kind == LemmaKind::kCovering   ? "covering"
                     : spec.kind == LemmaKind::kPacking ? "packing"
                                                        : "mv_packing";
  j = nlohmann::json{{"kind", kind},     {"law", spec.law},
                     {"rate", spec.rate}, {"n_list", spec.n_list},
                     {"trials", spec.trials}, {"eps", spec.eps},
                     {"seed", spec.seed}, {"workers", spec.workers}};
}

void from_json(const nlohmann::json& j, LemmaSpec& spec) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "covering")
    spec.kind = LemmaKind::kCovering;
  else if (kind == "packing")
    spec.kind = LemmaKind::kPacking;
  else if (kind == "mv_packing")
    spec.kind = LemmaKind::kMvPacking;
  else
    throw std::invalid_argument("lemma kind must be covering/packing/mv_packing");
  j.at("law").get_to(spec.law);
  spec.rate = j.value("rate", 0.0);
  j.at("n_list").get_to(spec.n_list);
  spec.trials = j.value("trials", std::int64_t{2000});
  spec.eps = j.value("eps", 0.25);
  spec.seed = j.value("seed", std::uint64_t{1});
  spec.workers = j.value("workers", 1);
}

}  // namespace bcfb
