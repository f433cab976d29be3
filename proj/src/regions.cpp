#include "bcfb/regions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace bcfb {
namespace {

std::vector<double> dirichlet(RngStream& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& v : w) {
    v = -std::log1p(-rng.next_double());
    total += v;
  }
  for (auto& v : w) v /= total;
  return w;
}

using Names = std::vector<std::string>;

double mi(const JointPmf& j, const Names& a, const Names& b,
          const Names& c = {}) {
  return mutual_information(j, a, b, c);
}

}  // namespace

JointPmf induced_joint(const AuxScheme& aux, const UpdateScheme* upd,
                       const Dmbc& ch) {
  static const char* kU[3] = {"U0", "U1", "U2"};
  for (int i = 0; i < 3; ++i)
    if (aux.u[i].name != kU[i])
      throw std::invalid_argument("auxiliary axes must be named U0, U1, U2");
  if (aux.law.axes().size() != 3)
    throw std::invalid_argument("auxiliary law needs exactly the U axes");
  for (int i = 0; i < 3; ++i) {
    const Alphabet& ax = aux.law.axes()[i];
    if (ax.name != aux.u[i].name || ax.size != aux.u[i].size)
      throw std::invalid_argument("auxiliary law axes disagree with u");
  }
  const std::size_t ucells = aux.law.cells();
  if (aux.f.size() != ucells)
    throw std::invalid_argument("symbol map must cover every (u0,u1,u2)");
  std::vector<double> fmass(ucells * ch.in.size, 0.0);
  for (std::size_t r = 0; r < ucells; ++r) {
    int x = aux.f[r];
    if (x < 0 || x >= ch.in.size)
      throw std::invalid_argument("symbol map leaves the input alphabet");
    fmass[r * ch.in.size + x] = 1.0;
  }
  ConditionalPmf fchan({aux.u[0], aux.u[1], aux.u[2]}, {ch.in},
                       std::move(fmass));
  JointPmf joint = compose(compose(aux.law, fchan), ch.law);
  if (!upd) return joint;

  std::vector<Alphabet> want;
  if (upd->variant == UpdateScheme::kFull)
    want = {aux.u[0], aux.u[1], aux.u[2], ch.fb};
  else
    want = {ch.in, ch.fb};
  const auto& g = upd->law.given();
  bool ok = g.size() == want.size();
  for (std::size_t i = 0; ok && i < g.size(); ++i)
    ok = g[i].name == want[i].name && g[i].size == want[i].size;
  if (!ok)
    throw std::invalid_argument("update law conditions on the wrong axes");
  return compose(joint, upd->law);
}

RateRegion3 marton_region(const AuxScheme& aux, const Dmbc& ch) {
  JointPmf j = induced_joint(aux, nullptr, ch);
  const std::string y1 = ch.out1.name, y2 = ch.out2.name;
  double b1 = mi(j, {"U0", "U1"}, {y1});
  double b2 = mi(j, {"U0", "U2"}, {y2});
  double c1 = mi(j, {"U1"}, {y1}, {"U0"});
  double c2 = mi(j, {"U2"}, {y2}, {"U0"});
  double a = mi(j, {"U1"}, {"U2"}, {"U0"});
  double d = std::min(mi(j, {"U0"}, {y1}), mi(j, {"U0"}, {y2}));
  std::vector<LinIneq> rows;
  rows.push_back({{1, 0, 0}, d});
  rows.push_back({{1, 1, 0}, b1});
  rows.push_back({{1, 0, 1}, b2});
  rows.push_back({{1, 1, 1}, c1 + c2 + d - a});
  return make_region(std::move(rows));
}

RateRegion3 lgw_inner(const LgwScheme& scheme, const JointPmf& source,
                      LgwVariant variant) {
  for (const char* need : {"X", "Y1", "Y2"})
    source.axis_checked(need);
  const auto& g = scheme.law.given();
  if (g.size() != 1 || g[0].name != "X")
    throw std::invalid_argument("description law must condition on X alone");
  JointPmf j = compose(source, scheme.law);
  double m1 = mi(j, {"X"}, {"V0"}, {"Y1"});
  double m2 = mi(j, {"X"}, {"V0"}, {"Y2"});
  double l1 = mi(j, {"X"}, {"V1"}, {"V0", "Y1"});
  double l2 = mi(j, {"X"}, {"V2"}, {"V0", "Y2"});
  std::vector<LinIneq> rows;
  rows.push_back({{0, -1, 0}, -l1});
  rows.push_back({{0, 0, -1}, -l2});
  if (variant == LgwVariant::kInner) {
    rows.push_back({{-1, -1, 0}, -(m1 + l1)});
    rows.push_back({{-1, 0, -1}, -(m2 + l2)});
  } else {
    rows.push_back({{-1, 0, 0}, -std::max(m1, m2)});
  }
  return make_region(std::move(rows), /*up_set=*/true);
}

RateRegion3 feedback_inner(const AuxScheme& aux, const UpdateScheme& upd,
                           const Dmbc& ch) {
  JointPmf j = induced_joint(aux, &upd, ch);
  const std::string y1 = ch.out1.name, y2 = ch.out2.name;
  const std::string x = ch.in.name, yt = ch.fb.name;
  double c1 = mi(j, {"U1"}, {y1, "V1"}, {"U0"});
  double c2 = mi(j, {"U2"}, {y2, "V2"}, {"U0"});
  double k01 = mi(j, {"U0"}, {y1, "V1"});
  double k02 = mi(j, {"U0"}, {y2, "V2"});
  double k0 = std::min(k01, k02);
  double k1 = mi(j, {"U0", "U1"}, {y1, "V1"});
  double k2 = mi(j, {"U0", "U2"}, {y2, "V2"});
  double a = mi(j, {"U1"}, {"U2"}, {"U0"});
  double k3 = c1 + c2 + k0 - a;
  std::vector<LinIneq> rows;
  if (upd.variant == UpdateScheme::kFull) {
    Names w = {"U0", "U1", "U2", yt};
    double l1 = mi(j, w, {"V1"}, {"V0", y1});
    double l2 = mi(j, w, {"V2"}, {"V0", y2});
    double l01 = mi(j, w, {"V0", "V1"}, {y1});
    double l02 = mi(j, w, {"V0", "V2"}, {y2});
    rows.push_back({{1, 0, 0}, k0});
    rows.push_back({{1, 1, 0}, k1 - l01});
    rows.push_back({{1, 0, 1}, k2 - l02});
    rows.push_back({{1, 1, 1}, k3 - l1 - l02});
    rows.push_back({{1, 1, 1}, k3 - l01 - l2});
    rows.push_back({{2, 1, 1}, k0 + k3 - l01 - l02});
  } else {
    Names s = {x, yt};
    double l1 = mi(j, s, {"V1"}, {"V0", y1});
    double l2 = mi(j, s, {"V2"}, {"V0", y2});
    double ms = std::max(mi(j, {"V0"}, s, {y1}), mi(j, {"V0"}, s, {y2}));
    rows.push_back({{1, 0, 0}, k0 - ms});
    rows.push_back({{1, 1, 0}, k1 - l1 - ms});
    rows.push_back({{1, 0, 1}, k2 - l2 - ms});
    rows.push_back({{1, 1, 1}, k3 - l1 - l2 - ms});
  }
  return make_region(std::move(rows));
}

LinIneqSystem presplit_system(const MartonConstants& k) {
  // private/common splits R_i = R_ic + R_ip plus bin overheads B_i; the
  // common payload (R0, R1c, R2c) rides the coarse layer, the private parts
  // and bins the fine one
  LinIneqSystem sys;
  sys.vars = {"R0", "R1", "R2", "R1c", "R1p", "R2c", "R2p", "B1", "B2"};
  sys.add({0, 1, 0, -1, -1, 0, 0, 0, 0}, 0.0);
  sys.add({0, -1, 0, 1, 1, 0, 0, 0, 0}, 0.0);
  sys.add({0, 0, 1, 0, 0, -1, -1, 0, 0}, 0.0);
  sys.add({0, 0, -1, 0, 0, 1, 1, 0, 0}, 0.0);
  sys.add({0, 0, 0, 0, 0, 0, 0, -1, -1}, -k.a);
  sys.add({1, 0, 0, 1, 0, 1, 0, 0, 0}, k.b1);
  sys.add({1, 0, 0, 1, 0, 1, 0, 0, 0}, k.b2);
  sys.add({0, 0, 0, 0, 1, 0, 0, 1, 0}, k.c1);
  sys.add({0, 0, 0, 0, 0, 0, 1, 0, 1}, k.c2);
  sys.add({1, 0, 0, 1, 1, 1, 0, 1, 0}, k.b1);
  sys.add({1, 0, 0, 1, 0, 1, 1, 0, 1}, k.b2);
  sys.add({0, 0, 0, -1, 0, 0, 0, 0, 0}, 0.0);
  sys.add({0, 0, 0, 0, -1, 0, 0, 0, 0}, 0.0);
  sys.add({0, 0, 0, 0, 0, -1, 0, 0, 0}, 0.0);
  sys.add({0, 0, 0, 0, 0, 0, -1, 0, 0}, 0.0);
  sys.add({0, 0, 0, 0, 0, 0, 0, -1, 0}, 0.0);
  sys.add({0, 0, 0, 0, 0, 0, 0, 0, -1}, 0.0);
  return sys;
}

LinIneqSystem presplit_system(const LgwConstants& k) {
  // description rates carry their bin overheads B_i; the B0+B_i rows are
  // implied by the single-index caps but belong to the stated system
  LinIneqSystem sys;
  sys.vars = {"R0", "R1", "R2", "B0", "B1", "B2"};
  sys.add({-1, 0, 0, -1, 0, 0}, -k.g0);
  sys.add({0, -1, 0, 0, -1, 0}, -k.g1);
  sys.add({0, 0, -1, 0, 0, -1}, -k.g2);
  sys.add({0, 0, 0, 1, 1, 0}, k.m01 + k.m1);
  sys.add({0, 0, 0, 1, 0, 1}, k.m02 + k.m2);
  sys.add({0, 0, 0, 1, 0, 0}, k.m01);
  sys.add({0, 0, 0, 1, 0, 0}, k.m02);
  sys.add({0, 0, 0, 0, 1, 0}, k.m1);
  sys.add({0, 0, 0, 0, 0, 1}, k.m2);
  sys.add({0, 0, 0, -1, 0, 0}, 0.0);
  sys.add({0, 0, 0, 0, -1, 0}, 0.0);
  sys.add({0, 0, 0, 0, 0, -1}, 0.0);
  return sys;
}

LinIneqSystem presplit_system(const CombinedConstants& k) {
  LinIneqSystem sys;
  sys.vars = {"R0", "R1", "R2", "T0", "T1", "T2"};
  sys.add({1, 0, 0, 1, 0, 0}, k.K0);
  sys.add({1, 1, 0, 1, 1, 0}, k.K1);
  sys.add({1, 0, 1, 1, 0, 1}, k.K2);
  sys.add({1, 1, 1, 1, 1, 1}, k.K3());
  sys.add({0, 0, 0, 0, -1, 0}, -k.L1);
  sys.add({0, 0, 0, 0, 0, -1}, -k.L2);
  sys.add({0, 0, 0, -1, -1, 0}, -k.L01);
  sys.add({0, 0, 0, -1, 0, -1}, -k.L02);
  sys.add({0, 0, 0, -1, 0, 0}, 0.0);
  sys.add({0, 0, 0, 0, -1, 0}, 0.0);
  sys.add({0, 0, 0, 0, 0, -1}, 0.0);
  return sys;
}

RateRegion3 closed_form(const MartonConstants& k) {
  std::vector<LinIneq> rows;
  rows.push_back({{1, 1, 0}, k.b1});
  rows.push_back({{1, 0, 1}, k.b2});
  rows.push_back({{1, 1, 1}, k.b1 + k.c2 - k.a});
  rows.push_back({{1, 1, 1}, k.b2 + k.c1 - k.a});
  rows.push_back({{2, 1, 1}, k.b1 + k.b2 - k.a});
  return make_region(std::move(rows));
}

RateRegion3 closed_form(const LgwConstants& k) {
  double m1 = k.g0 - k.m01, m2 = k.g0 - k.m02;
  double l1 = k.g1 - k.m1, l2 = k.g2 - k.m2;
  std::vector<LinIneq> rows;
  rows.push_back({{-1, 0, 0}, -std::max(m1, m2)});
  rows.push_back({{0, -1, 0}, -l1});
  rows.push_back({{0, 0, -1}, -l2});
  rows.push_back({{-1, -1, 0}, -(m1 + l1)});
  rows.push_back({{-1, 0, -1}, -(m2 + l2)});
  return make_region(std::move(rows), /*up_set=*/true);
}

RateRegion3 closed_form(const CombinedConstants& k) {
  double k3 = k.K3();
  std::vector<LinIneq> rows;
  rows.push_back({{1, 0, 0}, k.K0});
  rows.push_back({{1, 1, 0}, k.K1 - k.L01});
  rows.push_back({{1, 0, 1}, k.K2 - k.L02});
  rows.push_back({{1, 1, 1}, k3 - k.L1 - k.L02});
  rows.push_back({{1, 1, 1}, k3 - k.L01 - k.L2});
  rows.push_back({{2, 1, 1}, k.K0 + k3 - k.L01 - k.L02});
  return make_region(std::move(rows));
}

RateRegion3 project_presplit(const LinIneqSystem& sys) {
  LinIneqSystem cur = sys;
  auto is_rate = [](const std::string& v) {
    return v == "R0" || v == "R1" || v == "R2";
  };
  for (;;) {
    int target = -1;
    for (int i = static_cast<int>(cur.vars.size()) - 1; i >= 0; --i) {
      if (!is_rate(cur.vars[i])) {
        target = i;
        break;
      }
    }
    if (target < 0) break;
    cur = fm_eliminate(cur, cur.vars[target]);
  }
  return region_from_system(cur);
}

MartonConstants random_marton_constants(RngStream& rng) {
  std::vector<Alphabet> axes = {
      {"U0", 2}, {"U1", 2}, {"U2", 2}, {"Y1", 3}, {"Y2", 3}};
  for (int attempt = 0; attempt < 1000; ++attempt) {
    JointPmf j(axes, dirichlet(rng, 72));
    MartonConstants k;
    k.b1 = mi(j, {"U0", "U1"}, {"Y1"});
    k.b2 = mi(j, {"U0", "U2"}, {"Y2"});
    k.c1 = mi(j, {"U1"}, {"Y1"}, {"U0"});
    k.c2 = mi(j, {"U2"}, {"Y2"}, {"U0"});
    k.a = mi(j, {"U1"}, {"U2"}, {"U0"});
    if (k.a + 1e-3 <= k.c1 + k.c2) return k;
  }
  throw std::runtime_error("no workable constants after many draws");
}

LgwConstants random_lgw_constants(RngStream& rng) {
  JointPmf px({{"X", 3}}, dirichlet(rng, 3));
  std::vector<double> vm, ym;
  for (int r = 0; r < 3; ++r) {
    auto row = dirichlet(rng, 8);
    vm.insert(vm.end(), row.begin(), row.end());
    row = dirichlet(rng, 9);
    ym.insert(ym.end(), row.begin(), row.end());
  }
  ConditionalPmf vchan({{"X", 3}}, {{"V0", 2}, {"V1", 2}, {"V2", 2}},
                       std::move(vm));
  ConditionalPmf ychan({{"X", 3}}, {{"Y1", 3}, {"Y2", 3}}, std::move(ym));
  JointPmf j = compose(compose(px, vchan), ychan);
  LgwConstants k;
  k.g0 = mi(j, {"V0"}, {"X"});
  k.g1 = mi(j, {"V1"}, {"X", "V0"});
  k.g2 = mi(j, {"V2"}, {"X", "V0"});
  k.m01 = mi(j, {"V0"}, {"Y1"});
  k.m02 = mi(j, {"V0"}, {"Y2"});
  k.m1 = mi(j, {"V1"}, {"V0", "Y1"});
  k.m2 = mi(j, {"V2"}, {"V0", "Y2"});
  return k;
}

CombinedConstants random_combined_constants(RngStream& rng) {
  std::vector<Alphabet> u = {{"U0", 2}, {"U1", 2}, {"U2", 2}};
  JointPmf pu(u, dirichlet(rng, 8));
  std::vector<double> ym, vm;
  for (int r = 0; r < 8; ++r) {
    auto row = dirichlet(rng, 8);
    ym.insert(ym.end(), row.begin(), row.end());
  }
  for (int r = 0; r < 16; ++r) {
    auto row = dirichlet(rng, 8);
    vm.insert(vm.end(), row.begin(), row.end());
  }
  ConditionalPmf ychan(u, {{"Y1", 2}, {"Y2", 2}, {"Yt", 2}}, std::move(ym));
  ConditionalPmf vchan({{"U0", 2}, {"U1", 2}, {"U2", 2}, {"Yt", 2}},
                       {{"V0", 2}, {"V1", 2}, {"V2", 2}}, std::move(vm));
  JointPmf j = compose(compose(pu, ychan), vchan);
  CombinedConstants k;
  k.c1 = mi(j, {"U1"}, {"Y1", "V1"}, {"U0"});
  k.c2 = mi(j, {"U2"}, {"Y2", "V2"}, {"U0"});
  k.K0 = std::min(mi(j, {"U0"}, {"Y1", "V1"}), mi(j, {"U0"}, {"Y2", "V2"}));
  k.K1 = mi(j, {"U0", "U1"}, {"Y1", "V1"});
  k.K2 = mi(j, {"U0", "U2"}, {"Y2", "V2"});
  k.a = mi(j, {"U1"}, {"U2"}, {"U0"});
  Names w = {"U0", "U1", "U2", "Yt"};
  k.L1 = mi(j, w, {"V1"}, {"V0", "Y1"});
  k.L2 = mi(j, w, {"V2"}, {"V0", "Y2"});
  k.L01 = mi(j, w, {"V0", "V1"}, {"Y1"});
  k.L02 = mi(j, w, {"V0", "V2"}, {"Y2"});
  return k;
}

RateRegion3 dueck_capacity(const JointPmf& noise, bool with_feedback) {
  double h01 = entropy(noise, {"Z0", "Z1"});
  double h02 = entropy(noise, {"Z0", "Z2"});
  auto check = [](double h, const char* pair) {
    if (h > 1.0 + kNumTol) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "pairwise noise entropy H" << pair << " = " << h
          << " exceeds one bit";
      throw std::domain_error(msg.str());
    }
  };
  // the cap is what makes the feedback region tight; the no-feedback form
  // stays a plain formula evaluation either way
  if (with_feedback) {
    check(h01, "(Z0,Z1)");
    check(h02, "(Z0,Z2)");
  }
  double h012 = entropy(noise, {"Z0", "Z1", "Z2"});
  double cross = with_feedback ? 0.0 : mi(noise, {"Z1"}, {"Z2"}, {"Z0"});
  std::vector<LinIneq> rows;
  rows.push_back({{1, 0, 0}, 0.0});
  rows.push_back({{0, 1, 0}, 2.0 - h01});
  rows.push_back({{0, 0, 1}, 2.0 - h02});
  rows.push_back({{0, 1, 1}, 3.0 - h012 - cross});
  return make_region(std::move(rows));
}

bool z_markov_chain_holds(const JointPmf& noise) {
  return mi(noise, {"Z1"}, {"Z2"}, {"Z0"}) <= kNumTol;
}

JointPmf random_dueck_noise(RngStream& rng, bool force_markov) {
  std::vector<Alphabet> axes = {{"Z0", 2}, {"Z1", 2}, {"Z2", 2}};
  if (!force_markov) {
    std::vector<double> mass = dirichlet(rng, 8);
    for (int step = 0; step < 400; ++step) {
      JointPmf cand(axes, mass);
      if (dueck_condition_holds(cand)) return cand;
      double total = 0.0;
      for (auto& m : mass) {
        m *= 0.8;
        total += m;
      }
      mass[0] += 1.0 - total;
    }
  } else {
    double p0 = rng.next_double();
    std::array<double, 2> t1 = {rng.next_double(), rng.next_double()};
    std::array<double, 2> t2 = {rng.next_double(), rng.next_double()};
    for (int step = 0; step < 400; ++step) {
      std::vector<double> mass(8);
      for (int z0 = 0; z0 < 2; ++z0)
        for (int z1 = 0; z1 < 2; ++z1)
          for (int z2 = 0; z2 < 2; ++z2) {
            double m = (z0 ? p0 : 1.0 - p0);
            m *= (z1 ? t1[z0] : 1.0 - t1[z0]);
            m *= (z2 ? t2[z0] : 1.0 - t2[z0]);
            mass[(z0 * 2 + z1) * 2 + z2] = m;
          }
      JointPmf cand(axes, mass);
      if (dueck_condition_holds(cand)) return cand;
      p0 *= 0.8;
      for (auto& t : t1) t *= 0.8;
      for (auto& t : t2) t *= 0.8;
    }
  }
  throw std::runtime_error("noise cooling failed to reach the entropy cap");
}

AuxScheme dueck_aux() {
  AuxScheme a;
  a.u = {Alphabet{"U0", 2}, Alphabet{"U1", 2}, Alphabet{"U2", 2}};
  a.law = JointPmf({a.u[0], a.u[1], a.u[2]}, std::vector<double>(8, 0.125));
  a.f.resize(8);
  for (int u0 = 0; u0 < 2; ++u0)
    for (int u1 = 0; u1 < 2; ++u1)
      for (int u2 = 0; u2 < 2; ++u2)
        a.f[(u0 * 2 + u1) * 2 + u2] = u1 * 4 + u0 * 2 + u2;
  return a;
}

UpdateScheme dueck_update(int which_v0) {
  if (which_v0 != 1 && which_v0 != 2)
    throw std::invalid_argument("which_v0 must be 1 or 2");
  UpdateScheme u;
  u.variant = UpdateScheme::kFull;
  u.v = {Alphabet{"V0", 4}, Alphabet{"V1", 4}, Alphabet{"V2", 4}};
  std::vector<Alphabet> given = {{"U0", 2}, {"U1", 2}, {"U2", 2}, {"Yt", 8}};
  const std::size_t cols = 64;
  std::vector<double> mass(64 * cols, 0.0);
  std::size_t r = 0;
  for (int u0 = 0; u0 < 2; ++u0)
    for (int u1 = 0; u1 < 2; ++u1)
      for (int u2 = 0; u2 < 2; ++u2)
        for (int yt = 0; yt < 8; ++yt, ++r) {
          int y11 = (yt >> 2) & 1, y10 = (yt >> 1) & 1, y22 = yt & 1;
          int z0 = y10 ^ u0, z1 = y11 ^ u1, z2 = y22 ^ u2;
          int v0 = z0 * 2 + (which_v0 == 1 ? z1 : z2);
          int v1 = u0 * 2 + u1;
          int v2 = u0 * 2 + u2;
          mass[r * cols + static_cast<std::size_t>((v0 * 4 + v1) * 4 + v2)] =
              1.0;
        }
  u.law = ConditionalPmf(std::move(given), {u.v[0], u.v[1], u.v[2]},
                         std::move(mass));
  return u;
}

namespace {

// capacity of a finite channel in bits via the usual alternating iteration
double iterated_capacity(const std::vector<std::vector<double>>& w) {
  const std::size_t nx = w.size(), ny = w[0].size();
  std::vector<double> r(nx, 1.0 / static_cast<double>(nx));
  std::vector<double> q(ny), d(nx);
  double lower = 0.0;
  for (int it = 0; it < 50000; ++it) {
    for (std::size_t y = 0; y < ny; ++y) {
      q[y] = 0.0;
      for (std::size_t x = 0; x < nx; ++x) q[y] += r[x] * w[x][y];
    }
    double upper = -1.0;
    lower = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      d[x] = 0.0;
      for (std::size_t y = 0; y < ny; ++y)
        if (w[x][y] > 0.0) d[x] += w[x][y] * std::log(w[x][y] / q[y]);
      lower += r[x] * d[x];
      upper = std::max(upper, d[x]);
    }
    if (upper - lower < 1e-13) break;
    double total = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      r[x] *= std::exp(d[x] - lower);
      total += r[x];
    }
    for (auto& rv : r) rv /= total;
  }
  return std::max(lower, 0.0) / std::log(2.0);
}

double fb_objective(double al, double be, double p) {
  double s = 0.5 * (al + be);
  double val = binary_entropy(binary_convolution(s, p)) - binary_entropy(p);
  if (1.0 - be > 1e-12)
    val += 0.5 * (1.0 - be) *
           binary_entropy(std::clamp(al / (1.0 - be), 0.0, 1.0));
  if (1.0 - al > 1e-12)
    val += 0.5 * (1.0 - al) *
           binary_entropy(std::clamp(be / (1.0 - al), 0.0, 1.0));
  return val;
}

double fb_side(double al, double be, double p) {
  double s = 0.5 * (al + be);
  return binary_entropy(binary_convolution(s, p)) -
         0.5 * (binary_entropy(al) + binary_entropy(be)) - binary_entropy(p);
}

}  // namespace

BlackwellBounds blackwell_bounds(double p, int grid_steps) {
  if (p < 0.0 || p >= 0.5)
    throw std::invalid_argument("noise bias must lie in [0, 1/2)");
  if (grid_steps < 2) grid_steps = 2;
  const double h = 1.0 / (grid_steps - 1);
  double best = -1.0, ba = 0.0, bb = 0.0;
  for (int i = 0; i < grid_steps; ++i)
    for (int j = 0; j < grid_steps; ++j) {
      double al = i * h, be = j * h;
      if (al + be > 1.0 + 1e-12) continue;
      if (fb_side(al, be, p) < -kNumTol) continue;
      double v = fb_objective(al, be, p);
      if (v > best) {
        best = v;
        ba = al;
        bb = be;
      }
    }
  double window = h;
  for (int round = 0; round < 8; ++round) {
    const int m = 12;
    double step = window / m;
    double ca = ba, cb = bb;
    for (int di = -m; di <= m; ++di)
      for (int dj = -m; dj <= m; ++dj) {
        double al = ca + di * step, be = cb + dj * step;
        if (al < 0.0 || be < 0.0 || al + be > 1.0) continue;
        if (fb_side(al, be, p) < -kNumTol) continue;
        double v = fb_objective(al, be, p);
        if (v > best) {
          best = v;
          ba = al;
          bb = be;
        }
      }
    window *= 0.4;
  }

  double pb = 1.0 - p;
  std::vector<std::vector<double>> shared = {
      {pb, 0.0, 0.0, p}, {0.0, p, pb, 0.0}, {p, 0.0, 0.0, pb}};
  // rows of the per-receiver marginals, combined independently
  std::vector<std::array<double, 2>> w1 = {{pb, p}, {p, pb}, {p, pb}};
  std::vector<std::array<double, 2>> w2 = {{pb, p}, {pb, p}, {p, pb}};
  std::vector<std::vector<double>> indep(3, std::vector<double>(4));
  for (int x = 0; x < 3; ++x)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) indep[x][a * 2 + b] = w1[x][a] * w2[x][b];

  BlackwellBounds out;
  out.fb_lower = std::max(best, 0.0);
  out.fb_cutset = iterated_capacity(shared);
  out.nofb_upper = iterated_capacity(indep);
  return out;
}

AuxScheme blackwell_aux(double alpha, double beta) {
  if (alpha < -1e-12 || beta < -1e-12 || alpha + beta > 1.0 + 1e-9)
    throw std::invalid_argument("corner masses must fit in the simplex");
  alpha = std::max(alpha, 0.0);
  beta = std::max(beta, 0.0);
  double rest = std::max(1.0 - alpha - beta, 0.0);
  AuxScheme a;
  a.u = {Alphabet{"U0", 2}, Alphabet{"U1", 2}, Alphabet{"U2", 2}};
  // support stays on u1 >= u2 so each receiver's bit is clean in its output
  std::vector<double> mass(8, 0.0);
  mass[0] = 0.5 * alpha;  // u0=0, (u1,u2)=(0,0)
  mass[2] = 0.5 * rest;   // u0=0, (1,0)
  mass[3] = 0.5 * beta;   // u0=0, (1,1)
  mass[4] = 0.5 * beta;   // u0=1, (0,0)
  mass[6] = 0.5 * rest;   // u0=1, (1,0)
  mass[7] = 0.5 * alpha;  // u0=1, (1,1)
  a.law = JointPmf({a.u[0], a.u[1], a.u[2]}, std::move(mass));
  a.f = {0, 1, 1, 2, 0, 1, 1, 2};
  return a;
}

UpdateScheme blackwell_update() {
  UpdateScheme u;
  u.variant = UpdateScheme::kStar;
  u.v = {Alphabet{"V0", 2}, Alphabet{"V1", 2}, Alphabet{"V2", 2}};
  std::vector<Alphabet> given = {{"X", 3}, {"Yt", 4}};
  std::vector<double> mass(12 * 8, 0.0);
  std::size_t r = 0;
  for (int x = 0; x < 3; ++x)
    for (int yt = 0; yt < 4; ++yt, ++r) {
      int y1 = (yt >> 1) & 1;
      int v1 = x >= 1 ? 1 : 0;  // receiver 1's clean bit
      int v2 = x == 2 ? 1 : 0;  // receiver 2's clean bit
      int v0 = y1 ^ v1;         // the shared noise itself
      mass[r * 8 + static_cast<std::size_t>((v0 * 2 + v1) * 2 + v2)] = 1.0;
    }
  u.law = ConditionalPmf(std::move(given), {u.v[0], u.v[1], u.v[2]},
                         std::move(mass));
  return u;
}

SchemeSearchResult blackwell_scheme_search(double p, int grid_steps,
                                           bool refine) {
  if (grid_steps < 2) grid_steps = 2;
  UpdateScheme upd = blackwell_update();
  BlackwellParams params;
  params.p = p;
  params.feedback.kind = FeedbackConfig::kNoiseless;
  Dmbc ch = make_blackwell(params);
  auto eval = [&](double al, double be) -> double {
    if (al < 0.0 || be < 0.0 || al + be > 1.0) return -1.0;
    SumRate s = sum_rate_max(feedback_inner(blackwell_aux(al, be), upd, ch));
    return s.feasible ? s.value : -1.0;
  };
  const double h = 1.0 / (grid_steps - 1);
  SchemeSearchResult out;
  out.sum_rate = -1.0;
  for (int i = 0; i < grid_steps; ++i)
    for (int j = 0; j < grid_steps; ++j) {
      double v = eval(i * h, j * h);
      if (v > out.sum_rate) {
        out.sum_rate = v;
        out.alpha = i * h;
        out.beta = j * h;
      }
    }
  if (refine) {
    double window = h;
    for (int round = 0; round < 5; ++round) {
      const int m = 7;
      double step = window / m;
      double ca = out.alpha, cb = out.beta;
      for (int di = -m; di <= m; ++di)
        for (int dj = -m; dj <= m; ++dj) {
          double al = ca + di * step, be = cb + dj * step;
          double v = eval(al, be);
          if (v > out.sum_rate) {
            out.sum_rate = v;
            out.alpha = al;
            out.beta = be;
          }
        }
      window *= 0.4;
    }
  }
  out.region = feedback_inner(blackwell_aux(out.alpha, out.beta), upd, ch);
  return out;
}

namespace {

double search_score(const RateRegion3& r, const AuxSearchSpec& spec) {
  if (spec.objective == SearchObjective::kSumRate) {
    SumRate s = sum_rate_max(r);
    return s.feasible ? s.value : -1.0;
  }
  double best = -1.0;
  for (const auto& v : vertices(r))
    best = std::max(best, spec.weights[0] * v[0] + spec.weights[1] * v[1] +
                              spec.weights[2] * v[2]);
  return best;
}

}  // namespace

AuxSearchResult aux_grid_search(const Dmbc& ch, const AuxSearchSpec& spec) {
  AuxSearchResult out;
  switch (spec.family) {
    case AuxFamily::kBlackwellPair: {
      if (spec.steps < 1)
        throw std::invalid_argument("pair family needs at least one grid step");
      UpdateScheme upd = blackwell_update();
      double ba = 0.0, bb = 0.0;
      auto eval = [&](double al, double be) {
        if (al < 0.0 || be < 0.0 || al + be > 1.0) return;
        double v = search_score(feedback_inner(blackwell_aux(al, be), upd, ch),
                                spec);
        if (v > out.value) {
          out.value = v;
          ba = al;
          bb = be;
        }
      };
      double h = spec.steps > 1 ? 1.0 / (spec.steps - 1) : 1.0;
      for (int i = 0; i < spec.steps; ++i)
        for (int j = 0; j < spec.steps; ++j) eval(i * h, j * h);
      double window = h;
      for (int round = 0; round < spec.refine_rounds; ++round) {
        const int m = 7;
        double step = window / m, ca = ba, cb = bb;
        for (int di = -m; di <= m; ++di)
          for (int dj = -m; dj <= m; ++dj) eval(ca + di * step, cb + dj * step);
        window *= 0.4;
      }
      out.aux = blackwell_aux(ba, bb);
      out.upd = std::move(upd);
      out.region = feedback_inner(out.aux, out.upd, ch);
      return out;
    }
    case AuxFamily::kDueckHull: {
      RateRegion3 ra = feedback_inner(dueck_aux(), dueck_update(1), ch);
      RateRegion3 rb = feedback_inner(dueck_aux(), dueck_update(2), ch);
      out.aux = dueck_aux();
      out.upd = search_score(rb, spec) > search_score(ra, spec)
                    ? dueck_update(2)
                    : dueck_update(1);
      out.region = convex_hull_union(ra, rb);
      out.value = search_score(out.region, spec);
      return out;
    }
    case AuxFamily::kFreeSimplex: {
      if (spec.samples < 1)
        throw std::invalid_argument("free family needs at least one sample");
      for (int i = 0; i < 3; ++i)
        if (spec.sizes[i] < 1 || spec.sizes[i] > 3)
          throw std::invalid_argument(
              "free family keeps the U alphabets at three symbols or fewer");
      RngStream root(spec.seed);
      for (int s = 0; s < spec.samples; ++s) {
        RngStream rng = root.child(static_cast<std::uint64_t>(s));
        AuxScheme aux;
        std::size_t cells = 1;
        for (int i = 0; i < 3; ++i) {
          aux.u[i] = {std::string("U") + std::to_string(i), spec.sizes[i]};
          cells *= static_cast<std::size_t>(spec.sizes[i]);
        }
        aux.law = JointPmf({aux.u[0], aux.u[1], aux.u[2]},
                           dirichlet(rng, cells));
        aux.f.resize(cells);
        for (auto& x : aux.f)
          x = static_cast<int>(rng.next_below(
              static_cast<std::uint64_t>(ch.in.size)));
        RateRegion3 r = marton_region(aux, ch);
        double v = search_score(r, spec);
        if (v > out.value) {
          out.value = v;
          out.aux = std::move(aux);
          out.region = std::move(r);
        }
      }
      out.upd = const_update(out.aux, ch, UpdateScheme::kStar);
      return out;
    }
  }
  throw std::invalid_argument("unknown search family");
}

UpdateScheme const_update(const AuxScheme& aux, const Dmbc& ch,
                          UpdateScheme::Variant variant) {
  UpdateScheme u;
  u.variant = variant;
  u.v = {Alphabet{"V0", 1}, Alphabet{"V1", 1}, Alphabet{"V2", 1}};
  std::vector<Alphabet> given;
  if (variant == UpdateScheme::kFull)
    given = {aux.u[0], aux.u[1], aux.u[2], ch.fb};
  else
    given = {ch.in, ch.fb};
  std::size_t rows = 1;
  for (const auto& g : given) rows *= static_cast<std::size_t>(g.size);
  u.law = ConditionalPmf(std::move(given), {u.v[0], u.v[1], u.v[2]},
                         std::vector<double>(rows, 1.0));
  return u;
}

void to_json(nlohmann::json& j, const AuxScheme& a) {
  j = nlohmann::json{{"u", a.u}, {"law", a.law}, {"f", a.f}};
}

void from_json(const nlohmann::json& j, AuxScheme& a) {
  auto u = j.at("u").get<std::vector<Alphabet>>();
  if (u.size() != 3)
    throw std::invalid_argument("aux scheme needs three U alphabets");
  a.u = {u[0], u[1], u[2]};
  j.at("law").get_to(a.law);
  j.at("f").get_to(a.f);
}

void to_json(nlohmann::json& j, const UpdateScheme& u) {
  j = nlohmann::json{
      {"variant", u.variant == UpdateScheme::kFull ? "full" : "star"},
      {"v", u.v},
      {"law", u.law}};
}

void from_json(const nlohmann::json& j, UpdateScheme& u) {
  std::string variant = j.at("variant").get<std::string>();
  if (variant == "full")
    u.variant = UpdateScheme::kFull;
  else if (variant == "star")
    u.variant = UpdateScheme::kStar;
  else
    throw std::invalid_argument("update variant must be full or star");
  auto v = j.at("v").get<std::vector<Alphabet>>();
  if (v.size() != 3)
    throw std::invalid_argument("update scheme needs three V alphabets");
  u.v = {v[0], v[1], v[2]};
  j.at("law").get_to(u.law);
}

void to_json(nlohmann::json& j, const LgwScheme& s) {
  j = nlohmann::json{{"v", s.v}, {"law", s.law}};
}

void from_json(const nlohmann::json& j, LgwScheme& s) {
  auto v = j.at("v").get<std::vector<Alphabet>>();
  if (v.size() != 3)
    throw std::invalid_argument("description scheme needs three V alphabets");
  s.v = {v[0], v[1], v[2]};
  j.at("law").get_to(s.law);
}

void to_json(nlohmann::json& j, const MartonConstants& k) {
  j = nlohmann::json{
      {"a", k.a}, {"b1", k.b1}, {"b2", k.b2}, {"c1", k.c1}, {"c2", k.c2}};
}

void from_json(const nlohmann::json& j, MartonConstants& k) {
  j.at("a").get_to(k.a);
  j.at("b1").get_to(k.b1);
  j.at("b2").get_to(k.b2);
  j.at("c1").get_to(k.c1);
  j.at("c2").get_to(k.c2);
}

void to_json(nlohmann::json& j, const LgwConstants& k) {
  j = nlohmann::json{{"g0", k.g0},   {"g1", k.g1},   {"g2", k.g2},
                     {"m01", k.m01}, {"m02", k.m02}, {"m1", k.m1},
                     {"m2", k.m2}};
}

void from_json(const nlohmann::json& j, LgwConstants& k) {
  j.at("g0").get_to(k.g0);
  j.at("g1").get_to(k.g1);
  j.at("g2").get_to(k.g2);
  j.at("m01").get_to(k.m01);
  j.at("m02").get_to(k.m02);
  j.at("m1").get_to(k.m1);
  j.at("m2").get_to(k.m2);
}

void to_json(nlohmann::json& j, const CombinedConstants& k) {
  j = nlohmann::json{{"K0", k.K0},   {"K1", k.K1},   {"K2", k.K2},
                     {"c1", k.c1},   {"c2", k.c2},   {"a", k.a},
                     {"L1", k.L1},   {"L2", k.L2},   {"L01", k.L01},
                     {"L02", k.L02}};
}

void from_json(const nlohmann::json& j, CombinedConstants& k) {
  j.at("K0").get_to(k.K0);
  j.at("K1").get_to(k.K1);
  j.at("K2").get_to(k.K2);
  j.at("c1").get_to(k.c1);
  j.at("c2").get_to(k.c2);
  j.at("a").get_to(k.a);
  j.at("L1").get_to(k.L1);
  j.at("L2").get_to(k.L2);
  j.at("L01").get_to(k.L01);
  j.at("L02").get_to(k.L02);
}

}  // namespace bcfb
