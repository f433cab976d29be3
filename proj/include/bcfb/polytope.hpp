#pragma once

#include <array>
#include <string>
#include <vector>

#include "bcfb/info.hpp"
#include "json.hpp"

namespace bcfb {

// One inequality a.x <= b.
struct LinIneq {
  std::vector<double> a;
  double b = 0.0;
};

// Inequality system over named variables.  All variables are free unless the
// caller adds explicit sign rows.
struct LinIneqSystem {
  std::vector<std::string> vars;
  std::vector<LinIneq> rows;

  int var(const std::string& name) const;
  void add(std::vector<double> a, double b) { rows.push_back({std::move(a), b}); }
};

// Projects out one variable by pairing positive and negative rows.  The
// result is cleaned with remove_redundant.
LinIneqSystem fm_eliminate(const LinIneqSystem& sys, const std::string& var);

// Drops duplicate and LP-certified implied rows deterministically.
LinIneqSystem remove_redundant(const LinIneqSystem& sys);

struct LpResult {
  enum Status { kOptimal, kInfeasible, kUnbounded } status = kInfeasible;
  double value = 0.0;
  std::vector<double> x;
};

// maximize c.x over the system (free variables, dense two-phase simplex)
LpResult lp_maximize(const LinIneqSystem& sys, const std::vector<double>& c);

// Polyhedral rate region over (R0,R1,R2).  Nonnegativity is implicit; the
// up_set flag marks cost-style regions whose interesting side is above the
// written bounds.  Geometric routines intersect with the shared bounding box
// [0, kRateCap]^3 so up-sets stay comparable.
struct RateRegion3 {
  std::vector<LinIneq> halfspaces;  // each a has length 3
  bool up_set = false;
};

inline constexpr double kRateCap = 64.0;

RateRegion3 make_region(std::vector<LinIneq> rows, bool up_set = false);

// region over (R0,R1,R2) from a projected system; throws if any other
// variable still appears with a nonzero coefficient
RateRegion3 region_from_system(const LinIneqSystem& sys);

std::vector<std::array<double, 3>> vertices(const RateRegion3& region);
bool contains_point(const RateRegion3& region, const std::array<double, 3>& pt,
                    double tol);
bool region_equal(const RateRegion3& a, const RateRegion3& b, double tol);

struct SumRate {
  double value = 0.0;
  bool feasible = false;
};

// max R1+R2 on the R0 = 0 slice; infeasible slice reports value 0
SumRate sum_rate_max(const RateRegion3& region);

RateRegion3 convex_hull_union(const RateRegion3& a, const RateRegion3& b);

void to_json(nlohmann::json& j, const LinIneq& r);
void from_json(const nlohmann::json& j, LinIneq& r);
void to_json(nlohmann::json& j, const LinIneqSystem& s);
void from_json(const nlohmann::json& j, LinIneqSystem& s);
void to_json(nlohmann::json& j, const RateRegion3& r);
void from_json(const nlohmann::json& j, RateRegion3& r);

}  // namespace bcfb
