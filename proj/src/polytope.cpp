#include "bcfb/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcfb {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kSnapTol = 1e-11;
constexpr double kVertexTol = 1e-7;  // candidate feasibility / dedup radius

// scale a row so its largest coefficient magnitude is one; all-zero rows are
// reported via the return flag
bool normalize_row(LinIneq& r) {
  double scale = 0.0;
  for (double v : r.a) scale = std::max(scale, std::fabs(v));
  if (scale < 1e-12) return false;
  for (double& v : r.a) {
    v /= scale;
    if (std::fabs(v) < kSnapTol) v = 0.0;
  }
  r.b /= scale;
  return true;
}

bool rows_close(const LinIneq& x, const LinIneq& y, double tol) {
  if (x.a.size() != y.a.size()) return false;
  for (std::size_t i = 0; i < x.a.size(); ++i)
    if (std::fabs(x.a[i] - y.a[i]) > tol) return false;
  return true;
}

}  // namespace

int LinIneqSystem::var(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return static_cast<int>(i);
  return -1;
}

// ---------------------------------------------------------------------------
// dense two-phase simplex on A x <= b with free x (split x = u - v)

namespace {

struct Simplex {
  int m, ncols;
  std::vector<double> t;  // m rows by (ncols+1), last col rhs
  std::vector<int> basis;

  double& at(int i, int j) { return t[static_cast<std::size_t>(i) * (ncols + 1) + j]; }

  void pivot(int pr, int pc) {
    double pv = at(pr, pc);
    for (int j = 0; j <= ncols; ++j) at(pr, j) /= pv;
    for (int i = 0; i < m; ++i) {
      if (i == pr) continue;
      double f = at(i, pc);
      if (f == 0.0) continue;
      for (int j = 0; j <= ncols; ++j) at(i, j) -= f * at(pr, j);
    }
    basis[pr] = pc;
  }

  // minimize d.y with Bland's rule; artificial columns >= art_from barred
  // when barred=true.  Returns false on unboundedness.
  bool run(const std::vector<double>& d, int art_from, bool barred) {
    for (int iter = 0; iter < 100000; ++iter) {
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (barred && j >= art_from) break;
        double r = d[j];
        for (int i = 0; i < m; ++i)
          if (d[basis[i]] != 0.0) r -= d[basis[i]] * at(i, j);
        if (r < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        double aij = at(i, enter);
        if (aij > kPivotTol) {
          double ratio = at(i, ncols) / aij;
          if (leave < 0 || ratio < best - kPivotTol ||
              (ratio < best + kPivotTol && basis[i] < basis[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::logic_error("simplex: iteration limit reached");
  }

  double objective(const std::vector<double>& d) {
    double z = 0.0;
    for (int i = 0; i < m; ++i)
      if (d[basis[i]] != 0.0) z += d[basis[i]] * at(i, ncols);
    return z;
  }
};

}  // namespace

LpResult lp_maximize(const LinIneqSystem& sys, const std::vector<double>& c) {
  int n = static_cast<int>(sys.vars.size());
  int m = static_cast<int>(sys.rows.size());
  if (static_cast<int>(c.size()) != n)
    throw std::invalid_argument("lp_maximize: objective length mismatch");
  if (m == 0) {
    // any nonzero objective direction escapes to infinity
    bool zero = true;
    for (double v : c) zero = zero && std::fabs(v) < 1e-15;
    LpResult r;
    r.status = zero ? LpResult::kOptimal : LpResult::kUnbounded;
    r.x.assign(n, 0.0);
    return r;
  }

  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (sys.rows[i].b < 0.0) art_rows.push_back(i);
  int k = static_cast<int>(art_rows.size());
  int ncols = 2 * n + m + k;

  Simplex sx;
  sx.m = m;
  sx.ncols = ncols;
  sx.t.assign(static_cast<std::size_t>(m) * (ncols + 1), 0.0);
  sx.basis.assign(m, 0);

  int next_art = 2 * n + m;
  for (int i = 0; i < m; ++i) {
    const LinIneq& row = sys.rows[i];
    double sign = row.b < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      sx.at(i, j) = sign * row.a[j];
      sx.at(i, n + j) = -sign * row.a[j];
    }
    sx.at(i, 2 * n + i) = sign;  // slack
    sx.at(i, ncols) = sign * row.b;
    if (sign < 0.0) {
      sx.at(i, next_art) = 1.0;
      sx.basis[i] = next_art++;
    } else {
      sx.basis[i] = 2 * n + i;
    }
  }

  LpResult res;
  if (k > 0) {
    std::vector<double> d(ncols, 0.0);
    for (int j = 2 * n + m; j < ncols; ++j) d[j] = 1.0;
    if (!sx.run(d, 2 * n + m, false))
      throw std::logic_error("simplex: phase one unbounded");
    if (sx.objective(d) > 1e-7) {
      res.status = LpResult::kInfeasible;
      return res;
    }
    // pivot lingering zero-level artificials out where possible
    for (int i = 0; i < m; ++i) {
      if (sx.basis[i] < 2 * n + m) continue;
      for (int j = 0; j < 2 * n + m; ++j) {
        if (std::fabs(sx.at(i, j)) > kPivotTol) {
          sx.pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<double> d(ncols, 0.0);
  for (int j = 0; j < n; ++j) {
    d[j] = -c[j];
    d[n + j] = c[j];
  }
  if (!sx.run(d, 2 * n + m, true)) {
    res.status = LpResult::kUnbounded;
    return res;
  }
  res.status = LpResult::kOptimal;
  res.value = -sx.objective(d);
  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    int bv = sx.basis[i];
    if (bv < n)
      res.x[bv] += sx.at(i, ncols);
    else if (bv < 2 * n)
      res.x[bv - n] -= sx.at(i, ncols);
  }
  return res;
}

// ---------------------------------------------------------------------------

LinIneqSystem remove_redundant(const LinIneqSystem& sys) {
  LinIneqSystem out;
  out.vars = sys.vars;
  bool infeasible_row = false;
  for (const auto& row : sys.rows) {
    LinIneq r = row;
    if (!normalize_row(r)) {
      if (r.b < -kPivotTol) infeasible_row = true;
      continue;  // vacuous 0 <= b row
    }
    bool dominated = false;
    for (auto& kept : out.rows) {
      if (rows_close(kept, r, 1e-9)) {
        kept.b = std::min(kept.b, r.b);
        dominated = true;
        break;
      }
    }
    if (!dominated) out.rows.push_back(std::move(r));
  }
  if (infeasible_row) {
    LinIneq marker;
    marker.a.assign(sys.vars.size(), 0.0);
    marker.b = -1.0;
    out.rows.clear();
    out.rows.push_back(std::move(marker));
    return out;
  }

  // LP certificate: a row goes iff the others already imply it
  for (std::size_t i = 0; i < out.rows.size();) {
    LinIneqSystem others;
    others.vars = out.vars;
    for (std::size_t j = 0; j < out.rows.size(); ++j)
      if (j != i) others.rows.push_back(out.rows[j]);
    LpResult r = lp_maximize(others, out.rows[i].a);
    bool redundant = r.status == LpResult::kOptimal &&
                     r.value <= out.rows[i].b +
                                    1e-9 * std::max(1.0, std::fabs(out.rows[i].b));
    if (redundant)
      out.rows.erase(out.rows.begin() + static_cast<long>(i));
    else
      ++i;
  }
  return out;
}

LinIneqSystem fm_eliminate(const LinIneqSystem& sys, const std::string& var) {
  int idx = sys.var(var);
  if (idx < 0)
    throw std::invalid_argument("fm_eliminate: unknown variable '" + var + "'");

  LinIneqSystem out;
  for (std::size_t i = 0; i < sys.vars.size(); ++i)
    if (static_cast<int>(i) != idx) out.vars.push_back(sys.vars[i]);

  auto strip = [&](const LinIneq& r) {
    LinIneq s;
    s.b = r.b;
    for (std::size_t j = 0; j < r.a.size(); ++j)
      if (static_cast<int>(j) != idx) s.a.push_back(r.a[j]);
    return s;
  };

  std::vector<LinIneq> pos, neg;
  for (const auto& row : sys.rows) {
    LinIneq r = row;
    if (!normalize_row(r)) {
      out.rows.push_back(strip(r));
      continue;
    }
    double cv = r.a[idx];
    if (cv > kSnapTol) {
      for (double& v : r.a) v /= cv;
      r.b /= cv;
      pos.push_back(std::move(r));
    } else if (cv < -kSnapTol) {
      for (double& v : r.a) v /= -cv;
      r.b /= -cv;
      neg.push_back(std::move(r));
    } else {
      out.rows.push_back(strip(r));
    }
  }
  for (const auto& p : pos) {
    for (const auto& q : neg) {
      LinIneq sum;
      sum.a.resize(p.a.size());
      for (std::size_t j = 0; j < p.a.size(); ++j) sum.a[j] = p.a[j] + q.a[j];
      sum.b = p.b + q.b;
      out.rows.push_back(strip(sum));
    }
  }
  return remove_redundant(out);
}

// ---------------------------------------------------------------------------
// RateRegion3 geometry

RateRegion3 make_region(std::vector<LinIneq> rows, bool up_set) {
  RateRegion3 region;
  region.up_set = up_set;
  for (auto& row : rows) {
    if (row.a.size() != 3)
      throw std::invalid_argument("make_region: rows must have 3 coefficients");
    LinIneq r = row;
    if (!normalize_row(r)) {
      if (r.b < -kPivotTol) {
        r.a.assign(3, 0.0);
        r.b = -1.0;
        region.halfspaces.assign(1, std::move(r));
        return region;
      }
      continue;
    }
    bool dup = false;
    for (auto& kept : region.halfspaces) {
      if (rows_close(kept, r, 1e-9)) {
        kept.b = std::min(kept.b, r.b);
        dup = true;
        break;
      }
    }
    if (!dup) region.halfspaces.push_back(std::move(r));
  }
  return region;
}

RateRegion3 region_from_system(const LinIneqSystem& sys) {
  int ir[3];
  const char* names[3] = {"R0", "R1", "R2"};
  for (int k = 0; k < 3; ++k) {
    ir[k] = sys.var(names[k]);
    if (ir[k] < 0)
      throw std::invalid_argument("region_from_system: missing rate variable");
  }
  std::vector<LinIneq> rows;
  for (const auto& row : sys.rows) {
    for (std::size_t j = 0; j < row.a.size(); ++j) {
      bool is_rate = static_cast<int>(j) == ir[0] ||
                     static_cast<int>(j) == ir[1] ||
                     static_cast<int>(j) == ir[2];
      if (!is_rate && std::fabs(row.a[j]) > 1e-9)
        throw std::invalid_argument(
            "region_from_system: auxiliary variable still present");
    }
    LinIneq r;
    r.a = {row.a[ir[0]], row.a[ir[1]], row.a[ir[2]]};
    r.b = row.b;
    // implicit nonnegativity rows are dropped
    int neg = -1, nonzero = 0;
    for (int k = 0; k < 3; ++k)
      if (std::fabs(r.a[k]) > 1e-9) {
        ++nonzero;
        if (r.a[k] < 0) neg = k;
      }
    if (nonzero == 1 && neg >= 0 && std::fabs(r.b) <= 1e-9) continue;
    rows.push_back(std::move(r));
  }
  return make_region(std::move(rows));
}

namespace {

std::vector<LinIneq> boxed_rows(const RateRegion3& region, bool with_caps) {
  std::vector<LinIneq> rows = region.halfspaces;
  for (int k = 0; k < 3; ++k) {
    LinIneq lo;
    lo.a.assign(3, 0.0);
    lo.a[k] = -1.0;
    lo.b = 0.0;
    rows.push_back(lo);
    if (with_caps) {
      LinIneq hi;
      hi.a.assign(3, 0.0);
      hi.a[k] = 1.0;
      hi.b = kRateCap;
      rows.push_back(hi);
    }
  }
  return rows;
}

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

std::vector<std::array<double, 3>> vertices(const RateRegion3& region) {
  std::vector<LinIneq> rows = boxed_rows(region, true);
  std::size_t m = rows.size();
  std::vector<std::array<double, 3>> verts;
  for (std::size_t i = 0; i + 2 < m; ++i) {
    for (std::size_t j = i + 1; j + 1 < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        double a[3][3] = {{rows[i].a[0], rows[i].a[1], rows[i].a[2]},
                          {rows[j].a[0], rows[j].a[1], rows[j].a[2]},
                          {rows[k].a[0], rows[k].a[1], rows[k].a[2]}};
        double d = det3(a);
        if (std::fabs(d) < 1e-9) continue;
        double rhs[3] = {rows[i].b, rows[j].b, rows[k].b};
        std::array<double, 3> p{};
        for (int col = 0; col < 3; ++col) {
          double mm[3][3];
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
              mm[r][c] = c == col ? rhs[r] : a[r][c];
          p[col] = det3(mm) / d;
        }
        bool feasible = true;
        for (const auto& row : rows) {
          double lhs = row.a[0] * p[0] + row.a[1] * p[1] + row.a[2] * p[2];
          if (lhs > row.b + kVertexTol) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        bool dup = false;
        for (const auto& v : verts) {
          if (std::fabs(v[0] - p[0]) <= kVertexTol &&
              std::fabs(v[1] - p[1]) <= kVertexTol &&
              std::fabs(v[2] - p[2]) <= kVertexTol) {
            dup = true;
            break;
          }
        }
        if (!dup) verts.push_back(p);
      }
    }
  }
  std::sort(verts.begin(), verts.end());
  return verts;
}

bool contains_point(const RateRegion3& region, const std::array<double, 3>& pt,
                    double tol) {
  for (int k = 0; k < 3; ++k)
    if (pt[k] < -tol) return false;
  for (const auto& row : region.halfspaces) {
    double lhs = row.a[0] * pt[0] + row.a[1] * pt[1] + row.a[2] * pt[2];
    if (lhs > row.b + tol * std::max(1.0, std::fabs(row.b))) return false;
  }
  return true;
}

bool region_equal(const RateRegion3& a, const RateRegion3& b, double tol) {
  auto va = vertices(a);
  auto vb = vertices(b);
  if (va.empty() || vb.empty()) return va.empty() && vb.empty();
  for (const auto& v : va)
    if (!contains_point(b, v, tol)) return false;
  for (const auto& v : vb)
    if (!contains_point(a, v, tol)) return false;
  return true;
}

SumRate sum_rate_max(const RateRegion3& region) {
  // slice R0 = 0, then enumerate 2-D vertices
  struct Row2 {
    double a1, a2, b;
  };
  std::vector<Row2> rows;
  for (const auto& r : region.halfspaces)
    rows.push_back({r.a[1], r.a[2], r.b});
  rows.push_back({-1.0, 0.0, 0.0});
  rows.push_back({0.0, -1.0, 0.0});
  rows.push_back({1.0, 0.0, kRateCap});
  rows.push_back({0.0, 1.0, kRateCap});

  SumRate out;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      double det = rows[i].a1 * rows[j].a2 - rows[i].a2 * rows[j].a1;
      if (std::fabs(det) < 1e-9) continue;
      double r1 = (rows[i].b * rows[j].a2 - rows[i].a2 * rows[j].b) / det;
      double r2 = (rows[i].a1 * rows[j].b - rows[i].b * rows[j].a1) / det;
      bool feasible = true;
      for (const auto& r : rows) {
        if (r.a1 * r1 + r.a2 * r2 > r.b + kVertexTol) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      out.feasible = true;
      out.value = std::max(out.value, r1 + r2);
    }
  }
  if (!out.feasible) out.value = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// convex hull of the union, via facet enumeration over the joint vertex cloud

namespace {

using Pt = std::array<double, 3>;

Pt sub(const Pt& x, const Pt& y) { return {x[0] - y[0], x[1] - y[1], x[2] - y[2]}; }
double dot(const Pt& x, const Pt& y) {
  return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
}
Pt cross(const Pt& x, const Pt& y) {
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2],
          x[0] * y[1] - x[1] * y[0]};
}
double norm(const Pt& x) { return std::sqrt(dot(x, x)); }

void push_row(std::vector<LinIneq>& rows, Pt n, double b) {
  double scale = std::max({std::fabs(n[0]), std::fabs(n[1]), std::fabs(n[2])});
  if (scale < 1e-12) return;
  LinIneq r;
  r.a = {n[0] / scale, n[1] / scale, n[2] / scale};
  r.b = b / scale;
  for (const auto& kept : rows)
    if (rows_close(kept, r, 1e-7) && std::fabs(kept.b - r.b) < 1e-7) return;
  rows.push_back(std::move(r));
}

}  // namespace

RateRegion3 convex_hull_union(const RateRegion3& a, const RateRegion3& b) {
  std::vector<Pt> pts = vertices(a);
  for (const auto& v : vertices(b)) {
    bool dup = false;
    for (const auto& w : pts)
      if (std::fabs(v[0] - w[0]) <= kVertexTol &&
          std::fabs(v[1] - w[1]) <= kVertexTol &&
          std::fabs(v[2] - w[2]) <= kVertexTol) {
        dup = true;
        break;
      }
    if (!dup) pts.push_back(v);
  }
  if (pts.empty()) {
    LinIneq marker;
    marker.a.assign(3, 0.0);
    marker.b = -1.0;
    RateRegion3 empty;
    empty.halfspaces.push_back(std::move(marker));
    return empty;
  }

  // affine rank via greedy orthogonalization
  std::vector<Pt> basis;
  for (const auto& p : pts) {
    Pt d = sub(p, pts[0]);
    for (const auto& e : basis) {
      double c = dot(d, e);
      for (int k = 0; k < 3; ++k) d[k] -= c * e[k];
    }
    double len = norm(d);
    if (len > 1e-7) {
      for (int k = 0; k < 3; ++k) d[k] /= len;
      basis.push_back(d);
      if (basis.size() == 3) break;
    }
  }
  int rank = static_cast<int>(basis.size());
  std::vector<LinIneq> rows;

  if (rank == 3) {
    std::size_t n = pts.size();
    for (std::size_t i = 0; i + 2 < n; ++i) {
      for (std::size_t j = i + 1; j + 1 < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          Pt u = sub(pts[j], pts[i]), v = sub(pts[k], pts[i]);
          Pt nrm = cross(u, v);
          if (norm(nrm) <= 1e-9 * (norm(u) * norm(v) + 1e-30)) continue;
          double scale = std::max(
              {std::fabs(nrm[0]), std::fabs(nrm[1]), std::fabs(nrm[2])});
          for (int t = 0; t < 3; ++t) nrm[t] /= scale;
          double d = dot(nrm, pts[i]);
          double mx = -std::numeric_limits<double>::infinity();
          double mn = std::numeric_limits<double>::infinity();
          for (const auto& p : pts) {
            double s = dot(nrm, p) - d;
            mx = std::max(mx, s);
            mn = std::min(mn, s);
          }
          if (mx <= kVertexTol) push_row(rows, nrm, d);
          if (mn >= -kVertexTol) push_row(rows, {-nrm[0], -nrm[1], -nrm[2]}, -d);
        }
      }
    }
  } else if (rank == 2) {
    Pt nrm = cross(basis[0], basis[1]);
    double d = dot(nrm, pts[0]);
    push_row(rows, nrm, d);
    push_row(rows, {-nrm[0], -nrm[1], -nrm[2]}, -d);

    // 2-D hull in the plane (monotone chain)
    struct Q {
      double x, y;
      bool operator<(const Q& o) const {
        return x < o.x || (x == o.x && y < o.y);
      }
    };
    std::vector<Q> q;
    for (const auto& p : pts) {
      Pt dp = sub(p, pts[0]);
      q.push_back({dot(dp, basis[0]), dot(dp, basis[1])});
    }
    std::sort(q.begin(), q.end());
    auto turn = [](const Q& o, const Q& p1, const Q& p2) {
      return (p1.x - o.x) * (p2.y - o.y) - (p1.y - o.y) * (p2.x - o.x);
    };
    std::vector<Q> hull(2 * q.size());
    std::size_t h = 0;
    for (const auto& p : q) {
      while (h >= 2 && turn(hull[h - 2], hull[h - 1], p) <= 1e-12) --h;
      hull[h++] = p;
    }
    std::size_t lower = h + 1;
    for (auto it = q.rbegin(); it != q.rend(); ++it) {
      while (h >= lower && turn(hull[h - 2], hull[h - 1], *it) <= 1e-12) --h;
      hull[h++] = *it;
    }
    hull.resize(h > 0 ? h - 1 : 0);
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Q& p1 = hull[i];
      const Q& p2 = hull[(i + 1) % hull.size()];
      double ex = p2.x - p1.x, ey = p2.y - p1.y;
      double len = std::hypot(ex, ey);
      if (len < 1e-9) continue;
      double nx = ey / len, ny = -ex / len;  // outward for ccw order
      Pt n3 = {nx * basis[0][0] + ny * basis[1][0],
               nx * basis[0][1] + ny * basis[1][1],
               nx * basis[0][2] + ny * basis[1][2]};
      Pt at = {pts[0][0] + p1.x * basis[0][0] + p1.y * basis[1][0],
               pts[0][1] + p1.x * basis[0][1] + p1.y * basis[1][1],
               pts[0][2] + p1.x * basis[0][2] + p1.y * basis[1][2]};
      push_row(rows, n3, dot(n3, at));
    }
  } else if (rank == 1) {
    const Pt& t = basis[0];
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      double s = dot(t, p);
      mx = std::max(mx, s);
      mn = std::min(mn, s);
    }
    push_row(rows, t, mx);
    push_row(rows, {-t[0], -t[1], -t[2]}, -mn);
    // orthogonal complement pins the line
    Pt seed = std::fabs(t[0]) < 0.9 ? Pt{1, 0, 0} : Pt{0, 1, 0};
    Pt w1 = cross(t, seed);
    double l1 = norm(w1);
    for (int k = 0; k < 3; ++k) w1[k] /= l1;
    Pt w2 = cross(t, w1);
    for (const Pt& w : {w1, w2}) {
      double d = dot(w, pts[0]);
      push_row(rows, w, d);
      push_row(rows, {-w[0], -w[1], -w[2]}, -d);
    }
  } else {
    for (int k = 0; k < 3; ++k) {
      Pt e{};
      e[k] = 1.0;
      push_row(rows, e, pts[0][k]);
      e[k] = -1.0;
      push_row(rows, e, -pts[0][k]);
    }
  }
  return make_region(std::move(rows));
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const LinIneq& r) {
  j = nlohmann::json{{"a", r.a}, {"b", r.b}};
}

void from_json(const nlohmann::json& j, LinIneq& r) {
  r.a = j.at("a").get<std::vector<double>>();
  r.b = j.at("b").get<double>();
}

void to_json(nlohmann::json& j, const LinIneqSystem& s) {
  j = nlohmann::json{{"vars", s.vars}, {"rows", s.rows}};
}

void from_json(const nlohmann::json& j, LinIneqSystem& s) {
  s.vars = j.at("vars").get<std::vector<std::string>>();
  s.rows = j.at("rows").get<std::vector<LinIneq>>();
  for (const auto& r : s.rows)
    if (r.a.size() != s.vars.size())
      throw std::invalid_argument("LinIneqSystem: row width mismatch");
}

void to_json(nlohmann::json& j, const RateRegion3& r) {
  j = nlohmann::json{{"halfspaces", r.halfspaces},
                     {"orientation", r.up_set ? "upper" : "lower"}};
}

void from_json(const nlohmann::json& j, RateRegion3& r) {
  r.halfspaces = j.at("halfspaces").get<std::vector<LinIneq>>();
  r.up_set = j.value("orientation", "lower") == std::string("upper");
  for (const auto& h : r.halfspaces)
    if (h.a.size() != 3)
      throw std::invalid_argument("RateRegion3: halfspace width mismatch");
}

}  // namespace bcfb
