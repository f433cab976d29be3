#include "bcfb/info.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bcfb {

namespace {

void check_axes(const std::vector<Alphabet>& axes) {
  std::set<std::string> seen;
  for (const auto& a : axes) {
    if (a.name.empty()) throw std::invalid_argument("axis with empty name");
    if (a.size < 1 || a.size > 16)
      throw std::invalid_argument("axis '" + a.name +
                                  "' size out of range [1,16]");
    if (!seen.insert(a.name).second)
      throw std::invalid_argument("duplicate axis name '" + a.name + "'");
  }
}

std::size_t cell_count(const std::vector<Alphabet>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.size);
  return n;
}

void check_mass(const std::vector<double>& mass, std::size_t want,
                const char* what) {
  if (mass.size() != want)
    throw std::invalid_argument(std::string(what) + ": mass length mismatch");
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0))
      throw std::invalid_argument(std::string(what) + ": negative entry");
    total += m;
  }
  if (std::fabs(total - 1.0) > kNormTol)
    throw std::invalid_argument(std::string(what) +
                                ": mass does not sum to one");
}

// small negatives from float cancellation get clamped; anything worse is a bug
double clamp_info(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v >= -kNumTol) return 0.0;
  throw std::logic_error(std::string(what) + ": value below -tolerance");
}

}  // namespace

JointPmf::JointPmf(std::vector<Alphabet> axes, std::vector<double> mass)
    : axes_(std::move(axes)), mass_(std::move(mass)) {
  check_axes(axes_);
  check_mass(mass_, cell_count(axes_), "JointPmf");
  strides_.assign(axes_.size(), 1);
  for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * static_cast<std::size_t>(axes_[i + 1].size);
}

int JointPmf::axis(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return static_cast<int>(i);
  return -1;
}

int JointPmf::axis_checked(const std::string& name) const {
  int i = axis(name);
  if (i < 0) throw std::invalid_argument("unknown axis '" + name + "'");
  return i;
}

std::size_t JointPmf::flatten(const std::vector<int>& sym) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i)
    idx += strides_[i] * static_cast<std::size_t>(sym[i]);
  return idx;
}

void JointPmf::unflatten(std::size_t idx, std::vector<int>& sym) const {
  sym.resize(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    sym[i] = static_cast<int>(idx / strides_[i]);
    idx %= strides_[i];
  }
}

ConditionalPmf::ConditionalPmf(std::vector<Alphabet> given,
                               std::vector<Alphabet> out,
                               std::vector<double> mass)
    : given_(std::move(given)), out_(std::move(out)), mass_(std::move(mass)) {
  std::vector<Alphabet> all = given_;
  all.insert(all.end(), out_.begin(), out_.end());
  check_axes(all);
  if (out_.empty()) throw std::invalid_argument("ConditionalPmf: no outputs");
  rows_ = cell_count(given_);
  cols_ = cell_count(out_);
  if (mass_.size() != rows_ * cols_)
    throw std::invalid_argument("ConditionalPmf: mass length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
      double m = mass_[r * cols_ + c];
      if (!(m >= 0.0))
        throw std::invalid_argument("ConditionalPmf: negative entry");
      total += m;
    }
    if (std::fabs(total - 1.0) > kNormTol)
      throw std::invalid_argument("ConditionalPmf: row does not sum to one");
  }
}

JointPmf marginalize(const JointPmf& p, const std::vector<std::string>& keep) {
  std::vector<int> keep_idx;
  keep_idx.reserve(keep.size());
  std::set<std::string> seen;
  for (const auto& name : keep) {
    if (!seen.insert(name).second)
      throw std::invalid_argument("marginalize: duplicate axis '" + name + "'");
    keep_idx.push_back(p.axis_checked(name));
  }
  std::vector<Alphabet> axes;
  for (int i : keep_idx) axes.push_back(p.axes()[i]);

  std::vector<std::size_t> strides(keep_idx.size(), 1);
  for (int i = static_cast<int>(keep_idx.size()) - 2; i >= 0; --i)
    strides[i] = strides[i + 1] * static_cast<std::size_t>(axes[i + 1].size);

  std::vector<double> mass(std::max<std::size_t>(1, cell_count(axes)), 0.0);
  std::vector<int> sym;
  for (std::size_t idx = 0; idx < p.cells(); ++idx) {
    double m = p[idx];
    if (m == 0.0) continue;
    p.unflatten(idx, sym);
    std::size_t out = 0;
    for (std::size_t k = 0; k < keep_idx.size(); ++k)
      out += strides[k] * static_cast<std::size_t>(sym[keep_idx[k]]);
    mass[out] += m;
  }
  if (axes.empty()) return JointPmf({{"unit", 1}}, {1.0});
  return JointPmf(std::move(axes), std::move(mass));
}

JointPmf condition(const JointPmf& p, const std::string& on, int value) {
  int ax = p.axis_checked(on);
  if (value < 0 || value >= p.axes()[ax].size)
    throw std::invalid_argument("condition: symbol out of range");
  std::vector<Alphabet> axes;
  for (std::size_t i = 0; i < p.axes().size(); ++i)
    if (static_cast<int>(i) != ax) axes.push_back(p.axes()[i]);
  if (axes.empty()) axes.push_back({"unit", 1});

  std::vector<double> mass(cell_count(axes), 0.0);
  std::vector<int> sym;
  double total = 0.0;
  std::size_t out = 0;
  for (std::size_t idx = 0; idx < p.cells(); ++idx) {
    p.unflatten(idx, sym);
    if (sym[ax] != value) continue;
    mass[out++] = p[idx];
    total += p[idx];
  }
  if (total <= 0.0)
    throw std::domain_error("condition: event '" + on + "' has zero mass");
  for (double& m : mass) m /= total;
  return JointPmf(std::move(axes), std::move(mass));
}

JointPmf compose(const JointPmf& prior, const ConditionalPmf& channel) {
  std::vector<int> given_idx;
  for (const auto& g : channel.given())
    given_idx.push_back(prior.axis_checked(g.name));
  for (const auto& o : channel.out())
    if (prior.axis(o.name) >= 0)
      throw std::invalid_argument("compose: output axis '" + o.name +
                                  "' already present");

  std::vector<Alphabet> axes = prior.axes();
  axes.insert(axes.end(), channel.out().begin(), channel.out().end());

  std::vector<std::size_t> gstrides(given_idx.size(), 1);
  for (int i = static_cast<int>(given_idx.size()) - 2; i >= 0; --i)
    gstrides[i] = gstrides[i + 1] *
                  static_cast<std::size_t>(channel.given()[i + 1].size);

  std::size_t cols = channel.cols();
  std::vector<double> mass(prior.cells() * cols, 0.0);
  std::vector<int> sym;
  for (std::size_t idx = 0; idx < prior.cells(); ++idx) {
    double m = prior[idx];
    if (m == 0.0) continue;
    prior.unflatten(idx, sym);
    std::size_t row = 0;
    for (std::size_t k = 0; k < given_idx.size(); ++k)
      row += gstrides[k] * static_cast<std::size_t>(sym[given_idx[k]]);
    for (std::size_t c = 0; c < cols; ++c)
      mass[idx * cols + c] = m * channel.prob(row, c);
  }
  return JointPmf(std::move(axes), std::move(mass));
}

double entropy(const JointPmf& p, const std::vector<std::string>& axes) {
  if (axes.empty()) return 0.0;
  JointPmf m = marginalize(p, axes);
  double h = 0.0;
  for (std::size_t i = 0; i < m.cells(); ++i) {
    double q = m[i];
    if (q > 0.0) h -= q * std::log2(q);
  }
  return clamp_info(h, "entropy");
}

double mutual_information(const JointPmf& p, const std::vector<std::string>& a,
                          const std::vector<std::string>& b,
                          const std::vector<std::string>& c) {
  std::set<std::string> seen;
  for (const auto& lists : {a, b, c})
    for (const auto& name : lists)
      if (!seen.insert(name).second)
        throw std::invalid_argument(
            "mutual_information: axis '" + name + "' repeated across groups");
  auto join = [](const std::vector<std::string>& x,
                 const std::vector<std::string>& y) {
    std::vector<std::string> r = x;
    r.insert(r.end(), y.begin(), y.end());
    return r;
  };
  std::vector<std::string> ac = join(a, c), bc = join(b, c), abc = join(ac, b);
  double v = entropy(p, ac) + entropy(p, bc) - entropy(p, abc) - entropy(p, c);
  return clamp_info(v, "mutual_information");
}

double binary_entropy(double q) {
  if (q < 0.0 || q > 1.0)
    throw std::invalid_argument("binary_entropy: argument outside [0,1]");
  double h = 0.0;
  if (q > 0.0) h -= q * std::log2(q);
  if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
  return h;
}

double binary_convolution(double a, double b) {
  if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
    throw std::invalid_argument("binary_convolution: argument outside [0,1]");
  return a * (1.0 - b) + b * (1.0 - a);
}

void to_json(nlohmann::json& j, const Alphabet& a) {
  j = nlohmann::json{{"name", a.name}, {"size", a.size}};
}

void from_json(const nlohmann::json& j, Alphabet& a) {
  a.name = j.at("name").get<std::string>();
  a.size = j.at("size").get<int>();
}

void to_json(nlohmann::json& j, const JointPmf& p) {
  j = nlohmann::json{{"axes", p.axes()}, {"mass", p.mass()}};
}

void from_json(const nlohmann::json& j, JointPmf& p) {
  auto axes = j.at("axes").get<std::vector<Alphabet>>();
  auto mass = j.at("mass").get<std::vector<double>>();
  p = JointPmf(std::move(axes), std::move(mass));
}

void to_json(nlohmann::json& j, const ConditionalPmf& c) {
  std::vector<Alphabet> axes = c.given();
  axes.insert(axes.end(), c.out().begin(), c.out().end());
  j = nlohmann::json{{"axes", axes},
                     {"given", c.given().size()},
                     {"mass", c.mass()}};
}

void from_json(const nlohmann::json& j, ConditionalPmf& c) {
  auto axes = j.at("axes").get<std::vector<Alphabet>>();
  auto k = j.at("given").get<std::size_t>();
  if (k > axes.size())
    throw std::invalid_argument("ConditionalPmf: 'given' exceeds axis count");
  std::vector<Alphabet> given(axes.begin(), axes.begin() + k);
  std::vector<Alphabet> out(axes.begin() + k, axes.end());
  auto mass = j.at("mass").get<std::vector<double>>();
  c = ConditionalPmf(std::move(given), std::move(out), std::move(mass));
}

}  // namespace bcfb
