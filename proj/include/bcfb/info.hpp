#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace bcfb {

// shared numeric policy
inline constexpr double kNormTol = 1e-9;  // pmf normalization slack
inline constexpr double kNumTol = 1e-9;   // information-quantity slack
inline constexpr double kGeoTol = 1e-9;   // geometric comparisons
inline constexpr double kBackoff = 1e-6;  // strict-inequality back-off margin

struct Alphabet {
  std::string name;
  int size = 0;
};

// Dense joint distribution over a list of named finite alphabets.
// Mass is stored row-major with the first axis slowest.  Construction
// validates entries (nonnegative, total within kNormTol of one) and never
// renormalizes silently.
class JointPmf {
 public:
  JointPmf() = default;
  JointPmf(std::vector<Alphabet> axes, std::vector<double> mass);

  const std::vector<Alphabet>& axes() const { return axes_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t cells() const { return mass_.size(); }

  int axis(const std::string& name) const;       // -1 if absent
  int axis_checked(const std::string& name) const;  // throws if absent

  std::size_t stride(int axis) const { return strides_[axis]; }
  std::size_t flatten(const std::vector<int>& sym) const;
  void unflatten(std::size_t idx, std::vector<int>& sym) const;

  double operator[](std::size_t idx) const { return mass_[idx]; }

 private:
  std::vector<Alphabet> axes_;
  std::vector<double> mass_;
  std::vector<std::size_t> strides_;
};

// Conditional distribution: rows indexed by the given-axes, entries by the
// output axes.  Every row must be a pmf.
class ConditionalPmf {
 public:
  ConditionalPmf() = default;
  ConditionalPmf(std::vector<Alphabet> given, std::vector<Alphabet> out,
                 std::vector<double> mass);

  const std::vector<Alphabet>& given() const { return given_; }
  const std::vector<Alphabet>& out() const { return out_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double prob(std::size_t row, std::size_t col) const {
    return mass_[row * cols_ + col];
  }
  const std::vector<double>& mass() const { return mass_; }

 private:
  std::vector<Alphabet> given_;
  std::vector<Alphabet> out_;
  std::vector<double> mass_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

// information measures (base-2 bits, 0 log 0 = 0)
double entropy(const JointPmf& p, const std::vector<std::string>& axes);
double mutual_information(const JointPmf& p, const std::vector<std::string>& a,
                          const std::vector<std::string>& b,
                          const std::vector<std::string>& c = {});
double binary_entropy(double q);
double binary_convolution(double a, double b);

JointPmf marginalize(const JointPmf& p, const std::vector<std::string>& keep);
JointPmf condition(const JointPmf& p, const std::string& on, int value);
JointPmf compose(const JointPmf& prior, const ConditionalPmf& channel);

void to_json(nlohmann::json& j, const Alphabet& a);
void from_json(const nlohmann::json& j, Alphabet& a);
void to_json(nlohmann::json& j, const JointPmf& p);
void from_json(const nlohmann::json& j, JointPmf& p);
void to_json(nlohmann::json& j, const ConditionalPmf& c);
void from_json(const nlohmann::json& j, ConditionalPmf& c);

}  // namespace bcfb
