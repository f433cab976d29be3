#include "bcfb/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace bcfb {

namespace {

int fb_size(const FeedbackConfig& f, int bits) {
  return f.kind == FeedbackConfig::kNone ? 1 : (1 << bits);
}

void check_flips(const FeedbackConfig& f) {
  if (f.kind != FeedbackConfig::kNoisy) return;
  for (double q : f.flip)
    if (q < 0.0 || q > 1.0)
      throw std::invalid_argument("feedback flip probability outside [0,1]");
}

}  // namespace

Dmbc make_dueck(const DueckParams& params) {
  const JointPmf& noise = params.noise;
  for (const char* name : {"Z0", "Z1", "Z2"}) {
    int ax = noise.axis(name);
    if (ax < 0 || noise.axes()[ax].size != 2)
      throw std::invalid_argument("dueck noise needs binary axes Z0, Z1, Z2");
  }
  check_flips(params.feedback);

  Dmbc ch;
  ch.in = {"X", 8};
  ch.out1 = {"Y1", 4};
  ch.out2 = {"Y2", 4};
  ch.fb = {"Yt", fb_size(params.feedback, 3)};

  int nf = ch.fb.size;
  std::vector<double> mass(8ull * 4 * 4 * nf, 0.0);
  std::vector<int> zsym;
  for (int x = 0; x < 8; ++x) {
    int x1 = (x >> 2) & 1, x0 = (x >> 1) & 1, x2 = x & 1;
    for (std::size_t zi = 0; zi < noise.cells(); ++zi) {
      double mz = noise[zi];
      if (mz == 0.0) continue;
      noise.unflatten(zi, zsym);
      int z0 = zsym[noise.axis("Z0")];
      int z1 = zsym[noise.axis("Z1")];
      int z2 = zsym[noise.axis("Z2")];
      int y11 = x1 ^ z1, y10 = x0 ^ z0, y22 = x2 ^ z2;
      int y1 = y11 * 2 + y10;
      int y2 = y10 * 2 + y22;  // receiver 2 sees the shared bit first
      auto put = [&](int yt, double m) {
        mass[((static_cast<std::size_t>(x) * 4 + y1) * 4 + y2) * nf + yt] += m;
      };
      switch (params.feedback.kind) {
        case FeedbackConfig::kNone:
          put(0, mz);
          break;
        case FeedbackConfig::kNoiseless:
          put(y11 * 4 + y10 * 2 + y22, mz);
          break;
        case FeedbackConfig::kNoisy: {
          const auto& q = params.feedback.flip;
          for (int w = 0; w < 8; ++w) {
            int w1 = (w >> 2) & 1, w0 = (w >> 1) & 1, w2 = w & 1;
            double pw = (w0 ? q[0] : 1 - q[0]) * (w1 ? q[1] : 1 - q[1]) *
                        (w2 ? q[2] : 1 - q[2]);
            if (pw == 0.0) continue;
            put((y11 ^ w1) * 4 + (y10 ^ w0) * 2 + (y22 ^ w2), mz * pw);
          }
          break;
        }
      }
    }
  }
  ch.law = ConditionalPmf({ch.in}, {ch.out1, ch.out2, ch.fb}, std::move(mass));
  return ch;
}

Dmbc make_blackwell(const BlackwellParams& params) {
  if (!(params.p >= 0.0) || params.p >= 0.5)
    throw std::invalid_argument("blackwell noise bias must lie in [0, 1/2)");
  check_flips(params.feedback);

  Dmbc ch;
  ch.in = {"X", 3};
  ch.out1 = {"Y1", 2};
  ch.out2 = {"Y2", 2};
  ch.fb = {"Yt", fb_size(params.feedback, 2)};

  int nf = ch.fb.size;
  std::vector<double> mass(3ull * 2 * 2 * nf, 0.0);
  for (int x = 0; x < 3; ++x) {
    for (int z = 0; z < 2; ++z) {
      double mz = z ? params.p : 1.0 - params.p;
      int y1 = x == 0 ? z : 1 - z;
      int y2 = x <= 1 ? z : 1 - z;
      auto put = [&](int yt, double m) {
        mass[((static_cast<std::size_t>(x) * 2 + y1) * 2 + y2) * nf + yt] += m;
      };
      switch (params.feedback.kind) {
        case FeedbackConfig::kNone:
          put(0, mz);
          break;
        case FeedbackConfig::kNoiseless:
          put(y1 * 2 + y2, mz);
          break;
        case FeedbackConfig::kNoisy: {
          const auto& q = params.feedback.flip;
          for (int w = 0; w < 4; ++w) {
            int w1 = (w >> 1) & 1, w2 = w & 1;
            double pw = (w1 ? q[1] : 1 - q[1]) * (w2 ? q[2] : 1 - q[2]);
            if (pw == 0.0) continue;
            put((y1 ^ w1) * 2 + (y2 ^ w2), mz * pw);
          }
          break;
        }
      }
    }
  }
  ch.law = ConditionalPmf({ch.in}, {ch.out1, ch.out2, ch.fb}, std::move(mass));
  return ch;
}

bool dueck_condition_holds(const JointPmf& noise) {
  double h01 = entropy(noise, {"Z0", "Z1"});
  double h02 = entropy(noise, {"Z0", "Z2"});
  return h01 <= 1.0 + kNumTol && h02 <= 1.0 + kNumTol;
}

ChannelSample sample(const Dmbc& ch, int x, RngStream& rng) {
  if (x < 0 || x >= ch.in.size)
    throw std::invalid_argument("sample: input symbol out of range");
  double u = rng.next_double();
  std::size_t cols = ch.law.cols();
  double acc = 0.0;
  std::size_t pick = cols - 1;
  for (std::size_t c = 0; c < cols; ++c) {
    acc += ch.law.prob(static_cast<std::size_t>(x), c);
    if (u < acc) {
      pick = c;
      break;
    }
  }
  ChannelSample s;
  int nf = ch.fb.size, n2 = ch.out2.size;
  s.yt = static_cast<int>(pick % nf);
  s.y2 = static_cast<int>((pick / nf) % n2);
  s.y1 = static_cast<int>(pick / (static_cast<std::size_t>(nf) * n2));
  return s;
}

ConditionalPmf marginal_channel(const Dmbc& ch, int receiver) {
  if (receiver != 1 && receiver != 2)
    throw std::invalid_argument("marginal_channel: receiver must be 1 or 2");
  int nf = ch.fb.size, n2 = ch.out2.size, n1 = ch.out1.size;
  int keep = receiver == 1 ? n1 : n2;
  std::vector<double> mass(static_cast<std::size_t>(ch.in.size) * keep, 0.0);
  for (int x = 0; x < ch.in.size; ++x) {
    for (int y1 = 0; y1 < n1; ++y1)
      for (int y2 = 0; y2 < n2; ++y2)
        for (int yt = 0; yt < nf; ++yt) {
          std::size_t c =
              (static_cast<std::size_t>(y1) * n2 + y2) * nf + yt;
          int sym = receiver == 1 ? y1 : y2;
          mass[static_cast<std::size_t>(x) * keep + sym] +=
              ch.law.prob(x, c);
        }
  }
  return ConditionalPmf({ch.in}, {receiver == 1 ? ch.out1 : ch.out2},
                        std::move(mass));
}

bool feedback_markov_holds(const Dmbc& ch, double tol) {
  int nf = ch.fb.size, n2 = ch.out2.size, n1 = ch.out1.size;
  for (int y1 = 0; y1 < n1; ++y1) {
    for (int y2 = 0; y2 < n2; ++y2) {
      // reference conditional P(yt | y1, y2, x) from the first x that can
      // produce this output pair; all other x must agree
      std::vector<double> ref;
      for (int x = 0; x < ch.in.size; ++x) {
        double total = 0.0;
        std::vector<double> cond(nf, 0.0);
        for (int yt = 0; yt < nf; ++yt) {
          double m = ch.law.prob(
              x, (static_cast<std::size_t>(y1) * n2 + y2) * nf + yt);
          cond[yt] = m;
          total += m;
        }
        if (total <= 1e-12) continue;
        for (double& v : cond) v /= total;
        if (ref.empty()) {
          ref = cond;
        } else {
          for (int yt = 0; yt < nf; ++yt)
            if (std::fabs(cond[yt] - ref[yt]) > tol) return false;
        }
      }
    }
  }
  return true;
}

void to_json(nlohmann::json& j, const FeedbackConfig& f) {
  const char* kind = f.kind == FeedbackConfig::kNone        ? "none"
                     : f.kind == FeedbackConfig::kNoiseless ? "noiseless"
                                                            : "noisy";
  j = nlohmann::json{{"kind", kind}, {"flip", f.flip}};
}

void from_json(const nlohmann::json& j, FeedbackConfig& f) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "none")
    f.kind = FeedbackConfig::kNone;
  else if (kind == "noiseless")
    f.kind = FeedbackConfig::kNoiseless;
  else if (kind == "noisy")
    f.kind = FeedbackConfig::kNoisy;
  else
    throw std::invalid_argument("feedback kind must be none/noiseless/noisy");
  if (j.contains("flip")) {
    auto v = j.at("flip").get<std::vector<double>>();
    if (v.size() != 3)
      throw std::invalid_argument("feedback flip needs three entries");
    for (int i = 0; i < 3; ++i) f.flip[i] = v[i];
  } else {
    f.flip = {0.0, 0.0, 0.0};
  }
}

void to_json(nlohmann::json& j, const Dmbc& ch) {
  j = nlohmann::json{{"type", "custom"},
                     {"input", ch.in},
                     {"outputs", std::vector<Alphabet>{ch.out1, ch.out2}},
                     {"feedback_alphabet", ch.fb},
                     {"law", ch.law}};
}

void from_json(const nlohmann::json& j, Dmbc& ch) {
  std::string type = j.value("type", "custom");
  if (type == "dueck") {
    DueckParams p;
    p.noise = j.at("noise").get<JointPmf>();
    if (j.contains("feedback")) p.feedback = j.at("feedback").get<FeedbackConfig>();
    ch = make_dueck(p);
    return;
  }
  if (type == "blackwell") {
    BlackwellParams p;
    p.p = j.at("p").get<double>();
    if (j.contains("feedback")) p.feedback = j.at("feedback").get<FeedbackConfig>();
    ch = make_blackwell(p);
    return;
  }
  if (type != "custom")
    throw std::invalid_argument("channel type must be dueck/blackwell/custom");
  ch.in = j.at("input").get<Alphabet>();
  auto outs = j.at("outputs").get<std::vector<Alphabet>>();
  if (outs.size() != 2)
    throw std::invalid_argument("custom channel needs two output alphabets");
  ch.out1 = outs[0];
  ch.out2 = outs[1];
  ch.fb = j.contains("feedback_alphabet")
              ? j.at("feedback_alphabet").get<Alphabet>()
              : Alphabet{"Yt", 1};
  ch.law = j.at("law").get<ConditionalPmf>();
  if (ch.law.rows() != static_cast<std::size_t>(ch.in.size) ||
      ch.law.cols() != static_cast<std::size_t>(ch.out1.size) * ch.out2.size *
                           ch.fb.size)
    throw std::invalid_argument("custom channel law shape mismatch");
}

}  // namespace bcfb
