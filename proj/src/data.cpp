#include "kpod/data.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <system_error>

#include "kpod/errors.hpp"
#include "kpod/rng.hpp"

namespace kpod {

namespace {

bool parse_double(std::string_view text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_index(std::string_view text, std::int32_t& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<Sample> parse_libsvm(std::istream& in) {
  std::vector<Sample> samples;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);

    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
        ++pos;
      const std::size_t start = pos;
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r')
        ++pos;
      return std::string_view(line).substr(start, pos - start);
    };

    const std::string_view label = next_token();
    if (label.empty()) continue;  // blank or comment-only line

    Sample s;
    s.label = std::string(label);
    std::int32_t prev_index = 0;
    for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size())
        throw parse_error(line_no, "malformed feature pair '" + std::string(tok) + "'");

      std::int32_t index = 0;
      if (!parse_index(tok.substr(0, colon), index) || index < 1)
        throw parse_error(line_no, "bad feature index in '" + std::string(tok) + "'");
      if (index == prev_index)
        throw parse_error(line_no, "duplicate feature index " + std::to_string(index));
      if (index < prev_index)
        throw parse_error(line_no, "feature indices must be strictly increasing (got " +
                                       std::to_string(index) + " after " +
                                       std::to_string(prev_index) + ")");

      double value = 0.0;
      if (!parse_double(tok.substr(colon + 1), value))
        throw parse_error(line_no, "non-numeric feature value in '" + std::string(tok) + "'");
      if (!std::isfinite(value))
        throw parse_error(line_no, "non-finite feature value at index " + std::to_string(index));

      s.features.emplace_back(index, value);
      prev_index = index;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<Sample> load_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open dataset file '" + path + "'");
  try {
    return parse_libsvm(in);
  } catch (const parse_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

void write_libsvm(std::ostream& out, const std::vector<Sample>& samples) {
  for (const auto& s : samples) {
    out << s.label;
    for (const auto& [idx, val] : s.features) out << ' ' << idx << ':' << format_double(val);
    out << '\n';
  }
}

void save_libsvm_file(const std::string& path, const std::vector<Sample>& samples) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write dataset file '" + path + "'");
  write_libsvm(out, samples);
  if (!out.good()) throw input_error("write failed for '" + path + "'");
}

const char* scaling_mode_name(ScalingMode m) {
  return m == ScalingMode::minmax01 ? "minmax01" : "none";
}

ScalingMode scaling_mode_from_name(const std::string& name) {
  if (name == "none") return ScalingMode::none;
  if (name == "minmax01") return ScalingMode::minmax01;
  throw input_error("unknown scaling mode '" + name + "' (expected none or minmax01)");
}

ScalingParams fit_scaling(const std::vector<Sample>& train, ScalingMode mode) {
  if (train.empty()) throw input_error("fit_scaling: training set is empty");
  ScalingParams p;
  p.mode = mode;
  if (mode == ScalingMode::none) return p;

  std::map<std::int32_t, std::pair<FeatureRange, std::size_t>> acc;  // range + count
  for (const auto& s : train) {
    for (const auto& [idx, val] : s.features) {
      auto it = acc.find(idx);
      if (it == acc.end()) {
        acc.emplace(idx, std::make_pair(FeatureRange{val, val}, std::size_t(1)));
      } else {
        it->second.first.min = std::min(it->second.first.min, val);
        it->second.first.max = std::max(it->second.first.max, val);
        it->second.second += 1;
      }
    }
  }
  for (auto& [idx, entry] : acc) {
    if (entry.second < train.size()) {
      // absent entries are implicit zeros
      entry.first.min = std::min(entry.first.min, 0.0);
      entry.first.max = std::max(entry.first.max, 0.0);
    }
    p.features.emplace(idx, entry.first);
  }
  return p;
}

SparseVec apply_scaling(const ScalingParams& p, const SparseVec& v) {
  if (p.mode == ScalingMode::none) return v;

  SparseVec out;
  auto vit = v.begin();
  for (const auto& [idx, range] : p.features) {
    double raw = 0.0;
    while (vit != v.end() && vit->first < idx) ++vit;  // feature unseen in training: constant 0
    if (vit != v.end() && vit->first == idx) {
      raw = vit->second;
      ++vit;
    }
    const double span = range.max - range.min;
    const double scaled = (span > 0.0) ? (raw - range.min) / span : 0.0;
    if (scaled != 0.0) out.emplace_back(idx, scaled);
  }
  return out;
}

std::vector<Sample> apply_scaling(const ScalingParams& p, std::vector<Sample> samples) {
  if (p.mode == ScalingMode::none) return samples;
  for (auto& s : samples) s.features = apply_scaling(p, s.features);
  return samples;
}

Gen2dCase gen2d_case_from_name(const std::string& name) {
  if (name == "connected") return Gen2dCase::connected;
  if (name == "nonconnected") return Gen2dCase::nonconnected;
  if (name == "spiral") return Gen2dCase::spiral;
  throw input_error("unknown 2d case '" + name + "' (expected connected, nonconnected or spiral)");
}

const char* gen2d_case_name(Gen2dCase c) {
  switch (c) {
    case Gen2dCase::connected: return "connected";
    case Gen2dCase::nonconnected: return "nonconnected";
    case Gen2dCase::spiral: return "spiral";
  }
  return "connected";
}

double gen2d_default_noise(Gen2dCase c) {
  return c == Gen2dCase::spiral ? 0.02 : 0.6;
}

namespace {

Sample point(const char* label, double x, double y) {
  Sample s;
  s.label = label;
  if (x != 0.0) s.features.emplace_back(1, x);
  if (y != 0.0) s.features.emplace_back(2, y);
  return s;
}

}  // namespace

std::vector<Sample> gen2d(Gen2dCase c, int n_per_class, double noise, std::uint64_t seed) {
  if (n_per_class < 1) throw input_error("gen2d: n_per_class must be >= 1");
  if (!(noise >= 0.0)) throw input_error("gen2d: noise must be >= 0");

  SplitMix64 rng(seed);
  std::vector<Sample> out;
  out.reserve(std::size_t(n_per_class) * 2);

  switch (c) {
    case Gen2dCase::connected:
      for (int i = 0; i < n_per_class; ++i)
        out.push_back(point("1", -1.0 + noise * rng.gaussian(), noise * rng.gaussian()));
      for (int i = 0; i < n_per_class; ++i)
        out.push_back(point("2", 1.0 + noise * rng.gaussian(), noise * rng.gaussian()));
      break;

    case Gen2dCase::nonconnected:
      for (int i = 0; i < n_per_class; ++i)
        out.push_back(point("1", noise * rng.gaussian(), noise * rng.gaussian()));
      for (int i = 0; i < n_per_class; ++i) {
        const double cx = (i % 2 == 0) ? 2.5 : -2.5;
        out.push_back(point("2", cx + noise * rng.gaussian(), noise * rng.gaussian()));
      }
      break;

    case Gen2dCase::spiral:
      for (int arm = 0; arm < 2; ++arm) {
        const char* label = (arm == 0) ? "1" : "2";
        for (int i = 0; i < n_per_class; ++i) {
          const double t = 3.0 * std::numbers::pi * rng.uniform();
          const double r = 0.4 + 0.12 * t;
          const double theta = t + arm * std::numbers::pi;
          const double x = r * std::cos(theta) + noise * rng.gaussian();
          const double y = r * std::sin(theta) + noise * rng.gaussian();
          out.push_back(point(label, x, y));
        }
      }
      break;
  }
  return out;
}

}  // namespace kpod
