#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kpod/types.hpp"

namespace kpod {

/// Parses `label idx:val idx:val ...` lines; `#` starts a comment, empty
/// lines are skipped, indices are 1-based and must be strictly increasing.
std::vector<Sample> parse_libsvm(std::istream& in);
std::vector<Sample> load_libsvm_file(const std::string& path);

/// Canonical form: sorted indices, shortest float text that round-trips.
void write_libsvm(std::ostream& out, const std::vector<Sample>& samples);
void save_libsvm_file(const std::string& path, const std::vector<Sample>& samples);

enum class ScalingMode { none, minmax01 };

const char* scaling_mode_name(ScalingMode m);
ScalingMode scaling_mode_from_name(const std::string& name);

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

/// Per-feature ranges learned from training data. Absent sparse entries
/// count as zeros, so a feature missing from some samples has its range
/// widened to include 0.
struct ScalingParams {
  ScalingMode mode = ScalingMode::none;
  std::map<std::int32_t, FeatureRange> features;
};

ScalingParams fit_scaling(const std::vector<Sample>& train, ScalingMode mode);

/// minmax01 maps affinely to [0,1] on the training range; out-of-range
/// values extrapolate linearly, constant features map to 0.
SparseVec apply_scaling(const ScalingParams& p, const SparseVec& v);
std::vector<Sample> apply_scaling(const ScalingParams& p, std::vector<Sample> samples);

enum class Gen2dCase { connected, nonconnected, spiral };

Gen2dCase gen2d_case_from_name(const std::string& name);
const char* gen2d_case_name(Gen2dCase c);

/// Blob cases use `noise` as the blob stddev (default 0.6); the spiral uses
/// it as per-coordinate jitter (default 0.02).
double gen2d_default_noise(Gen2dCase c);

/// Deterministic two-class 2D generator; labels are "1" and "2".
/// connected: Gaussian blobs at (-1,0) and (1,0).
/// nonconnected: class 1 at the origin, class 2 split between (+-2.5, 0).
/// spiral: two Archimedean arms r = 0.4 + 0.12 t, theta = t + k*pi,
/// t uniform in [0, 3*pi], plus Gaussian jitter per coordinate.
std::vector<Sample> gen2d(Gen2dCase c, int n_per_class, double noise, std::uint64_t seed);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

}  // namespace kpod
