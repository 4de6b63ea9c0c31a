#pragma once

#include <string>

#include "kpod/classifier.hpp"
#include "kpod/data.hpp"

namespace kpod {

inline constexpr int kModelFormatVersion = 1;

/// A trained classifier plus the feature scaling it was trained under, so
/// prediction applies the identical transform.
struct ModelFile {
  Classifier classifier;
  ScalingParams scaling;
};

/// Self-describing JSON document with a format-version field; floats are
/// serialized with full round-trip precision and stable key order, so
/// untouched subspace records re-serialize byte-identically.
std::string model_to_json(const ModelFile& m);

/// Throws input_error on malformed documents or a format version mismatch.
ModelFile model_from_json(const std::string& text);

void save_model(const std::string& path, const ModelFile& m);
ModelFile load_model(const std::string& path);

}  // namespace kpod
