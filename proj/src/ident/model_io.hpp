#pragma once

#include <filesystem>

#include "ident/fit.hpp"

namespace koopflow::io {

/// Self-describing binary model file: 8-byte magic "KFMODEL\0", a version
/// field, kind/variable/kinematics/scaling/diagnostics, then every block in
/// row-major float64. Values are stored exactly, so save/load round-trips
/// bit for bit. A human-readable JSON sidecar is written next to the file
/// as "<path>.json" with the same metadata plus block norms.
void save_model(const std::filesystem::path& path, const SurrogateModel& model);

/// Loads and validates a model written by save_model. Rejects wrong magic,
/// unknown version, and dimension or invariant violations.
SurrogateModel load_model(const std::filesystem::path& path);

}  // namespace koopflow::io
