#pragma once

#include <filesystem>
#include <string>

#include "dmv/torus_field.hpp"

namespace dmv {

/// On-disk layout: one text line `{dim, [n0,n1], n_components, time}`
/// followed by cells * n_components little-endian float64 values, row-major
/// with the component index fastest.
struct Snapshot {
  Grid grid;
  double time = 0.0;
  /// cells x n_components
  Eigen::ArrayXXd data;
};

inline constexpr int kSnapshotFormatVersion = 1;

std::string snapshot_header(const Grid& grid, Index components, double time);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Packs a density and momentum pair as components (rho, m_1, ..., m_N).
Snapshot make_state_snapshot(const ScalarField& rho, const VectorField& mom, double time);

}  // namespace dmv
