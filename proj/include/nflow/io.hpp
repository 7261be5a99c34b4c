#pragma once

#include "nflow/flow.hpp"
#include "nflow/potentials.hpp"

#include <filesystem>
#include <string>

namespace nflow::io {

/// Writes `content` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Reads a dense matrix: first line "rows cols", then rows*cols whitespace
/// separated values in row-major order.
Matrix read_matrix(const std::filesystem::path& path);

/// A matrix file with a single column (or a single row) read as a vector.
Vector read_vector(const std::filesystem::path& path);

/// Decimal form with 17 significant digits, enough to round-trip.
std::string format_double(double v);

/// CSV with header t,lambda,mu,objective,residual,x_0..,v_0..,z_0..
std::string trajectory_csv(const Trajectory& trajectory);

} // namespace nflow::io
