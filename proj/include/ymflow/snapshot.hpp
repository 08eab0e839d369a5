#pragma once

#include <string>

#include "ymflow/lattice.hpp"

namespace ymflow {

/// Flat little-endian binary snapshot:
///   magic "YMFSNP01" (8 bytes)
///   u32 N, u32 n, u8 group_kind (0 = U, 1 = SU), u8[3] reserved
///   i64 degrees[n]
///   f64 data: components A_x then A_y; sites row-major with x fastest
///   (index = y * N + x); per site the n x n matrix row-major; per entry
///   re then im.
void save_connection(const UnitaryConnection& a, const std::string& path);
UnitaryConnection load_connection(const std::string& path);

/// Same container with magic "YMFSEC01" and a single component.
void save_section(const LieSection& s, GroupKind kind, const std::string& path);
LieSection load_section(const std::string& path);

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ymflow
