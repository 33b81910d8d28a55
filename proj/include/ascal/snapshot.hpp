#pragma once

#include <string>

#include "ascal/field.hpp"

namespace ascal {

// ASF1 container, all fields little-endian: the magic bytes "ASF1", u32
// dimension count, u64 points per axis, f64 side length per axis, f64
// simulation time, then the raw value grid row-major as f64. The origin is
// not stored; read_snapshot rebuilds the default box centered at side/2.
struct Snapshot {
    ScalarField field;
    double time = 0.0;
};

std::string snapshot_bytes(const ScalarField& f, double time);
void write_snapshot(const ScalarField& f, double time, const std::string& path);

Snapshot parse_snapshot(const std::string& bytes);
Snapshot read_snapshot(const std::string& path);

}  // namespace ascal
