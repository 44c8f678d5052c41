#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "domain.hpp"

namespace sobext {

/// Named constructions of a set A inside a domain, written like generator
/// specs:
///   half[:axis=0,at=0.5]          x_axis < at
///   quadrant[:x=0.5,y=0.5]        x_0 < x and x_1 < y
///   below_slit[:at=0.5]           x_1 < at
///   random:seed=S,density=D       independent cells, seeded
///   cubes:x,y,side/x,y,side       union of closed-open boxes (lower corner, side)
struct SetSpec {
  std::string text;

  static SetSpec parse(const std::string& text);
  const std::string& to_string() const { return text; }
};

/// Cell mask of A on the domain grid; always a subset of the domain.
std::vector<std::uint8_t> build_set(const VoxelDomain& dom, const SetSpec& spec);

/// Deterministic uniform in [0, 1) from a 64-bit seed and a cell index.
double cell_uniform(std::uint64_t seed, std::uint64_t index);

}  // namespace sobext
