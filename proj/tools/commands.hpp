#pragma once

#include <string>

#include "config.hpp"

namespace sobext::cli {

/// Every command reads its inputs from the effective config only; flags are
/// folded into it beforehand so the recorded config reproduces the run.
int cmd_gen(const Config& cfg);
int cmd_whitney(const Config& cfg);
int cmd_extend(const Config& cfg);
int cmd_curvescan(const Config& cfg);
int cmd_geodesic(const Config& cfg);
int cmd_cantor(const Config& cfg);
int cmd_report(const std::string& run_dir);

/// CSV header of the extend table.
inline constexpr const char* kExtendHeader = "K,p,rhs,lhs_ext,lhs_int,lhs_touch,ratio,l31,l32,l33";
inline constexpr const char* kCurveHeader = "pair,p,scale,z1_x,z1_y,z2_x,z2_y,separation,cost,ratio,K";

}  // namespace sobext::cli
