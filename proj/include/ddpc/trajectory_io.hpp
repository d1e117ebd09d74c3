#pragma once

#include <cstdint>
#include <string>

#include "ddpc/types.hpp"

namespace ddpc {

/// Sidecar metadata stored next to each trajectory CSV.
struct TrajectoryMeta {
  int kappa = 4;
  int nu = 6;
  double delta_t = 0.02;
  std::string scenario;
  std::uint64_t seed = 0;
};

/// CSV with header `t, mu_0.., eta_0..`, one row per sample, plus a
/// `<path>.meta.json` sidecar.  Values are written with full precision so
/// repeat runs are byte-identical.
void save_trajectory_csv(const std::string& path, const IoTrajectory& traj,
                         const TrajectoryMeta& meta);

IoTrajectory load_trajectory_csv(const std::string& path);
TrajectoryMeta load_trajectory_meta(const std::string& path);

}  // namespace ddpc
