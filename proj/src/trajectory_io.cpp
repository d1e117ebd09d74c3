#include "ddpc/trajectory_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddpc/errors.hpp"

namespace ddpc {

namespace {

std::string meta_path(const std::string& path) { return path + ".meta.json"; }

void append_full_precision(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

void save_trajectory_csv(const std::string& path, const IoTrajectory& traj,
                         const TrajectoryMeta& meta) {
  std::ofstream out(path);
  if (!out) {
    throw Error("save_trajectory_csv: cannot open " + path);
  }
  std::string line = "t";
  for (int i = 0; i < traj.input_dim(); ++i) {
    line += ", mu_" + std::to_string(i);
  }
  for (int i = 0; i < traj.output_dim(); ++i) {
    line += ", eta_" + std::to_string(i);
  }
  out << line << "\n";
  for (int k = 0; k < traj.length(); ++k) {
    line.clear();
    append_full_precision(line, k * traj.sample_interval());
    for (int i = 0; i < traj.input_dim(); ++i) {
      line += ", ";
      append_full_precision(line, traj.inputs()(i, k));
    }
    for (int i = 0; i < traj.output_dim(); ++i) {
      line += ", ";
      append_full_precision(line, traj.outputs()(i, k));
    }
    out << line << "\n";
  }

  nlohmann::json j;
  j["kappa"] = meta.kappa;
  j["nu"] = meta.nu;
  j["delta_t"] = meta.delta_t;
  j["scenario"] = meta.scenario;
  j["seed"] = meta.seed;
  std::ofstream mout(meta_path(path));
  if (!mout) {
    throw Error("save_trajectory_csv: cannot open " + meta_path(path));
  }
  mout << j.dump(2);
}

TrajectoryMeta load_trajectory_meta(const std::string& path) {
  std::ifstream in(meta_path(path));
  if (!in) {
    throw Error("load_trajectory_meta: cannot open " + meta_path(path));
  }
  nlohmann::json j;
  in >> j;
  TrajectoryMeta meta;
  meta.kappa = j.at("kappa").get<int>();
  meta.nu = j.at("nu").get<int>();
  meta.delta_t = j.at("delta_t").get<double>();
  meta.scenario = j.value("scenario", "");
  meta.seed = j.value("seed", std::uint64_t{0});
  return meta;
}

IoTrajectory load_trajectory_csv(const std::string& path) {
  const TrajectoryMeta meta = load_trajectory_meta(path);
  std::ifstream in(path);
  if (!in) {
    throw Error("load_trajectory_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error("load_trajectory_csv: empty file " + path);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (static_cast<int>(row.size()) != 1 + meta.kappa + meta.nu) {
      throw DimensionMismatch("load_trajectory_csv: bad column count in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw SignalTooShort("load_trajectory_csv: no samples in " + path);
  }
  Eigen::MatrixXd mu(meta.kappa, rows.size());
  Eigen::MatrixXd eta(meta.nu, rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (int i = 0; i < meta.kappa; ++i) {
      mu(i, static_cast<Eigen::Index>(k)) = rows[k][1 + i];
    }
    for (int i = 0; i < meta.nu; ++i) {
      eta(i, static_cast<Eigen::Index>(k)) = rows[k][1 + meta.kappa + i];
    }
  }
  return IoTrajectory(std::move(mu), std::move(eta), meta.delta_t);
}

}  // namespace ddpc
