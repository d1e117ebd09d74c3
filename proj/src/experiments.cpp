#include "ddpc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ddpc/trajectory_io.hpp"

namespace ddpc {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t x = a * 0x9E3779B97F4A7C15ull + b * 0xBF58476D1CE4E5B9ull +
                    c * 0x94D049BB133111EBull + 0x2545F4914F6CDD1Dull;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  return x;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

WalkerParams model_for(const Scenario& scenario, int index) {
  return randomize_model(mix_seed(scenario.seed, 0xA11CE, index),
                         scenario.plant, scenario.randomize);
}

TransitionMatrix fit_from_data(const std::vector<IoTrajectory>& data,
                               const DdpcHyperparams& hyper) {
  return fit_transition_matrix(
      partition(std::span<const IoTrajectory>(data.data(), data.size()), hyper));
}

void write_runs_csv(const std::string& path,
                    const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path);
  }
  out << "scenario, controller, seed, sweep_value, success, survival_time, "
         "cumulative_error, mean_abs_step_error, steps, qp_failures, "
         "mean_fit_ms, failure_reason\n";
  for (const RunRecord& r : records) {
    double mean_fit = 0.0;
    for (double ms : r.metrics.fit_wall_ms) mean_fit += ms;
    if (!r.metrics.fit_wall_ms.empty()) {
      mean_fit /= static_cast<double>(r.metrics.fit_wall_ms.size());
    }
    out << r.scenario << ", " << r.controller << ", " << r.seed << ", "
        << fmt(r.sweep_value) << ", " << (r.metrics.success ? 1 : 0) << ", "
        << fmt(r.metrics.survival_time) << ", "
        << fmt(r.metrics.cumulative_error) << ", "
        << fmt(r.metrics.mean_abs_step_error()) << ", "
        << r.metrics.steps.size() << ", " << r.metrics.qp_failures << ", "
        << fmt(mean_fit) << ", "
        << (r.failure_reason.empty() ? "none" : r.failure_reason) << "\n";
  }
}

}  // namespace

std::vector<IoTrajectory> collect_model_data(const Scenario& scenario,
                                             const WalkerParams& plant_truth,
                                             std::uint64_t seed_base) {
  std::vector<IoTrajectory> data;
  data.reserve(scenario.collect_step_lengths.size());
  for (std::size_t i = 0; i < scenario.collect_step_lengths.size(); ++i) {
    SimConfig cfg = scenario.base_sim_config(
        plant_truth, ControllerKind::Nominal, scenario.collect_step_lengths[i],
        scenario.collect_duration, mix_seed(seed_base, 0xC011EC7, i));
    cfg.cop_dither = scenario.cop_dither;
    const RunLog log = simulate_run(cfg, nullptr);
    data.push_back(log.to_trajectory(scenario.hyper.delta_t));
  }
  return data;
}

std::vector<std::string> run_collect(const Scenario& scenario,
                                     const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "data");
  std::vector<std::string> written;
  for (int k = 0; k < scenario.model_count; ++k) {
    const WalkerParams plant = model_for(scenario, k);
    const fs::path dir = fs::path(out_dir) / "data" / ("model_" + std::to_string(k));
    fs::create_directories(dir);
    for (std::size_t i = 0; i < scenario.collect_step_lengths.size(); ++i) {
      const double lambda = scenario.collect_step_lengths[i];
      SimConfig cfg = scenario.base_sim_config(
          plant, ControllerKind::Nominal, lambda, scenario.collect_duration,
          mix_seed(scenario.seed, 0xC011EC7 + k, i));
      cfg.cop_dither = scenario.cop_dither;
      const RunLog log = simulate_run(cfg, nullptr);

      const int mm = static_cast<int>(std::lround(lambda * 1000.0));
      const fs::path file = dir / ("traj_" + std::to_string(mm) + "mm.csv");
      TrajectoryMeta meta;
      meta.delta_t = scenario.hyper.delta_t;
      meta.scenario = scenario.name + ":lambda=" + std::to_string(mm) + "mm" +
                      (log.failure_reason.empty() ? "" : "#failed");
      meta.seed = cfg.seed;
      save_trajectory_csv(file.string(), log.to_trajectory(scenario.hyper.delta_t),
                          meta);
      written.push_back(file.string());
    }
  }
  return written;
}

std::vector<std::string> run_fit(const Scenario& scenario,
                                 const std::string& out_dir) {
  std::vector<std::string> written;
  for (int k = 0; k < scenario.model_count; ++k) {
    const fs::path dir = fs::path(out_dir) / "data" / ("model_" + std::to_string(k));
    if (!fs::exists(dir)) {
      if (k == 0) throw MissingRuns("run_fit: no collected data in " + out_dir);
      break;
    }
    std::vector<IoTrajectory> data;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      data.push_back(load_trajectory_csv(f.string()));
    }
    if (data.empty()) {
      throw MissingRuns("run_fit: no trajectories in " + dir.string());
    }
    const TransitionMatrix g = fit_from_data(data, scenario.hyper);
    const fs::path file =
        fs::path(out_dir) / ("transition_model_" + std::to_string(k) + ".json");
    g.save_json(file.string());
    written.push_back(file.string());
  }
  return written;
}

std::vector<GridRow> run_grid_search(const Scenario& scenario,
                                     const std::string& out_dir) {
  std::vector<GridRow> rows;
  const int max_T =
      *std::max_element(scenario.grid.T.begin(), scenario.grid.T.end());

  for (double dt : scenario.grid.delta_t) {
    // Collect training and held-out data on the nominal plant at this rate.
    Scenario collect_cfg = scenario;
    collect_cfg.hyper.delta_t = dt;
    collect_cfg.hyper.T = max_T + 1;
    collect_cfg.collect_duration = (max_T + 2) * dt;
    std::vector<IoTrajectory> training = collect_model_data(
        collect_cfg, scenario.plant, mix_seed(scenario.seed, 0x6B1D, 1));
    Scenario holdout_cfg = collect_cfg;
    holdout_cfg.collect_step_lengths = {scenario.grid_holdout_step};
    const std::vector<IoTrajectory> holdout = collect_model_data(
        holdout_cfg, scenario.plant, mix_seed(scenario.seed, 0x6B1D, 2));

    for (int T : scenario.grid.T) {
      for (int t_ini : scenario.grid.T_ini) {
        for (int n : scenario.grid.N) {
          GridRow row;
          row.delta_t = dt;
          row.T = T;
          row.T_ini = t_ini;
          row.N = n;
          const int L = t_ini + n;
          if (T <= L) {
            row.status = "skipped:T<=L";
            row.mse = kUnbounded;
            rows.push_back(row);
            continue;
          }
          DdpcHyperparams hyper;
          hyper.T = T;
          hyper.T_ini = t_ini;
          hyper.N = n;
          hyper.delta_t = dt;
          // Truncate each training trajectory to the first T samples.
          std::vector<IoTrajectory> cut;
          for (const IoTrajectory& traj : training) {
            if (traj.length() < T) continue;
            cut.emplace_back(traj.inputs().leftCols(T),
                             traj.outputs().leftCols(T), dt);
          }
          if (cut.empty()) {
            row.status = "skipped:insufficient_data";
            row.mse = kUnbounded;
            rows.push_back(row);
            continue;
          }
          try {
            const TransitionMatrix g = fit_from_data(cut, hyper);
            // Score over held-out windows.
            double sq_sum = 0.0;
            long count = 0;
            for (const IoTrajectory& traj : holdout) {
              const int total = traj.length();
              for (int start = 0; start + L <= total; start += 5) {
                Eigen::VectorXd mu_ini(4 * t_ini), eta_ini(6 * t_ini),
                    mu_f(4 * n), eta_f(6 * n);
                for (int s = 0; s < t_ini; ++s) {
                  mu_ini.segment<4>(4 * s) = traj.inputs().col(start + s);
                  eta_ini.segment<6>(6 * s) = traj.outputs().col(start + s);
                }
                for (int s = 0; s < n; ++s) {
                  mu_f.segment<4>(4 * s) =
                      traj.inputs().col(start + t_ini + s);
                  eta_f.segment<6>(6 * s) =
                      traj.outputs().col(start + t_ini + s);
                }
                const Eigen::VectorXd pred = predict(g, mu_ini, eta_ini, mu_f);
                sq_sum += (pred - eta_f).squaredNorm();
                count += pred.size();
              }
            }
            row.mse = count > 0 ? sq_sum / static_cast<double>(count)
                                : kUnbounded;
            row.status = count > 0 ? "ok" : "skipped:no_holdout_windows";
          } catch (const Error& e) {
            row.status = std::string("skipped:") + e.what();
            row.mse = kUnbounded;
          }
          rows.push_back(row);
        }
      }
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a,
                                                const GridRow& b) {
    const bool a_ok = a.status == "ok";
    const bool b_ok = b.status == "ok";
    if (a_ok != b_ok) return a_ok;
    return a.mse < b.mse;
  });

  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / "grid.csv");
  out << "delta_t, T, T_ini, N, mse, status\n";
  for (const GridRow& r : rows) {
    out << fmt(r.delta_t) << ", " << r.T << ", " << r.T_ini << ", " << r.N
        << ", " << (std::isfinite(r.mse) ? fmt(r.mse) : "inf") << ", "
        << r.status << "\n";
  }
  return rows;
}

std::vector<RunRecord> run_comparison(const Scenario& scenario,
                                      const std::string& out_dir) {
  const int models = scenario.model_count;
  const auto& speeds = scenario.sweep_speeds;
  const int runs_per_model =
      static_cast<int>(scenario.controllers.size() * speeds.size());
  std::vector<RunRecord> records(models * runs_per_model);

  parallel_for(models, [&](int k) {
    const WalkerParams plant = model_for(scenario, k);
    const std::vector<IoTrajectory> data = collect_model_data(
        scenario, plant, mix_seed(scenario.seed, 0xDA7A, k));
    const TransitionMatrix g = fit_from_data(data, scenario.hyper);

    int slot = k * runs_per_model;
    for (const std::string& controller : scenario.controllers) {
      const ControllerKind kind = controller_from_string(controller);
      for (std::size_t si = 0; si < speeds.size(); ++si) {
        const double lambda = speeds[si] * scenario.gait.t_d;
        SimConfig cfg = scenario.base_sim_config(
            plant, kind, lambda, scenario.sweep_duration,
            mix_seed(scenario.seed, 0x5EED + k, si));
        const RunLog log =
            simulate_run(cfg, kind == ControllerKind::Ddpc ? &g : nullptr);
        RunRecord& rec = records[slot++];
        rec.scenario = scenario.name;
        rec.controller = controller;
        rec.seed = k;
        rec.sweep_value = speeds[si];
        rec.metrics = log.metrics;
        rec.failure_reason = log.failure_reason;
      }
    }
  });

  fs::create_directories(out_dir);
  write_runs_csv((fs::path(out_dir) / "runs.csv").string(), records);

  // Summary mirrored per controller x speed: achieved step length mean/std
  // across models, survival mean, success rate.
  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  summary << "controller, speed, desired_step, achieved_mean, achieved_std, "
             "survival_mean, success_rate\n";
  for (const std::string& controller : scenario.controllers) {
    for (double speed : speeds) {
      std::vector<double> achieved;
      double survival = 0.0;
      int successes = 0;
      int total = 0;
      for (const RunRecord& r : records) {
        if (r.controller != controller || r.sweep_value != speed) continue;
        ++total;
        survival += r.metrics.survival_time;
        successes += r.metrics.success ? 1 : 0;
        double mean_step = 0.0;
        int count = 0;
        for (std::size_t i = 2; i < r.metrics.steps.size(); ++i) {
          mean_step += r.metrics.steps[i].achieved;
          ++count;
        }
        if (count > 0) achieved.push_back(mean_step / count);
      }
      double mean = 0.0, stdev = 0.0;
      for (double a : achieved) mean += a;
      if (!achieved.empty()) mean /= static_cast<double>(achieved.size());
      for (double a : achieved) stdev += (a - mean) * (a - mean);
      if (achieved.size() > 1) {
        stdev = std::sqrt(stdev / static_cast<double>(achieved.size() - 1));
      }
      summary << controller << ", " << fmt(speed) << ", "
              << fmt(speed * scenario.gait.t_d) << ", " << fmt(mean) << ", "
              << fmt(stdev) << ", "
              << fmt(total > 0 ? survival / total : 0.0) << ", "
              << fmt(total > 0 ? static_cast<double>(successes) / total : 0.0)
              << "\n";
    }
  }
  return records;
}

std::vector<RunRecord> run_perturbation(const Scenario& scenario,
                                        const std::string& out_dir) {
  const int models = scenario.model_count;
  std::vector<RunRecord> records(models * 2);
  std::vector<std::vector<SimEvent>> event_logs(models);

  parallel_for(models, [&](int k) {
    WalkerParams plant = model_for(scenario, k);
    plant.mass = scenario.perturb_mass;
    const double lambda = scenario.perturb_speed * scenario.gait.t_d;

    // Nominal under the ramp.
    SimConfig nominal_cfg = scenario.base_sim_config(
        plant, ControllerKind::Nominal, lambda, scenario.sweep_duration,
        mix_seed(scenario.seed, 0x9E47 + k, 0));
    nominal_cfg.perturbation = scenario.perturbation;
    nominal_cfg.cop_dither = scenario.cop_dither;
    const RunLog nominal_log = simulate_run(nominal_cfg, nullptr);

    // DDPC with online updates, collecting its own data in the first window.
    SimConfig ddpc_cfg = scenario.base_sim_config(
        plant, ControllerKind::Ddpc, lambda, scenario.sweep_duration,
        mix_seed(scenario.seed, 0x9E47 + k, 1));
    ddpc_cfg.perturbation = scenario.perturbation;
    ddpc_cfg.cop_dither = scenario.cop_dither;
    ddpc_cfg.online = scenario.online;
    ddpc_cfg.online.enabled = true;
    const RunLog ddpc_log = simulate_run(ddpc_cfg, nullptr);

    RunRecord& a = records[2 * k];
    a.scenario = scenario.name;
    a.controller = "nominal";
    a.seed = k;
    a.sweep_value = scenario.perturb_speed;
    a.metrics = nominal_log.metrics;
    a.failure_reason = nominal_log.failure_reason;

    RunRecord& b = records[2 * k + 1];
    b.scenario = scenario.name;
    b.controller = "ddpc_online";
    b.seed = k;
    b.sweep_value = scenario.perturb_speed;
    b.metrics = ddpc_log.metrics;
    b.failure_reason = ddpc_log.failure_reason;

    event_logs[k] = ddpc_log.events;
  });

  fs::create_directories(out_dir);
  write_runs_csv((fs::path(out_dir) / "perturb_runs.csv").string(), records);

  // Rebuild cadence log (wall-clock timings live here, outside the metric
  // files, so repeat runs stay byte-identical where it matters).
  std::ofstream events(fs::path(out_dir) / "perturb_events.csv");
  events << "seed, type, time, value\n";
  for (int k = 0; k < models; ++k) {
    for (const SimEvent& e : event_logs[k]) {
      events << k << ", " << e.type << ", " << fmt(e.time) << ", "
             << fmt(e.value) << "\n";
    }
  }
  return records;
}

void run_report(const std::string& out_dir, const std::string& report_path) {
  std::vector<std::string> run_files;
  if (fs::exists(out_dir)) {
    for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
      const std::string name = entry.path().filename().string();
      if (name == "runs.csv" || name == "perturb_runs.csv") {
        run_files.push_back(entry.path().string());
      }
    }
  }
  std::sort(run_files.begin(), run_files.end());
  if (run_files.empty()) {
    throw MissingRuns("run_report: no runs.csv under " + out_dir);
  }

  std::ofstream out(report_path);
  if (!out) {
    throw Error("run_report: cannot write " + report_path);
  }
  out << "scenario, controller, seed, sweep_value, metric, value\n";
  for (const std::string& file : run_files) {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        const auto begin = cell.find_first_not_of(' ');
        cells.push_back(begin == std::string::npos ? "" : cell.substr(begin));
      }
      if (cells.size() < 12) continue;
      const std::string prefix = cells[0] + ", " + cells[1] + ", " + cells[2] +
                                 ", " + cells[3] + ", ";
      out << prefix << "success, " << cells[4] << "\n";
      out << prefix << "survival_time, " << cells[5] << "\n";
      out << prefix << "cumulative_error, " << cells[6] << "\n";
      out << prefix << "mean_abs_step_error, " << cells[7] << "\n";
      out << prefix << "qp_failures, " << cells[9] << "\n";
    }
  }
}

}  // namespace ddpc
