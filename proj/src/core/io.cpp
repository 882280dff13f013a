#include "core/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "core/error.hpp"
#include "core/units.hpp"

namespace koopflow::io {
namespace {

double parse_double(std::string_view field, const std::filesystem::path& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  require(ec == std::errc{} && ptr == field.data() + field.size(),
          "malformed numeric field '" + std::string(field) + "' in " + path.string(),
          ErrorCode::Io);
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
  require(out.good(), "cannot open " + path.string() + " for writing", ErrorCode::Io);
  return out;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 40> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  require(ec == std::errc{}, "double formatting failed", ErrorCode::Io);
  return std::string(buf.data(), ptr);
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryDataset& traj,
                          double t0_days) {
  traj.validate();
  require(traj.p.rows() == 1, "trajectory CSV schema holds a single actuator channel",
          ErrorCode::Io);
  auto out = open_out(path);
  out << "t_days,p_actuator";
  for (int i = 0; i < traj.x.rows(); ++i) out << ",cell_" << i;
  out << "\n";
  for (int k = 0; k < traj.p.cols(); ++k) {
    out << format_double(t0_days + traj.dt * k) << "," << format_double(traj.p(0, k));
    for (int i = 0; i < traj.x.rows(); ++i) out << "," << format_double(traj.x(i, k));
    out << "\n";
  }
  require(out.good(), "write failed for " + path.string(), ErrorCode::Io);
}

TrajectoryDataset read_trajectory_csv(const std::filesystem::path& path, Variable variable,
                                      const ControlSchedule& schedule) {
  schedule.validate();
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path.string(), ErrorCode::Io);

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty trajectory file " + path.string(),
          ErrorCode::Io);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line);
  require(header.size() >= 3 && header[0] == "t_days" && header[1] == "p_actuator",
          "unexpected trajectory header in " + path.string(), ErrorCode::Io);
  const int cells = static_cast<int>(header.size()) - 2;

  std::vector<double> actuator;
  std::vector<double> field;  // row-major: cells per snapshot
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    require(static_cast<int>(fields.size()) == cells + 2,
            "ragged trajectory row in " + path.string(), ErrorCode::Io);
    actuator.push_back(parse_double(fields[1], path));
    for (int i = 0; i < cells; ++i) field.push_back(parse_double(fields[2 + i], path));
  }
  const int snapshots = static_cast<int>(actuator.size());
  require(snapshots == schedule.steps() + 1,
          "trajectory length does not match the control schedule", ErrorCode::Io);

  TrajectoryDataset traj;
  traj.variable = variable;
  // Datasets carry reporting units; the SI schedule converts exactly the way
  // the simulator packages its outputs.
  traj.dt = schedule.dt / units::day;
  const double u_scale =
      schedule.mode == WellMode::Rate ? units::day : 1.0 / units::bar;
  traj.p.resize(1, snapshots);
  traj.x.resize(cells, snapshots);
  traj.u = u_scale * schedule.u.transpose();
  for (int k = 0; k < snapshots; ++k) {
    traj.p(0, k) = actuator[static_cast<size_t>(k)];
    for (int i = 0; i < cells; ++i)
      traj.x(i, k) = field[static_cast<size_t>(k) * cells + i];
  }
  traj.validate();
  return traj;
}

void write_prediction_csv(const std::filesystem::path& path, const Eigen::MatrixXd& p,
                          const Eigen::MatrixXd& x, double dt_days, double t0_days) {
  require(p.rows() == 1, "prediction CSV schema holds a single actuator channel",
          ErrorCode::Io);
  require(p.cols() == x.cols() && p.cols() >= 1, "prediction snapshot counts differ",
          ErrorCode::Io);
  require(dt_days > 0.0, "timestep must be positive", ErrorCode::Io);
  auto out = open_out(path);
  out << "t_days,p_actuator";
  for (int i = 0; i < x.rows(); ++i) out << ",cell_" << i;
  out << "\n";
  for (int k = 0; k < p.cols(); ++k) {
    out << format_double(t0_days + dt_days * k) << "," << format_double(p(0, k));
    for (int i = 0; i < x.rows(); ++i) out << "," << format_double(x(i, k));
    out << "\n";
  }
  require(out.good(), "write failed for " + path.string(), ErrorCode::Io);
}

void write_series_csv(const std::filesystem::path& path, const Eigen::VectorXd& t_days,
                      const Eigen::VectorXd& values) {
  require(t_days.size() == values.size(), "series length mismatch", ErrorCode::Io);
  auto out = open_out(path);
  out << "t_days,value\n";
  // Summaries of runaway rollouts can overflow; a hole keeps the file numeric.
  for (int k = 0; k < t_days.size(); ++k)
    out << format_double(t_days[k]) << ","
        << (std::isfinite(values[k]) ? format_double(values[k]) : std::string()) << "\n";
  require(out.good(), "write failed for " + path.string(), ErrorCode::Io);
}

}  // namespace koopflow::io
