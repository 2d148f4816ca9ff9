// TUM trajectory text format: "timestamp tx ty tz qx qy qz qw" per line.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynavo/core/se3.hpp"

namespace dynavo {

struct TrajectoryEntry {
  double timestamp = 0.0;
  PoseSE3 pose;
};

using Trajectory = std::vector<TrajectoryEntry>;

inline std::string format_trajectory_line(double timestamp, const PoseSE3& pose) {
  const Vec3& t = pose.translation();
  const Eigen::Quaterniond& q = pose.rotation();
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.6f %.9g %.9g %.9g %.9g %.9g %.9g %.9g",
                timestamp, t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
  return buf;
}

inline void write_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory file: " + path);
  out << "# timestamp tx ty tz qx qy qz qw\n";
  for (const auto& e : traj) out << format_trajectory_line(e.timestamp, e.pose) << '\n';
}

inline Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trajectory file: " + path);
  Trajectory traj;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double ts, tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> ts >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed trajectory line");
    if (!traj.empty() && ts <= traj.back().timestamp)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": timestamps must be strictly increasing");
    traj.push_back({ts, PoseSE3(Eigen::Quaterniond(qw, qx, qy, qz), Vec3(tx, ty, tz))});
  }
  return traj;
}

}  // namespace dynavo
