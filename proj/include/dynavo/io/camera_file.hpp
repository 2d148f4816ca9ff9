// Optional per-sequence camera.txt: "fx fy cx cy width height depth_scale".
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "dynavo/core/camera.hpp"

namespace dynavo {

inline std::optional<CameraIntrinsics> read_camera_file(const std::string& sequence_dir) {
  const auto path = std::filesystem::path(sequence_dir) / "camera.txt";
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    CameraIntrinsics K;
    if (!(ss >> K.fx >> K.fy >> K.cx >> K.cy >> K.width >> K.height >> K.depth_scale))
      throw std::runtime_error(path.string() + ": malformed camera line");
    K.validate();
    return K;
  }
  return std::nullopt;
}

}  // namespace dynavo
