// TUM RGB-D sequence ingestion: timestamped index files, greedy
// nearest-timestamp association, ground truth and detection sidecars.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynavo/core/se3.hpp"
#include "dynavo/io/detections.hpp"
#include "dynavo/io/trajectory_io.hpp"

namespace dynavo {

struct FrameRecord {
  double timestamp = 0.0;  // rgb timestamp
  double depth_timestamp = 0.0;
  std::string rgb_path;
  std::string depth_path;
  std::vector<Detection> detections;
  std::optional<PoseSE3> gt_pose;
};

struct SequenceData {
  std::vector<FrameRecord> frames;
  int dropped_rgb = 0;
  int dropped_depth = 0;
};

// Greedy nearest-timestamp matching: candidate pairs within tolerance are
// taken in order of |dt| (ties to the earlier b, then earlier a), each row
// used at most once. The global ordering makes the pairing independent of
// input permutation.
inline std::vector<std::pair<int, int>> associate_timestamps(
    const std::vector<double>& a, const std::vector<double>& b, double tolerance) {
  struct Cand {
    double adt;
    double b_ts, a_ts;
    int ia, ib;
  };
  std::vector<Cand> cands;
  std::vector<int> order_b(b.size());
  for (size_t i = 0; i < b.size(); ++i) order_b[i] = static_cast<int>(i);
  std::sort(order_b.begin(), order_b.end(), [&](int l, int r) { return b[l] < b[r]; });
  std::vector<double> b_sorted(b.size());
  for (size_t i = 0; i < b.size(); ++i) b_sorted[i] = b[order_b[i]];

  for (size_t ia = 0; ia < a.size(); ++ia) {
    auto lo = std::lower_bound(b_sorted.begin(), b_sorted.end(), a[ia] - tolerance);
    auto hi = std::upper_bound(b_sorted.begin(), b_sorted.end(), a[ia] + tolerance);
    for (auto it = lo; it != hi; ++it) {
      const int ib = order_b[it - b_sorted.begin()];
      cands.push_back({std::abs(a[ia] - b[ib]), b[ib], a[ia], static_cast<int>(ia), ib});
    }
  }
  // |dt| values within 1ns count as tied and break to the earlier timestamp
  std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) {
    if (std::abs(l.adt - r.adt) > 1e-9) return l.adt < r.adt;
    if (l.b_ts != r.b_ts) return l.b_ts < r.b_ts;
    return l.a_ts < r.a_ts;
  });

  std::vector<uint8_t> used_a(a.size(), 0), used_b(b.size(), 0);
  std::vector<std::pair<int, int>> out;
  for (const auto& c : cands) {
    if (used_a[c.ia] || used_b[c.ib]) continue;
    used_a[c.ia] = used_b[c.ib] = 1;
    out.emplace_back(c.ia, c.ib);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

struct IndexRow {
  double timestamp;
  std::string path;
};

inline std::vector<IndexRow> read_index_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing index file: " + path);
  std::vector<IndexRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    IndexRow row;
    if (!(ss >> row.timestamp >> row.path))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const IndexRow& l, const IndexRow& r) { return l.timestamp < r.timestamp; });
  return rows;
}

inline Detection parse_detection_json(const nlohmann::json& obj) {
  Detection det;
  det.class_name = obj.at("class").get<std::string>();
  det.confidence = obj.at("conf").get<double>();
  if (det.confidence < 0.0 || det.confidence > 1.0)
    throw std::runtime_error("detection confidence outside [0,1]");
  const auto& bbox = obj.at("bbox");
  det.x = bbox.at(0).get<double>();
  det.y = bbox.at(1).get<double>();
  det.w = bbox.at(2).get<double>();
  det.h = bbox.at(3).get<double>();
  det.dynamic_prior = obj.value("dynamic_prior", false);
  if (obj.contains("mask_rle")) {
    DetectionMask mask;
    mask.image_scope = obj.value("mask_scope", std::string("bbox")) == "image";
    if (obj.contains("mask_size")) {
      mask.width = obj.at("mask_size").at(0).get<int>();
      mask.height = obj.at("mask_size").at(1).get<int>();
    } else {
      mask.width = static_cast<int>(std::ceil(det.w));
      mask.height = static_cast<int>(std::ceil(det.h));
    }
    mask.bits = decode_rle(obj.at("mask_rle").get<std::string>(),
                           static_cast<size_t>(mask.width) * mask.height);
    det.mask = std::move(mask);
  }
  return det;
}

}  // namespace detail

// JSONL: one {"timestamp": s, "objects": [...]} per line.
inline std::map<double, std::vector<Detection>> load_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open detections file: " + path);
  std::map<double, std::vector<Detection>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      const double ts = obj.at("timestamp").get<double>();
      std::vector<Detection> dets;
      for (const auto& d : obj.at("objects")) dets.push_back(detail::parse_detection_json(d));
      out[ts] = std::move(dets);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline SequenceData load_tum_sequence(const std::string& dir, double assoc_tolerance = 0.02) {
  namespace fs = std::filesystem;
  const auto rgb_rows = detail::read_index_file((fs::path(dir) / "rgb.txt").string());
  const auto depth_rows = detail::read_index_file((fs::path(dir) / "depth.txt").string());

  std::vector<double> rgb_ts(rgb_rows.size()), depth_ts(depth_rows.size());
  for (size_t i = 0; i < rgb_rows.size(); ++i) rgb_ts[i] = rgb_rows[i].timestamp;
  for (size_t i = 0; i < depth_rows.size(); ++i) depth_ts[i] = depth_rows[i].timestamp;

  const auto pairs = associate_timestamps(rgb_ts, depth_ts, assoc_tolerance);
  if (pairs.empty()) throw std::runtime_error("no rgb/depth associations in " + dir);

  SequenceData seq;
  seq.dropped_rgb = static_cast<int>(rgb_rows.size() - pairs.size());
  seq.dropped_depth = static_cast<int>(depth_rows.size() - pairs.size());
  for (const auto& [ia, ib] : pairs) {
    FrameRecord rec;
    rec.timestamp = rgb_rows[ia].timestamp;
    rec.depth_timestamp = depth_rows[ib].timestamp;
    rec.rgb_path = (fs::path(dir) / rgb_rows[ia].path).string();
    rec.depth_path = (fs::path(dir) / depth_rows[ib].path).string();
    seq.frames.push_back(std::move(rec));
  }

  const auto gt_path = fs::path(dir) / "groundtruth.txt";
  if (fs::exists(gt_path)) {
    const Trajectory gt = read_trajectory(gt_path.string());
    std::vector<double> frame_ts(seq.frames.size()), gts(gt.size());
    for (size_t i = 0; i < seq.frames.size(); ++i) frame_ts[i] = seq.frames[i].timestamp;
    for (size_t i = 0; i < gt.size(); ++i) gts[i] = gt[i].timestamp;
    for (const auto& [fi, gi] : associate_timestamps(frame_ts, gts, assoc_tolerance))
      seq.frames[fi].gt_pose = gt[gi].pose;
  }

  const auto det_path = fs::path(dir) / "detections.jsonl";
  if (fs::exists(det_path)) {
    const auto detmap = load_detections(det_path.string());
    std::vector<double> frame_ts(seq.frames.size()), det_ts;
    for (size_t i = 0; i < seq.frames.size(); ++i) frame_ts[i] = seq.frames[i].timestamp;
    std::vector<const std::vector<Detection>*> det_lists;
    for (const auto& [ts, dets] : detmap) {
      det_ts.push_back(ts);
      det_lists.push_back(&dets);
    }
    for (const auto& [fi, di] : associate_timestamps(frame_ts, det_ts, assoc_tolerance))
      seq.frames[fi].detections = *det_lists[di];
  }
  return seq;
}

}  // namespace dynavo
