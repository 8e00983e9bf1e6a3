#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "abba_vsm/ingest.hpp"

namespace fixture {

/// Class "up" holds ascending ramps, class "down" the mirrored descending
/// ones. Every sample is collinear, so each reduces to a single segment.
inline abba::Dataset ramp_dataset(std::size_t per_class = 10, std::size_t length = 32) {
  abba::Dataset ds;
  ds.name = "ramps";
  std::uint64_t id = 0;
  for (std::size_t i = 0; i < per_class; ++i)
    for (int sign : {1, -1}) {
      abba::TimeSeriesSample s;
      s.sample_id = id++;
      s.label = sign > 0 ? "up" : "down";
      const double offset = static_cast<double>(i);
      for (std::size_t k = 0; k < length; ++k) s.values.push_back(offset + sign * 0.5 * static_cast<double>(k));
      ds.samples.push_back(s);
    }
  ds.refresh_labels();
  return ds;
}

/// Two noisy classes that differ in shape: a sine bump against a step.
inline abba::Dataset shape_dataset(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  abba::Dataset ds;
  ds.name = "shapes";
  std::uint64_t id = 0;
  for (std::size_t i = 0; i < per_class; ++i)
    for (int c = 0; c < 2; ++c) {
      abba::TimeSeriesSample s;
      s.sample_id = id++;
      s.label = c == 0 ? "bump" : "step";
      for (int k = 0; k < 60; ++k) {
        const double x = k / 60.0;
        const double base = c == 0 ? std::sin(3.14159 * x) : (x > 0.5 ? 1.0 : 0.0);
        s.values.push_back(base + noise(rng));
      }
      ds.samples.push_back(s);
    }
  ds.refresh_labels();
  return ds;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("abba_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixture
