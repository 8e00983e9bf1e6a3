#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "abba_vsm/vsm.hpp"

namespace abba {

inline constexpr int kModelFormatVersion = 1;

// Model file: one JSON document
//   {"format":"abba-vsm-model","format_version":1,
//    "codebook":{"sigma_len","sigma_inc","centers":[[x,y]...],"alphabet":[...],
//                "method","params":{"ct"} | {"csize","seed"}},
//    "vocabulary":[[sym...]...],"class_labels":[...],"weights":[[per class]...],
//    "config":{"wsize","wstep","rt"},
//    "training":{"dataset_name","seed","class_sample_counts":[...]}}

void save_model(const VsmModel& model, std::ostream& out);
void save_model(const VsmModel& model, const std::filesystem::path& path);

/// FormatError on malformed JSON, a version mismatch, or inconsistent shapes.
VsmModel load_model(std::istream& in);
VsmModel load_model(const std::filesystem::path& path);

}  // namespace abba
