// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vostk/grid.hpp"

namespace vostk {

namespace fs = std::filesystem;

inline constexpr const char* kGtDir = "masks_gt";
inline constexpr const char* kPredDir = "masks_pred";
inline constexpr const char* kTracksFile = "tracks.csv";
inline constexpr const char* kSceneFile = "scene.json";

/// Binary PGM (P5, maxval 255); pixel value = object id.
void write_pgm(const LabelMask& mask, const fs::path& path);
/// Throws FormatError for anything but an 8-bit P5 image.
LabelMask read_pgm(const fs::path& path);

/// "00001.pgm" for frame 1.
std::string frame_file_name(int frame);

/// Frames 00001.pgm, 00002.pgm, ... of a mask directory. Throws FormatError
/// when the directory is missing, empty, has a gap, or the sizes differ.
std::vector<LabelMask> read_mask_dir(const fs::path& dir);
void write_mask_dir(const fs::path& dir, std::span<const LabelMask> frames);

/// Sorted names of the sub-directories of `root` that hold masks_gt or
/// masks_pred. Throws FormatError if there are none.
std::vector<std::string> list_sequences(const fs::path& root);

/// Per-object 0/1 probability channels (channel k = id k + 1).
std::vector<Grid2D> label_channels(const LabelMask& labels, int num_objects);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace vostk
