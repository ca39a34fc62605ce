// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/corpus_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>

namespace vostk {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {}
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int header_int(std::istream& in, const fs::path& path) {
  const std::string tok = header_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  return std::stoi(tok);
}

}  // namespace

void write_pgm(const LabelMask& mask, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(mask.values().data()),
            static_cast<std::streamsize>(mask.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

LabelMask read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  if (header_token(in) != "P5") throw FormatError(path.string() + ": not a binary PGM (P5)");
  const int width = header_int(in, path);
  const int height = header_int(in, path);
  const int maxval = header_int(in, path);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 255) {
    throw FormatError(path.string() + ": unsupported PGM dimensions or maxval");
  }
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw FormatError(path.string() + ": truncated pixel data");
  }
  return LabelMask(height, width, std::move(data));
}

std::string frame_file_name(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05d.pgm", frame);
  return buf;
}

std::vector<LabelMask> read_mask_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("missing mask directory " + dir.string());
  std::size_t pgm_count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pgm") ++pgm_count;
  }
  std::vector<LabelMask> frames;
  for (int f = 1;; ++f) {
    const fs::path p = dir / frame_file_name(f);
    if (!fs::exists(p)) break;
    frames.push_back(read_pgm(p));
    if (!frames.back().same_shape(frames.front())) {
      throw FormatError(p.string() + ": frame size differs from frame 1");
    }
  }
  if (frames.empty()) throw FormatError(dir.string() + ": no frames (expected 00001.pgm)");
  if (frames.size() != pgm_count) {
    throw FormatError(dir.string() + ": frame files are not contiguous from 00001");
  }
  return frames;
}

void write_mask_dir(const fs::path& dir, std::span<const LabelMask> frames) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    write_pgm(frames[i], dir / frame_file_name(static_cast<int>(i) + 1));
  }
}

std::vector<std::string> list_sequences(const fs::path& root) {
  if (!fs::is_directory(root)) throw FormatError("corpus root " + root.string() + " is not a directory");
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(root)) {
    if (!e.is_directory()) continue;
    if (fs::is_directory(e.path() / kGtDir) || fs::is_directory(e.path() / kPredDir)) {
      names.push_back(e.path().filename().string());
    }
  }
  if (names.empty()) throw FormatError(root.string() + ": no sequences found");
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<Grid2D> label_channels(const LabelMask& labels, int num_objects) {
  std::vector<Grid2D> channels;
  channels.reserve(static_cast<std::size_t>(num_objects));
  for (int k = 1; k <= num_objects; ++k) {
    channels.push_back(to_real(indicator(labels, static_cast<std::uint8_t>(k))));
  }
  return channels;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

}  // namespace vostk
