// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vostk/error.hpp"

namespace vostk {

/// One named tensor. data.size() equals the product of shape.
struct ParamEntry {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> data;

  friend bool operator==(const ParamEntry&, const ParamEntry&) = default;
};

/// Insertion-ordered collection of uniquely named tensors.
class ParamStore {
 public:
  /// Appends an entry. Throws CheckpointError (kDuplicateName / kShapeMismatch).
  void add(std::string name, std::vector<std::uint32_t> shape, std::vector<float> data);

  const ParamEntry* find(std::string_view name) const noexcept;
  ParamEntry* find(std::string_view name) noexcept;
  /// Throws CheckpointError(kMissingEntry) when absent.
  const ParamEntry& at(std::string_view name) const;

  const std::vector<ParamEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const ParamStore&, const ParamStore&) = default;

 private:
  std::vector<ParamEntry> entries_;
};

class CheckpointError : public FormatError {
 public:
  enum class Kind {
    kBadMagic,
    kUnsupportedVersion,
    kTruncated,
    kTrailingBytes,
    kShapeMismatch,
    kDuplicateName,
    kMissingEntry,
    kIo,
  };
  CheckpointError(Kind kind, const std::string& what) : FormatError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// TVCK v1 layout, little-endian throughout:
///   "TVCK" 0x01, u32 entry count, then per entry
///   u16 name length, name bytes (UTF-8), u8 ndim, ndim x u32 dims,
///   prod(dims) x f32 values.
std::vector<std::uint8_t> serialize(const ParamStore& store);
ParamStore deserialize(std::span<const std::uint8_t> bytes);

void save(const ParamStore& store, const std::filesystem::path& path);
ParamStore load(const std::filesystem::path& path);

struct TransplantReport {
  std::vector<std::string> transplanted;
  std::vector<std::string> skipped_prefix;   // name does not start with the prefix
  std::vector<std::string> skipped_missing;  // prefixed, but absent from the source
  std::vector<std::string> skipped_shape;    // prefixed and present, shapes differ
};

struct TransplantResult {
  ParamStore store;
  TransplantReport report;
};

/// Copies source values into every target entry whose name starts with
/// `prefix` and whose shape matches. Names, shapes and order of the target
/// are preserved. In strict mode a shape mismatch throws
/// CheckpointError(kShapeMismatch) naming the entry.
TransplantResult transplant(const ParamStore& target, const ParamStore& source,
                            std::string_view prefix, bool strict = false);

}  // namespace vostk
