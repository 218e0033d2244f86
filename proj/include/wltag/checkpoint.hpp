#pragma once

#include <filesystem>
#include <iosfwd>

#include "wltag/labels.hpp"
#include "wltag/params.hpp"

namespace wltag {

// Versioned binary model file:
//   "WLTAGCKP" u32 version
//   types: u32 count, then (u32 length, bytes) each
//   dims: i32 word, char, filters, width, hidden; f64 char dropout
//   u64 num_labels
//   words: u64 count, (u32 length, bytes) each; chars: u64 count, u32 code point each
//   tensors: u32 count, then (u32 name length, name, u64 rows, u64 cols, f64[rows*cols] column-major)
// Integers and doubles are little-endian.
struct Checkpoint {
  TypeSystem types;
  Vocabulary vocab;
  ModelParams params;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
// Throws FormatError on a bad magic, version, or inconsistent shapes.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wltag
