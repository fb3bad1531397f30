#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace dlsgd {

struct SparseEntry {
  std::uint32_t index;  // 1-based feature index
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

using SparseRow = std::vector<SparseEntry>;

/// Binary-labelled sparse examples. Labels are 0 or 1.
struct Dataset {
  std::size_t dim = 0;
  std::vector<SparseRow> rows;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return rows.size(); }

  /// Order-sensitive fingerprint of dim, labels, indices and value bits.
  std::uint64_t checksum() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Parses LIBSVM text: one example per line, `label idx:val idx:val ...`,
/// whitespace separated, strictly ascending 1-based indices. Labels -1/+1
/// and 0/1 are accepted (-1 maps to 0). Blank lines are skipped.
///
/// dim is the largest index seen unless `dim_override` is given, in which
/// case every index must fit within it. Throws ParseError with the 1-based
/// line number on malformed tokens, non-binary labels or bad indices.
Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> dim_override = std::nullopt);
Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> dim_override = std::nullopt);
Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> dim_override = std::nullopt);

/// Writes labels as 0/1 and values with 17 significant digits.
void write_libsvm(std::ostream& out, const Dataset& data);

}  // namespace dlsgd
