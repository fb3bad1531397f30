#include "dlsgd/libsvm.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dlsgd/error.hpp"
#include "dlsgd/rng.hpp"

namespace dlsgd {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

// Splits on ASCII whitespace without allocating.
class Tokens {
 public:
  explicit Tokens(std::string_view line) : rest_(line) {}

  bool next(std::string_view& token) {
    std::size_t i = 0;
    while (i < rest_.size() && is_space(rest_[i])) ++i;
    if (i == rest_.size()) return false;
    std::size_t j = i;
    while (j < rest_.size() && !is_space(rest_[j])) ++j;
    token = rest_.substr(i, j - i);
    rest_.remove_prefix(j);
    return true;
  }

 private:
  std::string_view rest_;
};

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::uint64_t Dataset::checksum() const {
  Fnv1a h;
  h.update_value(static_cast<std::uint64_t>(dim));
  h.update_value(static_cast<std::uint64_t>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    h.update_value(labels[r]);
    h.update_value(static_cast<std::uint64_t>(rows[r].size()));
    for (const auto& e : rows[r]) {
      h.update_value(e.index);
      h.update_value(e.value);
    }
  }
  return h.digest();
}

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> dim_override) {
  if (dim_override && *dim_override == 0) throw InvalidParameter("dimension override must be positive");
  Dataset data;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Tokens tokens(line);
    std::string_view token;
    if (!tokens.next(token)) continue;

    double label = 0.0;
    if (!parse_number(token, label)) {
      throw ParseError("non-numeric label '" + std::string(token) + "'", line_no);
    }
    std::uint8_t mapped = 0;
    if (label == 1.0) {
      mapped = 1;
    } else if (label == -1.0 || label == 0.0) {
      mapped = 0;
    } else {
      throw ParseError("label '" + std::string(token) + "' is not binary (-1/+1 or 0/1)", line_no);
    }

    SparseRow row;
    std::uint32_t previous = 0;
    while (tokens.next(token)) {
      const auto colon = token.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("malformed feature token '" + std::string(token) + "'", line_no);
      }
      long long index = 0;
      double value = 0.0;
      const auto index_text = token.substr(0, colon);
      if (!parse_number(index_text, index) || !parse_number(token.substr(colon + 1), value)) {
        throw ParseError("malformed feature token '" + std::string(token) + "'", line_no);
      }
      if (index <= 0) throw ParseError("feature index must be positive, got " + std::to_string(index), line_no);
      if (index > static_cast<long long>(UINT32_MAX)) throw ParseError("feature index too large", line_no);
      const auto idx = static_cast<std::uint32_t>(index);
      if (idx <= previous) throw ParseError("feature indices must be strictly ascending", line_no);
      if (dim_override && idx > *dim_override) {
        throw ParseError("feature index " + std::to_string(idx) + " exceeds dimension " +
                             std::to_string(*dim_override),
                         line_no);
      }
      previous = idx;
      row.push_back({idx, value});
    }
    if (previous > max_index) max_index = previous;
    data.rows.push_back(std::move(row));
    data.labels.push_back(mapped);
  }
  if (in.bad()) throw ParseError("read failure", line_no);
  data.dim = dim_override ? *dim_override : max_index;
  if (data.rows.empty()) throw ParseError("no examples", 0);
  if (data.dim == 0) throw ParseError("no features", 0);
  return data;
}

Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> dim_override) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in, dim_override);
}

Dataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> dim_override) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path.string() + "'", 0);
  return parse_libsvm(in, dim_override);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    out << static_cast<int>(data.labels[r]);
    for (const auto& e : data.rows[r]) out << ' ' << e.index << ':' << e.value;
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace dlsgd
