#include "adaptmt/index_set.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "adaptmt/error.hpp"

namespace adaptmt {

std::string IndexSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int j : *this) {
    if (!first) out += ',';
    out += std::to_string(j + 1);
    first = false;
  }
  out += '}';
  return out;
}

IndexSet IndexSet::parse(std::string_view text, int k) {
  std::uint32_t bits = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      int value = 0;
      auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
      if (ec != std::errc()) throw ValidationError("bad index set: " + std::string(text));
      if (value < 1 || value > k) {
        throw ValidationError("index " + std::to_string(value) + " out of range 1.." + std::to_string(k));
      }
      bits |= 1u << (value - 1);
      i = static_cast<std::size_t>(ptr - text.data());
    } else if (c == '{' || c == '}' || c == ',' || c == ' ' || c == ';' || c == '(' || c == ')') {
      ++i;
    } else {
      throw ValidationError("bad index set: " + std::string(text));
    }
  }
  return IndexSet(bits);
}

std::vector<IndexSet> nonempty_subsets(IndexSet universe) {
  std::vector<IndexSet> out;
  const std::uint32_t u = universe.bits();
  for (std::uint32_t s = u; s != 0; s = (s - 1) & u) out.emplace_back(s);
  std::sort(out.begin(), out.end(), [](IndexSet a, IndexSet b) {
    if (a.size() != b.size()) return a.size() > b.size();
    const auto ma = a.members();
    const auto mb = b.members();
    return std::lexicographical_compare(mb.begin(), mb.end(), ma.begin(), ma.end());
  });
  return out;
}

}  // namespace adaptmt
