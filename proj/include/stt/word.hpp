#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace stt {

// Finite word over the alphabet {0, ..., alphabet_size-1}. The empty word is
// the root cylinder (the whole shift space).
struct Word {
  std::vector<int> sym;

  Word() = default;
  explicit Word(std::vector<int> s) : sym(std::move(s)) {}
  Word(std::initializer_list<int> il) : sym(il) {}

  std::size_t size() const { return sym.size(); }
  bool empty() const { return sym.empty(); }
  int operator[](std::size_t i) const { return sym[i]; }  // 0-based

  // 1-based symbol access matching the index conventions used throughout.
  int at1(std::size_t i) const {
    if (i < 1 || i > sym.size()) throw std::out_of_range("word index");
    return sym[i - 1];
  }

  void push_back(int s) { sym.push_back(s); }

  // Subword by 1-based inclusive bounds; empty when from > to.
  Word slice1(std::size_t from, std::size_t to) const {
    if (from > to) return Word{};
    if (from < 1 || to > sym.size()) throw std::out_of_range("word slice");
    return Word(std::vector<int>(sym.begin() + (from - 1), sym.begin() + to));
  }
  Word prefix(std::size_t n) const { return slice1(1, n); }

  Word concat(const Word& other) const {
    Word w = *this;
    w.sym.insert(w.sym.end(), other.sym.begin(), other.sym.end());
    return w;
  }

  bool operator==(const Word& o) const { return sym == o.sym; }
  bool operator!=(const Word& o) const { return sym != o.sym; }
  bool operator<(const Word& o) const { return sym < o.sym; }

  bool is_prefix_of(const Word& o) const {
    if (sym.size() > o.sym.size()) return false;
    return std::equal(sym.begin(), sym.end(), o.sym.begin());
  }

  // Digits run together for alphabets up to 10, comma-separated otherwise.
  std::string str(int alphabet_size = 10) const {
    std::ostringstream os;
    for (std::size_t i = 0; i < sym.size(); ++i) {
      if (alphabet_size > 10 && i) os << ',';
      os << sym[i];
    }
    return os.str();
  }

  static Word parse(const std::string& text, int alphabet_size) {
    Word w;
    if (alphabet_size <= 10) {
      for (char c : text) {
        if (c < '0' || c > '9') throw std::invalid_argument("bad word literal");
        w.push_back(c - '0');
      }
    } else {
      std::istringstream is(text);
      std::string tok;
      while (std::getline(is, tok, ','))
        if (!tok.empty()) w.push_back(std::stoi(tok));
    }
    for (int s : w.sym)
      if (s < 0 || s >= alphabet_size) throw std::invalid_argument("symbol out of alphabet");
    return w;
  }
};

// Infinite coding, either eventually periodic (prefix + repeating cycle) or a
// finite table that errors past its end. Queries are 1-based and
// deterministic.
class SymbolStream {
 public:
  static SymbolStream eventually_periodic(Word prefix, Word cycle) {
    if (cycle.empty()) throw std::invalid_argument("cycle must be non-empty");
    SymbolStream s;
    s.prefix_ = std::move(prefix);
    s.cycle_ = std::move(cycle);
    s.finite_ = false;
    return s;
  }
  static SymbolStream periodic(Word cycle) {
    return eventually_periodic(Word{}, std::move(cycle));
  }
  static SymbolStream constant(int symbol) { return periodic(Word({symbol})); }
  static SymbolStream finite(Word table) {
    SymbolStream s;
    s.prefix_ = std::move(table);
    s.finite_ = true;
    return s;
  }

  bool is_finite() const { return finite_; }
  std::size_t table_size() const { return prefix_.size(); }
  std::size_t prefix_len() const { return prefix_.size(); }
  std::size_t cycle_len() const { return cycle_.size(); }

  int at(std::uint64_t n) const {  // 1-based
    if (n == 0) throw std::out_of_range("stream index is 1-based");
    if (n <= prefix_.size()) return prefix_.sym[n - 1];
    if (finite_) throw std::out_of_range("stream queried past table end");
    return cycle_.sym[(n - prefix_.size() - 1) % cycle_.size()];
  }

  Word prefix_word(std::size_t n) const {
    Word w;
    w.sym.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) w.push_back(at(i));
    return w;
  }

 private:
  Word prefix_, cycle_;
  bool finite_ = false;
};

// Length of the longest common prefix; 0 when the first symbols differ.
inline std::size_t common_part_length(const Word& a, const Word& b) {
  std::size_t n = std::min(a.size(), b.size()), k = 0;
  while (k < n && a.sym[k] == b.sym[k]) ++k;
  return k;
}

// KMP prefix function of w: border[i] = length of the longest proper border
// of w|_1^i, for i = 1..|w|.
inline std::vector<int> border_table(const Word& w) {
  std::vector<int> b(w.size() + 1, 0);
  for (std::size_t i = 2; i <= w.size(); ++i) {
    int k = b[i - 1];
    while (k > 0 && w.sym[i - 1] != w.sym[k]) k = b[k];
    if (w.sym[i - 1] == w.sym[k]) ++k;
    b[i] = k;
  }
  return b;
}

// m(x, n): least k >= 1 with x|_1^{n-k} = x|_{k+1}^n, i.e. n minus the longest
// proper border of x|_1^n. Returns n itself when no shorter shift works; the
// callers that rely on the minimality hypothesis always guard with m < n/2.
inline std::size_t minimal_period(const SymbolStream& x, std::size_t n) {
  if (n < 1) throw std::invalid_argument("minimal_period needs n >= 1");
  Word w = x.prefix_word(n);
  auto b = border_table(w);
  return n - static_cast<std::size_t>(b[n]);
}

enum class TriState { holds, fails, precondition_violated };

// Checks the border-multiples characterization: when m = m(x,n) < n/2,
// x is m-periodic on (1,n) and the shifts k with x|_1^{n-k} = x|_{k+1}^n are
// exactly the multiples of m. Verified by direct enumeration.
inline TriState period_multiples_check(const SymbolStream& x, std::size_t n) {
  std::size_t m = minimal_period(x, n);
  if (2 * m >= n) return TriState::precondition_violated;
  Word w = x.prefix_word(n);
  for (std::size_t k = 1; k + m <= n; ++k)
    if (w.sym[k - 1] != w.sym[k + m - 1]) return TriState::fails;
  for (std::size_t k = 1; k <= n - m; ++k) {
    bool eq = true;
    for (std::size_t j = 1; j <= n - k && eq; ++j)
      if (w.sym[j - 1] != w.sym[k + j - 1]) eq = false;
    if (eq != (k % m == 0)) return TriState::fails;
  }
  return TriState::holds;
}

}  // namespace stt
