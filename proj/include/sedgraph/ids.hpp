#pragma once

// Identifier scheme for lexemes and senses.
//
//   LexemeId = "<lang>:<lemma>:<pos>:<homonym_index>"
//   SenseId  = "<LexemeId>#<sense_no>"
//
// Lemmas may contain spaces, ':' and '#'; parsing splits on the first ':'
// and on the last two ':' (and the last '#' for senses).

#include <charconv>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sedgraph {

class LanguageTag {
 public:
  LanguageTag() = default;
  explicit LanguageTag(std::string_view code) : code_(code) {
    if (!valid(code)) throw std::invalid_argument("invalid language tag: " + std::string(code));
  }

  static bool valid(std::string_view code) {
    return code.size() == 2 && code[0] >= 'a' && code[0] <= 'z' && code[1] >= 'a' && code[1] <= 'z';
  }

  const std::string& str() const noexcept { return code_; }

  friend bool operator==(const LanguageTag&, const LanguageTag&) = default;
  friend auto operator<=>(const LanguageTag&, const LanguageTag&) = default;

 private:
  std::string code_;
};

enum class PartOfSpeech { verb, noun, adj, adv, phrase, other };

inline std::string_view to_string(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::verb: return "verb";
    case PartOfSpeech::noun: return "noun";
    case PartOfSpeech::adj: return "adj";
    case PartOfSpeech::adv: return "adv";
    case PartOfSpeech::phrase: return "phrase";
    case PartOfSpeech::other: return "other";
  }
  return "other";
}

inline std::optional<PartOfSpeech> parse_pos(std::string_view s) {
  if (s == "verb") return PartOfSpeech::verb;
  if (s == "noun") return PartOfSpeech::noun;
  if (s == "adj") return PartOfSpeech::adj;
  if (s == "adv") return PartOfSpeech::adv;
  if (s == "phrase") return PartOfSpeech::phrase;
  if (s == "other") return PartOfSpeech::other;
  return std::nullopt;
}

namespace detail {

inline std::optional<int> parse_positive(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value < 1) return std::nullopt;
  return value;
}

}  // namespace detail

struct LexemeId {
  LanguageTag lang;
  std::string lemma;
  PartOfSpeech pos = PartOfSpeech::other;
  int homonym = 1;

  std::string str() const {
    return lang.str() + ':' + lemma + ':' + std::string(to_string(pos)) + ':' + std::to_string(homonym);
  }

  static std::optional<LexemeId> parse(std::string_view s) {
    const auto first = s.find(':');
    const auto last = s.rfind(':');
    if (first == std::string_view::npos || last == first) return std::nullopt;
    const auto mid = s.rfind(':', last - 1);
    if (mid == std::string_view::npos || mid <= first) return std::nullopt;
    const auto lang = s.substr(0, first);
    const auto lemma = s.substr(first + 1, mid - first - 1);
    const auto pos = parse_pos(s.substr(mid + 1, last - mid - 1));
    const auto hom = detail::parse_positive(s.substr(last + 1));
    if (!LanguageTag::valid(lang) || lemma.empty() || !pos || !hom) return std::nullopt;
    return LexemeId{LanguageTag(lang), std::string(lemma), *pos, *hom};
  }

  // Canonical order: (lang, lemma codepoints, homonym index, pos).
  friend std::strong_ordering operator<=>(const LexemeId& a, const LexemeId& b) {
    if (auto c = a.lang <=> b.lang; c != 0) return c;
    if (auto c = a.lemma.compare(b.lemma); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.homonym <=> b.homonym; c != 0) return c;
    return a.pos <=> b.pos;
  }
  friend bool operator==(const LexemeId&, const LexemeId&) = default;
};

struct SenseId {
  LexemeId lexeme;
  int number = 1;

  const LanguageTag& lang() const noexcept { return lexeme.lang; }

  std::string str() const { return lexeme.str() + '#' + std::to_string(number); }

  static std::optional<SenseId> parse(std::string_view s) {
    const auto hash = s.rfind('#');
    if (hash == std::string_view::npos) return std::nullopt;
    auto lex = LexemeId::parse(s.substr(0, hash));
    auto no = detail::parse_positive(s.substr(hash + 1));
    if (!lex || !no) return std::nullopt;
    return SenseId{std::move(*lex), *no};
  }

  friend std::strong_ordering operator<=>(const SenseId&, const SenseId&) = default;
  friend bool operator==(const SenseId&, const SenseId&) = default;
};

}  // namespace sedgraph

template <>
struct std::hash<sedgraph::LexemeId> {
  std::size_t operator()(const sedgraph::LexemeId& id) const noexcept {
    std::size_t h = std::hash<std::string>{}(id.lemma);
    const std::size_t rest = std::hash<std::string>{}(id.lang.str()) ^
                             (static_cast<std::size_t>(id.pos) << 32 | static_cast<std::size_t>(id.homonym));
    return h ^ (rest + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  }
};

template <>
struct std::hash<sedgraph::SenseId> {
  std::size_t operator()(const sedgraph::SenseId& id) const noexcept {
    const std::size_t h = std::hash<sedgraph::LexemeId>{}(id.lexeme);
    return h ^ (static_cast<std::size_t>(id.number) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  }
};
