#pragma once

// The .sedl interchange format: UTF-8, LF, one JSON object per line, '#'
// comment lines. Canonical lines emit the known fields in a fixed order,
// followed by any unknown fields in key order.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>
#include <rapidjson/memorystream.h>
#include <rapidjson/reader.h>

#include "sedgraph/errors.hpp"
#include "sedgraph/ids.hpp"
#include "sedgraph/lexicon.hpp"
#include "sedgraph/unicode.hpp"

namespace sedgraph {

enum class RecordKind { lexeme, sense, equiv, synonym, phrase, citation };

inline std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::lexeme: return "lexeme";
    case RecordKind::sense: return "sense";
    case RecordKind::equiv: return "equiv";
    case RecordKind::synonym: return "synonym";
    case RecordKind::phrase: return "phrase";
    case RecordKind::citation: return "citation";
  }
  return "lexeme";
}

struct LexemeDecl {
  LexemeId id;
  Extras extra = Extras::object();
  friend bool operator==(const LexemeDecl&, const LexemeDecl&) = default;
};

struct SenseDecl {
  SenseId id;
  std::string gloss;
  std::optional<std::string> domain;
  Extras extra = Extras::object();
  friend bool operator==(const SenseDecl&, const SenseDecl&) = default;
};

struct EquivDecl {
  SenseId from;
  SenseId to;
  std::optional<int> rank;
  std::optional<std::string> note;
  Extras extra = Extras::object();
  friend bool operator==(const EquivDecl&, const EquivDecl&) = default;
};

// Attachments carry an optional position "n"; when absent the record goes
// after the attachments of the same kind seen so far for its sense.
struct SynonymDecl {
  SenseId sense;
  LexemeId target;
  std::optional<int> position;
  Extras extra = Extras::object();
  friend bool operator==(const SynonymDecl&, const SynonymDecl&) = default;
};

struct PhraseDecl {
  SenseId sense;
  std::string text;
  std::optional<std::string> gloss;
  std::optional<int> position;
  Extras extra = Extras::object();
  friend bool operator==(const PhraseDecl&, const PhraseDecl&) = default;
};

struct CitationDecl {
  SenseId sense;
  std::string quote;
  std::string source;
  std::optional<int> position;
  Extras extra = Extras::object();
  friend bool operator==(const CitationDecl&, const CitationDecl&) = default;
};

using Payload = std::variant<LexemeDecl, SenseDecl, EquivDecl, SynonymDecl, PhraseDecl, CitationDecl>;

struct Record {
  Payload payload;
  std::size_t locus = 0;

  RecordKind kind() const { return static_cast<RecordKind>(payload.index()); }
  friend bool operator==(const Record&, const Record&) = default;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

// A record's top-level members in document order. Strings and integers are
// kept unboxed; anything else is held as JSON.
struct Field {
  enum class Type { string, integer, other };
  std::string key;
  Type type = Type::other;
  std::string text;
  long long integer = 0;
  nlohmann::json other;
};
using FlatRecord = std::vector<Field>;

// SAX handler for flat objects of strings, integers, booleans and nulls.
// Anything else (nesting, floats, huge integers, bad input) makes it give
// up; the caller then falls back to a full parse.
class FlatSax {
 public:
  explicit FlatSax(FlatRecord& out) : out_(out) {}

  bool Null() { return scalar(nlohmann::json()); }
  bool Bool(bool v) { return scalar(nlohmann::json(v)); }
  bool Int(int v) { return integer(v); }
  bool Uint(unsigned v) { return integer(v); }
  bool Int64(std::int64_t v) { return integer(v); }
  bool Uint64(std::uint64_t v) {
    if (v > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) return false;
    return integer(static_cast<long long>(v));
  }
  bool Double(double) { return false; }
  bool RawNumber(const char*, rapidjson::SizeType, bool) { return false; }
  bool String(const char* s, rapidjson::SizeType n, bool) {
    if (depth_ != 1) return false;
    out_.back().type = Field::Type::string;
    out_.back().text.assign(s, n);
    return true;
  }
  bool StartObject() { return depth_++ == 0; }
  bool Key(const char* s, rapidjson::SizeType n, bool) {
    out_.emplace_back();
    out_.back().key.assign(s, n);
    return true;
  }
  bool EndObject(rapidjson::SizeType) {
    --depth_;
    return true;
  }
  bool StartArray() { return false; }
  bool EndArray(rapidjson::SizeType) { return false; }

  // The line must already be valid UTF-8.
  static bool parse(std::string_view line, FlatRecord& out) {
    FlatSax handler(out);
    rapidjson::MemoryStream stream(line.data(), line.size());
    rapidjson::Reader reader;
    return !reader.Parse(stream, handler).IsError();
  }

 private:
  bool integer(long long v) {
    if (depth_ != 1) return false;
    out_.back().type = Field::Type::integer;
    out_.back().integer = v;
    return true;
  }
  bool scalar(nlohmann::json v) {
    if (depth_ != 1) return false;
    out_.back().other = std::move(v);
    return true;
  }

  FlatRecord& out_;
  int depth_ = 0;
};

inline FlatRecord flatten(const nlohmann::json& obj) {
  FlatRecord out;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    Field f;
    f.key = it.key();
    const auto& v = it.value();
    if (v.is_string()) {
      f.type = Field::Type::string;
      f.text = v.get<std::string>();
    } else if (v.is_number_integer() &&
               (!v.is_number_unsigned() ||
                v.get<std::uint64_t>() <= static_cast<std::uint64_t>(std::numeric_limits<long long>::max()))) {
      f.type = Field::Type::integer;
      f.integer = v.get<long long>();
    } else {
      f.other = v;
    }
    out.push_back(std::move(f));
  }
  return out;
}

class FieldReader {
 public:
  FieldReader(const FlatRecord& fields, std::size_t locus) : fields_(fields), locus_(locus) {}

  // Later duplicates win, as in a JSON object.
  const Field* find(std::string_view key) const {
    for (auto it = fields_.rbegin(); it != fields_.rend(); ++it) {
      if (it->key == key) return &*it;
    }
    return nullptr;
  }

  std::string text(const char* key) {
    auto v = optional_text(key);
    if (!v) fail(std::string("missing field \"") + key + '"');
    return *v;
  }

  std::optional<std::string> optional_text(const char* key) {
    used_.push_back(key);
    const auto* f = find(key);
    if (!f || (f->type == Field::Type::other && f->other.is_null())) return std::nullopt;
    if (f->type != Field::Type::string) fail(std::string("field \"") + key + "\" must be a string");
    return to_nfc(f->text);
  }

  std::optional<int> optional_positive(const char* key) {
    used_.push_back(key);
    const auto* f = find(key);
    if (!f || (f->type == Field::Type::other && f->other.is_null())) return std::nullopt;
    if (f->type != Field::Type::integer) fail(std::string("field \"") + key + "\" must be an integer");
    if (f->integer < 1 || f->integer > 1'000'000'000) fail(std::string("field \"") + key + "\" must be a positive integer");
    return static_cast<int>(f->integer);
  }

  SenseId sense_id(const char* key) {
    const auto s = text(key);
    auto id = SenseId::parse(s);
    if (!id) fail(std::string("field \"") + key + "\" is not a sense id: " + s);
    return *id;
  }

  LexemeId lexeme_id(const char* key) {
    const auto s = text(key);
    auto id = LexemeId::parse(s);
    if (!id) fail(std::string("field \"") + key + "\" is not a lexeme id: " + s);
    return *id;
  }

  Extras extras() const {
    Extras out = Extras::object();
    for (const auto& f : fields_) {
      if (f.key == "kind" || std::find(used_.begin(), used_.end(), f.key) != used_.end()) continue;
      switch (f.type) {
        case Field::Type::string: out[f.key] = f.text; break;
        case Field::Type::integer: out[f.key] = f.integer; break;
        case Field::Type::other: out[f.key] = f.other; break;
      }
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& reason) const { throw ParseError(locus_, reason); }

 private:
  const FlatRecord& fields_;
  std::size_t locus_;
  std::vector<std::string_view> used_;
};

}  // namespace detail

/// Parses one non-comment line into a typed record. Text fields and ids are
/// NFC-normalized here.
inline Record parse_record(std::string_view line, std::size_t locus) {
  if (!is_valid_utf8(line)) throw ParseError(locus, "malformed UTF-8");
  detail::FlatRecord fields;
  if (!detail::FlatSax::parse(line, fields)) {
    fields.clear();
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(locus, std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(locus, "record is not an object");
    fields = detail::flatten(obj);
  }
  detail::FieldReader f(fields, locus);
  const auto* kind_field = f.find("kind");
  if (!kind_field) throw ParseError(locus, "missing kind");
  if (kind_field->type != detail::Field::Type::string) throw ParseError(locus, "kind must be a string");
  const auto& kind = kind_field->text;

  Record rec;
  rec.locus = locus;
  if (kind == "lexeme") {
    const auto lang = f.text("lang");
    if (!LanguageTag::valid(lang)) f.fail("invalid language tag: " + lang);
    auto lemma = f.text("lemma");
    if (lemma.empty()) f.fail("empty lemma");
    const auto pos_text = f.text("pos");
    const auto pos = parse_pos(pos_text);
    if (!pos) f.fail("unknown part of speech: " + pos_text);
    const auto hom = f.optional_positive("homonym").value_or(1);
    rec.payload = LexemeDecl{LexemeId{LanguageTag(lang), std::move(lemma), *pos, hom}, f.extras()};
  } else if (kind == "sense") {
    auto id = f.sense_id("id");
    auto gloss = f.optional_text("gloss").value_or("");
    auto domain = f.optional_text("domain");
    rec.payload = SenseDecl{std::move(id), std::move(gloss), std::move(domain), f.extras()};
  } else if (kind == "equiv") {
    auto from = f.sense_id("from");
    auto to = f.sense_id("to");
    auto rank = f.optional_positive("rank");
    auto note = f.optional_text("note");
    rec.payload = EquivDecl{std::move(from), std::move(to), rank, std::move(note), f.extras()};
  } else if (kind == "synonym") {
    auto sense = f.sense_id("sense");
    auto target = f.lexeme_id("target");
    auto n = f.optional_positive("n");
    rec.payload = SynonymDecl{std::move(sense), std::move(target), n, f.extras()};
  } else if (kind == "phrase") {
    auto sense = f.sense_id("sense");
    auto text = f.text("text");
    if (text.empty()) f.fail("empty phrase text");
    auto gloss = f.optional_text("gloss");
    auto n = f.optional_positive("n");
    rec.payload = PhraseDecl{std::move(sense), std::move(text), std::move(gloss), n, f.extras()};
  } else if (kind == "citation") {
    auto sense = f.sense_id("sense");
    auto quote = f.text("quote");
    if (quote.empty()) f.fail("empty citation quote");
    auto source = f.text("source");
    auto n = f.optional_positive("n");
    rec.payload = CitationDecl{std::move(sense), std::move(quote), std::move(source), n, f.extras()};
  } else {
    throw ParseError(locus, "unknown kind: " + kind);
  }
  return rec;
}

// Ids inside JSON may have been written un-normalized; normalize the lemma part.
namespace detail {
inline void normalize(LexemeId& id) { id.lemma = to_nfc(id.lemma); }
inline void normalize(SenseId& id) { normalize(id.lexeme); }
}  // namespace detail

// ---------------------------------------------------------------------------
// Emission

namespace detail {

// Writes one JSON object straight into a string. Output matches a compact
// nlohmann dump with ensure_ascii off; strings must be valid UTF-8.
class JsonLine {
 public:
  explicit JsonLine(std::string_view kind) {
    out_.reserve(128);
    out_ += "{\"kind\":";
    quote(kind);
  }

  JsonLine& field(std::string_view key, std::string_view value) {
    name(key);
    quote(value);
    return *this;
  }
  JsonLine& field(std::string_view key, const std::string& value) { return field(key, std::string_view(value)); }
  JsonLine& field(std::string_view key, long long value) {
    name(key);
    out_ += std::to_string(value);
    return *this;
  }
  JsonLine& field(std::string_view key, const std::optional<std::string>& value) {
    return value ? field(key, std::string_view(*value)) : *this;
  }
  JsonLine& field(std::string_view key, const std::optional<int>& value) {
    return value ? field(key, static_cast<long long>(*value)) : *this;
  }

  // Unknown fields follow in key order; keys already written are skipped.
  std::string finish(const Extras& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) {
      if (std::find(written_.begin(), written_.end(), it.key()) != written_.end()) continue;
      name(it.key());
      out_ += it.value().dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
    }
    out_ += '}';
    return std::move(out_);
  }

 private:
  void name(std::string_view key) {
    written_.push_back(key);
    out_ += ',';
    quote(key);
    out_ += ':';
  }

  void quote(std::string_view s) {
    static constexpr char hex[] = "0123456789abcdef";
    out_ += '"';
    for (char c : s) {
      const auto u = static_cast<unsigned char>(c);
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\b': out_ += "\\b"; break;
        case '\f': out_ += "\\f"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (u < 0x20) {
            out_ += "\\u00";
            out_ += hex[u >> 4];
            out_ += hex[u & 0xF];
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<std::string_view> written_{"kind"};
};

inline std::string lexeme_line(const LexemeId& id, const Extras& extra) {
  return JsonLine("lexeme")
      .field("lang", id.lang.str())
      .field("lemma", id.lemma)
      .field("pos", to_string(id.pos))
      .field("homonym", static_cast<long long>(id.homonym))
      .finish(extra);
}

inline std::string sense_line(const SenseId& id, const std::string& gloss, const std::optional<std::string>& domain,
                              const Extras& extra) {
  return JsonLine("sense").field("id", id.str()).field("gloss", gloss).field("domain", domain).finish(extra);
}

inline std::string equiv_line(const SenseId& from, const SenseId& to, const std::optional<int>& rank,
                              const std::optional<std::string>& note, const Extras& extra) {
  return JsonLine("equiv")
      .field("from", from.str())
      .field("to", to.str())
      .field("rank", rank)
      .field("note", note)
      .finish(extra);
}

inline std::string synonym_line(const SenseId& sense, const LexemeId& target, const std::optional<int>& n,
                                const Extras& extra) {
  return JsonLine("synonym").field("sense", sense.str()).field("target", target.str()).field("n", n).finish(extra);
}

inline std::string phrase_line(const SenseId& sense, const std::string& text, const std::optional<std::string>& gloss,
                               const std::optional<int>& n, const Extras& extra) {
  return JsonLine("phrase")
      .field("sense", sense.str())
      .field("text", text)
      .field("gloss", gloss)
      .field("n", n)
      .finish(extra);
}

inline std::string citation_line(const SenseId& sense, const std::string& quote, const std::string& source,
                                 const std::optional<int>& n, const Extras& extra) {
  return JsonLine("citation")
      .field("sense", sense.str())
      .field("quote", quote)
      .field("source", source)
      .field("n", n)
      .finish(extra);
}

struct LineWriter {
  std::string operator()(const LexemeDecl& d) const { return lexeme_line(d.id, d.extra); }
  std::string operator()(const SenseDecl& d) const { return sense_line(d.id, d.gloss, d.domain, d.extra); }
  std::string operator()(const EquivDecl& d) const { return equiv_line(d.from, d.to, d.rank, d.note, d.extra); }
  std::string operator()(const SynonymDecl& d) const { return synonym_line(d.sense, d.target, d.position, d.extra); }
  std::string operator()(const PhraseDecl& d) const {
    return phrase_line(d.sense, d.text, d.gloss, d.position, d.extra);
  }
  std::string operator()(const CitationDecl& d) const {
    return citation_line(d.sense, d.quote, d.source, d.position, d.extra);
  }
};

}  // namespace detail

/// One canonical .sedl line, without the trailing newline.
inline std::string to_line(const Record& rec) { return std::visit(detail::LineWriter{}, rec.payload); }

// ---------------------------------------------------------------------------
// Reading

struct ReadResult {
  std::vector<Record> records;
  ValidationReport report;  // one parse-error entry per rejected line
};

inline ReadResult read_records(std::istream& in) {
  ReadResult out;
  std::string line;
  std::size_t locus = 0;
  while (std::getline(in, line)) {
    ++locus;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (locus == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
      out.report.add(issue::parse_error, "line 1", "byte order mark not allowed");
      continue;
    }
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      out.records.push_back(parse_record(line, locus));
    } catch (const ParseError& e) {
      out.report.add(issue::parse_error, "line " + std::to_string(e.locus()), e.reason());
    }
  }
  return out;
}

inline ReadResult read_records(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_records(in);
}

// ---------------------------------------------------------------------------
// Building

struct BuildResult {
  LexicalGraph graph;
  ValidationReport report;
};

namespace detail {

inline std::string locus_of(const Record& r) { return "line " + std::to_string(r.locus); }

// Among duplicate declarations keep the one with the smallest canonical
// line, so the outcome does not depend on stream order.
template <typename Decl>
void prefer_canonical(Decl& kept, Decl candidate) {
  if (to_line(Record{candidate, 0}) < to_line(Record{kept, 0})) kept = std::move(candidate);
}

template <typename T>
struct Positioned {
  int position;
  Payload source;  // rendered only to break position ties
  T value;
};

template <typename T>
std::vector<T> settle(std::vector<Positioned<T>> items) {
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.position != b.position) return a.position < b.position;
    return to_line(Record{a.source, 0}) < to_line(Record{b.source, 0});
  });
  std::vector<T> out;
  out.reserve(items.size());
  for (auto& i : items) out.push_back(std::move(i.value));
  return out;
}

}  // namespace detail

/// Materializes a graph from a record stream. Declarations (lexemes, senses)
/// are resolved first and references second, so record order across kinds
/// does not matter. Bad references are dropped and reported; only a third
/// language tag aborts the build.
inline BuildResult build_graph(std::vector<Record> records) {
  BuildResult out;
  auto& report = out.report;

  // Phase 1: declarations.
  std::unordered_map<LexemeId, LexemeDecl> lexemes;
  std::set<std::string> tags;
  for (auto& rec : records) {
    if (auto* d = std::get_if<LexemeDecl>(&rec.payload)) {
      auto decl = std::move(*d);
      detail::normalize(decl.id);
      tags.insert(decl.id.lang.str());
      auto [it, inserted] = lexemes.try_emplace(decl.id);
      if (inserted) {
        it->second = std::move(decl);
      } else {
        report.add(issue::duplicate_id, detail::locus_of(rec), "lexeme " + decl.id.str() + " declared twice");
        detail::prefer_canonical(it->second, std::move(decl));
      }
    }
  }
  if (tags.size() > 2) {
    std::string all;
    for (const auto& t : tags) all += (all.empty() ? "" : ", ") + t;
    throw FatalFormat("more than two language tags: " + all);
  }

  // Everything hanging off one sense is gathered in its slot.
  struct SenseSlot {
    SenseDecl decl;
    std::vector<EquivDecl> edges;
    int max_rank = 0;
    std::vector<detail::Positioned<SynonymLink>> synonyms;
    std::vector<detail::Positioned<PhraseUnit>> phrases;
    std::vector<detail::Positioned<Citation>> citations;
    int max_syn = 0, max_phr = 0, max_cit = 0;
  };
  std::unordered_map<SenseId, SenseSlot> senses;
  for (auto& rec : records) {
    if (auto* d = std::get_if<SenseDecl>(&rec.payload)) {
      auto decl = std::move(*d);
      detail::normalize(decl.id);
      if (!lexemes.count(decl.id.lexeme)) {
        report.add(issue::dangling, detail::locus_of(rec), "lexeme " + decl.id.lexeme.str() + " not declared");
        continue;
      }
      auto [it, inserted] = senses.try_emplace(decl.id);
      if (inserted) {
        it->second.decl = std::move(decl);
      } else {
        report.add(issue::duplicate_id, detail::locus_of(rec), "sense " + decl.id.str() + " declared twice");
        detail::prefer_canonical(it->second.decl, std::move(decl));
      }
    }
  }

  // Phase 2: references.
  auto slot_of = [&](const SenseId& sense, const Record& rec) -> SenseSlot* {
    auto it = senses.find(sense);
    if (it != senses.end()) return &it->second;
    report.add(issue::dangling, detail::locus_of(rec), "sense " + sense.str() + " not declared");
    return nullptr;
  };
  auto next_position = [](const std::optional<int>& given, int& max) {
    const int n = given.value_or(max + 1);
    max = std::max(max, n);
    return n;
  };

  for (auto& rec : records) {
    std::visit(
        [&](auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, EquivDecl>) {
            auto decl = std::move(d);
            detail::normalize(decl.from);
            detail::normalize(decl.to);
            auto from = senses.find(decl.from);
            const bool to_known = senses.count(decl.to) > 0;
            if (from == senses.end() || !to_known) {
              report.add(issue::dangling, detail::locus_of(rec),
                         (from == senses.end() ? decl.from : decl.to).str() + " not declared");
              return;
            }
            if (decl.from.lang() == decl.to.lang()) {
              report.add(issue::same_language, detail::locus_of(rec), decl.from.str() + " -> " + decl.to.str());
              return;
            }
            auto& slot = from->second;
            decl.rank = next_position(decl.rank, slot.max_rank);
            for (auto& kept : slot.edges) {
              if (kept.to == decl.to) {
                report.add(issue::duplicate_edge, detail::locus_of(rec), decl.from.str() + " -> " + decl.to.str());
                detail::prefer_canonical(kept, std::move(decl));
                return;
              }
            }
            slot.edges.push_back(std::move(decl));
          } else if constexpr (std::is_same_v<T, SynonymDecl>) {
            auto decl = std::move(d);
            detail::normalize(decl.sense);
            detail::normalize(decl.target);
            auto* slot = slot_of(decl.sense, rec);
            if (!slot) return;
            if (!lexemes.count(decl.target)) {
              report.add(issue::dangling, detail::locus_of(rec), "lexeme " + decl.target.str() + " not declared");
              return;
            }
            if (decl.target.lang != decl.sense.lang()) {
              report.add(issue::cross_language_synonym, detail::locus_of(rec), decl.target.str());
              return;
            }
            const int n = next_position(decl.position, slot->max_syn);
            SynonymLink link{decl.target, decl.extra};
            slot->synonyms.push_back({n, std::move(decl), std::move(link)});
          } else if constexpr (std::is_same_v<T, PhraseDecl>) {
            auto decl = std::move(d);
            detail::normalize(decl.sense);
            auto* slot = slot_of(decl.sense, rec);
            if (!slot) return;
            const int n = next_position(decl.position, slot->max_phr);
            PhraseUnit unit{decl.text, decl.gloss, decl.extra};
            slot->phrases.push_back({n, std::move(decl), std::move(unit)});
          } else if constexpr (std::is_same_v<T, CitationDecl>) {
            auto decl = std::move(d);
            detail::normalize(decl.sense);
            auto* slot = slot_of(decl.sense, rec);
            if (!slot) return;
            const int n = next_position(decl.position, slot->max_cit);
            Citation cite{decl.quote, decl.source, decl.extra};
            slot->citations.push_back({n, std::move(decl), std::move(cite)});
          }
        },
        rec.payload);
  }

  // Assembly, in canonical order so reports come out in a stable order.
  std::vector<SenseSlot*> slots;
  slots.reserve(senses.size());
  for (auto& [id, slot] : senses) slots.push_back(&slot);
  std::sort(slots.begin(), slots.end(), [](const SenseSlot* a, const SenseSlot* b) { return a->decl.id < b->decl.id; });

  GraphParts parts;
  std::unordered_map<LexemeId, std::vector<SenseId>> senses_of;
  parts.senses.reserve(slots.size());
  for (auto* slot : slots) {
    auto& decl = slot->decl;
    senses_of[decl.id.lexeme].push_back(decl.id);
    Sense s;
    s.id = decl.id;
    s.gloss = decl.gloss;
    s.domain = std::move(decl.domain);
    s.extra = std::move(decl.extra);
    s.synonyms = detail::settle(std::move(slot->synonyms));
    s.phrases = detail::settle(std::move(slot->phrases));
    s.citations = detail::settle(std::move(slot->citations));
    parts.senses.push_back(std::move(s));
  }

  std::vector<LexemeDecl*> lexeme_decls;
  lexeme_decls.reserve(lexemes.size());
  for (auto& [id, decl] : lexemes) lexeme_decls.push_back(&decl);
  std::sort(lexeme_decls.begin(), lexeme_decls.end(),
            [](const LexemeDecl* a, const LexemeDecl* b) { return a->id < b->id; });
  parts.lexemes.reserve(lexeme_decls.size());
  for (auto* decl : lexeme_decls) {
    Lexeme lex;
    lex.id = decl->id;
    lex.extra = std::move(decl->extra);
    if (auto it = senses_of.find(lex.id); it != senses_of.end()) lex.senses = std::move(it->second);
    if (lex.senses.empty()) {
      report.add(issue::empty_lexeme, "lexeme " + lex.id.str(), "lexeme has no senses");
    } else if (lex.senses.size() > 1) {
      for (const auto& sid : lex.senses) {
        if (senses.at(sid).decl.gloss.empty()) {
          report.add(issue::missing_gloss, "sense " + sid.str(), "polysemous lexeme needs glosses");
        }
      }
    }
    parts.lexemes.push_back(std::move(lex));
  }

  // Ranks are made dense (1..k) in (rank, target) order; gaps and clashes
  // are reported.
  for (auto* slot : slots) {
    auto& list = slot->edges;
    std::sort(list.begin(), list.end(), [](const EquivDecl& a, const EquivDecl& b) {
      if (*a.rank != *b.rank) return *a.rank < *b.rank;
      return a.to < b.to;
    });
    bool dense = true;
    for (std::size_t i = 0; i < list.size(); ++i) dense = dense && *list[i].rank == static_cast<int>(i) + 1;
    if (!dense) {
      report.add(issue::rank_gap, "sense " + slot->decl.id.str(),
                 "ranks renumbered to 1.." + std::to_string(list.size()));
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto& d = list[i];
      parts.edges.push_back(
          EquivalenceEdge{std::move(d.from), std::move(d.to), static_cast<int>(i) + 1, std::move(d.note), std::move(d.extra)});
    }
  }

  out.graph = LexicalGraph::from_parts(std::move(parts));
  return out;
}

// ---------------------------------------------------------------------------
// Export

/// The graph as records in canonical order: lexemes by (lang, lemma,
/// homonym), senses, equivs by (from, rank), then synonyms, phrases and
/// citations by sense. Positions and ranks are always explicit.
inline std::vector<Record> export_graph(const LexicalGraph& graph) {
  std::vector<Record> out;
  for (const auto& lex : graph.lexemes()) out.push_back({LexemeDecl{lex.id, lex.extra}});
  for (const auto& s : graph.senses()) out.push_back({SenseDecl{s.id, s.gloss, s.domain, s.extra}});
  for (const auto& e : graph.edges()) out.push_back({EquivDecl{e.from, e.to, e.rank, e.note, e.extra}});
  for (const auto& s : graph.senses()) {
    for (std::size_t i = 0; i < s.synonyms.size(); ++i) {
      out.push_back({SynonymDecl{s.id, s.synonyms[i].target, static_cast<int>(i) + 1, s.synonyms[i].extra}});
    }
  }
  for (const auto& s : graph.senses()) {
    for (std::size_t i = 0; i < s.phrases.size(); ++i) {
      const auto& p = s.phrases[i];
      out.push_back({PhraseDecl{s.id, p.text, p.gloss, static_cast<int>(i) + 1, p.extra}});
    }
  }
  for (const auto& s : graph.senses()) {
    for (std::size_t i = 0; i < s.citations.size(); ++i) {
      const auto& c = s.citations[i];
      out.push_back({CitationDecl{s.id, c.quote, c.source, static_cast<int>(i) + 1, c.extra}});
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].locus = i + 1;
  return out;
}

inline void write_records(std::ostream& os, const std::vector<Record>& records) {
  for (const auto& r : records) os << to_line(r) << '\n';
}

// Same lines as write_records(export_graph(graph)) without the intermediate records.
inline std::string export_text(const LexicalGraph& graph) {
  std::string out;
  auto put = [&out](std::string line) {
    out += line;
    out += '\n';
  };
  for (const auto& lex : graph.lexemes()) put(detail::lexeme_line(lex.id, lex.extra));
  for (const auto& s : graph.senses()) put(detail::sense_line(s.id, s.gloss, s.domain, s.extra));
  for (const auto& e : graph.edges()) put(detail::equiv_line(e.from, e.to, e.rank, e.note, e.extra));
  for (const auto& s : graph.senses()) {
    for (std::size_t i = 0; i < s.synonyms.size(); ++i) {
      put(detail::synonym_line(s.id, s.synonyms[i].target, static_cast<int>(i) + 1, s.synonyms[i].extra));
    }
  }
  for (const auto& s : graph.senses()) {
    for (std::size_t i = 0; i < s.phrases.size(); ++i) {
      const auto& p = s.phrases[i];
      put(detail::phrase_line(s.id, p.text, p.gloss, static_cast<int>(i) + 1, p.extra));
    }
  }
  for (const auto& s : graph.senses()) {
    for (std::size_t i = 0; i < s.citations.size(); ++i) {
      const auto& c = s.citations[i];
      put(detail::citation_line(s.id, c.quote, c.source, static_cast<int>(i) + 1, c.extra));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

class IoError : public Error {
 public:
  using Error::Error;
};

/// Reads and builds a lexicon; parse errors are merged into the report.
inline BuildResult load_lexicon_text(std::string_view text) {
  auto read = read_records(text);
  auto built = build_graph(std::move(read.records));
  read.report.issues.insert(read.report.issues.end(), built.report.issues.begin(), built.report.issues.end());
  built.report = std::move(read.report);
  return built;
}

inline BuildResult load_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return load_lexicon_text(buf.str());
}

}  // namespace sedgraph
