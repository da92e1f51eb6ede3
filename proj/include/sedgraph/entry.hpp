#pragma once

// Entry assembly: a chain tree decorated with the data of both senses of
// every pair, at one of three redundancy profiles.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sedgraph/chain.hpp"
#include "sedgraph/classifier.hpp"
#include "sedgraph/errors.hpp"
#include "sedgraph/lexicon.hpp"

namespace sedgraph {

// minimal: pairs and lemmas; standard: + glosses and classes;
// full: + synonyms, phrases, citations and lacuna annotations.
enum class Profile { minimal, standard, full };

inline std::string_view to_string(Profile p) {
  switch (p) {
    case Profile::minimal: return "minimal";
    case Profile::standard: return "standard";
    case Profile::full: return "full";
  }
  return "standard";
}

inline std::optional<Profile> parse_profile(std::string_view s) {
  if (s == "minimal") return Profile::minimal;
  if (s == "standard") return Profile::standard;
  if (s == "full") return Profile::full;
  return std::nullopt;
}

struct SenseAttachments {
  std::vector<LexemeId> synonyms;
  std::vector<PhraseUnit> phrases;
  std::vector<Citation> citations;
};

struct EntrySense {
  SenseId id;
  std::optional<std::string> gloss;
  std::optional<SenseClassification> cls;
  std::optional<std::string> domain;
  std::optional<SenseAttachments> attachments;
};

struct EntryPair {
  NodePair pair;
  std::optional<PairClassification> cls;
  std::optional<std::string> gloss_source;
  std::optional<std::string> gloss_target;
  std::optional<SenseAttachments> source_attachments;
  std::optional<SenseAttachments> target_attachments;
};

struct Entry {
  std::string head;
  Profile profile = Profile::standard;
  std::vector<EntrySense> senses;
  std::vector<EntryPair> pairs;  // per head sense, linearized; sub-entries follow sense order
  std::vector<SenseId> truncated;
  std::map<CorrespondenceClass, std::size_t> excerpt;  // distinct edges per class (standard and up)
  std::optional<std::vector<SenseId>> lacunae;         // full only
};

namespace detail {

inline SenseAttachments attachments_of(const Sense& s) {
  SenseAttachments a;
  for (const auto& syn : s.synonyms) a.synonyms.push_back(syn.target);
  a.phrases = s.phrases;
  a.citations = s.citations;
  return a;
}

}  // namespace detail

/// Builds the entry for a sense id ("...#n") or a lexeme id. A lexeme head
/// yields one sub-entry per sense, in sense order.
inline Entry assemble(const LexicalGraph& graph, std::string_view head, const ExpansionConfig& config = {},
                      Profile profile = Profile::standard) {
  config.check();
  if (!is_valid_utf8(head)) throw UnknownHead("<malformed UTF-8>");
  const std::string key = to_nfc(head);
  std::vector<SenseId> heads;
  if (key.find('#') != std::string::npos) {
    auto id = SenseId::parse(key);
    if (!id || !graph.find_sense(*id)) throw UnknownHead(std::string(head));
    heads.push_back(*id);
  } else {
    auto id = LexemeId::parse(key);
    const Lexeme* lex = id ? graph.find_lexeme(*id) : nullptr;
    if (!lex) throw UnknownHead(std::string(head));
    for (const auto& s : lex->senses) {
      if (graph.find_sense(s)) heads.push_back(s);
    }
  }

  const bool standard = profile != Profile::minimal;
  const bool full = profile == Profile::full;

  Entry entry;
  entry.head = key;
  entry.profile = profile;
  std::set<SenseId> truncated;
  std::set<std::pair<SenseId, SenseId>> edges_seen;
  std::set<SenseId> lacunae;

  auto note_lacuna = [&](const SenseId& id) {
    if (full && graph.out_degree(id) == 0) lacunae.insert(id);
  };

  for (const auto& h : heads) {
    const auto& sense = *graph.find_sense(h);
    EntrySense es{h, {}, {}, {}, {}};
    if (standard) {
      es.gloss = sense.gloss;
      es.cls = classify_sense(graph, h);
    }
    if (full) {
      es.domain = sense.domain;
      es.attachments = detail::attachments_of(sense);
    }
    note_lacuna(h);
    entry.senses.push_back(std::move(es));

    const auto tree = expand(graph, h, config);
    truncated.insert(tree.truncated.begin(), tree.truncated.end());
    for (const auto& np : linearize(tree)) {
      EntryPair ep{np, {}, {}, {}, {}, {}};
      const auto& src = *graph.find_sense(np.source);
      const auto& dst = *graph.find_sense(np.target);
      if (standard) {
        ep.cls = classify_pair(graph, np.source, np.target);
        ep.gloss_source = src.gloss;
        ep.gloss_target = dst.gloss;
        if (edges_seen.emplace(np.source, np.target).second) ++entry.excerpt[ep.cls->cls];
      }
      if (full) {
        ep.source_attachments = detail::attachments_of(src);
        ep.target_attachments = detail::attachments_of(dst);
      }
      note_lacuna(np.target);
      entry.pairs.push_back(std::move(ep));
    }
  }
  entry.truncated.assign(truncated.begin(), truncated.end());
  if (full) entry.lacunae = std::vector<SenseId>(lacunae.begin(), lacunae.end());
  return entry;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline nlohmann::ordered_json attachment_json(const std::vector<LexemeId>& syns) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& s : syns) out.push_back(s.str());
  return out;
}

inline nlohmann::ordered_json attachment_json(const std::vector<PhraseUnit>& phrases) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& p : phrases) {
    nlohmann::ordered_json j;
    j["text"] = p.text;
    if (p.gloss) j["gloss"] = *p.gloss;
    out.push_back(std::move(j));
  }
  return out;
}

inline nlohmann::ordered_json attachment_json(const std::vector<Citation>& cites) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& c : cites) {
    nlohmann::ordered_json j;
    j["quote"] = c.quote;
    j["source"] = c.source;
    out.push_back(std::move(j));
  }
  return out;
}

template <typename Member>
nlohmann::ordered_json both_sides(const SenseAttachments& src, const SenseAttachments& dst, Member m) {
  nlohmann::ordered_json j;
  j["source"] = attachment_json(src.*m);
  j["target"] = attachment_json(dst.*m);
  return j;
}

inline nlohmann::ordered_json ids_json(const std::vector<SenseId>& ids) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& s : ids) out.push_back(s.str());
  return out;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const PairClassification& c) {
  nlohmann::ordered_json j;
  j["primary"] = std::string(to_string(c.cls));
  if (auto tag = c.fan_class()) {
    j["fan"] = std::string(to_string(*tag));
  } else {
    j["fan"] = nullptr;
  }
  j["reciprocal"] = c.reciprocal;
  return j;
}

inline nlohmann::ordered_json to_json(const Entry& entry) {
  nlohmann::ordered_json j;
  j["head"] = entry.head;

  auto senses = nlohmann::ordered_json::array();
  for (const auto& s : entry.senses) {
    nlohmann::ordered_json js;
    js["id"] = s.id.str();
    if (s.gloss) js["gloss"] = *s.gloss;
    if (s.cls) js["class"] = s.cls->summary();
    if (s.domain) js["domain"] = *s.domain;
    if (s.attachments) {
      js["synonyms"] = detail::attachment_json(s.attachments->synonyms);
      js["phrases"] = detail::attachment_json(s.attachments->phrases);
      js["citations"] = detail::attachment_json(s.attachments->citations);
    }
    senses.push_back(std::move(js));
  }
  j["senses"] = std::move(senses);

  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : entry.pairs) {
    nlohmann::ordered_json jp;
    jp["source"] = p.pair.source.str();
    jp["target"] = p.pair.target.str();
    jp["rank"] = p.pair.edge_rank;
    jp["depth"] = p.pair.depth;
    jp["closure"] = p.pair.closure;
    if (p.cls) jp["class"] = to_json(*p.cls);
    if (p.gloss_source) jp["gloss_source"] = *p.gloss_source;
    if (p.gloss_target) jp["gloss_target"] = *p.gloss_target;
    if (p.source_attachments && p.target_attachments) {
      const auto& a = *p.source_attachments;
      const auto& b = *p.target_attachments;
      jp["synonyms"] = detail::both_sides(a, b, &SenseAttachments::synonyms);
      jp["phrases"] = detail::both_sides(a, b, &SenseAttachments::phrases);
      jp["citations"] = detail::both_sides(a, b, &SenseAttachments::citations);
    }
    pairs.push_back(std::move(jp));
  }
  j["pairs"] = std::move(pairs);
  j["truncated"] = detail::ids_json(entry.truncated);

  nlohmann::ordered_json excerpt = nlohmann::ordered_json::object();
  if (entry.profile != Profile::minimal) {
    nlohmann::ordered_json classes = nlohmann::ordered_json::object();
    for (const auto& [cls, n] : entry.excerpt) classes[std::string(to_string(cls))] = n;
    excerpt["classes"] = std::move(classes);
  }
  if (entry.lacunae) excerpt["lacunae"] = detail::ids_json(*entry.lacunae);
  j["catalog_excerpt"] = std::move(excerpt);
  return j;
}

inline std::string serialize(const Entry& entry) { return to_json(entry).dump(-1, ' ', false); }

inline nlohmann::ordered_json to_json(const CorrespondenceCatalog& cat) {
  nlohmann::ordered_json j;
  j["total_pairs"] = cat.total_pairs;
  j["total_senses"] = cat.total_senses;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (auto c : kPairClasses) counts[std::string(to_string(c))] = cat.count(c);
  counts["LACUNA"] = cat.lacuna_count();
  j["counts"] = std::move(counts);
  nlohmann::ordered_json fans = nlohmann::ordered_json::object();
  for (auto c : {CorrespondenceClass::divergent, CorrespondenceClass::convergent, CorrespondenceClass::many_to_many}) {
    auto it = cat.fan_counts.find(c);
    fans[std::string(to_string(c))] = it == cat.fan_counts.end() ? 0 : it->second;
  }
  j["fan_tags"] = std::move(fans);
  nlohmann::ordered_json lac = nlohmann::ordered_json::object();
  for (const auto& [lang, list] : cat.lacunae) lac[lang] = detail::ids_json(list);
  j["lacunae"] = std::move(lac);
  nlohmann::ordered_json ex = nlohmann::ordered_json::object();
  for (auto c : kPairClasses) {
    auto arr = nlohmann::ordered_json::array();
    if (auto it = cat.exemplars.find(c); it != cat.exemplars.end()) {
      for (const auto& p : it->second) arr.push_back({{"from", p.from.str()}, {"to", p.to.str()}});
    }
    ex[std::string(to_string(c))] = std::move(arr);
  }
  j["exemplars"] = std::move(ex);
  return j;
}

// ---------------------------------------------------------------------------
// Plain-text rendering

namespace detail {

inline std::string join(const std::vector<std::string>& items, std::string_view sep) {
  if (items.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

inline std::string quoted(const std::string& s) { return "«" + s + "»"; }

template <typename T, typename F>
std::vector<std::string> map_all(const std::vector<T>& xs, F f) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(f(x));
  return out;
}

inline void render_attachments(std::ostringstream& os, const SenseAttachments& a, const SenseAttachments& b) {
  auto lemma = [](const LexemeId& id) { return id.lemma; };
  auto phrase = [](const PhraseUnit& p) { return p.gloss ? p.text + " (" + *p.gloss + ")" : p.text; };
  auto cite = [](const Citation& c) { return quoted(c.quote) + " — " + c.source; };
  if (!a.synonyms.empty() || !b.synonyms.empty()) {
    os << " | syn: " << join(map_all(a.synonyms, lemma), ", ") << " ≡ " << join(map_all(b.synonyms, lemma), ", ");
  }
  if (!a.phrases.empty() || !b.phrases.empty()) {
    os << " | phr: " << join(map_all(a.phrases, phrase), "; ") << " ≡ " << join(map_all(b.phrases, phrase), "; ");
  }
  if (!a.citations.empty() || !b.citations.empty()) {
    os << " | cit: " << join(map_all(a.citations, cite), "; ") << " ≡ " << join(map_all(b.citations, cite), "; ");
  }
}

}  // namespace detail

/// One header line, then one line per pair indented by depth:
/// "source ≡ target", closures marked "↩", lacunar targets "∅", cut
/// expansions "…".
inline std::string render_text(const Entry& entry) {
  std::ostringstream os;
  os << entry.head << '\n';
  std::set<SenseId> lacunae;
  if (entry.lacunae) lacunae.insert(entry.lacunae->begin(), entry.lacunae->end());
  const std::set<SenseId> truncated(entry.truncated.begin(), entry.truncated.end());

  for (const auto& p : entry.pairs) {
    os << std::string(2 * static_cast<std::size_t>(p.pair.depth - 1), ' ');
    os << p.pair.source.lexeme.lemma << " ≡ " << p.pair.target.lexeme.lemma;
    if (p.pair.closure) os << " ↩";
    if (lacunae.count(p.pair.target)) os << " ∅";
    if (!p.pair.closure && truncated.count(p.pair.target)) os << " …";
    if (p.cls) {
      os << "  [" << to_string(p.cls->cls);
      if (auto tag = p.cls->fan_class(); tag && *tag != p.cls->cls) os << '/' << to_string(*tag);
      os << ']';
    }
    if (p.gloss_source && p.gloss_target && (!p.gloss_source->empty() || !p.gloss_target->empty())) {
      os << "  " << detail::quoted(*p.gloss_source) << " ≡ " << detail::quoted(*p.gloss_target);
    }
    if (p.source_attachments && p.target_attachments) {
      detail::render_attachments(os, *p.source_attachments, *p.target_attachments);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace sedgraph
