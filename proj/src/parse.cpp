#include "cqa/parse.hpp"

#include <cctype>
#include <set>

namespace cqa {

namespace {

bool is_word_char(char c) {
  if (std::isspace(static_cast<unsigned char>(c))) return false;
  switch (c) {
    case '(': case ')': case '/': case ',': case ';': case '&': case '#':
      return false;
    default:
      return true;
  }
}

class Cursor {
 public:
  Cursor(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string word(const char* what) {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }
  [[noreturn]] void fail(const std::string& message) {
    std::string near = pos_ < text_.size() ? " near '" + std::string(text_.substr(pos_, 12)) + "'"
                                           : " at end of input";
    throw ParseError(line_, message + near);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

struct SplitTerms {
  std::vector<std::string> key;
  std::vector<std::string> value;
  bool has_separator = false;
};

// `( a, b ; c )` with the leading name already consumed.
SplitTerms parse_terms(Cursor& cur, const char* what) {
  SplitTerms out;
  cur.expect('(');
  std::vector<std::string>* side = &out.key;
  if (cur.accept(';')) {
    out.has_separator = true;
    side = &out.value;
  }
  if (cur.accept(')')) {
    if (!out.has_separator) cur.fail("empty argument list");
    cur.fail("missing terms after ';'");
  }
  while (true) {
    side->push_back(cur.word(what));
    if (cur.accept(',')) continue;
    if (cur.accept(';')) {
      if (out.has_separator) cur.fail("second ';' in argument list");
      out.has_separator = true;
      side = &out.value;
      continue;
    }
    cur.expect(')');
    break;
  }
  if (out.has_separator && out.value.empty()) cur.fail("missing terms after ';'");
  return out;
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

}  // namespace

Database parse_database(std::string_view text, std::vector<std::string>* warnings) {
  Schema schema;
  std::vector<Fact> facts;
  std::set<Fact> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = strip_comment(text.substr(start, end - start));
    ++line_no;
    start = end + 1;

    Cursor cur(line, line_no);
    if (cur.at_end()) continue;
    std::string name = cur.word("relation name");
    if (cur.accept('/')) {
      std::string arity_text = cur.word("arity");
      int arity = 0;
      try {
        std::size_t used = 0;
        arity = std::stoi(arity_text, &used);
        if (used != arity_text.size()) throw std::invalid_argument(arity_text);
      } catch (const std::exception&) {
        cur.fail("arity must be an integer");
      }
      if (cur.word("'key'") != "key") cur.fail("expected 'key'");
      RelationSchema rel{name, arity, {}};
      if (!cur.at_end()) {
        do {
          std::string p = cur.word("key position");
          try {
            std::size_t used = 0;
            rel.key_positions.push_back(std::stoi(p, &used));
            if (used != p.size()) throw std::invalid_argument(p);
          } catch (const std::exception&) {
            cur.fail("key position must be an integer");
          }
        } while (cur.accept(','));
      }
      if (!cur.at_end()) cur.fail("unexpected trailing text");
      try {
        schema.add(std::move(rel));
      } catch (const SchemaError& e) {
        throw ParseError(line_no, e.what());
      }
      continue;
    }

    SplitTerms terms = parse_terms(cur, "constant");
    if (!cur.at_end()) cur.fail("unexpected trailing text");
    const RelationSchema* rel = schema.find(name);
    if (rel == nullptr) throw ParseError(line_no, "relation " + name + " used before declaration");
    int arity = static_cast<int>(terms.key.size() + terms.value.size());
    if (arity != rel->arity) {
      throw ParseError(line_no, "arity mismatch: " + name + " has arity " +
                                    std::to_string(rel->arity) + ", got " + std::to_string(arity));
    }
    if (static_cast<int>(terms.key.size()) != rel->key_size()) {
      throw ParseError(line_no, "inconsistent key split: " + name + " has " +
                                    std::to_string(rel->key_size()) + " key positions, got " +
                                    std::to_string(terms.key.size()) + " before ';'");
    }
    Fact fact{name, std::move(terms.key), std::move(terms.value)};
    if (!seen.insert(fact).second) {
      if (warnings != nullptr) {
        warnings->push_back("line " + std::to_string(line_no) + ": duplicate fact " +
                            to_string(fact) + " merged");
      }
      continue;
    }
    facts.push_back(std::move(fact));
  }
  return Database(std::move(schema), std::move(facts));
}

ConjunctiveQuery parse_query(std::string_view text) {
  std::vector<Atom> atoms;
  std::string flat;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    flat += strip_comment(text.substr(start, end - start));
    flat += ' ';
    start = end + 1;
  }

  Cursor cur(flat, 1);
  if (cur.at_end()) throw ParseError(1, "empty query");
  while (true) {
    std::string name = cur.word("relation name");
    SplitTerms terms = parse_terms(cur, "variable");
    atoms.push_back(Atom{std::move(name), std::move(terms.key), std::move(terms.value)});
    if (cur.at_end()) break;
    if (!cur.accept('&')) cur.fail("expected '&' between atoms");
  }
  try {
    return ConjunctiveQuery(std::move(atoms));
  } catch (const QueryShapeError& e) {
    throw ParseError(1, e.what());
  }
}

std::string render_database(const Database& db) {
  std::string out;
  for (const auto& [name, rel] : db.schema().relations()) {
    out += name + "/" + std::to_string(rel.arity) + " key";
    for (std::size_t i = 0; i < rel.key_positions.size(); ++i) {
      out += i == 0 ? " " : ",";
      out += std::to_string(rel.key_positions[i]);
    }
    out += "\n";
  }
  for (const Fact& f : db.facts()) out += to_string(f) + "\n";
  return out;
}

std::string render_query(const ConjunctiveQuery& q) { return to_string(q); }

}  // namespace cqa
