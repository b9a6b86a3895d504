#include "scenekg/ntriples.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "scenekg/geometry.hpp"

namespace scenekg {
namespace {

constexpr std::string_view kNodePrefix = "urn:nskg:";
constexpr std::string_view kClassPrefix = "urn:nskg:class:";
constexpr std::string_view kPropPrefix = "urn:nskg:prop:";

bool unreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' ||
         c == '_' || c == '~';
}

std::string pct_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (unreserved(c)) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string literal(const AttrValue& v) {
  struct Visitor {
    std::string operator()(std::int64_t i) const {
      return "\"" + std::to_string(i) + "\"^^<" + std::string(kXsd) + "integer>";
    }
    std::string operator()(double d) const {
      return "\"" + geom::format_number(d) + "\"^^<" + std::string(kXsd) + "double>";
    }
    std::string operator()(bool b) const {
      return std::string("\"") + (b ? "true" : "false") + "\"^^<" + std::string(kXsd) + "boolean>";
    }
    std::string operator()(const std::string& s) const { return "\"" + escape_literal(s) + "\""; }
    std::string operator()(const WktLiteral& w) const {
      return "\"" + escape_literal(w.text) + "\"^^<" + std::string(kWktLiteral) + ">";
    }
  };
  return std::visit(Visitor{}, v);
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_no_, pos_ + 1, ""); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::string iri() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected '<'");
    const std::size_t end = s_.find('>', pos_);
    if (end == std::string_view::npos) fail("unterminated IRI");
    std::string out(s_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return out;
  }

  bool at_literal() {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == '"';
  }

  // Returns (lexical form, datatype IRI or empty).
  std::pair<std::string, std::string> literal_term() {
    skip_ws();
    ++pos_;
    std::string value;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated literal");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        value += c;
        continue;
      }
      if (pos_ >= s_.size()) fail("dangling escape");
      const char e = s_[pos_++];
      switch (e) {
        case '\\': value += '\\'; break;
        case '"': value += '"'; break;
        case 'n': value += '\n'; break;
        case 'r': value += '\r'; break;
        case 't': value += '\t'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    std::string datatype;
    if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      datatype = iri();
    }
    return {value, datatype};
  }

  void end() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected ' .' terminator");
    ++pos_;
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after triple");
  }

 private:
  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

struct ParsedTriple {
  std::string subject;
  std::string predicate;
  bool object_is_iri;
  std::string object;
  std::string datatype;
  std::size_t line;
};

std::pair<NodeType, std::string> decode_node_iri(const std::string& iri, std::size_t line) {
  if (!iri.starts_with(kNodePrefix) || iri.starts_with(kClassPrefix) || iri.starts_with(kPropPrefix)) {
    throw ParseError("not a node IRI: " + iri, line, 0, "");
  }
  const std::string_view rest = std::string_view(iri).substr(kNodePrefix.size());
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) throw ParseError("node IRI lacks a type: " + iri, line, 0, "");
  const auto type = node_type_from_string(rest.substr(0, colon));
  if (!type) throw ParseError("unknown node type in IRI: " + iri, line, 0, "");
  const std::string_view enc = rest.substr(colon + 1);
  std::string id;
  for (std::size_t i = 0; i < enc.size(); ++i) {
    if (enc[i] != '%') {
      id += enc[i];
      continue;
    }
    if (i + 2 >= enc.size() || hex_value(enc[i + 1]) < 0 || hex_value(enc[i + 2]) < 0) {
      throw ParseError("bad percent escape in " + iri, line, 0, "");
    }
    id += static_cast<char>(hex_value(enc[i + 1]) * 16 + hex_value(enc[i + 2]));
    i += 2;
  }
  return {*type, id};
}

AttrValue decode_literal(const ParsedTriple& t) {
  auto bad = [&]() -> AttrValue { throw ParseError("malformed literal \"" + t.object + "\"", t.line, 0, ""); };
  if (t.datatype.empty()) return t.object;
  if (t.datatype == kWktLiteral) return WktLiteral{t.object};
  const std::string_view s = t.object;
  if (t.datatype == std::string(kXsd) + "integer") {
    std::int64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return bad();
    return v;
  }
  if (t.datatype == std::string(kXsd) + "double") {
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return bad();
    return v;
  }
  if (t.datatype == std::string(kXsd) + "boolean") {
    if (s == "true") return true;
    if (s == "false") return false;
    return bad();
  }
  throw ParseError("unsupported datatype <" + t.datatype + ">", t.line, 0, "");
}

}  // namespace

std::string node_iri(NodeType type, std::string_view id) {
  return std::string(kNodePrefix) + std::string(to_string(type)) + ":" + pct_encode(id);
}

std::string class_iri(NodeType type) { return std::string(kClassPrefix) + std::string(to_string(type)); }

std::string property_iri(std::string_view name) { return std::string(kPropPrefix) + std::string(name); }

std::size_t export_ntriples(const KnowledgeGraph& g, std::ostream& sink) {
  using Triple = std::tuple<std::string, std::string, std::string>;
  std::vector<Triple> triples;
  triples.reserve(g.node_count() * 3 + g.edge_count());
  std::vector<std::string> subjects;
  subjects.reserve(g.node_count());
  const std::string type_pred = "<" + std::string(kRdfType) + ">";
  for (const Node& n : g.nodes()) {
    subjects.push_back("<" + node_iri(n.type, n.id) + ">");
    triples.emplace_back(subjects.back(), type_pred, "<" + class_iri(n.type) + ">");
    for (const auto& [name, value] : n.attrs) {
      triples.emplace_back(subjects.back(), "<" + property_iri(name) + ">", literal(value));
    }
  }
  for (const Edge& e : g.edges()) {
    triples.emplace_back(subjects[e.src], "<" + property_iri(to_string(e.type)) + ">", subjects[e.dst]);
  }
  std::sort(triples.begin(), triples.end());
  for (const auto& [s, p, o] : triples) {
    sink << s << ' ' << p << ' ' << o << " .\n";
  }
  if (!sink) throw std::runtime_error("failed writing N-Triples");
  return triples.size();
}

std::string to_ntriples(const KnowledgeGraph& g) {
  std::ostringstream out;
  export_ntriples(g, out);
  return out.str();
}

KnowledgeGraph parse_ntriples(std::string_view text) {
  std::vector<ParsedTriple> triples;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') continue;
    LineParser p(line, line_no);
    ParsedTriple t;
    t.line = line_no;
    t.subject = p.iri();
    t.predicate = p.iri();
    if (p.at_literal()) {
      t.object_is_iri = false;
      std::tie(t.object, t.datatype) = p.literal_term();
    } else {
      t.object_is_iri = true;
      t.object = p.iri();
    }
    p.end();
    triples.push_back(std::move(t));
  }

  KnowledgeGraph g;
  std::unordered_map<std::string, NodeIndex> by_iri;
  for (const auto& t : triples) {
    if (t.predicate != kRdfType) continue;
    if (!t.object_is_iri || !t.object.starts_with(kClassPrefix)) {
      throw ParseError("rdf:type object must be a class IRI", t.line, 0, "");
    }
    const auto cls = node_type_from_string(std::string_view(t.object).substr(kClassPrefix.size()));
    const auto [type, id] = decode_node_iri(t.subject, t.line);
    if (!cls || *cls != type) throw ParseError("rdf:type disagrees with subject IRI", t.line, 0, "");
    if (by_iri.count(t.subject)) throw ParseError("node typed twice: " + t.subject, t.line, 0, "");
    by_iri[t.subject] = g.add_node(type, id);
  }
  auto lookup = [&](const std::string& iri, std::size_t line) {
    const auto it = by_iri.find(iri);
    if (it == by_iri.end()) throw ParseError("untyped node " + iri, line, 0, "");
    return it->second;
  };
  for (const auto& t : triples) {
    if (t.predicate == kRdfType) continue;
    if (!t.predicate.starts_with(kPropPrefix)) throw ParseError("unknown predicate <" + t.predicate + ">", t.line, 0, "");
    const std::string name = t.predicate.substr(kPropPrefix.size());
    const NodeIndex s = lookup(t.subject, t.line);
    if (!t.object_is_iri) {
      g.set_attr(s, name, decode_literal(t));
      continue;
    }
    const auto edge = edge_type_from_string(name);
    if (!edge) throw ParseError("unknown edge type " + name, t.line, 0, "");
    try {
      g.add_edge(*edge, s, lookup(t.object, t.line));
    } catch (const GraphError& e) {
      throw ParseError(e.what(), t.line, 0, "");
    }
  }
  return g;
}

}  // namespace scenekg
