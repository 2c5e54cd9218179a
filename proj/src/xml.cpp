/*
 * Copyright 2026 The Auth Shim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "authshim/xml.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace authshim::xml {

namespace {

constexpr std::string_view kXmlNsUri = "http://www.w3.org/XML/1998/namespace";

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '.' || c == '-';
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool contains_doctype(std::string_view s) {
  static constexpr std::string_view kNeedle = "<!DOCTYPE";
  if (s.size() < kNeedle.size()) return false;
  for (std::size_t i = 0; i + kNeedle.size() <= s.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < kNeedle.size(); ++j) {
      char a = s[i + j];
      char b = kNeedle[j];
      if (a >= 'a' && a <= 'z') a = static_cast<char>(a - 'a' + 'A');
      if (a != b) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

struct Binding {
  std::string prefix;
  std::string uri;
};

class Parser {
 public:
  Parser(std::string_view input, const ParserPolicy& policy)
      : policy_(policy) {
    // XML line-end normalization; character references are exempt because
    // they are expanded after this pass.
    normalized_.reserve(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
      if (input[i] == '\r') {
        normalized_ += '\n';
        if (i + 1 < input.size() && input[i + 1] == '\n') ++i;
      } else {
        normalized_ += input[i];
      }
    }
    s_ = normalized_;
  }

  Result<Document, Error> run() {
    skip_misc();
    if (failed_) return take_error();
    if (eof() || peek() != '<') return fail("no root element");
    Document doc;
    doc.root = parse_element(1);
    if (failed_) return take_error();
    skip_misc();
    if (failed_) return take_error();
    if (!eof()) return fail("content after root element");
    return doc;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  bool starts_with(std::string_view t) const {
    return s_.compare(pos_, t.size(), t) == 0;
  }

  Result<Document, Error> fail(std::string detail) {
    failed_ = true;
    error_ = Error{ErrorKind::Malformed, std::move(detail)};
    return take_error();
  }

  Result<Document, Error> take_error() { return error_; }

  void set_fail(std::string detail) {
    if (!failed_) {
      failed_ = true;
      error_ = Error{ErrorKind::Malformed, std::move(detail)};
    }
  }

  void skip_ws() {
    while (!eof() && is_ws(peek())) ++pos_;
  }

  // Whitespace, XML declaration, comments, PIs outside the root element.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        skip_pi();
      } else if (starts_with("<!--")) {
        skip_comment();
      } else {
        return;
      }
      if (failed_) return;
    }
  }

  void skip_pi() {
    const auto end = s_.find("?>", pos_);
    if (end == std::string_view::npos) {
      set_fail("unterminated processing instruction");
      return;
    }
    pos_ = end + 2;
  }

  void skip_comment() {
    const auto end = s_.find("-->", pos_ + 4);
    if (end == std::string_view::npos) {
      set_fail("unterminated comment");
      return;
    }
    pos_ = end + 3;
  }

  std::string read_qname() {
    if (eof() || !(is_name_start(peek()) || peek() == ':')) {
      set_fail("expected name");
      return {};
    }
    const std::size_t start = pos_;
    while (!eof() && (is_name_char(peek()) || peek() == ':')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  bool split_qname(const std::string& qname, std::string& prefix,
                   std::string& local) {
    const auto colon = qname.find(':');
    if (colon == std::string::npos) {
      prefix.clear();
      local = qname;
    } else {
      prefix = qname.substr(0, colon);
      local = qname.substr(colon + 1);
      if (prefix.empty() || local.empty() ||
          local.find(':') != std::string::npos) {
        set_fail("bad qualified name: " + qname);
        return false;
      }
    }
    return !local.empty();
  }

  // Expands one entity; pos_ points at the first character after '&'.
  void expand_entity(std::string& out, bool in_attr) {
    const auto semi = s_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) {
      set_fail("unterminated entity reference");
      return;
    }
    const std::string_view ent = s_.substr(pos_, semi - pos_);
    pos_ = semi + 1;
    if (ent == "amp") {
      out += '&';
    } else if (ent == "lt") {
      out += '<';
    } else if (ent == "gt") {
      out += '>';
    } else if (ent == "quot") {
      out += '"';
    } else if (ent == "apos") {
      out += '\'';
    } else if (!ent.empty() && ent[0] == '#') {
      unsigned long cp = 0;
      bool ok = false;
      if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
        for (std::size_t i = 2; i < ent.size(); ++i) {
          char c = ent[i];
          int v;
          if (c >= '0' && c <= '9') v = c - '0';
          else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
          else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
          else { ok = false; break; }
          cp = cp * 16 + static_cast<unsigned long>(v);
          ok = true;
        }
      } else {
        for (std::size_t i = 1; i < ent.size(); ++i) {
          char c = ent[i];
          if (c < '0' || c > '9') { ok = false; break; }
          cp = cp * 10 + static_cast<unsigned long>(c - '0');
          ok = true;
        }
      }
      if (!ok || cp == 0 || cp > 0x10FFFF) {
        set_fail("bad character reference");
        return;
      }
      append_utf8(out, cp);
    } else {
      // No DTD means no entity definitions can exist; anything else is
      // an attempted custom entity.
      set_fail("undefined entity: &" + std::string(ent) + ";");
    }
    (void)in_attr;
  }

  std::string read_attr_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) {
      set_fail("expected quoted attribute value");
      return {};
    }
    const char quote = peek();
    ++pos_;
    std::string out;
    while (!eof() && peek() != quote) {
      const char c = peek();
      if (c == '<') {
        set_fail("'<' in attribute value");
        return {};
      }
      if (c == '&') {
        ++pos_;
        expand_entity(out, true);
        if (failed_) return {};
      } else if (c == '\t' || c == '\n') {
        // Attribute-value normalization: literal whitespace becomes a
        // space; character references above stay literal.
        out += ' ';
        ++pos_;
      } else {
        out += c;
        ++pos_;
      }
    }
    if (eof()) {
      set_fail("unterminated attribute value");
      return {};
    }
    ++pos_;  // closing quote
    return out;
  }

  std::string resolve_prefix(const std::string& prefix, bool for_attr) {
    if (prefix == "xml") return std::string(kXmlNsUri);
    if (prefix.empty() && for_attr) return "";  // unprefixed attr: no ns
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
      if (it->prefix == prefix) return it->uri;
    }
    if (!prefix.empty()) {
      set_fail("unbound namespace prefix: " + prefix);
    }
    return "";
  }

  std::unique_ptr<Element> parse_element(int depth) {
    if (depth > policy_.max_element_depth) {
      set_fail("element depth exceeds policy limit");
      return nullptr;
    }
    ++pos_;  // '<'
    const std::string qname = read_qname();
    if (failed_) return nullptr;

    struct RawAttr {
      std::string prefix, local, value;
    };
    std::vector<RawAttr> raw_attrs;
    const std::size_t binding_mark = bindings_.size();

    bool self_closing = false;
    for (;;) {
      const std::size_t before = pos_;
      skip_ws();
      if (eof()) {
        set_fail("unterminated start tag");
        return nullptr;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (starts_with("/>")) {
        pos_ += 2;
        self_closing = true;
        break;
      }
      if (pos_ == before) {
        set_fail("expected whitespace before attribute");
        return nullptr;
      }
      const std::string aqname = read_qname();
      if (failed_) return nullptr;
      skip_ws();
      if (eof() || peek() != '=') {
        set_fail("expected '=' after attribute name");
        return nullptr;
      }
      ++pos_;
      skip_ws();
      const std::string value = read_attr_value();
      if (failed_) return nullptr;

      if (aqname == "xmlns") {
        bindings_.push_back({"", value});
      } else if (aqname.rfind("xmlns:", 0) == 0) {
        const std::string p = aqname.substr(6);
        if (p.empty() || value.empty()) {
          // Undeclaring a prefix is not allowed in XML 1.0.
          set_fail("bad namespace declaration: " + aqname);
          return nullptr;
        }
        bindings_.push_back({p, value});
      } else {
        RawAttr ra;
        if (!split_qname(aqname, ra.prefix, ra.local)) return nullptr;
        ra.value = value;
        raw_attrs.push_back(std::move(ra));
      }
    }

    auto elem = std::make_unique<Element>();
    std::string eprefix, elocal;
    if (!split_qname(qname, eprefix, elocal)) return nullptr;
    elem->name.prefix = eprefix;
    elem->name.local = elocal;
    elem->name.ns_uri = resolve_prefix(eprefix, false);
    if (failed_) return nullptr;

    for (auto& ra : raw_attrs) {
      Attr a;
      a.name.prefix = ra.prefix;
      a.name.local = ra.local;
      a.name.ns_uri = resolve_prefix(ra.prefix, true);
      if (failed_) return nullptr;
      a.value = std::move(ra.value);
      for (const auto& existing : elem->attrs) {
        if (existing.name.ns_uri == a.name.ns_uri &&
            existing.name.local == a.name.local) {
          set_fail("duplicate attribute: " + a.name.local);
          return nullptr;
        }
      }
      elem->attrs.push_back(std::move(a));
    }

    if (!self_closing) {
      if (!parse_content(*elem, qname, depth)) return nullptr;
    }

    bindings_.resize(binding_mark);
    return elem;
  }

  bool parse_content(Element& elem, const std::string& open_qname, int depth) {
    std::string text;
    auto flush_text = [&]() {
      if (!text.empty()) {
        Node n;
        n.text = std::move(text);
        text.clear();
        elem.children.push_back(std::move(n));
      }
    };
    for (;;) {
      if (eof()) {
        set_fail("unterminated element: " + open_qname);
        return false;
      }
      const char c = peek();
      if (c == '<') {
        if (starts_with("</")) {
          flush_text();
          pos_ += 2;
          const std::string close = read_qname();
          if (failed_) return false;
          skip_ws();
          if (eof() || peek() != '>') {
            set_fail("malformed end tag");
            return false;
          }
          ++pos_;
          if (close != open_qname) {
            set_fail("mismatched end tag: " + close + " for " + open_qname);
            return false;
          }
          return true;
        }
        if (starts_with("<!--")) {
          flush_text();
          skip_comment();
          if (failed_) return false;
          continue;
        }
        if (starts_with("<![CDATA[")) {
          const auto end = s_.find("]]>", pos_ + 9);
          if (end == std::string_view::npos) {
            set_fail("unterminated CDATA section");
            return false;
          }
          text.append(s_.substr(pos_ + 9, end - pos_ - 9));
          pos_ = end + 3;
          continue;
        }
        if (starts_with("<?")) {
          flush_text();
          skip_pi();
          if (failed_) return false;
          continue;
        }
        if (starts_with("<!")) {
          set_fail("unexpected markup declaration");
          return false;
        }
        flush_text();
        Node n;
        n.elem = parse_element(depth + 1);
        if (failed_) return false;
        elem.children.push_back(std::move(n));
      } else if (c == '&') {
        ++pos_;
        expand_entity(text, false);
        if (failed_) return false;
      } else {
        text += c;
        ++pos_;
      }
    }
  }

  ParserPolicy policy_;
  std::string normalized_;
  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<Binding> bindings_;
  bool failed_ = false;
  Error error_{ErrorKind::Malformed, ""};
};

void escape_text(std::string_view in, std::string& out) {
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#xD;"; break;
      default: out += c;
    }
  }
}

void escape_attr(std::string_view in, std::string& out) {
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#x9;"; break;
      case '\n': out += "&#xA;"; break;
      case '\r': out += "&#xD;"; break;
      default: out += c;
    }
  }
}

bool whitespace_only(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return is_ws(c); });
}

class Writer {
 public:
  explicit Writer(bool keep_signature) : keep_signature_(keep_signature) {}

  std::string run(const Element& root) {
    write(root);
    return std::move(out_);
  }

 private:
  std::string lookup(const std::string& prefix) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->prefix == prefix) return it->uri;
    }
    return "";
  }

  static std::string qname(const Name& n) {
    return n.prefix.empty() ? n.local : n.prefix + ":" + n.local;
  }

  void write(const Element& e) {
    if (!keep_signature_ && e.name.local == "Signature") return;

    // Namespace declarations this element needs that are not in scope yet.
    std::map<std::string, std::string> needed;
    needed[e.name.prefix] = e.name.ns_uri;
    for (const auto& a : e.attrs) {
      if (!a.name.prefix.empty() && a.name.prefix != "xml") {
        needed[a.name.prefix] = a.name.ns_uri;
      }
    }
    std::vector<Binding> decls;
    for (const auto& [prefix, uri] : needed) {
      if (prefix == "xml") continue;
      if (lookup(prefix) != uri) decls.push_back({prefix, uri});
    }
    const std::size_t mark = scope_.size();
    for (const auto& d : decls) scope_.push_back(d);

    out_ += '<';
    out_ += qname(e.name);
    for (const auto& d : decls) {  // already sorted by prefix via std::map
      out_ += d.prefix.empty() ? " xmlns=\"" : " xmlns:" + d.prefix + "=\"";
      escape_attr(d.uri, out_);
      out_ += '"';
    }
    std::vector<const Attr*> sorted;
    sorted.reserve(e.attrs.size());
    for (const auto& a : e.attrs) sorted.push_back(&a);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Attr* a, const Attr* b) {
                       if (a->name.ns_uri != b->name.ns_uri) {
                         return a->name.ns_uri < b->name.ns_uri;
                       }
                       return a->name.local < b->name.local;
                     });
    for (const Attr* a : sorted) {
      out_ += ' ';
      out_ += qname(a->name);
      out_ += "=\"";
      escape_attr(a->value, out_);
      out_ += '"';
    }
    out_ += '>';
    for (const auto& child : e.children) {
      if (child.is_element()) {
        write(*child.elem);
      } else if (!whitespace_only(child.text)) {
        escape_text(child.text, out_);
      }
    }
    out_ += "</";
    out_ += qname(e.name);
    out_ += '>';

    scope_.resize(mark);
  }

  bool keep_signature_;
  std::string out_;
  std::vector<Binding> scope_;
};

}  // namespace

Result<ParserPolicy, Error> make_parser_policy(bool allow_dtd,
                                               bool allow_external_entities,
                                               std::size_t max_document_bytes,
                                               int max_element_depth) {
  if (allow_dtd || allow_external_entities) {
    return Error{ErrorKind::DtdForbidden,
                 "DTD and external entity processing cannot be enabled"};
  }
  ParserPolicy p;
  p.max_document_bytes = max_document_bytes;
  p.max_element_depth = max_element_depth;
  return p;
}

const Element* Element::find_child(std::string_view ns_uri,
                                   std::string_view local) const {
  for (const auto& c : children) {
    if (c.is_element() && c.elem->name.is(ns_uri, local)) return c.elem.get();
  }
  return nullptr;
}

std::vector<const Element*> Element::find_children(std::string_view ns_uri,
                                                   std::string_view local)
    const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.is_element() && c.elem->name.is(ns_uri, local)) {
      out.push_back(c.elem.get());
    }
  }
  return out;
}

std::optional<std::string> Element::attr(std::string_view local) const {
  for (const auto& a : attrs) {
    if (a.name.ns_uri.empty() && a.name.local == local) return a.value;
  }
  return std::nullopt;
}

std::optional<std::string> Element::attr_ns(std::string_view ns_uri,
                                            std::string_view local) const {
  for (const auto& a : attrs) {
    if (a.name.ns_uri == ns_uri && a.name.local == local) return a.value;
  }
  return std::nullopt;
}

std::string Element::text() const {
  std::string out;
  for (const auto& c : children) {
    if (!c.is_element()) out += c.text;
  }
  return out;
}

Result<Document, Error> parse(std::string_view input,
                              const ParserPolicy& policy) {
  if (input.size() > policy.max_document_bytes) {
    return Error{ErrorKind::TooLarge,
                 "document exceeds " +
                     std::to_string(policy.max_document_bytes) + " bytes"};
  }
  // Rejected before any other processing: with no DTD there is nothing an
  // entity attack can attach to.
  if (contains_doctype(input)) {
    return Error{ErrorKind::DtdForbidden, "DOCTYPE declarations are rejected"};
  }
  Parser parser(input, policy);
  return parser.run();
}

std::unique_ptr<Element> make_element(std::string_view prefix,
                                      std::string_view ns_uri,
                                      std::string_view local) {
  auto e = std::make_unique<Element>();
  e->name.prefix = std::string(prefix);
  e->name.ns_uri = std::string(ns_uri);
  e->name.local = std::string(local);
  return e;
}

void add_attr(Element& e, std::string_view local, std::string_view value) {
  Attr a;
  a.name.local = std::string(local);
  a.value = std::string(value);
  e.attrs.push_back(std::move(a));
}

void add_text(Element& e, std::string_view text) {
  Node n;
  n.text = std::string(text);
  e.children.push_back(std::move(n));
}

Element& add_child(Element& parent, std::unique_ptr<Element> child) {
  Node n;
  n.elem = std::move(child);
  parent.children.push_back(std::move(n));
  return *parent.children.back().elem;
}

std::string canonicalize(const Element& element) {
  return Writer(false).run(element);
}

std::string serialize(const Element& element) {
  return Writer(true).run(element);
}

}  // namespace authshim::xml
