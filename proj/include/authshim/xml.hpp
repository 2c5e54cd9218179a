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

#ifndef AUTHSHIM_XML_HPP
#define AUTHSHIM_XML_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "authshim/result.hpp"

namespace authshim::xml {

/*
 * A deliberately small, namespace-aware XML subset.
 *
 * Parsing policy (non-negotiable, fail closed):
 *   - No DOCTYPE, ever. A document containing "<!DOCTYPE" anywhere is
 *     rejected before anything else is looked at, so no entity — internal,
 *     external, or parameter — can be defined, let alone resolved.
 *   - Only the five built-in entities plus numeric character references.
 *   - Hard caps on document size and element depth.
 *   - No I/O of any kind: input is a byte buffer, output is a tree.
 *
 * Canonical serialization (the signing contract shared with verification):
 *   - namespace declarations emitted at first use, sorted by prefix;
 *   - attributes sorted by (namespace URI, local name);
 *   - whitespace-only text between elements dropped, other text exact;
 *   - comments and processing instructions dropped;
 *   - elements with local name "Signature" excluded;
 *   - no self-closing tags.
 */

struct ParserPolicy {
  std::size_t max_document_bytes = 1 * 1024 * 1024;
  int max_element_depth = 64;

  // These exist to make the policy visible at call sites; they cannot be
  // enabled. make_parser_policy rejects any attempt.
  static constexpr bool allow_dtd = false;
  static constexpr bool allow_external_entities = false;
};

enum class ErrorKind {
  Malformed,
  DtdForbidden,
  TooLarge,
};

struct Error {
  ErrorKind kind;
  std::string detail;
};

Result<ParserPolicy, Error> make_parser_policy(
    bool allow_dtd, bool allow_external_entities,
    std::size_t max_document_bytes = 1 * 1024 * 1024,
    int max_element_depth = 64);

struct Name {
  std::string ns_uri;  // resolved namespace URI ("" = none / no default)
  std::string local;
  std::string prefix;  // original prefix, kept for serialization

  bool is(std::string_view uri, std::string_view local_name) const {
    return ns_uri == uri && local == local_name;
  }
};

struct Attr {
  Name name;
  std::string value;
};

struct Element;

struct Node {
  std::unique_ptr<Element> elem;  // null => text node
  std::string text;

  bool is_element() const { return elem != nullptr; }
};

struct Element {
  Name name;
  std::vector<Attr> attrs;
  std::vector<Node> children;

  const Element* find_child(std::string_view ns_uri,
                            std::string_view local) const;
  std::vector<const Element*> find_children(std::string_view ns_uri,
                                            std::string_view local) const;
  std::optional<std::string> attr(std::string_view local) const;
  std::optional<std::string> attr_ns(std::string_view ns_uri,
                                     std::string_view local) const;
  /// Concatenated direct text content.
  std::string text() const;
};

struct Document {
  std::unique_ptr<Element> root;
};

Result<Document, Error> parse(std::string_view input,
                              const ParserPolicy& policy);

// Tree construction helpers for documents we emit ourselves.
std::unique_ptr<Element> make_element(std::string_view prefix,
                                      std::string_view ns_uri,
                                      std::string_view local);
void add_attr(Element& e, std::string_view local, std::string_view value);
void add_text(Element& e, std::string_view text);
Element& add_child(Element& parent, std::unique_ptr<Element> child);

/// Canonical bytes of a subtree per the profile above. Total over
/// well-formed trees.
std::string canonicalize(const Element& element);

/// Wire serialization: identical to canonicalize except Signature elements
/// are kept. Documents we emit are canonical-shaped by construction.
std::string serialize(const Element& element);

}  // namespace authshim::xml

#endif  // AUTHSHIM_XML_HPP
