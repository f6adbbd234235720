#pragma once

// Minimal well-formedness check for the SVG the library writes: balanced
// elements, quoted attributes, known entities. Not a general XML parser.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sotm::testing {

struct XmlCheck {
  bool ok = true;
  std::string error;
  std::string root;
};

inline bool xml_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.';
}

inline XmlCheck check_xml(std::string_view doc) {
  XmlCheck r;
  auto fail = [&r](std::string why) {
    r.ok = false;
    r.error = std::move(why);
    return r;
  };
  std::vector<std::string> open;
  std::size_t p = 0;
  bool closed_root = false;
  while (p < doc.size()) {
    if (doc[p] == '&') {
      const auto semi = doc.find(';', p);
      if (semi == std::string_view::npos) return fail("unterminated entity");
      const auto ent = doc.substr(p + 1, semi - p - 1);
      if (ent != "amp" && ent != "lt" && ent != "gt" && ent != "quot" && ent != "apos")
        return fail("unknown entity " + std::string(ent));
      p = semi + 1;
      continue;
    }
    if (doc[p] != '<') {
      if (doc[p] == '>') return fail("stray '>'");
      if (open.empty() && !std::isspace(static_cast<unsigned char>(doc[p]))) return fail("text outside root");
      ++p;
      continue;
    }
    if (doc.substr(p, 5) == "<?xml") {
      const auto e = doc.find("?>", p);
      if (e == std::string_view::npos || p != 0) return fail("bad declaration");
      p = e + 2;
      continue;
    }
    if (doc.substr(p, 4) == "<!--") {
      const auto e = doc.find("-->", p);
      if (e == std::string_view::npos) return fail("unterminated comment");
      p = e + 3;
      continue;
    }
    const bool closing = p + 1 < doc.size() && doc[p + 1] == '/';
    std::size_t q = p + (closing ? 2 : 1);
    const std::size_t name_start = q;
    while (q < doc.size() && xml_name_char(doc[q])) ++q;
    std::string name(doc.substr(name_start, q - name_start));
    if (name.empty()) return fail("empty tag name");
    bool self_closing = false;
    while (true) {
      while (q < doc.size() && std::isspace(static_cast<unsigned char>(doc[q]))) ++q;
      if (q >= doc.size()) return fail("unterminated tag " + name);
      if (doc[q] == '>') {
        ++q;
        break;
      }
      if (doc[q] == '/' && q + 1 < doc.size() && doc[q + 1] == '>' && !closing) {
        self_closing = true;
        q += 2;
        break;
      }
      if (closing) return fail("attributes on closing tag " + name);
      const std::size_t a = q;
      while (q < doc.size() && xml_name_char(doc[q])) ++q;
      if (q == a) return fail("bad attribute in " + name);
      if (q >= doc.size() || doc[q] != '=') return fail("attribute without value in " + name);
      ++q;
      if (q >= doc.size() || (doc[q] != '"' && doc[q] != '\'')) return fail("unquoted attribute in " + name);
      const char quote = doc[q];
      const auto e = doc.find(quote, q + 1);
      if (e == std::string_view::npos) return fail("unterminated attribute in " + name);
      if (doc.substr(q + 1, e - q - 1).find('<') != std::string_view::npos) return fail("'<' in attribute");
      q = e + 1;
    }
    if (closing) {
      if (open.empty() || open.back() != name) return fail("mismatched </" + name + ">");
      open.pop_back();
      if (open.empty()) closed_root = true;
    } else {
      if (open.empty()) {
        if (closed_root) return fail("second root element");
        r.root = name;
      }
      if (!self_closing) open.push_back(name);
    }
    p = q;
  }
  if (!open.empty()) return fail("unclosed <" + open.back() + ">");
  if (r.root.empty()) return fail("no root element");
  return r;
}

inline std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string_view::npos; p = text.find(needle, p + needle.size())) ++n;
  return n;
}

}  // namespace sotm::testing
