#include <cctype>
#include <string>
#include <string_view>

#include "ecoimpact/error.hpp"
#include "ecoimpact/snapshot.hpp"

namespace ecoimpact {

namespace {

bool is_separator(char c) { return c == '.' || c == '-' || c == '_'; }

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }

bool is_ident_char(char c) { return is_alnum(c) || c == '_'; }

struct MarkerVariables {
  bool references_extra = false;
  bool references_environment = false;
};

// Scans identifiers outside of quoted literals. `extra` marks an optional
// dependency; any other marker variable makes the requirement environment-gated.
MarkerVariables scan_marker(std::string_view marker, std::size_t base_offset) {
  MarkerVariables vars;
  std::size_t i = 0;
  while (i < marker.size()) {
    const char c = marker[i];
    if (c == '\'' || c == '"') {
      const auto close = marker.find(c, i + 1);
      if (close == std::string_view::npos) {
        throw ParseError("unterminated string in environment marker", base_offset + i);
      }
      i = close + 1;
    } else if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < marker.size() && is_ident_char(marker[j])) ++j;
      const auto word = marker.substr(i, j - i);
      if (word == "extra") {
        vars.references_extra = true;
      } else if (word != "and" && word != "or" && word != "in" && word != "not") {
        vars.references_environment = true;
      }
      i = j;
    } else {
      ++i;
    }
  }
  return vars;
}

}  // namespace

std::string normalize_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool in_separator_run = false;
  for (char c : raw) {
    if (is_separator(c)) {
      if (!in_separator_run) out.push_back('-');
      in_separator_run = true;
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      in_separator_run = false;
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::InvalidName, "package name is empty");
  }
  return out;
}

RequirementSpec parse_requirement(std::string_view spec) {
  std::size_t pos = 0;
  while (pos < spec.size() && is_space(spec[pos])) ++pos;

  if (pos >= spec.size() || !is_alnum(spec[pos])) {
    throw ParseError("expected package name", pos);
  }
  const std::size_t name_begin = pos;
  while (pos < spec.size() && (is_alnum(spec[pos]) || is_separator(spec[pos]))) ++pos;
  // names must end with a letter or digit
  std::size_t name_end = pos;
  while (name_end > name_begin && is_separator(spec[name_end - 1])) --name_end;
  if (name_end != pos) {
    throw ParseError("package name ends with a separator", name_end);
  }

  RequirementSpec result;
  result.raw = std::string(spec);
  result.target_name = normalize_name(spec.substr(name_begin, name_end - name_begin));

  while (pos < spec.size() && is_space(spec[pos])) ++pos;
  if (pos < spec.size() && spec[pos] == '[') {
    const auto close = spec.find(']', pos);
    if (close == std::string_view::npos) {
      throw ParseError("unterminated extras list", pos);
    }
    pos = close + 1;
  }

  // Version constraints and direct URLs run up to the marker separator and
  // are not interpreted.
  const auto semicolon = spec.find(';', pos);
  if (semicolon == std::string_view::npos) {
    return result;
  }
  std::size_t marker_begin = semicolon + 1;
  std::size_t marker_end = spec.size();
  while (marker_begin < marker_end && is_space(spec[marker_begin])) ++marker_begin;
  while (marker_end > marker_begin && is_space(spec[marker_end - 1])) --marker_end;
  if (marker_begin == marker_end) {
    throw ParseError("empty environment marker", semicolon);
  }
  const auto vars = scan_marker(spec.substr(marker_begin, marker_end - marker_begin), marker_begin);
  result.is_optional = vars.references_extra;
  result.has_environment_marker = vars.references_environment;
  return result;
}

}  // namespace ecoimpact
