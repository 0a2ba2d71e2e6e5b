// SPDX-License-Identifier: Apache-2.0
#pragma once

// Key-value configuration files.
//
// Grammar (UTF-8, line oriented):
//
//   file     := line*
//   line     := blank | comment | header | entry
//   comment  := ('#' | ';') any*
//   header   := '[' kind (' ' name)? ']'
//   entry    := key '=' value
//
// Keys before the first header belong to the root section. The root section
// must contain `version = 1`. Values are free text; typed accessors below
// interpret them as reals, booleans, `lo, hi` ranges or comma lists.
// Every error carries the 1-based line number it refers to.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmwpl/error.hpp"

namespace mmwpl::config {

inline constexpr int kFormatVersion = 1;

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::string kind;
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;

  const Entry* find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }
};

struct Document {
  int version = 0;
  Section root;
  std::vector<Section> sections;

  std::vector<const Section*> sections_of(std::string_view kind) const {
    std::vector<const Section*> out;
    for (const auto& s : sections)
      if (s.kind == kind) out.push_back(&s);
    return out;
  }

  const Section* find(std::string_view kind, std::string_view name = {}) const {
    for (const auto& s : sections)
      if (s.kind == kind && s.name == name) return &s;
    return nullptr;
  }
};

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> to_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline Document parse(std::istream& in) {
  Document doc;
  Section* current = &doc.root;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line = trim(line.substr(3));
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      auto inner = trim(line.substr(1, line.size() - 2));
      if (inner.empty()) throw ConfigError("empty section header", line_no);
      Section s;
      s.line = line_no;
      const auto sp = inner.find_first_of(" \t");
      s.kind = std::string(inner.substr(0, sp));
      if (sp != std::string_view::npos) s.name = std::string(trim(inner.substr(sp)));
      for (const auto& prev : doc.sections)
        if (prev.kind == s.kind && prev.name == s.name)
          throw ConfigError("duplicate section [" + std::string(inner) + "]", line_no);
      doc.sections.push_back(std::move(s));
      current = &doc.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("empty key", line_no);
    std::string value(trim(line.substr(eq + 1)));
    if (current->entries.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
    current->entries.emplace(std::move(key), Entry{std::move(value), line_no});
  }
  const Entry* v = doc.root.find("version");
  if (!v) throw ConfigError("missing 'version' key", 1);
  auto ver = to_real(v->value);
  if (!ver || *ver != kFormatVersion)
    throw ConfigError("unsupported version '" + v->value + "' (expected " + std::to_string(kFormatVersion) + ")",
                      v->line);
  doc.version = kFormatVersion;
  return doc;
}

inline Document parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

inline Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open configuration file '" + path + "'");
  return parse(in);
}

// Typed accessors. Missing keys return the fallback; malformed values throw
// with the entry's line.

inline double get_real(const Section& s, const std::string& key, double fallback) {
  const Entry* e = s.find(key);
  if (!e) return fallback;
  auto v = to_real(e->value);
  if (!v) throw ConfigError("'" + key + "' expects a number, got '" + e->value + "'", e->line);
  return *v;
}

inline double require_real(const Section& s, const std::string& key) {
  const Entry* e = s.find(key);
  if (!e) throw ConfigError("section [" + s.kind + (s.name.empty() ? "" : " " + s.name) + "] missing '" + key + "'",
                            s.line);
  return get_real(s, key, 0.0);
}

inline bool get_bool(const Section& s, const std::string& key, bool fallback) {
  const Entry* e = s.find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "yes" || e->value == "on" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "off" || e->value == "0") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + e->value + "'", e->line);
}

inline std::vector<double> get_reals(const Section& s, const std::string& key, std::vector<double> fallback) {
  const Entry* e = s.find(key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(e->value)) {
    auto v = to_real(item);
    if (!v) throw ConfigError("'" + key + "' expects a list of numbers, got '" + item + "'", e->line);
    out.push_back(*v);
  }
  return out;
}

inline std::optional<std::pair<double, double>> get_range(const Section& s, const std::string& key) {
  const Entry* e = s.find(key);
  if (!e) return std::nullopt;
  auto vals = get_reals(s, key, {});
  if (vals.size() != 2) throw ConfigError("'" + key + "' expects 'min, max'", e->line);
  return std::pair{vals[0], vals[1]};
}

/// Non-negative integer value (counts, seeds); rejects fractions and signs.
inline std::optional<std::uint64_t> to_unsigned(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::uint64_t get_unsigned(const Section& s, const std::string& key, std::uint64_t fallback) {
  const Entry* e = s.find(key);
  if (!e) return fallback;
  auto v = to_unsigned(e->value);
  if (!v) throw ConfigError("'" + key + "' expects a non-negative integer, got '" + e->value + "'", e->line);
  return *v;
}

inline std::optional<std::pair<std::uint64_t, std::uint64_t>> get_unsigned_range(const Section& s,
                                                                                const std::string& key) {
  const Entry* e = s.find(key);
  if (!e) return std::nullopt;
  const auto items = split_list(e->value);
  if (items.size() != 2) throw ConfigError("'" + key + "' expects 'min, max'", e->line);
  auto lo = to_unsigned(items[0]), hi = to_unsigned(items[1]);
  if (!lo || !hi) throw ConfigError("'" + key + "' expects two non-negative integers", e->line);
  return std::pair{*lo, *hi};
}

inline int line_of(const Section& s, const std::string& key) {
  const Entry* e = s.find(key);
  return e ? e->line : s.line;
}

}  // namespace mmwpl::config
