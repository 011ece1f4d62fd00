#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "predsym/diag.hpp"

namespace predsym {

inline std::vector<std::string> split(const std::string &s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(delim, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> split_ws(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline std::string trim(const std::string &s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline bool parse_long(const std::string &s, long long &out) {
  const char *b = s.data();
  const char *e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

inline bool parse_double(const std::string &s, double &out) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

inline long long require_long(const std::string &s, const std::string &ctx) {
  long long v;
  if (!parse_long(s, v)) fail(Code::MalformedLine, "expected integer '", s, "' at ", ctx);
  return v;
}

inline double require_double(const std::string &s, const std::string &ctx) {
  double v;
  if (!parse_double(s, v)) fail(Code::MalformedLine, "expected number '", s, "' at ", ctx);
  return v;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Code::IoError, "cannot open ", path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Lines with universal newline handling; keeps empty lines (section breaks matter
// in CoNLL-U).
inline std::vector<std::string> read_lines(const std::string &path) {
  std::string body = read_file(path);
  std::vector<std::string> lines;
  std::string cur;
  for (char c : body) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

inline bool file_exists(const std::string &path) {
  std::ifstream in(path);
  return static_cast<bool>(in);
}

}  // namespace predsym
