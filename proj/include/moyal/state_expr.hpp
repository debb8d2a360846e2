#pragma once

// Textual state expressions:
//
//   eigen:<m>
//   coherent:<re>±<im>i
//   translated:<base>:<re>±<im>i
//   super:<i,j,...>:<c1,c2,...>        coefficients real or <re>±<im>i
//   mix:<w1*expr1;w2*expr2;...>
//
// A mix nested inside another mix or used as a translated base is wrapped in
// parentheses. format_state(parse_state(s)) is canonical and parse_state
// inverts it exactly (shortest round-trip floats).

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "moyal/error.hpp"
#include "moyal/fock.hpp"

namespace moyal {

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline double parse_real(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  double v = 0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  const auto [p, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
    throw ParseError("state expression: bad " + std::string(what) + " '" + t + "'");
  return v;
}

inline int parse_int(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  int v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw ParseError("state expression: bad " + std::string(what) + " '" + t + "'");
  return v;
}

/// `<re>±<im>i`; with `allow_real`, a bare real or `<im>i` is accepted too.
inline cplx parse_complex(std::string_view s, bool allow_real) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError("state expression: empty complex number");
  if (t.back() != 'i') {
    if (!allow_real) throw ParseError("state expression: expected <re>+<im>i, got '" + t + "'");
    return {parse_real(t, "number"), 0.0};
  }
  // split at the last sign that is not a leading sign or an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size() - 1; k > 0; --k)
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  const std::string_view body(t.data(), t.size() - 1);
  if (split == std::string::npos) {
    if (!allow_real) throw ParseError("state expression: expected <re>+<im>i, got '" + t + "'");
    return {0.0, parse_real(body, "imaginary part")};
  }
  return {parse_real(body.substr(0, split), "real part"), parse_real(body.substr(split), "imaginary part")};
}

inline std::string format_real(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

inline std::string format_complex(cplx z) {
  const double im = z.imag();
  return format_real(z.real()) + (std::signbit(im) ? "-" : "+") + format_real(std::abs(im)) + "i";
}

/// Splits on `sep` outside parentheses.
inline std::vector<std::string_view> split_top(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '(') ++depth;
    else if (s[k] == ')') {
      if (--depth < 0) throw ParseError("state expression: unbalanced ')'");
    } else if (s[k] == sep && depth == 0) {
      out.push_back(s.substr(start, k - start));
      start = k + 1;
    }
  }
  if (depth != 0) throw ParseError("state expression: unbalanced '('");
  out.push_back(s.substr(start));
  return out;
}

inline std::string_view strip_parens(std::string_view s) {
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    bool wraps = true;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      if (s[k] == '(') ++depth;
      else if (s[k] == ')') --depth;
      if (depth == 0) {
        wraps = false;
        break;
      }
    }
    if (!wraps) break;
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace detail

inline StateTag parse_state(std::string_view text) {
  using namespace detail;
  const std::string owned = trim(text);
  const std::string_view s = strip_parens(owned);
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ParseError("state expression: missing ':' in '" + std::string(s) + "'");
  const std::string_view head = s.substr(0, colon), rest = s.substr(colon + 1);
  if (head == "eigen") {
    const int m = parse_int(rest, "level");
    if (m < 0) throw ParseError("state expression: negative level");
    return eigen_tag(m);
  }
  if (head == "coherent") return coherent_tag(parse_complex(rest, false));
  if (head == "translated") {
    const auto last = rest.rfind(':');
    if (last == std::string_view::npos) throw ParseError("state expression: translated needs <base>:<kappa>");
    return translated_tag(parse_state(rest.substr(0, last)), parse_complex(rest.substr(last + 1), false));
  }
  if (head == "super") {
    const auto sep = rest.find(':');
    if (sep == std::string_view::npos) throw ParseError("state expression: super needs <indices>:<coefficients>");
    SuperpositionTag t;
    for (auto p : split_top(rest.substr(0, sep), ',')) t.indices.push_back(parse_int(p, "index"));
    for (auto p : split_top(rest.substr(sep + 1), ',')) t.coeffs.push_back(parse_complex(p, true));
    if (t.indices.size() != t.coeffs.size()) throw ParseError("state expression: super index/coefficient count mismatch");
    return StateTag{std::move(t)};
  }
  if (head == "mix") {
    MixedTag t;
    for (auto item : split_top(rest, ';')) {
      const auto star = item.find('*');
      if (star == std::string_view::npos) throw ParseError("state expression: mix item needs <weight>*<expr>");
      t.weights.push_back(parse_real(item.substr(0, star), "weight"));
      t.parts.push_back(parse_state(item.substr(star + 1)));
    }
    return StateTag{std::move(t)};
  }
  throw ParseError("state expression: unknown kind '" + std::string(head) + "'");
}

inline std::string format_state(const StateTag& tag) {
  using namespace detail;
  auto nested = [](const StateTag& t) {
    const std::string s = format_state(t);
    return std::holds_alternative<MixedTag>(t.v) ? "(" + s + ")" : s;
  };
  return std::visit(
      [&](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, EigenTag>) {
          return "eigen:" + std::to_string(t.m);
        } else if constexpr (std::is_same_v<T, CoherentTag>) {
          return "coherent:" + format_complex(t.kappa);
        } else if constexpr (std::is_same_v<T, TranslatedTag>) {
          return "translated:" + nested(*t.base) + ":" + format_complex(t.kappa);
        } else if constexpr (std::is_same_v<T, SuperpositionTag>) {
          std::string idx, co;
          for (std::size_t k = 0; k < t.indices.size(); ++k) {
            idx += (k ? "," : "") + std::to_string(t.indices[k]);
            co += (k ? "," : "") + format_complex(t.coeffs[k]);
          }
          return "super:" + idx + ":" + co;
        } else {
          std::string out = "mix:";
          for (std::size_t k = 0; k < t.parts.size(); ++k)
            out += (k ? ";" : "") + format_real(t.weights[k]) + "*" + nested(t.parts[k]);
          return out;
        }
      },
      tag.v);
}

}  // namespace moyal
