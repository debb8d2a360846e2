#pragma once

// CSV / JSON / SVG writers. Every file opens with the effective RunConfig;
// floats are written with 12 significant digits, '\n' line endings.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "moyal/fock.hpp"
#include "run_config.hpp"

namespace moyal::cli {

using json = nlohmann::ordered_json;

inline std::string fnum(double x) { return fmt::format("{:.12g}", x); }

/// x rounded to 12 significant digits, so JSON dumps at most 12 digits.
inline double jnum(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(fnum(x));
}

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    require(row.size() == columns.size(), "Table: row width does not match the header");
    rows.push_back(std::move(row));
  }
};

inline std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        } else if constexpr (std::is_same_v<T, double>) {
          return fnum(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      c);
}

inline json config_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

/// Comment block shared by CSV ('# ') and SVG (inside <!-- -->).
inline std::string config_lines(const RunConfig& cfg, const std::string& command, const std::string& prefix) {
  std::string out = prefix + "moyal " + command + "\n";
  for (const auto& [k, v] : cfg.entries()) out += prefix + k + " = " + v + "\n";
  return out;
}

inline std::filesystem::path output_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / name;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

inline std::string csv_text(const RunConfig& cfg, const std::string& command, const Table& t) {
  std::string out = config_lines(cfg, command, "# ");
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\n";
  }
  return out;
}

inline std::filesystem::path write_csv(const RunConfig& cfg, const std::string& command, const Table& t) {
  const auto p = output_path(cfg, command + ".csv");
  write_file(p, csv_text(cfg, command, t));
  return p;
}

inline std::filesystem::path write_json(const RunConfig& cfg, const std::string& command, const json& result) {
  json doc = json::object();
  doc["command"] = command;
  doc["config"] = config_json(cfg);
  doc["result"] = result;
  const auto p = output_path(cfg, command + ".json");
  write_file(p, doc.dump(2) + "\n");
  return p;
}

/// True when the file starts with the config echo written above.
inline bool has_config_header(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  const auto ext = p.extension();
  if (ext == ".csv") return first.rfind("# moyal ", 0) == 0 && second.rfind("# trunc_dim = ", 0) == 0;
  if (ext == ".json") {
    in.seekg(0);
    try {
      const json j = json::parse(in);
      return j.contains("config") && j["config"].contains("trunc_dim");
    } catch (const json::exception&) {
      return false;
    }
  }
  if (ext == ".svg") {
    std::string third;
    std::getline(in, third);
    return second == "<!--" && third.rfind("moyal ", 0) == 0;
  }
  return false;
}

struct Series {
  std::string name;
  std::vector<double> x, y;
};

/// Minimal line plot: axes with min/max ticks, one polyline per series.
inline std::string svg_text(const RunConfig& cfg, const std::string& command, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel, const std::vector<Series>& series) {
  const double w = 640, h = 400, l = 70, r = 20, t = 40, b = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]), x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]), y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double x) { return l + (x - x0) / (x1 - x0) * (w - l - r); };
  auto py = [&](double y) { return h - b - (y - y0) / (y1 - y0) * (h - t - b); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n<!--\n";
  out += config_lines(cfg, command, "");
  out += "-->\n";
  out += fmt::format("<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n", w / 2, title);
  out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", l, h - b, w - r, h - b);
  out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", l, t, l, h - b);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n", w / 2, h - 12, xlabel);
  out += fmt::format("<text x=\"16\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>\n",
                     h / 2, h / 2, ylabel);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n", l, h - b + 14, fnum(x0));
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n", w - r, h - b + 14, fnum(x1));
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n", l - 4, h - b, fnum(y0));
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n", l - 4, t + 10, fnum(y1));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) pts += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(s.x[i]), py(s.y[i]));
    const char* c = colors[k % 5];
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", c, pts);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{}\">{}</text>\n", w - r - 120, t + 14 * (k + 1), c, s.name);
  }
  out += "</svg>\n";
  return out;
}

inline std::filesystem::path write_svg(const RunConfig& cfg, const std::string& command, const std::string& title,
                                       const std::string& xlabel, const std::string& ylabel,
                                       const std::vector<Series>& series) {
  const auto p = output_path(cfg, command + ".svg");
  write_file(p, svg_text(cfg, command, title, xlabel, ylabel, series));
  return p;
}

inline json matrix_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(jnum(m(i, j).real()));
      c.push_back(jnum(m(i, j).imag()));
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

/// "a..b" (step 1), "a..b:step", or "x,y,z".
inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad grid value '" + s + "' in '" + text + "'");
    }
  };
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto colon = text.find(':', dots);
    const double a = num(text.substr(0, dots));
    const double b = num(text.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
    const double step = colon == std::string::npos ? 1.0 : num(text.substr(colon + 1));
    if (!(step > 0) || b < a) throw ParseError("bad range '" + text + "'");
    const int count = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(a + i * step);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(num(item));
  if (out.empty()) throw ParseError("empty grid");
  return out;
}

inline std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_grid(text)) {
    if (v != std::round(v)) throw ParseError("expected integers in '" + text + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace moyal::cli
