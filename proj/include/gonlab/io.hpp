#pragma once

// Scalar literal parsing ("rat:p/q", "sqrt:D", "a+b*sqrt(D)", "dec:digits",
// plain integers/fractions), matrix/vector literals as JSON arrays of those,
// an RFC 4180 CSV writer with fixed decimal rendering, and JSON report
// scaffolding (schema "gonlab/1").

#include "gonlab/core.hpp"
#include "gonlab/templates.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

namespace gonlab {

namespace detail {

inline std::string strip(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline mpq_class parse_fraction(const std::string& text) {
  std::string t = strip(text);
  if (t.empty()) throw scalar_error("empty rational literal");
  mpq_class q;
  if (q.set_str(t, 10) != 0) throw scalar_error("bad rational literal: " + text);
  q.canonicalize();
  return q;
}

}  // namespace detail

// Accepted forms:
//   "3", "-7/2"            plain rational
//   "rat:p/q"              rational
//   "sqrt:D"               square root of a positive integer
//   "a+b*sqrt(D)"          quadratic, a and b rational (b may carry '-')
//   "dec:3.14159"          validated decimal (bigreal)
inline Scalar parse_scalar(const std::string& text) {
  std::string t = detail::strip(text);
  if (t.rfind("rat:", 0) == 0) return Scalar(detail::parse_fraction(t.substr(4)));
  if (t.rfind("dec:", 0) == 0) return Scalar(Interval::from_decimal(detail::strip(t.substr(4))));
  if (t.rfind("sqrt:", 0) == 0) {
    mpq_class d = detail::parse_fraction(t.substr(5));
    if (d.get_den() != 1 || d <= 0) throw scalar_error("sqrt radicand must be a positive integer");
    if (!d.get_num().fits_ulong_p()) throw scalar_error("sqrt radicand too large");
    return Scalar::quadratic(0, 1, d.get_num().get_ui());
  }
  size_t sq = t.find("sqrt(");
  if (sq != std::string::npos) {
    size_t close = t.find(')', sq);
    if (close == std::string::npos) throw scalar_error("unbalanced sqrt( in literal: " + text);
    mpq_class d = detail::parse_fraction(t.substr(sq + 5, close - sq - 5));
    if (d.get_den() != 1 || d <= 0 || !d.get_num().fits_ulong_p())
      throw scalar_error("sqrt radicand must be a positive integer");
    unsigned long D = d.get_num().get_ui();
    // coefficient before sqrt: "", "-", or "b*"
    std::string head = t.substr(0, sq);
    mpq_class a = 0, b = 1;
    if (!head.empty()) {
      // split at the sign that separates a from the b-term, scanning from the
      // end; the b-term is everything after the last '+'/'-' that is not a
      // leading sign or an exponent
      size_t split = std::string::npos;
      for (size_t i = head.size(); i-- > 1;) {
        if ((head[i] == '+' || head[i] == '-') && head[i - 1] != 'e' && head[i - 1] != 'E' &&
            head[i - 1] != '/' && head[i - 1] != '+' && head[i - 1] != '-') {
          split = i;
          break;
        }
      }
      std::string bpart = (split == std::string::npos) ? head : head.substr(split);
      std::string apart = (split == std::string::npos) ? "" : head.substr(0, split);
      bpart = detail::strip(bpart);
      if (!bpart.empty() && bpart.back() == '*') bpart.pop_back();
      bpart = detail::strip(bpart);
      if (bpart.empty() || bpart == "+")
        b = 1;
      else if (bpart == "-")
        b = -1;
      else
        b = detail::parse_fraction(bpart);
      if (!detail::strip(apart).empty()) a = detail::parse_fraction(apart);
    }
    return Scalar::quadratic(a, b, D);
  }
  return Scalar(detail::parse_fraction(t));
}

inline Vec parse_vector_json(const nlohmann::json& j) {
  if (!j.is_array()) throw scalar_error("vector literal must be a JSON array");
  Vec v;
  for (const auto& x : j) {
    if (x.is_string())
      v.push_back(parse_scalar(x.get<std::string>()));
    else if (x.is_number_integer())
      v.push_back(Scalar(static_cast<long>(x.get<long long>())));
    else
      throw scalar_error("vector entries must be scalar literals");
  }
  return v;
}

inline Mat parse_matrix_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw scalar_error("matrix literal must be a JSON array of rows");
  size_t cols = 0;
  std::vector<Vec> rows;
  for (const auto& r : j) {
    Vec row = parse_vector_json(r);
    if (cols == 0) cols = row.size();
    if (row.size() != cols || cols == 0) throw scalar_error("ragged matrix literal");
    rows.push_back(std::move(row));
  }
  Mat m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < cols; ++k) m(i, k) = rows[i][k];
  return m;
}

inline Mat parse_matrix(const std::string& text) {
  return parse_matrix_json(nlohmann::json::parse(text));
}
inline Vec parse_vector(const std::string& text) {
  return parse_vector_json(nlohmann::json::parse(text));
}

// ---------------------------------------------------------------------------
// CSV writer: RFC 4180 (CRLF line endings, quoting only when needed).

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os, int precision = 12, bool symbolic = false)
      : os_(os), precision_(precision), symbolic_(symbolic) {}

  void header(const std::vector<std::string>& names) { row_strings(names); }

  void row_strings(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) os_ << ',';
      os_ << quoted(fields[i]);
    }
    os_ << "\r\n";
  }

  std::string render(const Scalar& s) const {
    if (symbolic_ && s.is_exact()) return s.to_string();
    return s.to_decimal(precision_);
  }
  std::string render(const mpz_class& z) const { return z.get_str(); }

 private:
  static std::string quoted(const std::string& f) {
    bool need = f.find_first_of(",\"\r\n") != std::string::npos;
    if (!need) return f;
    std::string out = "\"";
    for (char c : f) {
      if (c == '"') out += "\"\"";
      else out += c;
    }
    return out + "\"";
  }

  std::ostream& os_;
  int precision_;
  bool symbolic_;
};

inline nlohmann::json report_envelope(const std::string& kind) {
  nlohmann::json j;
  j["schema"] = "gonlab/1";
  j["kind"] = kind;
  return j;
}

// Template serialization: {interval, breakpoints[], values[][3]} with scalar
// literals (exact kinds render symbolically and round-trip).
inline nlohmann::json three_system_to_json(const ThreeSystem& P) {
  nlohmann::json j;
  j["interval"] = {P.q_start().to_string(), P.q_end().to_string()};
  j["breakpoints"] = nlohmann::json::array();
  j["values"] = nlohmann::json::array();
  for (size_t i = 0; i < P.breakpoints.size(); ++i) {
    j["breakpoints"].push_back(P.breakpoints[i].to_string());
    j["values"].push_back({P.values[i][0].to_string(), P.values[i][1].to_string(),
                           P.values[i][2].to_string()});
  }
  return j;
}

inline ThreeSystem three_system_from_json(const nlohmann::json& j) {
  ThreeSystem P;
  for (const auto& b : j.at("breakpoints")) P.breakpoints.push_back(parse_scalar(b.get<std::string>()));
  for (const auto& v : j.at("values")) {
    if (!v.is_array() || v.size() != 3) throw scalar_error("template values must be triples");
    P.values.push_back({parse_scalar(v[0].get<std::string>()), parse_scalar(v[1].get<std::string>()),
                        parse_scalar(v[2].get<std::string>())});
  }
  if (P.breakpoints.size() != P.values.size() || P.breakpoints.size() < 2)
    throw scalar_error("malformed template JSON");
  return P;
}

inline std::string scalar_field(const Scalar& s, int precision = 12, bool symbolic = false) {
  if (symbolic && s.is_exact()) return s.to_string();
  return s.to_decimal(precision);
}

}  // namespace gonlab
