#include "stlcc/system_file.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace stlcc {

SystemFileError::SystemFileError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what
                                  : what),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { lbracket, rbracket, comma, equals, string, number, ident, newline, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&]() {
    if (s[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < s.size()) {
    char c = s[i];
    int l = line;
    int cc = col;
    if (c == ' ' || c == '\t' || c == '\r') {
      advance();
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance();
    } else if (c == '\n') {
      out.push_back({Tok::newline, "", l, cc});
      advance();
    } else if (c == '[' || c == ']' || c == ',' || c == '=') {
      Tok k = c == '[' ? Tok::lbracket : c == ']' ? Tok::rbracket : c == ',' ? Tok::comma : Tok::equals;
      out.push_back({k, std::string(1, c), l, cc});
      advance();
    } else if (c == '"') {
      advance();
      std::string text;
      while (true) {
        if (i >= s.size() || s[i] == '\n') throw SystemFileError("unterminated string", l, cc);
        if (s[i] == '"') break;
        if (s[i] == '\\' && i + 1 < s.size() && (s[i + 1] == '"' || s[i + 1] == '\\')) advance();
        text.push_back(s[i]);
        advance();
      }
      advance();
      out.push_back({Tok::string, std::move(text), l, cc});
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
      std::string text;
      while (i < s.size()) {
        char d = s[i];
        bool exp_sign = (d == '-' || d == '+') && !text.empty() && (text.back() == 'e' || text.back() == 'E');
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' || d == '/' ||
            exp_sign || (text.empty() && (d == '-' || d == '+'))) {
          text.push_back(d);
          advance();
        } else {
          break;
        }
      }
      out.push_back({Tok::number, std::move(text), l, cc});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string text;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
        text.push_back(s[i]);
        advance();
      }
      out.push_back({Tok::ident, std::move(text), l, cc});
    } else {
      throw SystemFileError(std::string("unexpected character '") + c + "'", l, cc);
    }
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

struct Value {
  bool array = false;
  Token token;
  std::vector<Value> items;
};

struct Entry {
  std::string key;
  std::vector<int> indices;
  Value value;
  int line = 0;
  int col = 0;
};

struct Section {
  std::string name;
  int line = 0;
  int col = 0;
  std::vector<Entry> entries;
};

class Reader {
 public:
  explicit Reader(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<Section> sections() {
    std::vector<Section> out;
    while (true) {
      skip_newlines();
      const Token& t = peek();
      if (t.kind == Tok::end) break;
      if (t.kind == Tok::lbracket) {
        next();
        Token name = expect(Tok::ident, "section name");
        expect(Tok::rbracket, "']'");
        end_of_line();
        for (const auto& s : out) {
          if (s.name == name.text) throw SystemFileError("duplicate section [" + name.text + "]", name.line, name.col);
        }
        out.push_back({name.text, name.line, name.col, {}});
        continue;
      }
      if (out.empty()) throw SystemFileError("entry outside of any section", t.line, t.col);
      out.back().entries.push_back(entry());
    }
    return out;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  static const char* describe(Tok k) {
    switch (k) {
      case Tok::newline: return "end of line";
      case Tok::end: return "end of file";
      case Tok::string: return "string";
      case Tok::number: return "number";
      case Tok::ident: return "identifier";
      default: return "symbol";
    }
  }

  [[noreturn]] void fail(const std::string& what, const Token& t) const {
    std::string found = t.text.empty() ? describe(t.kind) : "'" + t.text + "'";
    throw SystemFileError("expected " + what + ", found " + found, t.line, t.col);
  }

  Token expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(what, peek());
    return next();
  }

  void skip_newlines() {
    while (peek().kind == Tok::newline) next();
  }

  void end_of_line() {
    if (peek().kind == Tok::end) return;
    expect(Tok::newline, "end of line");
  }

  Entry entry() {
    Token key = expect(Tok::ident, "key");
    Entry e;
    e.key = key.text;
    e.line = key.line;
    e.col = key.col;
    while (peek().kind == Tok::lbracket) {
      next();
      Token idx = expect(Tok::number, "index");
      bool digits = !idx.text.empty() && std::all_of(idx.text.begin(), idx.text.end(),
                                                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
      if (!digits) throw SystemFileError("index must be a positive integer", idx.line, idx.col);
      e.indices.push_back(std::stoi(idx.text));
      expect(Tok::rbracket, "']'");
    }
    expect(Tok::equals, "'='");
    e.value = value();
    end_of_line();
    return e;
  }

  Value value() {
    Value v;
    const Token& t = peek();
    if (t.kind == Tok::lbracket) {
      v.array = true;
      v.token = next();
      while (true) {
        skip_newlines();
        if (peek().kind == Tok::rbracket) break;
        v.items.push_back(value());
        skip_newlines();
        if (peek().kind == Tok::comma) {
          next();
          continue;
        }
        if (peek().kind != Tok::rbracket) fail("',' or ']'", peek());
      }
      next();
      return v;
    }
    if (t.kind == Tok::string || t.kind == Tok::number || t.kind == Tok::ident) {
      v.token = next();
      return v;
    }
    fail("value", t);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail_at(const std::string& what, const Value& v) {
  throw SystemFileError(what, v.token.line, v.token.col);
}

[[noreturn]] void fail_at(const std::string& what, const Entry& e) { throw SystemFileError(what, e.line, e.col); }

int as_int(const Value& v, const std::string& what) {
  if (v.array || v.token.kind != Tok::number) fail_at(what + " must be an integer", v);
  char* end = nullptr;
  long x = std::strtol(v.token.text.c_str(), &end, 10);
  if (*end != '\0') fail_at(what + " must be an integer", v);
  return static_cast<int>(x);
}

double as_double(const Value& v, const std::string& what) {
  if (v.array || v.token.kind != Tok::number) fail_at(what + " must be a number", v);
  char* end = nullptr;
  double x = std::strtod(v.token.text.c_str(), &end);
  if (*end != '\0' || !std::isfinite(x)) fail_at(what + " must be a number", v);
  return x;
}

bool as_bool(const Value& v, const std::string& what) {
  if (!v.array && v.token.kind == Tok::ident && (v.token.text == "true" || v.token.text == "false")) {
    return v.token.text == "true";
  }
  fail_at(what + " must be true or false", v);
}

const std::vector<Value>& as_array(const Value& v, std::size_t n, const std::string& what) {
  if (!v.array) fail_at(what + " must be an array", v);
  if (v.items.size() != n) {
    fail_at(what + " has " + std::to_string(v.items.size()) + " entries, expected " + std::to_string(n), v);
  }
  return v.items;
}

Expr as_expr(const Value& v, const std::vector<std::string>& coords) {
  if (v.array || (v.token.kind != Tok::string && v.token.kind != Tok::number)) {
    fail_at("expected an expression string", v);
  }
  try {
    return parse_expr(v.token.text, coords);
  } catch (const ParseError& e) {
    // Strings start one column after their opening quote.
    int offset = v.token.kind == Tok::string ? 1 : 0;
    throw SystemFileError(std::string("bad expression: ") + e.what(), v.token.line,
                          v.token.col + offset + static_cast<int>(e.position()));
  }
}

VectorField as_field(const Value& v, const std::vector<std::string>& coords, const std::string& what) {
  std::vector<Expr> comps;
  for (const Value& x : as_array(v, coords.size(), what)) comps.push_back(as_expr(x, coords));
  return VectorField(std::move(comps));
}

bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  if (s == "sin" || s == "cos" || s == "exp" || s == "log") return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

const Section* find(const std::vector<Section>& sections, const std::string& name) {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void no_indices(const Entry& e) {
  if (!e.indices.empty()) fail_at("key '" + e.key + "' takes no index", e);
}

struct InputSpec {
  bool one_form = false;
  const Entry* entry = nullptr;
};

}  // namespace

MechanicalSystem parse_system(std::string_view text) {
  std::vector<Section> sections = Reader(lex(text)).sections();
  for (const auto& s : sections) {
    static const std::set<std::string> known{"system", "metric", "connection", "inputs", "point", "analysis"};
    if (!known.count(s.name)) throw SystemFileError("unknown section [" + s.name + "]", s.line, s.col);
  }
  MechanicalSystem sys;

  const Section* system = find(sections, "system");
  if (!system) throw SystemFileError("missing [system] section", 0, 0);
  const Entry* dim_entry = nullptr;
  const Entry* coords_entry = nullptr;
  for (const auto& e : system->entries) {
    no_indices(e);
    if (e.key == "dim" && !dim_entry) {
      dim_entry = &e;
    } else if (e.key == "coords" && !coords_entry) {
      coords_entry = &e;
    } else {
      fail_at("unexpected or repeated key '" + e.key + "' in [system]", e);
    }
  }
  if (!dim_entry) throw SystemFileError("[system] needs dim", system->line, system->col);
  if (!coords_entry) throw SystemFileError("[system] needs coords", system->line, system->col);
  int n = as_int(dim_entry->value, "dim");
  if (n < 1) fail_at("dim must be at least 1", dim_entry->value);
  for (const Value& c : as_array(coords_entry->value, static_cast<std::size_t>(n), "coords")) {
    if (c.array || (c.token.kind != Tok::ident && c.token.kind != Tok::string) || !valid_name(c.token.text)) {
      fail_at("coordinate names must be identifiers other than sin, cos, exp, log", c);
    }
    if (std::find(sys.coords.begin(), sys.coords.end(), c.token.text) != sys.coords.end()) {
      fail_at("duplicate coordinate '" + c.token.text + "'", c);
    }
    sys.coords.push_back(c.token.text);
  }
  std::size_t dim = sys.coords.size();

  const Section* metric = find(sections, "metric");
  const Section* connection = find(sections, "connection");
  if (metric) {
    const Entry* g = nullptr;
    for (const auto& e : metric->entries) {
      no_indices(e);
      if (e.key != "g" || g) fail_at("unexpected or repeated key '" + e.key + "' in [metric]", e);
      g = &e;
    }
    if (!g) throw SystemFileError("[metric] needs g", metric->line, metric->col);
    std::vector<std::vector<Expr>> rows;
    for (const Value& row : as_array(g->value, dim, "g")) {
      std::vector<Expr> r;
      for (const Value& x : as_array(row, dim, "g row")) r.push_back(as_expr(x, sys.coords));
      rows.push_back(std::move(r));
    }
    try {
      sys.metric = Metric(std::move(rows));
    } catch (const GeometryError& e) {
      fail_at(e.what(), *g);
    }
  }
  bool override_metric = false;
  if (connection) {
    Connection conn = Connection::flat(dim);
    std::set<std::vector<int>> seen;
    for (const auto& e : connection->entries) {
      if (e.key == "override_metric") {
        no_indices(e);
        override_metric = as_bool(e.value, "override_metric");
        continue;
      }
      if (e.key != "Gamma" || e.indices.size() != 3) fail_at("expected Gamma[a][b][c] or override_metric", e);
      for (int idx : e.indices) {
        if (idx < 1 || idx > static_cast<int>(dim)) {
          fail_at("Christoffel index out of range 1.." + std::to_string(dim), e);
        }
      }
      if (!seen.insert(e.indices).second) fail_at("repeated Christoffel symbol", e);
      conn.gamma[e.indices[0] - 1][e.indices[1] - 1][e.indices[2] - 1] = as_expr(e.value, sys.coords);
    }
    sys.connection = std::move(conn);
  }
  if (metric && connection && !override_metric) {
    throw SystemFileError("[metric] and [connection] both given; set override_metric = true to keep both",
                          connection->line, connection->col);
  }
  if (!metric && !connection) throw SystemFileError("need a [metric] or a [connection] section", 0, 0);
  if (metric && !connection) {
    try {
      sys.connection = christoffel(*sys.metric);
    } catch (const GeometryError& e) {
      throw SystemFileError(e.what(), metric->line, metric->col);
    }
  }

  const Section* inputs = find(sections, "inputs");
  if (!inputs || inputs->entries.empty()) throw SystemFileError("need an [inputs] section with at least one input", 0, 0);
  std::map<int, InputSpec> specs;
  for (const auto& e : inputs->entries) {
    no_indices(e);
    bool ok = e.key.size() >= 2 && (e.key[0] == 'Y' || e.key[0] == 'F') &&
              std::all_of(e.key.begin() + 1, e.key.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (!ok || e.key[1] == '0') fail_at("input keys are Y<i> or F<i> with i = 1, 2, ...", e);
    int k = std::stoi(e.key.substr(1));
    if (specs.count(k)) fail_at("input " + std::to_string(k) + " given twice", e);
    specs[k] = {e.key[0] == 'F', &e};
  }
  int expected = 1;
  for (const auto& [k, spec] : specs) {
    if (k != expected) fail_at("inputs must be numbered 1.." + std::to_string(specs.size()), *spec.entry);
    ++expected;
    VectorField f = as_field(spec.entry->value, sys.coords, spec.entry->key);
    if (spec.one_form) {
      if (!sys.metric) fail_at("one-form inputs need a metric", *spec.entry);
      f = sharp(*sys.metric, OneForm{f.components});
    }
    sys.inputs.push_back(std::move(f));
  }

  const Section* point = find(sections, "point");
  if (!point) throw SystemFileError("missing [point] section", 0, 0);
  const Entry* q0 = nullptr;
  for (const auto& e : point->entries) {
    no_indices(e);
    if (e.key != "q0" || q0) fail_at("unexpected or repeated key '" + e.key + "' in [point]", e);
    q0 = &e;
  }
  if (!q0) throw SystemFileError("[point] needs q0", point->line, point->col);
  VecQ q;
  for (const Value& x : as_array(q0->value, dim, "q0")) {
    std::optional<Rational> r;
    if (!x.array && (x.token.kind == Tok::number || x.token.kind == Tok::string)) r = parse_rational(x.token.text);
    if (!r) fail_at("q0 entries must be decimal numbers", x);
    q.push_back(*r);
  }
  sys.q0 = Point(q);

  if (const Section* analysis = find(sections, "analysis")) {
    std::set<std::string> seen;
    for (const auto& e : analysis->entries) {
      no_indices(e);
      if (!seen.insert(e.key).second) fail_at("repeated key '" + e.key + "'", e);
      Tolerances& t = sys.tolerances;
      if (e.key == "rank_tol") {
        t.rank = as_double(e.value, e.key);
      } else if (e.key == "residual_tol") {
        t.residual = as_double(e.value, e.key);
      } else if (e.key == "zero_tol") {
        t.zero = as_double(e.value, e.key);
      } else if (e.key == "max_degree") {
        t.max_degree = as_int(e.value, e.key);
      } else if (e.key == "degree_cap") {
        t.degree_cap = as_int(e.value, e.key);
      } else {
        fail_at("unknown key '" + e.key + "' in [analysis]", e);
      }
      if ((e.key.ends_with("_tol") && !(as_double(e.value, e.key) > 0)) ||
          (!e.key.ends_with("_tol") && as_int(e.value, e.key) < 1)) {
        fail_at(e.key + " must be positive", e.value);
      }
    }
  }

  if (sys.metric) {
    try {
      sys.metric->require_positive_definite(sys.q0);
    } catch (const GeometryError& e) {
      throw SystemFileError(e.what(), metric->line, metric->col);
    }
  }
  FieldValues vals;
  try {
    vals = evaluate_fields(sys.inputs, sys.q0);
  } catch (const DomainError& e) {
    throw SystemFileError(std::string("inputs cannot be evaluated at q0: ") + e.what(), inputs->line, inputs->col);
  }
  int rank = vals.exact ? exact_rank(*vals.exact) : numeric_rank(vals.values, sys.tolerances.rank);
  if (rank < static_cast<int>(sys.inputs.size())) {
    throw SystemFileError("input vector fields are linearly dependent at q0", inputs->line, inputs->col);
  }
  return sys;
}

MechanicalSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SystemFileError("cannot open " + path, 0, 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

namespace {

std::string quoted(const Expr& e, const std::vector<std::string>& coords) { return "\"" + to_string(e, coords) + "\""; }

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string serialize_system(const MechanicalSystem& sys) {
  std::ostringstream out;
  const auto& c = sys.coords;
  std::size_t n = sys.dim();
  out << "[system]\ndim = " << n << "\ncoords = [";
  for (std::size_t i = 0; i < n; ++i) out << (i ? ", " : "") << c[i];
  out << "]\n";
  if (sys.metric) {
    out << "\n[metric]\ng = [";
    for (std::size_t a = 0; a < n; ++a) {
      out << (a ? ",\n     [" : "[");
      for (std::size_t b = 0; b < n; ++b) out << (b ? ", " : "") << quoted((*sys.metric)(a, b), c);
      out << "]";
    }
    out << "]\n";
  }
  if (!sys.connection.metric_derived || !sys.metric) {
    out << "\n[connection]\n";
    if (sys.metric) out << "override_metric = true\n";
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t d = 0; d < n; ++d) {
          const Expr& g = sys.connection(a, b, d);
          if (g == Expr(0)) continue;
          out << "Gamma[" << a + 1 << "][" << b + 1 << "][" << d + 1 << "] = " << quoted(g, c) << "\n";
        }
      }
    }
  }
  out << "\n[inputs]\n";
  for (std::size_t k = 0; k < sys.inputs.size(); ++k) {
    out << "Y" << k + 1 << " = [";
    for (std::size_t a = 0; a < n; ++a) out << (a ? ", " : "") << quoted(sys.inputs[k][a], c);
    out << "]\n";
  }
  out << "\n[point]\nq0 = [";
  for (std::size_t a = 0; a < n; ++a) {
    out << (a ? ", " : "");
    if (sys.q0.exact()) {
      out << to_decimal_string((*sys.q0.exact())[a]);
    } else {
      out << number(sys.q0.coords()[a]);
    }
  }
  out << "]\n";
  const Tolerances& t = sys.tolerances;
  out << "\n[analysis]\nrank_tol = " << number(t.rank) << "\nresidual_tol = " << number(t.residual)
      << "\nzero_tol = " << number(t.zero) << "\nmax_degree = " << t.max_degree << "\ndegree_cap = " << t.degree_cap
      << "\n";
  return out.str();
}

}  // namespace stlcc
