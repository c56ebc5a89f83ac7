#include "gradbif/problem_file.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace gradbif {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

struct Sections {
  std::map<std::string, Section> by_name;
  std::map<std::string, int> header_line;
};

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

void parse_pairs(const std::string& text, int line, Section& into) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  while (true) {
    skip_ws();
    if (i >= text.size()) return;
    const std::size_t k0 = i;
    while (i < text.size() && is_key_char(text[i])) ++i;
    const std::string key = text.substr(k0, i - k0);
    if (key.empty()) throw ParseError(line, "expected a key, found '" + text.substr(k0) + "'");
    skip_ws();
    if (i >= text.size() || text[i] != '=') throw ParseError(line, "expected '=' after '" + key + "'");
    ++i;
    skip_ws();
    const std::size_t v0 = i;
    int depth = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) {
        // a call may have spaces before '(': "power (alpha=1)"
        std::size_t j = i;
        while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j < text.size() && text[j] == '(') {
          i = j;
          continue;
        }
        break;
      }
      ++i;
    }
    if (depth != 0) throw ParseError(line, "unbalanced parentheses in '" + key + "'");
    const std::string value = text.substr(v0, i - v0);
    if (value.empty()) throw ParseError(line, "missing value for '" + key + "'");
    if (!into.emplace(key, Entry{value, line}).second) {
      throw ParseError(line, "duplicate key '" + key + "'");
    }
  }
}

Sections split_sections(const std::string& text) {
  static const std::set<std::string> known{"domain", "g", "f", "params", "solver"};
  Sections out;
  std::istringstream is(text);
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    std::size_t a = 0;
    while (a < s.size() && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    s = s.substr(a);
    if (s.empty()) continue;
    if (s[0] == '[') {
      const auto close = s.find(']');
      if (close == std::string::npos) throw ParseError(line, "unterminated section header");
      current = s.substr(1, close - 1);
      if (!known.count(current)) throw ParseError(line, "unknown section [" + current + "]");
      if (out.header_line.count(current)) throw ParseError(line, "repeated section [" + current + "]");
      out.header_line[current] = line;
      out.by_name[current];
      s = s.substr(close + 1);
    }
    if (current.empty()) throw ParseError(line, "key outside of any section");
    parse_pairs(s, line, out.by_name[current]);
  }
  return out;
}

class Reader {
 public:
  Reader(Section section, std::string name, int header)
      : section_(std::move(section)), name_(std::move(name)), header_(header) {}

  bool has(const std::string& key) const { return section_.count(key) > 0; }

  std::string text(const std::string& key) {
    const auto it = section_.find(key);
    if (it == section_.end()) throw ParseError(header_, "[" + name_ + "] needs '" + key + "'");
    used_.insert(key);
    return it->second.value;
  }

  double number(const std::string& key) {
    const std::string v = text(key);
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || v.empty()) {
      throw ParseError(line_of(key), "malformed number '" + v + "' for '" + key + "'");
    }
    return out;
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 2e9) {
      throw ParseError(line_of(key), "'" + key + "' must be an integer");
    }
    return static_cast<int>(v);
  }

  int line_of(const std::string& key) const {
    const auto it = section_.find(key);
    return it == section_.end() ? header_ : it->second.line;
  }

  int header() const { return header_; }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [key, entry] : section_) {
      if (!used_.count(key)) {
        throw ParseError(entry.line, "unknown key '" + key + "' in [" + name_ + "]");
      }
    }
  }

 private:
  Section section_;
  std::string name_;
  int header_;
  std::set<std::string> used_;
};

template <class Fn>
auto at_line(int line, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

DomainSpec read_domain(Reader& r) {
  const std::string kind = r.text("kind");
  DomainSpec d;
  if (kind == "interval") {
    const double a = r.number("a"), b = r.number("b");
    const int n = r.integer("n");
    d = at_line(r.line_of("n"), [&] { return DomainSpec::interval(a, b, n); });
  } else if (kind == "rectangle") {
    const double ax = r.number("ax"), bx = r.number("bx");
    const double ay = r.number("ay"), by = r.number("by");
    const int n = r.integer("n");
    d = at_line(r.line_of("n"), [&] { return DomainSpec::rectangle(ax, bx, ay, by, n); });
  } else {
    throw ParseError(r.line_of("kind"), "unknown domain kind '" + kind + "'");
  }
  r.finish();
  return d;
}

GSpec read_g(Reader& r) {
  GSpec g;
  if (r.has("g")) {
    const int line = r.line_of("g");
    const std::string expr = r.text("g");
    g = at_line(line, [&] { return parse_g_expr(expr); });
  } else {
    const std::string family = r.text("family");
    const int line = r.line_of("family");
    if (family == "power") {
      const double alpha = r.number("alpha");
      g = at_line(line, [&] { return GSpec::power(alpha); });
    } else if (family == "power_shift") {
      const double alpha = r.number("alpha");
      const double a0 = r.number("a0");
      g = at_line(line, [&] { return GSpec::power_shift(alpha, a0); });
    } else {
      throw ParseError(line, "unknown g family '" + family + "'");
    }
  }
  r.finish();
  return g;
}

FSpec read_f(Reader& r) {
  FSpec f;
  if (r.has("f")) {
    const int line = r.line_of("f");
    const std::string expr = r.text("f");
    f = at_line(line, [&] { return parse_f_expr(expr); });
  } else {
    const std::string family = r.text("family");
    const int line = r.line_of("family");
    if (family == "const" || family == "constant") {
      f = FSpec::constant();
    } else if (family == "power") {
      const double beta = r.number("beta");
      f = at_line(line, [&] { return FSpec::power(beta); });
    } else if (family == "linear") {
      const double c = r.number("c");
      f = at_line(line, [&] { return FSpec::linear(c); });
    } else if (family == "arrhenius") {
      const double eps = r.number("eps");
      f = at_line(line, [&] { return FSpec::arrhenius(eps); });
    } else {
      throw ParseError(line, "unknown f family '" + family + "'");
    }
  }
  r.finish();
  return f;
}

SolverOpts read_solver(Reader& r) {
  SolverOpts o;
  o.tol = r.number_or("tol", o.tol);
  if (r.has("max_iter")) o.max_iter = r.integer("max_iter");
  o.sup_cap = r.number_or("sup_cap", o.sup_cap);
  o.step_floor = r.number_or("step_floor", o.step_floor);
  o.floor_abs = r.number_or("floor_abs", o.floor_abs);
  o.floor_dist = r.number_or("floor_dist", o.floor_dist);
  if (r.has("divergence_window")) o.divergence_window = r.integer("divergence_window");
  if (r.has("polish_steps")) o.polish_steps = r.integer("polish_steps");
  o.eta = r.number_or("eta", o.eta);
  o.hprime_eta = r.number_or("hprime_eta", o.hprime_eta);
  r.finish();
  at_line(r.header(), [&] {
    o.validate();
    return 0;
  });
  return o;
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  Sections s = split_sections(text);
  auto reader = [&](const std::string& name) {
    if (!s.header_line.count(name)) throw ParseError(0, "missing section [" + name + "]");
    return Reader(s.by_name[name], name, s.header_line[name]);
  };
  ProblemFile out;
  Reader domain = reader("domain");
  out.problem.domain = read_domain(domain);
  Reader g = reader("g");
  out.problem.g = read_g(g);
  Reader f = reader("f");
  out.problem.f = read_f(f);
  Reader params = reader("params");
  out.problem.lambda = params.number("lambda");
  out.problem.mu = params.number("mu");
  out.problem.p = params.number("p");
  params.finish();
  const int p_line = params.line_of("p");
  if (!(out.problem.p > 0.0 && out.problem.p <= 2.0)) {
    throw ParseError(p_line, "p must lie in (0, 2], got " + format_real(out.problem.p));
  }
  at_line(params.header(), [&] {
    out.problem.validate();
    return 0;
  });
  if (s.header_line.count("solver")) {
    Reader solver = reader("solver");
    out.opts = read_solver(solver);
  }
  return out;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_problem(ss.str());
}

std::string render_problem(const ProblemFile& file) {
  const ProblemSpec& p = file.problem;
  const SolverOpts& o = file.opts;
  if (p.g.family == GFamily::table || p.f.family == FFamily::table || p.f.weight) {
    throw std::invalid_argument("render_problem: tables and weights have no textual form");
  }
  std::ostringstream os;
  const DomainSpec& d = p.domain;
  os << "[domain]\n";
  if (d.kind == DomainKind::interval) {
    os << "kind = interval\na = " << format_real(d.ax) << "\nb = " << format_real(d.bx) << '\n';
  } else {
    os << "kind = rectangle\nax = " << format_real(d.ax) << "\nbx = " << format_real(d.bx)
       << "\nay = " << format_real(d.ay) << "\nby = " << format_real(d.by) << '\n';
  }
  os << "n = " << d.n << "\n\n[g]\ng = " << render_g_expr(p.g) << "\n\n[f]\nf = "
     << render_f_expr(p.f) << "\n\n[params]\nlambda = " << format_real(p.lambda)
     << "\nmu = " << format_real(p.mu) << "\np = " << format_real(p.p) << "\n\n[solver]\n"
     << "tol = " << format_real(o.tol) << "\nmax_iter = " << o.max_iter
     << "\nsup_cap = " << format_real(o.sup_cap) << "\nstep_floor = " << format_real(o.step_floor)
     << "\nfloor_abs = " << format_real(o.floor_abs)
     << "\nfloor_dist = " << format_real(o.floor_dist)
     << "\ndivergence_window = " << o.divergence_window << "\npolish_steps = " << o.polish_steps
     << "\neta = " << format_real(o.eta) << "\nhprime_eta = " << format_real(o.hprime_eta)
     << '\n';
  return os.str();
}

DomainSpec parse_domain_arg(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [&](std::size_t k) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(parts[k], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (parts[k].empty() || used != parts[k].size()) {
      throw std::invalid_argument("domain '" + text + "': malformed number '" + parts[k] + "'");
    }
    return v;
  };
  auto count = [&](std::size_t k) {
    const double v = num(k);
    if (v != std::floor(v)) throw std::invalid_argument("domain '" + text + "': n must be an integer");
    return static_cast<int>(v);
  };
  if (!parts.empty() && parts[0] == "interval" && parts.size() == 4) {
    return DomainSpec::interval(num(1), num(2), count(3));
  }
  if (!parts.empty() && (parts[0] == "rect" || parts[0] == "rectangle") && parts.size() == 6) {
    return DomainSpec::rectangle(num(1), num(2), num(3), num(4), count(5));
  }
  throw std::invalid_argument("domain '" + text +
                              "': expected interval:a:b:n or rect:ax:bx:ay:by:n");
}

}  // namespace gradbif
