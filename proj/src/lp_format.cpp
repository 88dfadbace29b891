#include "metromap/lp_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "metromap/errors.hpp"

namespace metromap {

namespace {

constexpr std::size_t kTermsPerLine = 6;

std::string number(double value) {
  if (std::isinf(value)) return value > 0 ? "+inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

class NameTable {
 public:
  explicit NameTable(const MipProblem& p) {
    std::set<std::string> rows;
    for (const Variable& v : p.variables()) {
      std::string s = sanitize_lp_name(v.name);
      if (!used_.insert(s).second) {
        throw Error(ErrorCode::kNameCollision, "variable name '" + v.name + "' collides after sanitizing");
      }
      vars_.push_back(std::move(s));
    }
    for (const Constraint& c : p.constraints()) {
      std::string s = sanitize_lp_name(c.name.empty() ? "r" + std::to_string(rows_.size()) : c.name);
      if (!rows.insert(s).second || s == "obj") {
        throw Error(ErrorCode::kNameCollision, "row name '" + c.name + "' collides after sanitizing");
      }
      rows_.push_back(std::move(s));
    }
  }
  const std::string& var(VarId id) const { return vars_[id]; }
  const std::string& row(std::size_t r) const { return rows_[r]; }

 private:
  std::set<std::string> used_;
  std::vector<std::string> vars_;
  std::vector<std::string> rows_;
};

void write_terms(std::ostringstream& out, const LinearExpr& expr, const NameTable& names) {
  std::size_t n = 0;
  for (const Term& t : expr.terms()) {
    if (n > 0 && n % kTermsPerLine == 0) out << "\n   ";
    if (n == 0) {
      out << ' ' << number(t.coef) << ' ' << names.var(t.var);
    } else if (t.coef < 0) {
      out << " - " << number(-t.coef) << ' ' << names.var(t.var);
    } else {
      out << " + " << number(t.coef) << ' ' << names.var(t.var);
    }
    ++n;
  }
}

}  // namespace

std::string sanitize_lp_name(std::string_view name) {
  std::string out;
  out.reserve(name.size() + 1);
  for (char c : name) {
    out += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(0, "n");
  return out;
}

std::string write_lp(const MipProblem& problem) {
  const NameTable names(problem);
  std::ostringstream out;

  const LinearExpr objective = problem.objective().normalized();
  if (objective.constant() != 0.0) {
    throw Error(ErrorCode::kInvalidParams, "objective constants are not representable");
  }
  out << "Minimize\n obj:";
  write_terms(out, objective, names);
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < problem.constraint_count(); ++r) {
    const Constraint& c = problem.constraints()[r];
    out << ' ' << names.row(r) << ':';
    if (c.expr.terms().empty()) {
      // keep the row so indices line up; an empty lhs is written as 0 times a variable
      if (problem.variable_count() == 0) {
        throw Error(ErrorCode::kInvalidParams, "row '" + c.name + "' has no variables");
      }
      out << " 0 " << names.var(0);
    }
    write_terms(out, c.expr, names);
    const char* rel = c.relation == Relation::kLessEqual ? " <= "
                      : c.relation == Relation::kEqual   ? " = "
                                                         : " >= ";
    out << rel << number(c.rhs - c.expr.constant()) << '\n';
  }

  out << "Bounds\n";
  for (VarId id = 0; id < problem.variable_count(); ++id) {
    const Variable& v = problem.variable(id);
    if (v.type == VarType::kBinary) continue;
    const std::string& n = names.var(id);
    const bool lo = std::isfinite(v.lower);
    const bool hi = std::isfinite(v.upper);
    if (!lo && !hi) {
      out << ' ' << n << " free\n";
    } else if (lo && !hi) {
      out << ' ' << n << " >= " << number(v.lower) << '\n';
    } else {
      out << ' ' << number(v.lower) << " <= " << n << " <= " << number(v.upper) << '\n';
    }
  }

  out << "General\n";
  for (VarId id = 0; id < problem.variable_count(); ++id) {
    if (problem.variable(id).type == VarType::kInteger) out << ' ' << names.var(id) << '\n';
  }
  out << "Binary\n";
  for (VarId id = 0; id < problem.variable_count(); ++id) {
    if (problem.variable(id).type == VarType::kBinary) out << ' ' << names.var(id) << '\n';
  }
  out << "End\n";
  return out.str();
}

void write_lp_file(const MipProblem& problem, const std::filesystem::path& path) {
  const std::string text = write_lp(problem);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

// _____________________________________________________________________________
// Reader

namespace {

enum class Section { kNone, kObjective, kConstraints, kBounds, kGeneral, kBinary, kEnd };

struct Token {
  enum Kind { kWord, kNumber, kSign, kRelation, kColon } kind;
  std::string text;
  double value = 0.0;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("_.[]{}!\"#$%&()/,;?@'`|~").find(c) != std::string_view::npos;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '\\') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '+' || c == '-') {
      out.push_back({Token::kSign, std::string(1, c)});
      ++i;
    } else if (c == ':') {
      out.push_back({Token::kColon, ":"});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::size_t j = i + 1;
      if (j < s.size() && (s[j] == '=' || s[j] == '<' || s[j] == '>')) ++j;
      std::string rel(s.substr(i, j - i));
      if (rel == "=<") rel = "<=";
      if (rel == "=>") rel = ">=";
      if (rel == "<") rel = "<=";
      if (rel == ">") rel = ">=";
      out.push_back({Token::kRelation, rel});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (ec != std::errc()) throw Error(ErrorCode::kLpSyntax, "bad number near '" + std::string(s.substr(i, 12)) + "'");
      out.push_back({Token::kNumber, std::string(s.substr(i, ptr - (s.data() + i))), v});
      i = static_cast<std::size_t>(ptr - s.data());
    } else if (is_name_char(c)) {
      std::size_t j = i;
      while (j < s.size() && is_name_char(s[j])) ++j;
      std::string w(s.substr(i, j - i));
      std::string lower;
      for (char ch : w) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (lower == "inf" || lower == "infinity") {
        out.push_back({Token::kNumber, w, kInfinity});
      } else {
        out.push_back({Token::kWord, w});
      }
      i = j;
    } else {
      throw Error(ErrorCode::kLpSyntax, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

std::string lowercase(std::string_view s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<Section> section_header(const std::string& line) {
  std::string l = lowercase(line);
  while (!l.empty() && std::isspace(static_cast<unsigned char>(l.back()))) l.pop_back();
  std::size_t p = 0;
  while (p < l.size() && std::isspace(static_cast<unsigned char>(l[p]))) ++p;
  l = l.substr(p);
  if (l == "minimize" || l == "minimise" || l == "minimum" || l == "min") return Section::kObjective;
  if (l == "subject to" || l == "such that" || l == "st" || l == "s.t.") return Section::kConstraints;
  if (l == "bounds" || l == "bound") return Section::kBounds;
  if (l == "general" || l == "generals" || l == "gen") return Section::kGeneral;
  if (l == "binary" || l == "binaries" || l == "bin") return Section::kBinary;
  if (l == "end") return Section::kEnd;
  return std::nullopt;
}

class Reader {
 public:
  MipProblem run(std::string_view text) {
    std::vector<std::pair<Section, std::string>> blocks;
    Section current = Section::kNone;
    std::string buffer;
    std::istringstream in{std::string(text)};
    std::string line;
    auto flush = [&] {
      if (!buffer.empty()) blocks.emplace_back(current, buffer);
      buffer.clear();
    };
    while (std::getline(in, line)) {
      if (const auto c = line.find('\\'); c != std::string::npos) line.erase(c);
      if (auto sec = section_header(line)) {
        flush();
        current = *sec;
        continue;
      }
      buffer += line;
      buffer += '\n';
    }
    flush();

    for (auto& [sec, body] : blocks) {
      switch (sec) {
        case Section::kObjective: objective_ = parse_rows(body, true).front().expr; break;
        case Section::kConstraints: rows_ = parse_rows(body, false); break;
        case Section::kBounds: parse_bounds(body); break;
        case Section::kGeneral: mark(body, VarType::kInteger); break;
        case Section::kBinary: mark(body, VarType::kBinary); break;
        case Section::kNone:
          if (body.find_first_not_of(" \t\r\n") != std::string::npos) {
            throw Error(ErrorCode::kLpSyntax, "content before the objective section");
          }
          break;
        case Section::kEnd: break;
      }
    }

    MipProblem p;
    for (std::size_t i = 0; i < order_.size(); ++i) {
      const VarInfo& v = info_[order_[i]];
      double lo = v.lower;
      double hi = v.upper;
      if (v.type == VarType::kBinary) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0);
      }
      p.add_variable(order_[i], v.type, lo, hi);
    }
    auto remap = [&](const LinearExpr& e) {
      LinearExpr out(e.constant());
      for (const Term& t : e.terms()) out.add(*p.find_variable(order_[t.var]), t.coef);
      return out;
    };
    p.set_objective(remap(objective_));
    for (const auto& r : rows_) p.add_constraint(r.name, remap(r.expr), r.relation, r.rhs);
    return p;
  }

 private:
  struct VarInfo {
    VarType type = VarType::kContinuous;
    double lower = 0.0;
    double upper = kInfinity;
  };
  struct Row {
    std::string name;
    LinearExpr expr;
    Relation relation = Relation::kLessEqual;
    double rhs = 0.0;
  };

  VarId var(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const VarId id = order_.size();
    index_.emplace(name, id);
    order_.push_back(name);
    info_.emplace(name, VarInfo{});
    return id;
  }

  // Splits a block into statements. A statement ends after its relation's
  // right-hand side; the objective is a single statement.
  std::vector<Row> parse_rows(const std::string& body, bool objective) {
    const auto toks = tokenize(body);
    std::vector<Row> out;
    std::size_t i = 0;
    while (i < toks.size()) {
      Row row;
      if (i + 1 < toks.size() && toks[i].kind == Token::kWord && toks[i + 1].kind == Token::kColon) {
        row.name = toks[i].text;
        i += 2;
      }
      double sign = 1.0;
      bool has_coef = false;
      double coef = 0.0;
      bool done = false;
      while (i < toks.size() && !done) {
        const Token& t = toks[i];
        if (t.kind == Token::kSign) {
          if (t.text == "-") sign = -sign;
          ++i;
        } else if (t.kind == Token::kNumber) {
          if (has_coef) {
            row.expr.add_constant(sign * coef);
            sign = 1.0;
          }
          coef = t.value;
          has_coef = true;
          ++i;
        } else if (t.kind == Token::kWord) {
          if (!objective && i + 1 < toks.size() && toks[i + 1].kind == Token::kColon) break;
          row.expr.add(var(t.text), sign * (has_coef ? coef : 1.0));
          sign = 1.0;
          has_coef = false;
          ++i;
        } else if (t.kind == Token::kRelation) {
          if (objective) throw Error(ErrorCode::kLpSyntax, "relation in objective");
          if (has_coef) {
            row.expr.add_constant(sign * coef);
            has_coef = false;
          }
          row.relation = t.text == "<=" ? Relation::kLessEqual
                         : t.text == "=" ? Relation::kEqual
                                         : Relation::kGreaterEqual;
          ++i;
          double rsign = 1.0;
          while (i < toks.size() && toks[i].kind == Token::kSign) {
            if (toks[i].text == "-") rsign = -rsign;
            ++i;
          }
          if (i >= toks.size() || toks[i].kind != Token::kNumber) {
            throw Error(ErrorCode::kLpSyntax, "missing right-hand side in row '" + row.name + "'");
          }
          row.rhs = rsign * toks[i].value - row.expr.constant();
          LinearExpr stripped;
          for (const Term& term : row.expr.terms()) stripped.add(term.var, term.coef);
          row.expr = stripped;
          ++i;
          done = true;
        } else {
          throw Error(ErrorCode::kLpSyntax, "unexpected ':'");
        }
      }
      if (has_coef) row.expr.add_constant(sign * coef);
      if (!objective && !done) throw Error(ErrorCode::kLpSyntax, "row '" + row.name + "' has no relation");
      out.push_back(std::move(row));
      if (objective) break;
    }
    if (out.empty()) out.push_back({});
    return out;
  }

  void parse_bounds(const std::string& body) {
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
      const auto toks = tokenize(line);
      if (toks.empty()) continue;
      // collapse signed numbers
      struct Item {
        bool is_num;
        double num;
        std::string word, rel;
      };
      std::vector<Item> items;
      double sign = 1.0;
      for (const Token& t : toks) {
        if (t.kind == Token::kSign) {
          if (t.text == "-") sign = -sign;
        } else if (t.kind == Token::kNumber) {
          items.push_back({true, sign * t.value, {}, {}});
          sign = 1.0;
        } else if (t.kind == Token::kWord) {
          items.push_back({false, 0.0, t.text, {}});
        } else if (t.kind == Token::kRelation) {
          items.push_back({false, 0.0, {}, t.text});
        }
      }
      auto apply = [&](const std::string& name, const std::string& rel, double value, bool var_left) {
        VarInfo& v = info_[order_[var(name)]];
        std::string r = rel;
        if (!var_left) r = rel == "<=" ? ">=" : rel == ">=" ? "<=" : "=";
        if (r == "<=") v.upper = value;
        if (r == ">=") v.lower = value;
        if (r == "=") v.lower = v.upper = value;
      };
      if (items.size() == 2 && !items[0].is_num && lowercase(items[1].word) == "free") {
        VarInfo& v = info_[order_[var(items[0].word)]];
        v.lower = -kInfinity;
        v.upper = kInfinity;
      } else if (items.size() == 3 && !items[0].is_num && !items[1].rel.empty() && items[2].is_num) {
        apply(items[0].word, items[1].rel, items[2].num, true);
      } else if (items.size() == 3 && items[0].is_num && !items[1].rel.empty() && !items[2].is_num) {
        apply(items[2].word, items[1].rel, items[0].num, false);
      } else if (items.size() == 5 && items[0].is_num && !items[2].is_num && items[4].is_num) {
        apply(items[2].word, items[1].rel, items[0].num, false);
        apply(items[2].word, items[3].rel, items[4].num, true);
      } else {
        throw Error(ErrorCode::kLpSyntax, "cannot parse bound '" + line + "'");
      }
    }
  }

  void mark(const std::string& body, VarType type) {
    for (const Token& t : tokenize(body)) {
      if (t.kind != Token::kWord) throw Error(ErrorCode::kLpSyntax, "expected a variable name");
      info_[order_[var(t.text)]].type = type;
    }
  }

  std::map<std::string, VarId> index_;
  std::vector<std::string> order_;
  std::map<std::string, VarInfo> info_;
  LinearExpr objective_;
  std::vector<Row> rows_;
};

}  // namespace

MipProblem read_lp(std::string_view text) { return Reader().run(text); }

}  // namespace metromap
