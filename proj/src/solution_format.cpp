#include "metromap/solution_format.hpp"

#include <cctype>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "metromap/errors.hpp"

namespace metromap {

namespace {

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double to_number(const std::string& s) {
  const std::string l = lower(s);
  if (l == "inf" || l == "+inf" || l == "infinity") return kInfinity;
  if (l == "-inf" || l == "-infinity") return -kInfinity;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw Error(ErrorCode::kSolverOutput, "expected a number, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

MipSolution parse_plain(std::string_view text) {
  MipSolution s;
  std::string status = "optimal";
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto w = split_ws(t.substr(1));
      if (w.size() >= 2 && lower(w[0]) == "status") {
        status = t.substr(t.find(w[1]));
      } else if (w.size() >= 2 && lower(w[0]) == "objective") {
        s.objective = to_number(w[1]);
      } else if (w.size() >= 2 && lower(w[0]) == "gap") {
        s.gap = to_number(w[1]);
      }
      continue;
    }
    const auto w = split_ws(t);
    if (w.size() != 2) throw Error(ErrorCode::kSolverOutput, "malformed solution line '" + t + "'");
    s.assignment[w[0]] = to_number(w[1]);
  }
  s.status = interpret_status(status, !s.assignment.empty());
  return s;
}

// "Optimal - objective value 3.5" followed by "idx name value reduced" lines;
// with `-printingOptions all` the row block comes first and indices restart.
MipSolution parse_cbc(std::string_view text) {
  MipSolution s;
  std::istringstream in{std::string(text)};
  std::string header;
  std::getline(in, header);
  const auto dash = header.find(" - objective value");
  if (dash == std::string::npos) throw Error(ErrorCode::kSolverOutput, "unrecognized CBC header");
  const std::string status = trim(header.substr(0, dash));
  s.objective = to_number(trim(header.substr(dash + std::string(" - objective value").size())));

  std::vector<std::vector<std::pair<std::string, double>>> blocks(1);
  long last = -1;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.rfind("**", 0) == 0) t = trim(t.substr(2));
    if (t.empty()) continue;
    const auto w = split_ws(t);
    if (w.size() < 3) throw Error(ErrorCode::kSolverOutput, "malformed CBC line '" + t + "'");
    const long idx = std::strtol(w[0].c_str(), nullptr, 10);
    if (idx <= last) blocks.emplace_back();
    last = idx;
    blocks.back().emplace_back(w[1], to_number(w[2]));
  }
  for (const auto& [name, value] : blocks.back()) s.assignment[name] = value;

  const std::string l = lower(status);
  const bool stopped = l.rfind("stopped", 0) == 0;
  if (stopped && s.objective >= 1e49) {
    s.assignment.clear();
    s.status = SolveStatus::kTimeout;
  } else if (stopped && !s.assignment.empty()) {
    s.status = SolveStatus::kFeasible;
  } else {
    s.status = interpret_status(status, !s.assignment.empty());
  }
  return s;
}

MipSolution parse_highs(std::string_view text) {
  MipSolution s;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string status;
  enum { kHeader, kStatus, kSeek, kColumns, kDone } state = kHeader;
  std::size_t remaining = 0;
  bool feasible_values = false;
  while (std::getline(in, line) && state != kDone) {
    const std::string t = trim(line);
    switch (state) {
      case kHeader:
        if (t == "Model status") state = kStatus;
        break;
      case kStatus:
        if (!t.empty()) {
          status = t;
          state = kSeek;
        }
        break;
      case kSeek:
        if (t == "Feasible") feasible_values = true;
        if (t.rfind("Objective", 0) == 0) s.objective = to_number(trim(t.substr(9)));
        if (t.rfind("# Columns", 0) == 0) {
          remaining = static_cast<std::size_t>(std::strtoul(t.substr(9).c_str(), nullptr, 10));
          state = remaining == 0 ? kDone : kColumns;
        }
        if (t.rfind("# Dual", 0) == 0) state = kDone;
        break;
      case kColumns: {
        const auto w = split_ws(t);
        if (w.size() != 2) throw Error(ErrorCode::kSolverOutput, "malformed HiGHS column '" + t + "'");
        s.assignment[w[0]] = to_number(w[1]);
        if (--remaining == 0) state = kDone;
        break;
      }
      case kDone: break;
    }
  }
  if (state == kHeader) throw Error(ErrorCode::kSolverOutput, "missing HiGHS model status");
  if (!feasible_values) s.assignment.clear();
  s.status = interpret_status(status, !s.assignment.empty());
  return s;
}

MipSolution parse_xml(std::string_view text) {
  MipSolution s;
  const std::string doc(text);
  auto attribute = [](const std::string& tag, const std::string& name) -> std::optional<std::string> {
    const std::regex re("\\b" + name + "\\s*=\\s*\"([^\"]*)\"");
    std::smatch m;
    if (std::regex_search(tag, m, re)) return m[1].str();
    return std::nullopt;
  };
  std::smatch hm;
  std::string status = "optimal";
  if (std::regex_search(doc, hm, std::regex("<header\\b[^>]*>"))) {
    const std::string header = hm[0].str();
    if (auto v = attribute(header, "objectiveValue")) s.objective = to_number(*v);
    if (auto v = attribute(header, "solutionStatusString")) status = *v;
    if (auto v = attribute(header, "MIPRelativeGap")) s.gap = to_number(*v);
  }
  const std::regex var_re("<variable\\b[^>]*>");
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), var_re); it != std::sregex_iterator(); ++it) {
    const std::string tag = (*it)[0].str();
    const auto name = attribute(tag, "name");
    const auto value = attribute(tag, "value");
    if (!name || !value) throw Error(ErrorCode::kSolverOutput, "variable element without name/value");
    s.assignment[*name] = to_number(*value);
  }
  s.status = interpret_status(status, !s.assignment.empty());
  return s;
}

}  // namespace

SolveStatus interpret_status(std::string_view text, bool has_values) {
  const std::string l = lower(text);
  const auto has = [&](const char* w) { return l.find(w) != std::string::npos; };
  if (has("infeasible") && !has("integer feasible")) return SolveStatus::kInfeasible;
  if (has("unbounded")) return SolveStatus::kInfeasible;
  if (has("optimal")) {
    if (!has("limit")) return SolveStatus::kOptimal;
    return has_values ? SolveStatus::kFeasible : SolveStatus::kTimeout;
  }
  if (has("feasible") || has("time") || has("limit") || has("stopped") || has("interrupt")) {
    return has_values ? SolveStatus::kFeasible : SolveStatus::kTimeout;
  }
  throw Error(ErrorCode::kSolverOutput, "unknown solver status '" + std::string(text) + "'");
}

SolutionFormat detect_solution_format(std::string_view text) {
  std::size_t p = 0;
  while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
  const std::string_view head = text.substr(p);
  if (head.rfind("<", 0) == 0) return SolutionFormat::kXml;
  if (head.rfind("Model status", 0) == 0) return SolutionFormat::kHighs;
  const auto eol = head.find('\n');
  if (head.substr(0, eol).find(" - objective value") != std::string_view::npos) return SolutionFormat::kCbc;
  return SolutionFormat::kPlain;
}

MipSolution parse_solution(std::string_view text, SolutionFormat format) {
  if (format == SolutionFormat::kAuto) format = detect_solution_format(text);
  switch (format) {
    case SolutionFormat::kCbc: return parse_cbc(text);
    case SolutionFormat::kHighs: return parse_highs(text);
    case SolutionFormat::kXml: return parse_xml(text);
    case SolutionFormat::kPlain:
    case SolutionFormat::kAuto: break;
  }
  return parse_plain(text);
}

}  // namespace metromap
