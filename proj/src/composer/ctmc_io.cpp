#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "errml/composer.hpp"
#include "errml/diagnostic.hpp"

namespace errml::compose {

std::string format_rate(double rate) {
  // Shortest round-trip digits, padded to 17 significant digits.
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, rate, std::chars_format::scientific);
  std::string s(buf, res.ptr);
  auto e = s.find('e');
  if (e == std::string::npos) return s;  // inf or nan
  std::string mantissa = s.substr(0, e);
  std::string exponent = s.substr(e + 1);
  if (mantissa.find('.') == std::string::npos) mantissa += '.';
  auto decimals = mantissa.size() - mantissa.find('.') - 1;
  if (decimals < 16) mantissa.append(16 - decimals, '0');
  bool negative = !exponent.empty() && exponent[0] == '-';
  std::size_t start = (!exponent.empty() && (exponent[0] == '-' || exponent[0] == '+')) ? 1 : 0;
  std::size_t nz = exponent.find_first_not_of('0', start);
  std::string digits = nz == std::string::npos ? "0" : exponent.substr(nz);
  return mantissa + "e" + (negative && digits != "0" ? "-" : "") + digits;
}

void write_transitions(const Ctmc& ctmc, std::ostream& out) {
  out << "STATES " << ctmc.num_states << " TRANSITIONS " << ctmc.transitions.size() << '\n';
  for (const auto& t : ctmc.transitions) {
    out << t.source << ' ' << t.destination << ' ' << format_rate(t.rate) << '\n';
  }
}

void write_labels(const Ctmc& ctmc, std::ostream& out) {
  out << "#INIT " << ctmc.initial << '\n';
  if (!ctmc.declared_labels.empty()) {
    out << "#LABELS";
    for (const auto& l : ctmc.declared_labels) out << ' ' << l;
    out << '\n';
  }
  for (std::size_t i = 0; i < ctmc.labels.size(); ++i) {
    if (ctmc.labels[i].empty()) continue;
    out << i;
    for (const auto& l : ctmc.labels[i]) out << ' ' << l;
    out << '\n';
  }
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::io, "cannot write " + path.string());
  return f;
}

[[noreturn]] void malformed(const std::string& what, std::size_t line) {
  throw Error(ErrorCode::format, fmt::format("line {}: {}", line, what));
}

}  // namespace

void write_dot(const Ctmc& ctmc, std::ostream& out) {
  out << "digraph ctmc {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < ctmc.num_states; ++i) {
    std::string label = std::to_string(i);
    if (i < ctmc.descriptions.size()) label += "\\n" + dot_escape(ctmc.descriptions[i]);
    if (i < ctmc.labels.size()) {
      for (const auto& l : ctmc.labels[i]) label += "\\n" + dot_escape(l);
    }
    out << "  s" << i << " [label=\"" << label << "\""
        << (i == ctmc.initial ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (const auto& t : ctmc.transitions) {
    out << "  s" << t.source << " -> s" << t.destination << " [label=\"" << format_rate(t.rate)
        << "\"];\n";
  }
  out << "}\n";
}

void export_ctmc(const Ctmc& ctmc, ExportFormat format, const std::filesystem::path& path) {
  if (format == ExportFormat::dot) {
    auto f = open_out(path);
    write_dot(ctmc, f);
    if (!f) throw Error(ErrorCode::io, "cannot write " + path.string());
    return;
  }
  auto tra_path = path;
  tra_path += ".tra";
  auto lab_path = path;
  lab_path += ".lab";
  auto tra = open_out(tra_path);
  write_transitions(ctmc, tra);
  auto lab = open_out(lab_path);
  write_labels(ctmc, lab);
  if (!tra) throw Error(ErrorCode::io, "cannot write " + tra_path.string());
  if (!lab) throw Error(ErrorCode::io, "cannot write " + lab_path.string());
}

Ctmc read_explicit(std::istream& transitions, std::istream& labels) {
  Ctmc c;
  std::string line;
  std::size_t lineno = 0;
  std::size_t expected = 0;
  bool header = false;
  while (std::getline(transitions, line)) {
    ++lineno;
    std::istringstream in(line);
    std::string first;
    if (!(in >> first)) continue;
    if (!header) {
      std::string kw;
      if (first != "STATES" || !(in >> c.num_states >> kw >> expected) || kw != "TRANSITIONS") {
        malformed("expected 'STATES n TRANSITIONS m'", lineno);
      }
      header = true;
      continue;
    }
    RateTransition t;
    std::string rate;
    try {
      t.source = std::stoull(first);
    } catch (const std::exception&) {
      malformed("bad source index '" + first + "'", lineno);
    }
    if (!(in >> t.destination >> rate)) malformed("expected 'source destination rate'", lineno);
    try {
      t.rate = std::stod(rate);
    } catch (const std::exception&) {
      malformed("bad rate '" + rate + "'", lineno);
    }
    if (t.source >= c.num_states || t.destination >= c.num_states) {
      malformed("state index out of range", lineno);
    }
    if (!(t.rate > 0.0)) malformed("rate must be positive", lineno);
    c.transitions.push_back(t);
  }
  if (!header) malformed("missing header", lineno);
  if (c.transitions.size() != expected) {
    throw Error(ErrorCode::format, fmt::format("header announces {} transitions, found {}",
                                               expected, c.transitions.size()));
  }
  c.normalize();

  c.labels.assign(c.num_states, {});
  lineno = 0;
  while (std::getline(labels, line)) {
    ++lineno;
    std::istringstream in(line);
    std::string first;
    if (!(in >> first)) continue;
    if (first == "#INIT") {
      if (!(in >> c.initial) || c.initial >= c.num_states) malformed("bad #INIT", lineno);
      continue;
    }
    if (first == "#LABELS") {
      std::string l;
      while (in >> l) c.declared_labels.push_back(l);
      continue;
    }
    std::size_t state = 0;
    try {
      state = std::stoull(first);
    } catch (const std::exception&) {
      malformed("bad state index '" + first + "'", lineno);
    }
    if (state >= c.num_states) malformed("state index out of range", lineno);
    std::string l;
    while (in >> l) {
      c.labels[state].push_back(l);
      if (!c.declares(l)) c.declared_labels.push_back(l);
    }
    std::sort(c.labels[state].begin(), c.labels[state].end());
  }
  std::sort(c.declared_labels.begin(), c.declared_labels.end());
  return c;
}

Ctmc read_explicit(const std::filesystem::path& transitions_file) {
  std::ifstream tra(transitions_file);
  if (!tra) throw Error(ErrorCode::io, "cannot read " + transitions_file.string());
  auto lab_path = transitions_file;
  lab_path.replace_extension(".lab");
  std::ifstream lab(lab_path);
  if (!lab) {
    std::istringstream none;
    return read_explicit(tra, none);
  }
  return read_explicit(tra, lab);
}

}  // namespace errml::compose
