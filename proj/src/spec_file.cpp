#include "herglotz/spec_file.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "herglotz/error.hpp"

namespace herglotz {

const SpecValue* SpecSection::find(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

const SpecSection* SpecDocument::find(std::string_view name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::string at_line(int line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

SpecDocument parse_spec_text(std::string_view text) {
  SpecDocument doc;
  std::vector<std::string> issues;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    // strip a comment that is not inside quotes
    bool in_quote = false;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') in_quote = !in_quote;
      if (raw[i] == '#' && !in_quote) {
        cut = i;
        break;
      }
    }
    std::string_view line = trim(raw.substr(0, cut));
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back(at_line(line_no) + "malformed section header");
        continue;
      }
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (!valid_key(name)) {
        issues.push_back(at_line(line_no) + "malformed section name '" + name + "'");
        continue;
      }
      if (doc.find(name)) issues.push_back(at_line(line_no) + "duplicate section [" + name + "]");
      doc.sections.push_back({name, line_no, {}});
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back(at_line(line_no) + "expected 'key = value'");
      continue;
    }
    std::string key(trim(line.substr(0, eq)));
    std::string_view val = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      issues.push_back(at_line(line_no) + "malformed key '" + key + "'");
      continue;
    }
    if (doc.sections.empty()) {
      issues.push_back(at_line(line_no) + "key '" + key + "' outside any section");
      continue;
    }
    SpecValue v;
    v.line = line_no;
    if (!val.empty() && val.front() == '"') {
      if (val.size() < 2 || val.back() != '"' ||
          val.substr(1, val.size() - 2).find('"') != std::string_view::npos) {
        issues.push_back(at_line(line_no) + "unterminated or malformed quoted value");
        continue;
      }
      v.quoted = true;
      v.text = std::string(val.substr(1, val.size() - 2));
    } else {
      v.text = std::string(val);
      const char* first = val.data();
      const char* last = val.data() + val.size();
      if (!val.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, v.number);
      if (val.empty() || ec != std::errc() || ptr != last || !std::isfinite(v.number)) {
        issues.push_back(at_line(line_no) + "value of '" + key + "' is neither a number nor quoted text");
        continue;
      }
    }
    auto& section = doc.sections.back();
    if (section.find(key))
      issues.push_back(at_line(line_no) + "duplicate key '" + section.name + "." + key + "'");
    section.entries.emplace_back(std::move(key), std::move(v));
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return doc;
}

SpecDocument read_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str());
}

std::string format_spec(const SpecDocument& doc) {
  std::string out;
  for (std::size_t s = 0; s < doc.sections.size(); ++s) {
    if (s) out += '\n';
    out += '[' + doc.sections[s].name + "]\n";
    for (const auto& [k, v] : doc.sections[s].entries) {
      out += k + " = ";
      out += v.quoted ? '"' + v.text + '"' : v.text;
      out += '\n';
    }
  }
  return out;
}

// ---- schema ----

namespace {

class SchemaReader {
 public:
  explicit SchemaReader(const SpecDocument& doc) : doc_(doc) {}

  const SpecSection* section(std::string_view name, bool required) {
    seen_sections_.insert(std::string(name));
    const SpecSection* s = doc_.find(name);
    if (!s && required) issues.push_back("missing section [" + std::string(name) + "]");
    return s;
  }

  const SpecValue* value(const SpecSection* s, std::string_view key, bool required) {
    if (!s) return nullptr;
    seen_keys_.insert(s->name + "." + std::string(key));
    const SpecValue* v = s->find(key);
    if (!v && required) issues.push_back("missing key '" + s->name + "." + std::string(key) + "'");
    return v;
  }

  double number(const SpecSection* s, std::string_view key, double fallback, bool required = true) {
    const SpecValue* v = value(s, key, required);
    if (!v) return fallback;
    if (v->quoted) {
      issues.push_back(at_line(v->line) + "'" + s->name + "." + std::string(key) + "' must be a number");
      return fallback;
    }
    return v->number;
  }

  int integer(const SpecSection* s, std::string_view key, int fallback) {
    const double d = number(s, key, fallback);
    if (d != std::floor(d) || d < 1 || d > 64) {
      issues.push_back("'" + s->name + "." + std::string(key) + "' must be a positive integer");
      return fallback;
    }
    return static_cast<int>(d);
  }

  std::string text(const SpecSection* s, std::string_view key, bool required = true) {
    const SpecValue* v = value(s, key, required);
    if (!v) return {};
    if (!v->quoted) {
      issues.push_back(at_line(v->line) + "'" + s->name + "." + std::string(key) +
                       "' must be a quoted expression");
      return {};
    }
    return v->text;
  }

  // everything present in the document but never asked for
  void reject_unknown() {
    for (const auto& s : doc_.sections) {
      if (!seen_sections_.count(s.name)) {
        issues.push_back(at_line(s.line) + "unknown section [" + s.name + "]");
        continue;
      }
      for (const auto& [k, v] : s.entries)
        if (!seen_keys_.count(s.name + "." + k))
          issues.push_back(at_line(v.line) + "unknown key '" + s.name + "." + k + "'");
    }
  }

  std::vector<std::string> issues;

 private:
  const SpecDocument& doc_;
  std::set<std::string> seen_sections_;
  std::set<std::string> seen_keys_;
};

FamilyContent read_family(SchemaReader& r, const SpecSection* fam, int m) {
  FamilyContent f;
  f.time_map = r.text(fam, "T");
  for (int c = 1; c <= m; ++c) f.state_maps.push_back(r.text(fam, "X" + std::to_string(c)));
  f.value_map = r.text(fam, "Z");
  f.xi = r.number(fam, "xi", 0.0, false);
  return f;
}

}  // namespace

ProblemFileContent problem_content(const SpecDocument& doc) {
  SchemaReader r(doc);
  ProblemFileContent c;
  const SpecSection* prob = r.section("problem", true);
  c.a = r.number(prob, "a", c.a);
  c.b = r.number(prob, "b", c.b);
  c.tau = r.number(prob, "tau", c.tau);
  c.gamma = r.number(prob, "gamma", c.gamma);
  c.n = prob ? r.integer(prob, "n", 1) : 1;
  c.m = prob ? r.integer(prob, "m", 1) : 1;

  const SpecSection* lag = r.section("lagrangian", true);
  c.lagrangian = r.text(lag, "L");

  const SpecSection* hist = r.section("history", true);
  for (int j = 1; j <= c.m; ++j) c.history.push_back(r.text(hist, "mu" + std::to_string(j)));

  if (const SpecSection* fam = r.section("family", false)) c.family = read_family(r, fam, c.m);

  if (const SpecSection* cand = r.section("candidate", false))
    for (int j = 1; j <= c.m; ++j) c.candidate.push_back(r.text(cand, "x" + std::to_string(j)));

  r.reject_unknown();
  if (!r.issues.empty()) throw ValidationError(std::move(r.issues));
  return c;
}

FamilyContent family_content(const SpecDocument& doc, int m) {
  if (doc.find("problem")) {
    ProblemFileContent c = problem_content(doc);
    if (!c.family) throw ValidationError("missing section [family]");
    if (c.m != m) throw ValidationError("family file describes a problem of different dimension");
    return *c.family;
  }
  SchemaReader r(doc);
  const SpecSection* fam = r.section("family", true);
  FamilyContent f;
  if (fam) f = read_family(r, fam, m);
  r.reject_unknown();
  if (!r.issues.empty()) throw ValidationError(std::move(r.issues));
  return f;
}

}  // namespace herglotz
