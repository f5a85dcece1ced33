#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace herglotz {

// One `key = value` line.  Values are numbers or double-quoted text.
struct SpecValue {
  bool quoted = false;
  std::string text;  // raw token for numbers, contents for quoted text
  double number = 0.0;
  int line = 0;
};

struct SpecSection {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, SpecValue>> entries;

  const SpecValue* find(std::string_view key) const;
};

struct SpecDocument {
  std::vector<SpecSection> sections;

  const SpecSection* find(std::string_view name) const;
};

// Syntax only: sections, keys, values, comments.  Schema checks live in the readers below.
SpecDocument parse_spec_text(std::string_view text);
SpecDocument read_spec_file(const std::string& path);
std::string format_spec(const SpecDocument& doc);

struct FamilyContent {
  std::string time_map;                    // T
  std::vector<std::string> state_maps;     // X1..Xm
  std::string value_map;                   // Z
  double xi = 0.0;
};

struct ProblemFileContent {
  double a = 0.0;
  double b = 1.0;
  double tau = 0.0;
  double gamma = 0.0;
  int n = 1;
  int m = 1;
  std::string lagrangian;
  std::vector<std::string> history;
  std::optional<FamilyContent> family;
  std::vector<std::string> candidate;  // optional [candidate] x1..xm
};

// Schema for problem files: [problem], [lagrangian], [history], optional [family] and
// [candidate].  Unknown or missing keys are reported together in one ValidationError.
ProblemFileContent problem_content(const SpecDocument& doc);

// Reads the [family] section of a file that is either a full problem file or holds only
// a [family] section.  m is the state dimension of the problem it will be applied to.
FamilyContent family_content(const SpecDocument& doc, int m);

}  // namespace herglotz
