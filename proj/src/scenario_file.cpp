#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symode/csv.hpp"
#include "symode/scenarios.hpp"

namespace symode {

namespace {

std::string trim(const std::string& text) {
  std::size_t from = 0;
  std::size_t to = text.size();
  while (from < to && std::isspace(static_cast<unsigned char>(text[from]))) ++from;
  while (to > from && std::isspace(static_cast<unsigned char>(text[to - 1]))) --to;
  return text.substr(from, to - from);
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& token, std::size_t line) {
  if (token == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size()) fail(line, "trailing characters in number '" + token + "'");
    return value;
  } catch (const std::invalid_argument&) {
    fail(line, "expected a number, got '" + token + "'");
  } catch (const std::out_of_range&) {
    fail(line, "number out of range: '" + token + "'");
  }
}

long parse_long(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    const long value = std::stol(token, &used);
    if (used != token.size()) fail(line, "trailing characters in integer '" + token + "'");
    return value;
  } catch (const std::invalid_argument&) {
    fail(line, "expected an integer, got '" + token + "'");
  } catch (const std::out_of_range&) {
    fail(line, "integer out of range: '" + token + "'");
  }
}

std::vector<double> parse_list(const std::string& value, std::size_t line) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string token;
  while (in >> token) out.push_back(parse_double(token, line));
  if (out.empty()) fail(line, "expected at least one number");
  return out;
}

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line;
};

// Shared line scanner for the .scn and sweep formats: whole-line # comments,
// [section] headers, and key = value pairs.
struct Document {
  struct Item {
    enum class Kind { section, pair } kind;
    std::string section;
    KeyValue pair;
  };
  std::vector<Item> items;
};

Document scan(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(number, "unterminated section header");
      doc.items.push_back({Document::Item::Kind::section,
                           trim(line.substr(1, line.size() - 2)),
                           {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(number, "expected 'key = value'");
    KeyValue kv;
    kv.key = trim(line.substr(0, eq));
    kv.value = trim(line.substr(eq + 1));
    kv.line = number;
    if (kv.key.empty()) fail(number, "empty key");
    doc.items.push_back({Document::Item::Kind::pair, "", std::move(kv)});
  }
  return doc;
}

}  // namespace

std::optional<Verdict> verdict_from_string(const std::string& text) {
  if (text == "asymptotically-stable") return Verdict::asymptotically_stable;
  if (text == "oscillatory") return Verdict::oscillatory;
  if (text == "divergent") return Verdict::divergent;
  if (text == "indeterminate") return Verdict::indeterminate;
  return std::nullopt;
}

Scenario parse_scenario(const std::string& text) {
  Scenario scenario;
  scenario.config = IntegratorConfig{};

  const Document doc = scan(text);
  std::string section;
  InputEntry input;
  bool in_input = false;
  bool have_n = false;

  const auto flush_input = [&]() {
    if (in_input) scenario.schedule.push_back(input);
    in_input = false;
  };

  for (const auto& item : doc.items) {
    if (item.kind == Document::Item::Kind::section) {
      flush_input();
      section = item.section;
      if (section == "input") {
        input = InputEntry{};
        in_input = true;
      } else if (section != "system" && section != "initial" &&
                 section != "integrator") {
        throw std::runtime_error("unknown section [" + section + "]");
      }
      continue;
    }
    const auto& [key, value, line] = item.pair;
    if (section.empty()) {
      if (key == "name") scenario.name = value;
      else if (key == "figure") scenario.figure = value;
      else if (key == "description") scenario.description = value;
      else if (key == "expected") {
        const auto verdict = verdict_from_string(value);
        if (!verdict) fail(line, "unknown verdict '" + value + "'");
        scenario.expected = verdict;
      } else {
        fail(line, "unknown top-level key '" + key + "'");
      }
    } else if (section == "system") {
      if (key == "n") {
        const long n = parse_long(value, line);
        if (n < 1) fail(line, "n must be >= 1");
        scenario.spec.n = static_cast<std::size_t>(n);
        have_n = true;
      } else if (key == "gen_offset") {
        scenario.spec.gen_offset = static_cast<int>(parse_long(value, line));
      } else if (key == "sup_offset") {
        scenario.spec.sup_offset = static_cast<int>(parse_long(value, line));
      } else if (key == "k1") {
        scenario.spec.k1 = parse_list(value, line);
      } else if (key == "k2") {
        scenario.spec.k2 = parse_list(value, line);
      } else if (key == "k3") {
        scenario.spec.k3 = parse_list(value, line);
      } else {
        fail(line, "unknown [system] key '" + key + "'");
      }
    } else if (section == "initial") {
      if (key == "values") scenario.initial = parse_list(value, line);
      else fail(line, "unknown [initial] key '" + key + "'");
    } else if (section == "integrator") {
      if (key == "dt") scenario.config.dt = parse_double(value, line);
      else if (key == "t_end") scenario.config.t_end = parse_double(value, line);
      else if (key == "record_stride") {
        const long stride = parse_long(value, line);
        if (stride < 1) fail(line, "record_stride must be >= 1");
        scenario.config.record_stride = static_cast<std::size_t>(stride);
      } else {
        fail(line, "unknown [integrator] key '" + key + "'");
      }
    } else if (section == "input") {
      if (key == "element") {
        const long element = parse_long(value, line);
        if (element < 1) fail(line, "input element is 1-based");
        input.element = static_cast<std::size_t>(element - 1);
      } else if (key == "t_start") {
        input.t_start = parse_double(value, line);
      } else if (key == "t_stop") {
        const double stop = parse_double(value, line);
        if (std::isinf(stop)) input.t_stop.reset();
        else input.t_stop = stop;
      } else if (key == "amplitude") {
        input.amplitude = parse_double(value, line);
      } else {
        fail(line, "unknown [input] key '" + key + "'");
      }
    }
  }
  flush_input();

  if (scenario.name.empty()) throw std::runtime_error("scenario has no name");
  if (!have_n) throw std::runtime_error("scenario has no [system] n");
  const std::size_t n = scenario.spec.n;
  const auto check_len = [&](const std::vector<double>& v, const char* what) {
    if (v.size() != n) {
      throw std::runtime_error(std::string(what) + " has " +
                               std::to_string(v.size()) + " entries, expected " +
                               std::to_string(n));
    }
  };
  check_len(scenario.spec.k1, "k1");
  check_len(scenario.spec.k2, "k2");
  check_len(scenario.spec.k3, "k3");
  check_len(scenario.initial, "initial values");
  for (const auto& entry : scenario.schedule) {
    if (entry.element >= n) {
      throw std::runtime_error("input element " +
                               std::to_string(entry.element + 1) +
                               " outside system of size " + std::to_string(n));
    }
  }
  return scenario;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str());
  } catch (const std::runtime_error& error) {
    throw std::runtime_error(path.string() + ": " + error.what());
  }
}

namespace {

std::string list_to_string(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_g17(values[i]);
  }
  return out;
}

}  // namespace

std::string serialize_scenario(const Scenario& scenario) {
  std::string out;
  out += "name = " + scenario.name + "\n";
  if (!scenario.figure.empty()) out += "figure = " + scenario.figure + "\n";
  if (!scenario.description.empty()) {
    out += "description = " + scenario.description + "\n";
  }
  if (scenario.expected) {
    out += "expected = " + to_string(*scenario.expected) + "\n";
  }
  out += "\n[system]\n";
  out += "n = " + std::to_string(scenario.spec.n) + "\n";
  out += "gen_offset = " + std::to_string(scenario.spec.gen_offset) + "\n";
  out += "sup_offset = " + std::to_string(scenario.spec.sup_offset) + "\n";
  out += "k1 = " + list_to_string(scenario.spec.k1) + "\n";
  out += "k2 = " + list_to_string(scenario.spec.k2) + "\n";
  out += "k3 = " + list_to_string(scenario.spec.k3) + "\n";
  out += "\n[initial]\n";
  out += "values = " + list_to_string(scenario.initial) + "\n";
  out += "\n[integrator]\n";
  out += "dt = " + format_g17(scenario.config.dt) + "\n";
  out += "t_end = " + format_g17(scenario.config.t_end) + "\n";
  out += "record_stride = " + std::to_string(scenario.config.record_stride) + "\n";
  for (const auto& input : scenario.schedule) {
    out += "\n[input]\n";
    out += "element = " + std::to_string(input.element + 1) + "\n";
    out += "t_start = " + format_g17(input.t_start) + "\n";
    out += "t_stop = " + (input.t_stop ? format_g17(*input.t_stop)
                                       : std::string("inf")) + "\n";
    out += "amplitude = " + format_g17(input.amplitude) + "\n";
  }
  return out;
}

AxisSelector AxisSelector::parse(const std::string& text) {
  const std::string token = trim(text);
  AxisSelector selector;
  const auto bare = [&](const std::string& name, Kind kind) {
    if (token == name) {
      selector.kind = kind;
      return true;
    }
    return false;
  };
  if (bare("k1", Kind::k1_uniform) || bare("k2", Kind::k2_uniform) ||
      bare("k3", Kind::k3_uniform)) {
    return selector;
  }
  const auto open = token.find('[');
  if (open != std::string::npos && token.back() == ']') {
    const std::string family = token.substr(0, open);
    const std::string index = token.substr(open + 1, token.size() - open - 2);
    long element = 0;
    try {
      std::size_t used = 0;
      element = std::stol(index, &used);
      if (used != index.size()) element = 0;
    } catch (...) {
      element = 0;
    }
    if (element >= 1) {
      selector.element = static_cast<std::size_t>(element - 1);
      if (family == "k1") { selector.kind = Kind::k1_element; return selector; }
      if (family == "k2") { selector.kind = Kind::k2_element; return selector; }
      if (family == "k3") { selector.kind = Kind::k3_element; return selector; }
      if (family == "init") { selector.kind = Kind::init_element; return selector; }
      if (family == "dev") { selector.kind = Kind::dev_element; return selector; }
    }
  }
  throw std::runtime_error(
      "unknown axis selector '" + token +
      "' (expected k1|k2|k3, k1[i]|k2[i]|k3[i], init[i], or dev[i])");
}

std::string AxisSelector::to_string() const {
  const std::string index = "[" + std::to_string(element + 1) + "]";
  switch (kind) {
    case Kind::k1_uniform: return "k1";
    case Kind::k2_uniform: return "k2";
    case Kind::k3_uniform: return "k3";
    case Kind::k1_element: return "k1" + index;
    case Kind::k2_element: return "k2" + index;
    case Kind::k3_element: return "k3" + index;
    case Kind::init_element: return "init" + index;
    case Kind::dev_element: return "dev" + index;
  }
  return "?";
}

SweepGrid load_sweep_file(const std::filesystem::path& path,
                          const std::vector<Scenario>& catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sweep file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();

  const Document doc = scan(buffer.str());
  SweepGrid grid;
  bool have_base = false;
  std::optional<double> dt_override, t_end_override;
  std::string section;

  for (const auto& item : doc.items) {
    if (item.kind == Document::Item::Kind::section) {
      section = item.section;
      if (section != "axis1" && section != "axis2") {
        throw std::runtime_error("unknown sweep section [" + section + "]");
      }
      continue;
    }
    const auto& [key, value, line] = item.pair;
    if (section.empty()) {
      if (key == "base") {
        if (const Scenario* builtin = find_scenario(catalog, value)) {
          grid.base = *builtin;
        } else if (std::filesystem::exists(value)) {
          grid.base = load_scenario_file(value);
        } else {
          throw std::runtime_error("unknown base scenario '" + value +
                                   "' (not a builtin name or a file)");
        }
        have_base = true;
      } else if (key == "dt") {
        dt_override = parse_double(value, line);
      } else if (key == "t_end") {
        t_end_override = parse_double(value, line);
      } else {
        fail(line, "unknown sweep key '" + key + "'");
      }
    } else {
      SweepAxis& axis = section == "axis1" ? grid.axis1 : grid.axis2;
      if (key == "param") axis.selector = AxisSelector::parse(value);
      else if (key == "values") axis.values = parse_list(value, line);
      else fail(line, "unknown axis key '" + key + "'");
    }
  }

  if (!have_base) throw std::runtime_error("sweep file has no base scenario");
  if (grid.axis1.values.empty() || grid.axis2.values.empty()) {
    throw std::runtime_error("both sweep axes need nonempty value lists");
  }
  if (dt_override) grid.base.config.dt = *dt_override;
  if (t_end_override) grid.base.config.t_end = *t_end_override;
  return grid;
}

}  // namespace symode
