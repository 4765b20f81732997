#include "qcs/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "qcs/error.hpp"

namespace qcs {

namespace {

const std::set<std::string, std::less<>> kSections{"field", "nodes", "costs", "thresholds", "sim", "events"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::Parse, fmt::format("line {}: {}", line, msg));
}

template <typename T>
T parse_number(std::string_view token, int line, std::string_view what) {
  T value{};
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) fail(line, fmt::format("bad {} '{}'", what, token));
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) fail(line, fmt::format("non-finite {} '{}'", what, token));
  }
  return value;
}

using KeyValues = std::map<std::string, std::pair<std::string, int>, std::less<>>;

KeyValues key_values(const SectionDoc& doc, std::string_view section,
                     std::initializer_list<std::string_view> allowed) {
  KeyValues out;
  auto it = doc.find(std::string(section));
  if (it == doc.end()) return out;
  for (const auto& line : it->second) {
    const auto eq = line.text.find('=');
    if (eq == std::string::npos) fail(line.number, fmt::format("expected key = value in [{}]", section));
    auto key = std::string(trim(std::string_view(line.text).substr(0, eq)));
    auto value = std::string(trim(std::string_view(line.text).substr(eq + 1)));
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(line.number, fmt::format("unknown key '{}' in [{}]", key, section));
    }
    if (out.contains(key)) fail(line.number, fmt::format("duplicate key '{}'", key));
    out.emplace(std::move(key), std::make_pair(std::move(value), line.number));
  }
  return out;
}

template <typename T>
void read_key(const KeyValues& kv, std::string_view key, T& target) {
  if (auto it = kv.find(key); it != kv.end()) {
    target = parse_number<T>(it->second.first, it->second.second, key);
  }
}

}  // namespace

SectionDoc parse_sections(std::string_view text) {
  SectionDoc doc;
  std::string current;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(number, "unterminated section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSections.contains(current)) fail(number, fmt::format("unknown section [{}]", current));
      if (doc.contains(current)) fail(number, fmt::format("duplicate section [{}]", current));
      doc[current];
      continue;
    }
    if (current.empty()) fail(number, "content before the first section header");
    doc[current].push_back(SectionLine{number, std::string(line)});
  }
  return doc;
}

Layout layout_from_sections(const SectionDoc& doc) {
  if (!doc.contains("field")) throw Error(ErrorCode::Parse, "missing [field] section");
  if (!doc.contains("nodes")) throw Error(ErrorCode::Parse, "missing [nodes] section");
  Layout layout;
  const auto field = key_values(doc, "field", {"width", "height", "radio_range"});
  if (!field.contains("width") || !field.contains("height")) {
    throw Error(ErrorCode::Parse, "[field] needs width and height");
  }
  read_key(field, "width", layout.field.width);
  read_key(field, "height", layout.field.height);
  read_key(field, "radio_range", layout.radio_range);

  for (const auto& line : doc.at("nodes")) {
    const auto tok = split_ws(line.text);
    if (tok.size() != 3 && tok.size() != 4) fail(line.number, "node row must be: id x y [base]");
    NodePlacement p;
    const auto id = parse_number<int>(tok[0], line.number, "node id");
    if (id < 1 || id > kMaxNodeId) fail(line.number, fmt::format("node id {} outside [1, {}]", id, kMaxNodeId));
    p.id = NodeId{static_cast<std::uint16_t>(id)};
    p.pos.x = parse_number<double>(tok[1], line.number, "x");
    p.pos.y = parse_number<double>(tok[2], line.number, "y");
    if (tok.size() == 4) {
      if (tok[3] != "base") fail(line.number, fmt::format("unexpected token '{}' (only 'base' allowed)", tok[3]));
      p.base = true;
    }
    layout.nodes.push_back(p);
  }
  return layout;
}

Topology Scenario::topology() const { return Topology(layout.field, layout.radio_range, layout.nodes); }

void Scenario::validate() const {
  if (layout.nodes.size() < 2) {
    throw Error(ErrorCode::Validation, fmt::format("scenario needs at least 2 nodes, found {}", layout.nodes.size()));
  }
  const auto topo = topology();
  costs.validate();
  thresholds.validate();
  if (sim.horizon < 1) throw Error(ErrorCode::Validation, "horizon must be at least 1");
  if (!(sim.loss_prob >= 0.0 && sim.loss_prob <= 1.0)) {
    throw Error(ErrorCode::Validation, fmt::format("loss_prob {} outside [0, 1]", sim.loss_prob));
  }
  for (const auto& ev : events) {
    if (!topo.contains(ev.node)) {
      throw Error(ErrorCode::UnknownNode, fmt::format("event at tick {} names unknown node {}", ev.tick, ev.node.value));
    }
    if (topo.is_base(ev.node)) {
      throw Error(ErrorCode::Validation, fmt::format("event at tick {} targets the base station", ev.tick));
    }
    if (ev.tick >= sim.horizon) {
      throw Error(ErrorCode::Validation,
                  fmt::format("event at tick {} is not before the horizon {}", ev.tick, sim.horizon));
    }
  }
}

Scenario parse_scenario(std::string_view text) {
  const auto doc = parse_sections(text);
  Scenario s;
  s.layout = layout_from_sections(doc);

  const auto costs = key_values(doc, "costs", {"e1", "e2", "ep", "threshold", "init_min", "init_max",
                                               "isolation_multiplier"});
  read_key(costs, "e1", s.costs.e1);
  read_key(costs, "e2", s.costs.e2);
  read_key(costs, "ep", s.costs.ep);
  read_key(costs, "threshold", s.costs.threshold);
  read_key(costs, "init_min", s.costs.init_min);
  read_key(costs, "init_max", s.costs.init_max);
  read_key(costs, "isolation_multiplier", s.costs.isolation_multiplier);

  const auto th = key_values(doc, "thresholds", {"irregular", "devastating"});
  read_key(th, "irregular", s.thresholds.irregular_level);
  read_key(th, "devastating", s.thresholds.devastating_level);

  const auto sim = key_values(doc, "sim", {"seed", "horizon", "loss_prob", "neighbor_timeout"});
  read_key(sim, "seed", s.sim.seed);
  read_key(sim, "horizon", s.sim.horizon);
  read_key(sim, "loss_prob", s.sim.loss_prob);
  read_key(sim, "neighbor_timeout", s.sim.neighbor_timeout);

  if (auto it = doc.find("events"); it != doc.end()) {
    for (const auto& line : it->second) {
      const auto tok = split_ws(line.text);
      if (tok.size() != 3) fail(line.number, "event row must be: tick node reading");
      SenseEvent ev;
      ev.tick = parse_number<Tick>(tok[0], line.number, "tick");
      const auto id = parse_number<int>(tok[1], line.number, "node id");
      if (id < 1 || id > kMaxNodeId) fail(line.number, fmt::format("node id {} outside [1, {}]", id, kMaxNodeId));
      ev.node = NodeId{static_cast<std::uint16_t>(id)};
      ev.reading = parse_number<double>(tok[2], line.number, "reading");
      s.events.push_back(ev);
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open scenario file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace qcs
