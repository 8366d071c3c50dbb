#include "odoforge/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace odoforge {

ConfigError::ConfigError(ErrorKind kind, int line, int column, std::string field, const std::string& reason)
    : Error(kind, (line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " : "") +
                      (field.empty() ? "" : field + ": ") + reason),
      line_(line),
      column_(column),
      field_(std::move(field)) {}

bool is_verb(std::string_view v) { return std::find(std::begin(kVerbs), std::end(kVerbs), v) != std::end(kVerbs); }

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int key_col = 0;
  int value_col = 0;
};

// section -> key -> entry
using Sections = std::map<std::string, std::map<std::string, Entry>>;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

Sections lex(std::string_view text) {
  Sections out;
  std::string current;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t b = 0;
    while (b < line.size() && is_space(line[b])) ++b;
    std::size_t e = line.size();
    while (e > b && is_space(line[e - 1])) --e;
    if (b == e) continue;
    const int col = static_cast<int>(b) + 1;

    if (line[b] == '[') {
      if (line[e - 1] != ']')
        throw ConfigError(ErrorKind::SyntaxError, lineno, static_cast<int>(e) + 1, "", "expected ']'");
      std::string name(line.substr(b + 1, e - b - 2));
      if (name.empty() || !std::all_of(name.begin(), name.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
        throw ConfigError(ErrorKind::SyntaxError, lineno, col + 1, "", "bad section name");
      if (out.count(name))
        throw ConfigError(ErrorKind::SemanticError, lineno, col, name, "section appears twice");
      out[name];
      current = name;
      continue;
    }
    if (current.empty()) throw ConfigError(ErrorKind::SyntaxError, lineno, col, "", "entry before any section");
    const auto eq = line.find('=', b);
    if (eq == std::string_view::npos || eq >= e)
      throw ConfigError(ErrorKind::SyntaxError, lineno, static_cast<int>(e) + 1, "", "expected '='");
    std::size_t ke = eq;
    while (ke > b && is_space(line[ke - 1])) --ke;
    std::string key(line.substr(b, ke - b));
    if (key.empty()) throw ConfigError(ErrorKind::SyntaxError, lineno, col, "", "missing key");
    for (std::size_t i = 0; i < key.size(); ++i)
      if (!std::isalnum(static_cast<unsigned char>(key[i])) && key[i] != '_')
        throw ConfigError(ErrorKind::SyntaxError, lineno, col + static_cast<int>(i), "", "bad character in key");
    std::size_t vb = eq + 1;
    while (vb < e && is_space(line[vb])) ++vb;
    auto& sec = out[current];
    if (sec.count(key))
      throw ConfigError(ErrorKind::SemanticError, lineno, col, current + "." + key, "key appears twice");
    sec[key] = Entry{std::string(line.substr(vb, e - vb)), lineno, col, static_cast<int>(vb) + 1};
  }
  return out;
}

std::vector<std::pair<std::string, int>> split_list(const Entry& e, bool allow_space) {
  std::vector<std::pair<std::string, int>> items;
  std::string cur;
  int start = -1;
  auto flush = [&] {
    if (!cur.empty()) items.emplace_back(cur, start);
    cur.clear();
    start = -1;
  };
  for (std::size_t i = 0; i < e.value.size(); ++i) {
    const char c = e.value[i];
    if (c == ',' || (allow_space && is_space(c))) {
      flush();
    } else if (is_space(c)) {
      continue;
    } else {
      if (start < 0) start = e.value_col + static_cast<int>(i);
      cur += c;
    }
  }
  flush();
  return items;
}

int parse_positive(const Entry& e, const std::string& field) {
  int v = 0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError(ErrorKind::SyntaxError, e.line, e.value_col + static_cast<int>(ptr - first), field,
                      "expected an integer");
  if (v <= 0) throw ConfigError(ErrorKind::SemanticError, e.line, e.value_col, field, "must be positive");
  return v;
}

Word parse_at(const std::string& text, int line, int col, const GroupPtr& g, const std::string& field) {
  try {
    return parse_word(text, g);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError(err.kind() == ErrorKind::UnknownGenerator ? ErrorKind::SemanticError : ErrorKind::SyntaxError,
                      line, col, field, "'" + text + "': " + err.what());
  }
}

std::vector<Word> parse_window(const Entry& e, const GroupPtr& g) {
  const std::string field = "run.window";
  if (const auto dots = e.value.find(".."); dots != std::string::npos) {
    if (g->kind() != GroupKind::FreeAbelian || g->rank() != 1)
      throw ConfigError(ErrorKind::SemanticError, e.line, e.value_col, field, "ranges need a rank-1 abelian group");
    auto num = [&](std::string_view s, int col) {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(ErrorKind::SyntaxError, e.line, col, field, "expected lo..hi");
      return v;
    };
    const auto lo = num(std::string_view(e.value).substr(0, dots), e.value_col);
    const auto hi = num(std::string_view(e.value).substr(dots + 2), e.value_col + static_cast<int>(dots) + 2);
    if (hi < lo) throw ConfigError(ErrorKind::SemanticError, e.line, e.value_col, field, "empty range");
    std::vector<Word> out;
    for (auto i = lo; i <= hi; ++i) out.push_back(Word::from_exponents(g, {i}));
    return out;
  }
  if (e.value.rfind("ball", 0) == 0) {
    Entry r = e;
    r.value = e.value.substr(4);
    r.value.erase(0, r.value.find_first_not_of(" \t"));
    r.value_col += static_cast<int>(e.value.size() - r.value.size());
    if (r.value == "0") return {Word::identity(g)};
    return ball_enumerate(g, parse_positive(r, field));
  }
  std::vector<Word> out;
  for (const auto& [w, col] : split_list(e, false)) out.push_back(parse_at(w, e.line, col, g, field));
  return out;
}

std::string list_string(const std::vector<Word>& ws) {
  std::string s;
  for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? ", " : "") + ws[i].to_string();
  return s;
}

const std::map<std::string, std::vector<std::string>>& allowed_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"group", {"kind", "generators"}},
      {"run", {"depth", "radius", "window", "sample_radius", "tolerance", "command", "caps", "array_file"}},
      {"factor", {"target"}},
  };
  return keys;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const auto sections = lex(text);
  for (const auto& [name, entries] : sections) {
    if (name == "chain") continue;
    const auto it = allowed_keys().find(name);
    if (it == allowed_keys().end()) throw ConfigError(ErrorKind::SemanticError, 0, 0, name, "unknown section");
    for (const auto& [key, e] : entries)
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError(ErrorKind::SemanticError, e.line, e.key_col, name + "." + key, "unknown key");
  }
  for (const char* need : {"group", "chain"})
    if (!sections.count(need)) throw ConfigError(ErrorKind::SemanticError, 0, 0, need, "missing section");

  RunConfig cfg;
  const auto& grp = sections.at("group");
  auto field = [&](const std::map<std::string, Entry>& sec, const std::string& sname, const std::string& key) -> const Entry& {
    const auto it = sec.find(key);
    if (it == sec.end()) throw ConfigError(ErrorKind::SemanticError, 0, 0, sname + "." + key, "missing");
    return it->second;
  };
  const auto& kind = field(grp, "group", "kind");
  GroupKind gk;
  if (kind.value == "free")
    gk = GroupKind::Free;
  else if (kind.value == "free_abelian" || kind.value == "abelian")
    gk = GroupKind::FreeAbelian;
  else
    throw ConfigError(ErrorKind::SemanticError, kind.line, kind.value_col, "group.kind",
                      "expected free or free_abelian, got '" + kind.value + "'");
  const auto& gens = field(grp, "group", "generators");
  std::vector<std::string> names;
  for (auto& [n, col] : split_list(gens, true)) names.push_back(n);
  try {
    cfg.group = GroupDescriptor::make(gk, names);
  } catch (const Error& err) {
    throw ConfigError(ErrorKind::SemanticError, gens.line, gens.value_col, "group.generators", err.what());
  }

  const auto& chain = sections.at("chain");
  std::map<int, const Entry*> by_level;
  for (const auto& [key, e] : chain) {
    int n = 0;
    const bool ok = key.rfind("level", 0) == 0 && key.size() > 5 &&
                    std::from_chars(key.data() + 5, key.data() + key.size(), n).ptr == key.data() + key.size();
    if (!ok || n < 1) throw ConfigError(ErrorKind::SemanticError, e.line, e.key_col, "chain." + key, "expected levelN, N >= 1");
    by_level[n] = &e;
  }
  if (by_level.empty()) throw ConfigError(ErrorKind::SemanticError, 0, 0, "chain", "no levels");
  int expect = 1;
  for (const auto& [n, e] : by_level) {
    if (n != expect)
      throw ConfigError(ErrorKind::SemanticError, e->line, e->key_col, "chain.level" + std::to_string(expect), "missing");
    ++expect;
    std::vector<Word> ws;
    for (const auto& [w, col] : split_list(*e, false))
      ws.push_back(parse_at(w, e->line, col, cfg.group, "chain.level" + std::to_string(n)));
    if (ws.empty()) throw ConfigError(ErrorKind::SemanticError, e->line, e->value_col, "chain.level" + std::to_string(n), "no generators");
    cfg.levels.push_back(std::move(ws));
  }
  cfg.depth = static_cast<int>(cfg.levels.size());

  if (const auto it = sections.find("run"); it != sections.end()) {
    const auto& run = it->second;
    if (auto e = run.find("depth"); e != run.end()) {
      cfg.depth = parse_positive(e->second, "run.depth");
      if (cfg.depth > static_cast<int>(cfg.levels.size()))
        throw ConfigError(ErrorKind::SemanticError, e->second.line, e->second.value_col, "run.depth",
                          "exceeds the " + std::to_string(cfg.levels.size()) + " levels given");
    }
    if (auto e = run.find("radius"); e != run.end()) cfg.radius = parse_positive(e->second, "run.radius");
    if (auto e = run.find("sample_radius"); e != run.end())
      cfg.sample_radius = parse_positive(e->second, "run.sample_radius");
    if (auto e = run.find("tolerance"); e != run.end()) {
      const auto& v = e->second.value;
      double t = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), t);
      if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(ErrorKind::SyntaxError, e->second.line, e->second.value_col, "run.tolerance", "expected a number");
      if (!(t > 0)) throw ConfigError(ErrorKind::SemanticError, e->second.line, e->second.value_col, "run.tolerance", "must be positive");
      cfg.tolerance = t;
    }
    if (auto e = run.find("command"); e != run.end()) {
      if (!is_verb(e->second.value))
        throw ConfigError(ErrorKind::SemanticError, e->second.line, e->second.value_col, "run.command",
                          "unknown verb '" + e->second.value + "'");
      cfg.command = e->second.value;
    }
    if (auto e = run.find("caps"); e != run.end()) {
      try {
        cfg.caps = caps_from_string(e->second.value, cfg.caps);
      } catch (const Error& err) {
        throw ConfigError(ErrorKind::SemanticError, e->second.line, e->second.value_col, "run.caps", err.what());
      }
    }
    if (auto e = run.find("window"); e != run.end()) cfg.window = parse_window(e->second, cfg.group);
    if (auto e = run.find("array_file"); e != run.end()) cfg.array_file = base_dir / e->second.value;
  }
  if (const auto it = sections.find("factor"); it != sections.end())
    cfg.factor_target = base_dir / field(it->second, "factor", "target").value;
  return cfg;
}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "group=" << to_string(group->kind());
  for (const auto& n : group->names()) s << ' ' << n;
  s << '\n';
  for (std::size_t i = 0; i < levels.size(); ++i) s << "level" << i + 1 << '=' << list_string(levels[i]) << '\n';
  s << "depth=" << depth << "\nradius=" << radius << "\nsample_radius=" << sample_radius << '\n';
  s << "window=" << (window ? list_string(*window) : std::string("D_N")) << '\n';
  std::ostringstream tol;
  tol.precision(17);
  tol << tolerance;
  s << "tolerance=" << tol.str() << "\ncommand=" << command << '\n';
  s << "caps=" << caps.max_states << ',' << caps.core_cap << ',' << caps.ball.free_radius << ','
    << caps.ball.abelian_radius << '\n';
  // paths are hashed by content so that the hash does not depend on where the checkout lives
  auto content = [](const std::filesystem::path& f) {
    try {
      return read_file(f);
    } catch (const Error&) {
      return "unreadable " + f.filename().string();
    }
  };
  if (factor_target) s << "factor=" << content(*factor_target) << '\n';
  if (array_file) s << "array=" << content(*array_file) << '\n';
  return s.str();
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::SemanticError, "cannot read " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig load_config(const std::filesystem::path& file) {
  return parse_config(read_file(file), file.parent_path());
}

}  // namespace odoforge
