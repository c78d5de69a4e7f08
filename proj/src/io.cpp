#include "palab/io.hpp"

#include <fstream>
#include <sstream>

namespace palab {

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

FormatError::FormatError(const std::string& path, const std::string& msg)
    : std::invalid_argument((path.empty() ? std::string("/") : path) + ": " + msg) {}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError(source, line, col, msg);
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path.string());
}

namespace json_field {

namespace {

const Json& get(const Json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(path, "missing field '" + key + "'");
  return *it;
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw FormatError(path, "expected a number");
  return v.get<double>();
}

Vec as_vec(const Json& v, const std::string& path) {
  if (!v.is_array()) throw FormatError(path, "expected an array of numbers");
  Vec out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "/" + std::to_string(i)));
  return out;
}

}  // namespace

void check_keys(const Json& obj, const std::string& path, const std::vector<std::string>& required,
                const std::vector<std::string>& optional) {
  if (!obj.is_object()) throw FormatError(path, "expected an object");
  for (const auto& k : required)
    if (!obj.contains(k)) throw FormatError(path, "missing field '" + k + "'");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const auto& k = it.key();
    if (std::find(required.begin(), required.end(), k) == required.end() &&
        std::find(optional.begin(), optional.end(), k) == optional.end())
      throw FormatError(path, "unknown field '" + k + "'");
  }
}

double number(const Json& obj, const std::string& key, const std::string& path) {
  return as_number(get(obj, key, path), path + "/" + key);
}

std::string string(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = get(obj, key, path);
  if (!v.is_string()) throw FormatError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::uint64_t count(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = get(obj, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw FormatError(path + "/" + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

Vec vec(const Json& obj, const std::string& key, const std::string& path) {
  return as_vec(get(obj, key, path), path + "/" + key);
}

Matrix matrix(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = get(obj, key, path);
  const std::string p = path + "/" + key;
  if (!v.is_array() || v.empty()) throw FormatError(p, "expected a non-empty array of rows");
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    rows.push_back(as_vec(v[i], p + "/" + std::to_string(i)));
    if (rows.back().size() != rows.front().size()) throw FormatError(p + "/" + std::to_string(i), "ragged row");
  }
  return Matrix::from_rows(rows);
}

std::vector<std::string> strings(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = get(obj, key, path);
  const std::string p = path + "/" + key;
  if (!v.is_array()) throw FormatError(p, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw FormatError(p + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

}  // namespace json_field

namespace {

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (const auto& r : m.to_rows()) rows.push_back(r);
  return rows;
}

Json space_json(const DecisionSpace& s) {
  if (s.kind() == SpaceKind::Simplex) return {{"type", "simplex"}, {"dim", s.dim()}};
  return {{"type", "box"}, {"lo", s.lo()}, {"hi", s.hi()}};
}

DecisionSpace space_from(const Json& j, const std::string& path) {
  using namespace json_field;
  if (!j.is_object()) throw FormatError(path, "expected an object");
  const std::string type = string(j, "type", path);
  if (type == "simplex") {
    check_keys(j, path, {"type", "dim"}, {});
    return DecisionSpace::simplex(count(j, "dim", path));
  }
  if (type == "box") {
    check_keys(j, path, {"type", "lo", "hi"}, {});
    return DecisionSpace::box(vec(j, "lo", path), vec(j, "hi", path));
  }
  throw FormatError(path + "/type", "unknown space type '" + type + "' (expected simplex or box)");
}

}  // namespace

Json instance_to_json(const AnyInstance& any) {
  if (const auto* p = std::get_if<PersuasionInstance>(&any)) {
    return {{"kind", "persuasion"},       {"states", p->states},
            {"actions", p->actions},      {"prior", p->prior},
            {"sender_u", matrix_json(p->sender_u)}, {"receiver_v", matrix_json(p->receiver_v)},
            {"n_signals", p->n_signals}};
  }
  const auto& g = std::get<Instance>(any);
  Json j = {{"kind", "generalized"},
            {"space", space_json(g.space)},
            {"actions", g.actions},
            {"n_signals", g.n_signals},
            {"u_lin", matrix_json(g.u_lin)},
            {"u_off", g.u_off},
            {"v_lin", matrix_json(g.v_lin)},
            {"v_off", g.v_off}};
  if (g.mean) j["mean"] = *g.mean;
  if (g.family.family != "generic" || g.family.p0 != 0.0 || g.family.R != 0.0 || g.family.P != 0.0)
    j["family"] = {{"name", g.family.family}, {"p0", g.family.p0}, {"R", g.family.R}, {"P", g.family.P}};
  return j;
}

AnyInstance instance_from_json(const Json& j, const std::string& path) {
  using namespace json_field;
  if (!j.is_object()) throw FormatError(path, "expected an object");
  if (!j.contains("kind")) throw FormatError(path, "missing field 'kind' (persuasion or generalized)");
  const std::string kind = string(j, "kind", path);
  try {
    if (kind == "persuasion") {
      check_keys(j, path, {"kind", "states", "actions", "prior", "sender_u", "receiver_v"}, {"n_signals"});
      PersuasionInstance p;
      p.states = strings(j, "states", path);
      p.actions = strings(j, "actions", path);
      p.prior = vec(j, "prior", path);
      p.sender_u = matrix(j, "sender_u", path);
      p.receiver_v = matrix(j, "receiver_v", path);
      p.n_signals = j.contains("n_signals") ? count(j, "n_signals", path) : p.actions.size() + 1;
      p.validate();
      return p;
    }
    if (kind == "generalized") {
      check_keys(j, path, {"kind", "space", "actions", "u_lin", "u_off", "v_lin", "v_off"},
                 {"n_signals", "mean", "family"});
      Instance g;
      g.space = space_from(j.at("space"), path + "/space");
      g.actions = strings(j, "actions", path);
      g.n_signals = j.contains("n_signals") ? count(j, "n_signals", path) : g.actions.size() + 1;
      g.u_lin = matrix(j, "u_lin", path);
      g.u_off = vec(j, "u_off", path);
      g.v_lin = matrix(j, "v_lin", path);
      g.v_off = vec(j, "v_off", path);
      if (j.contains("mean")) g.mean = vec(j, "mean", path);
      if (j.contains("family")) {
        const Json& f = j.at("family");
        const std::string fp = path + "/family";
        check_keys(f, fp, {"name"}, {"p0", "R", "P"});
        g.family.family = string(f, "name", fp);
        static const std::vector<std::string> known = {"generic", "persuasion", "stackelberg", "contract_box",
                                                       "contract_expected"};
        if (std::find(known.begin(), known.end(), g.family.family) == known.end())
          throw FormatError(fp + "/name", "unknown family '" + g.family.family + "'");
        if (f.contains("p0")) g.family.p0 = number(f, "p0", fp);
        if (f.contains("R")) g.family.R = number(f, "R", fp);
        if (f.contains("P")) g.family.P = number(f, "P", fp);
      }
      g.validate();
      return g;
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(path, std::string("invalid instance: ") + e.what());
  }
  throw FormatError(path + "/kind", "unknown kind '" + kind + "' (expected persuasion or generalized)");
}

AnyInstance load_instance_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return instance_from_json(j);
  } catch (const FormatError& e) {
    throw FormatError(path.string(), e.what());
  }
}

void save_instance_file(const std::filesystem::path& path, const AnyInstance& any) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << instance_to_json(any).dump(2) << '\n';
}

Json strategy_to_json(const PrincipalStrategy& pi) {
  Json arr = Json::array();
  for (const auto& s : pi.signals) arr.push_back({{"prob", s.prob}, {"decision", s.decision}});
  return arr;
}

PrincipalStrategy strategy_from_json(const Json& j, const std::string& path) {
  using namespace json_field;
  if (!j.is_array() || j.empty()) throw FormatError(path, "expected a non-empty array of signals");
  PrincipalStrategy pi;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    check_keys(j[i], p, {"prob", "decision"}, {});
    pi.signals.push_back({number(j[i], "prob", p), vec(j[i], "decision", p)});
  }
  return pi;
}

Json agent_strategy_to_json(const AgentStrategy& rho) { return rho.rows; }

bool same_instance(const AnyInstance& a, const AnyInstance& b) {
  return instance_to_json(a) == instance_to_json(b) && a.index() == b.index();
}

}  // namespace palab
