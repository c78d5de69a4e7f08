#include "palab/presets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "palab/lp.hpp"

namespace palab {

PersuasionInstance example_5_1(double mu0) {
  if (!(mu0 > 0.0 && mu0 < 0.5)) throw std::invalid_argument("example5_1 requires 0 < mu0 < 0.5");
  PersuasionInstance p;
  p.states = {"Good", "Bad"};
  p.actions = {"a", "b"};
  p.prior = {mu0, 1.0 - mu0};
  p.sender_u = Matrix{{1.0, 0.0}, {1.0, 0.0}};
  p.receiver_v = Matrix{{1.0, 0.0}, {-1.0, 0.0}};
  p.n_signals = p.actions.size() + 1;
  return p;
}

PersuasionInstance theorem_3_7_instance(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("theorem_3_7 requires 0 < gamma < 1");
  PersuasionInstance p;
  p.states = {"A", "B"};
  p.actions = {"L", "M", "R"};
  p.prior = {0.5, 0.5};
  p.sender_u = Matrix{{0.0, -2.0, -2.0}, {0.0, 0.0, 2.0}};
  p.receiver_v = Matrix{{std::sqrt(gamma), -1.0, 0.0}, {-1.0, 1.0, 0.0}};
  p.n_signals = p.actions.size() + 1;
  return p;
}

Instance stackelberg_bimatrix(const Matrix& u_matrix, const Matrix& v_matrix) {
  if (u_matrix.rows() != v_matrix.rows()) throw DimensionError("leader actions", u_matrix.rows(), v_matrix.rows());
  if (u_matrix.cols() != v_matrix.cols())
    throw DimensionError("follower actions", u_matrix.cols(), v_matrix.cols());
  if (u_matrix.rows() == 0 || u_matrix.cols() == 0) throw std::invalid_argument("bimatrix must be nonempty");
  Instance inst;
  inst.space = DecisionSpace::simplex(u_matrix.rows());
  for (std::size_t a = 0; a < u_matrix.cols(); ++a) inst.actions.push_back("f" + std::to_string(a));
  inst.n_signals = u_matrix.cols();
  inst.u_lin = u_matrix;
  inst.v_lin = v_matrix;
  inst.u_off.assign(u_matrix.cols(), 0.0);
  inst.v_off.assign(u_matrix.cols(), 0.0);
  inst.family.family = "stackelberg";
  inst.validate();
  return inst;
}

namespace {

// Is e_a in the cone {P^T x : x >= 0}, i.e. can the expected payment of
// action a alone be made positive while every other expected payment is 0?
bool unit_in_payment_cone(const Matrix& p, std::size_t a) {
  const std::size_t n = p.rows(), d = p.cols();
  LpProblem lp(d, false);
  for (std::size_t i = 0; i < d; ++i) lp.set_objective(i, 1.0);
  for (std::size_t b = 0; b < n; ++b) {
    Vec row(p.row(b).begin(), p.row(b).end());
    lp.add_row(std::move(row), Sense::Eq, b == a ? 1.0 : 0.0);
  }
  return solve(lp).status == LpStatus::Optimal;
}

}  // namespace

Instance contract_instance(const Matrix& p_matrix, const Vec& rewards, const Vec& costs, PaymentRemedy remedy,
                           double P_cap) {
  const std::size_t n = p_matrix.rows(), d = p_matrix.cols();
  if (n == 0 || d == 0) throw std::invalid_argument("outcome matrix must be nonempty");
  if (rewards.size() != d) throw DimensionError("rewards", d, rewards.size());
  if (costs.size() != n) throw DimensionError("costs", n, costs.size());
  for (std::size_t a = 0; a < n; ++a) {
    auto row = p_matrix.row(a);
    for (double q : row)
      if (q < 0.0) throw std::invalid_argument("outcome probabilities must be nonnegative");
    if (std::abs(sum(row) - 1.0) > 1e-9) throw std::invalid_argument("outcome matrix rows must sum to 1");
    if (costs[a] < 0.0) throw std::invalid_argument("action costs must be nonnegative");
  }
  double R = 0.0;
  for (double r : rewards) R = std::max(R, std::abs(r));

  Instance inst;
  for (std::size_t a = 0; a < n; ++a) inst.actions.push_back("act" + std::to_string(a));
  inst.n_signals = n + 1;
  inst.family.R = R;

  if (remedy == PaymentRemedy::BoxPayment) {
    if (!(P_cap > 0.0)) throw std::invalid_argument("box payment remedy needs a positive payment cap P");
    inst.space = DecisionSpace::box(Vec(d, 0.0), Vec(d, P_cap));
    inst.u_lin = Matrix(d, n);
    inst.v_lin = Matrix(d, n);
    inst.u_off.assign(n, 0.0);
    inst.v_off.assign(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t i = 0; i < d; ++i) {
        inst.u_lin(i, a) = -p_matrix(a, i);
        inst.v_lin(i, a) = p_matrix(a, i);
        inst.u_off[a] += p_matrix(a, i) * rewards[i];
      }
      inst.v_off[a] = -costs[a];
    }
    inst.family.family = "contract_box";
    inst.family.P = P_cap;
  } else {
    for (std::size_t a = 0; a < n; ++a)
      if (!unit_in_payment_cone(p_matrix, a))
        throw std::invalid_argument(
            "expected-payment remedy needs every per-action payment direction to be reachable with "
            "nonnegative outcome payments; use the box payment remedy for this outcome matrix");
    if (!(R > 0.0)) throw std::invalid_argument("expected-payment remedy needs a nonzero reward");
    inst.space = DecisionSpace::box(Vec(n, 0.0), Vec(n, R));
    inst.u_lin = Matrix(n, n);
    inst.v_lin = Matrix(n, n);
    inst.u_off.assign(n, 0.0);
    inst.v_off.assign(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      inst.u_lin(a, a) = -1.0;
      inst.v_lin(a, a) = 1.0;
      for (std::size_t i = 0; i < d; ++i) inst.u_off[a] += p_matrix(a, i) * rewards[i];
      inst.v_off[a] = -costs[a];
    }
    inst.family.family = "contract_expected";
  }
  inst.validate();
  return inst;
}

Instance generalized(const AnyInstance& any) {
  if (const auto* p = std::get_if<PersuasionInstance>(&any)) return p->to_generalized();
  return std::get<Instance>(any);
}

const PersuasionInstance* as_persuasion(const AnyInstance& any) { return std::get_if<PersuasionInstance>(&any); }

namespace {

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("preset parameter '" + item + "' is not key=value");
    std::string key = item.substr(0, eq);
    if (key == "\xCE\xBC" "0") key = "mu0";
    if (key == "\xCE\xB3") key = "gamma";
    try {
      std::size_t used = 0;
      double val = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
      out[key] = val;
    } catch (const std::exception&) {
      throw std::invalid_argument("preset parameter '" + item + "' has a non-numeric value");
    }
  }
  return out;
}

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  double v = it->second;
  params.erase(it);
  return v;
}

}  // namespace

AnyInstance load_preset(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  auto params = parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1));
  AnyInstance result;
  if (name == "example5_1" || name == "example_5_1") {
    result = example_5_1(take(params, "mu0", 0.3));
  } else if (name == "theorem_3_7" || name == "theorem3_7") {
    result = theorem_3_7_instance(take(params, "gamma", 0.04));
  } else if (name == "stackelberg_demo") {
    result = stackelberg_bimatrix(Matrix{{2.0, 4.0}, {1.0, 3.0}}, Matrix{{1.0, 0.0}, {0.0, 1.0}});
  } else if (name == "contract_box_demo") {
    result = contract_instance(Matrix{{0.8, 0.2}, {0.2, 0.8}}, {0.0, 1.0}, {0.0, 0.2}, PaymentRemedy::BoxPayment,
                               take(params, "P", 1.0));
  } else if (name == "contract_expected_demo") {
    result = contract_instance(Matrix{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}, {0.0, 0.5, 1.0},
                               {0.0, 0.1, 0.3}, PaymentRemedy::ExpectedPayment);
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  if (!params.empty()) throw std::invalid_argument("unknown parameter '" + params.begin()->first + "' for preset " + name);
  return result;
}

std::vector<std::string> preset_names() {
  return {"example5_1", "theorem_3_7", "stackelberg_demo", "contract_box_demo", "contract_expected_demo"};
}

}  // namespace palab
