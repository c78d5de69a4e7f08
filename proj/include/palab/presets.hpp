#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "palab/instance.hpp"

namespace palab {

// Two states {Good, Bad}, two actions {a, b}; the sender always wants a, the
// receiver wants a only when Good is more likely than Bad.
PersuasionInstance example_5_1(double mu0);

// Two states {A, B}, three actions {L, M, R}, uniform prior. Exploitable by a
// sender facing a mean-based receiver.
PersuasionInstance theorem_3_7_instance(double gamma);

// Leader mixes over the rows of u_matrix / v_matrix (|B| x |A|).
Instance stackelberg_bimatrix(const Matrix& u_matrix, const Matrix& v_matrix);

enum class PaymentRemedy { BoxPayment, ExpectedPayment };

// p_matrix is |A| x d (outcome distribution per action).
Instance contract_instance(const Matrix& p_matrix, const Vec& rewards, const Vec& costs, PaymentRemedy remedy,
                           double P_cap = 0.0);

// A preset resolves either to a persuasion instance (which also has a
// generalized form) or directly to a generalized instance.
using AnyInstance = std::variant<Instance, PersuasionInstance>;

Instance generalized(const AnyInstance& any);
const PersuasionInstance* as_persuasion(const AnyInstance& any);

// "name" or "name:key=value,key=value". Known names:
//   example5_1 (mu0), theorem_3_7 (gamma), stackelberg_demo,
//   contract_box_demo (P), contract_expected_demo.
AnyInstance load_preset(const std::string& spec);
std::vector<std::string> preset_names();

}  // namespace palab
