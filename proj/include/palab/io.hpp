#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "palab/presets.hpp"

namespace palab {

using Json = nlohmann::json;

// Malformed JSON text; what() reads "source:line:column: message".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& msg);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed JSON with a wrong shape; what() names the JSON path.
class FormatError : public std::invalid_argument {
 public:
  FormatError(const std::string& path, const std::string& msg);
};

Json parse_json_text(const std::string& text, const std::string& source = "<string>");
Json read_json_file(const std::filesystem::path& path);

// Field access with path-qualified errors.
namespace json_field {
void check_keys(const Json& obj, const std::string& path, const std::vector<std::string>& required,
                const std::vector<std::string>& optional);
double number(const Json& obj, const std::string& key, const std::string& path);
std::string string(const Json& obj, const std::string& key, const std::string& path);
std::uint64_t count(const Json& obj, const std::string& key, const std::string& path);
Vec vec(const Json& obj, const std::string& key, const std::string& path);
Matrix matrix(const Json& obj, const std::string& key, const std::string& path);
std::vector<std::string> strings(const Json& obj, const std::string& key, const std::string& path);
}  // namespace json_field

Json instance_to_json(const AnyInstance& any);
AnyInstance instance_from_json(const Json& j, const std::string& path = "");

AnyInstance load_instance_file(const std::filesystem::path& path);
void save_instance_file(const std::filesystem::path& path, const AnyInstance& any);

Json strategy_to_json(const PrincipalStrategy& pi);
PrincipalStrategy strategy_from_json(const Json& j, const std::string& path = "");
Json agent_strategy_to_json(const AgentStrategy& rho);

// Exact structural equality, used for round-trip checks.
bool same_instance(const AnyInstance& a, const AnyInstance& b);

}  // namespace palab
