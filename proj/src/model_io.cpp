#include "sublin/model_io.hpp"

#include <fstream>
#include <functional>
#include <json.hpp>
#include <set>
#include <sstream>

namespace sublin {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::invalid_model, msg); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const char* where) {
  if (!obj.is_object()) invalid(std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) invalid(std::string("unexpected key '") + item.key() + "' in " + where);
  }
  for (const char* meta : {"label", "description"}) {
    if (obj.contains(meta) && !obj[meta].is_string()) invalid(std::string(meta) + " must be a string");
  }
}

template <Scalar T>
T number(const json& v) {
  if (v.is_string()) {
    try {
      return NumericTraits<T>::from_rational(parse_rational(v.get<std::string>()));
    } catch (const Error&) {
      invalid("invalid rational literal '" + v.get<std::string>() + "'");
    }
  }
  if (v.is_number_integer()) {
    if constexpr (NumericTraits<T>::exact) {
      return v.is_number_unsigned() ? Rational(mpz_class(std::to_string(v.get<std::uint64_t>())))
                                    : Rational(mpz_class(std::to_string(v.get<std::int64_t>())));
    } else {
      return v.get<double>();
    }
  }
  if (v.is_number_float()) {
    if constexpr (NumericTraits<T>::exact) {
      return rational_from_double(v.get<double>());
    } else {
      return v.get<double>();
    }
  }
  invalid("expected a number or a rational string");
}

template <Scalar T>
std::vector<T> number_array(const json& v, const char* what) {
  if (!v.is_array()) invalid(std::string(what) + " must be an array");
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(number<T>(x));
  return out;
}

template <Scalar T>
AmbiguitySet<T> set_from(const json& doc) {
  if (!doc.contains("measures")) invalid("missing 'measures'");
  const auto& ms = doc["measures"];
  if (!ms.is_array() || ms.empty()) invalid("'measures' must be a nonempty array");
  std::vector<DiscreteDistribution<T>> members;
  for (const auto& m : ms) {
    check_keys(m, {"atoms", "probs", "label"}, "measure");
    if (!m.contains("atoms") || !m.contains("probs")) invalid("measure needs 'atoms' and 'probs'");
    members.emplace_back(number_array<T>(m["atoms"], "atoms"), number_array<T>(m["probs"], "probs"));
  }
  return AmbiguitySet<T>(std::move(members), doc.value("label", std::string{}));
}

template <Scalar T>
void flatten_table(const json& v, std::size_t depth, const std::vector<std::size_t>& sizes,
                   std::vector<T>& out) {
  if (depth == sizes.size()) {
    out.push_back(number<T>(v));
    return;
  }
  if (!v.is_array() || v.size() != sizes[depth]) invalid("table shape does not match the supports");
  for (const auto& x : v) flatten_table(x, depth + 1, sizes, out);
}

template <Scalar T>
nlohmann::ordered_json number_json(const T& x) {
  if constexpr (NumericTraits<T>::exact) {
    return to_string(x);
  } else {
    return x;
  }
}

}  // namespace

ModelKind validate_model_document(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) invalid("model document must be an object");
  if (doc.contains("variables") || doc.contains("supports")) {
    (void)parse_joint_model<Rational>(json_text);
    return ModelKind::joint;
  }
  if (doc.contains("steps")) {
    (void)parse_step_sequence<Rational>(json_text);
    return ModelKind::step_sequence;
  }
  (void)parse_ambiguity_set<Rational>(json_text);
  return ModelKind::ambiguity_set;
}

template <Scalar T>
AmbiguitySet<T> parse_ambiguity_set(std::string_view json_text) {
  const json doc = parse_json(json_text);
  check_keys(doc, {"measures", "label", "description"}, "ambiguity set");
  return set_from<T>(doc);
}

template <Scalar T>
StepSequence<T> parse_step_sequence(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (doc.is_object() && !doc.contains("steps")) return StepSequence<T>({parse_ambiguity_set<T>(json_text)});
  check_keys(doc, {"steps", "label", "description"}, "step sequence");
  const auto& steps = doc["steps"];
  if (!steps.is_array() || steps.empty()) invalid("'steps' must be a nonempty array");
  std::vector<AmbiguitySet<T>> out;
  for (const auto& s : steps) {
    check_keys(s, {"measures", "label", "description"}, "step");
    out.push_back(set_from<T>(s));
  }
  return StepSequence<T>(std::move(out));
}

template <Scalar T>
JointModel<T> parse_joint_model(std::string_view json_text) {
  const json doc = parse_json(json_text);
  check_keys(doc, {"variables", "supports", "measures", "label", "description"}, "joint model");
  for (const char* key : {"variables", "supports", "measures"}) {
    if (!doc.contains(key)) invalid(std::string("joint model is missing '") + key + "'");
  }
  const auto& vars = doc["variables"];
  if (!vars.is_array()) invalid("'variables' must be an array");
  std::vector<std::string> names;
  for (const auto& v : vars) {
    if (!v.is_string()) invalid("variable names must be strings");
    names.push_back(v.get<std::string>());
  }
  const auto& sup = doc["supports"];
  if (!sup.is_array() || sup.size() != names.size()) invalid("one support per variable is required");
  std::vector<std::vector<T>> supports;
  std::vector<std::size_t> sizes;
  for (const auto& s : sup) {
    supports.push_back(number_array<T>(s, "support"));
    sizes.push_back(supports.back().size());
  }
  const auto& ms = doc["measures"];
  if (!ms.is_array() || ms.empty()) invalid("'measures' must be a nonempty array");
  std::vector<std::vector<T>> tables;
  for (const auto& m : ms) {
    check_keys(m, {"table", "label"}, "joint measure");
    if (!m.contains("table")) invalid("joint measure needs a 'table'");
    std::vector<T> flat;
    flatten_table(m["table"], 0, sizes, flat);
    tables.push_back(std::move(flat));
  }
  return JointModel<T>(std::move(names), std::move(supports), std::move(tables));
}

template <Scalar T>
std::string joint_model_to_json(const JointModel<T>& model) {
  nlohmann::ordered_json doc;
  doc["variables"] = model.names();
  auto& sup = doc["supports"];
  sup = nlohmann::ordered_json::array();
  for (const auto& s : model.supports()) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (const auto& x : s) row.push_back(number_json(x));
    sup.push_back(std::move(row));
  }
  auto& ms = doc["measures"];
  ms = nlohmann::ordered_json::array();
  for (const auto& t : model.tables()) {
    // Rebuild the nested table shape from the flat row-major storage.
    std::function<nlohmann::ordered_json(std::size_t, std::size_t)> build =
        [&](std::size_t depth, std::size_t offset) -> nlohmann::ordered_json {
      if (depth == model.num_variables()) return number_json(t[offset]);
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      std::size_t stride = 1;
      for (std::size_t k = depth + 1; k < model.num_variables(); ++k) stride *= model.support(k).size();
      for (std::size_t i = 0; i < model.support(depth).size(); ++i) arr.push_back(build(depth + 1, offset + i * stride));
      return arr;
    };
    nlohmann::ordered_json m;
    m["table"] = build(0, 0);
    ms.push_back(std::move(m));
  }
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::usage, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template AmbiguitySet<double> parse_ambiguity_set<double>(std::string_view);
template AmbiguitySet<Rational> parse_ambiguity_set<Rational>(std::string_view);
template StepSequence<double> parse_step_sequence<double>(std::string_view);
template StepSequence<Rational> parse_step_sequence<Rational>(std::string_view);
template JointModel<double> parse_joint_model<double>(std::string_view);
template JointModel<Rational> parse_joint_model<Rational>(std::string_view);
template std::string joint_model_to_json<double>(const JointModel<double>&);
template std::string joint_model_to_json<Rational>(const JointModel<Rational>&);

}  // namespace sublin
