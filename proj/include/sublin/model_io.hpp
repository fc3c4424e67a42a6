#pragma once

#include <string>
#include <string_view>

#include "sublin/independence.hpp"
#include "sublin/lattice.hpp"
#include "sublin/measures.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

// Model documents (JSON). Probabilities and atoms are numbers or rational
// strings such as "9/16".
//
//   ambiguity set:  {"measures": [{"atoms": [...], "probs": [...]}, ...]}
//   step sequence:  {"steps": [{"measures": [...]}, ...]}
//   joint model:    {"variables": ["X","Y"], "supports": [[0,1],[0,1]],
//                    "measures": [{"table": [[p00,p01],[p10,p11]]}, ...]}
//
// Every document may also carry "label" and "description" strings.

enum class ModelKind { ambiguity_set, step_sequence, joint };

/// Checks a document against the schema above; throws invalid_model.
ModelKind validate_model_document(std::string_view json_text);

template <Scalar T>
[[nodiscard]] AmbiguitySet<T> parse_ambiguity_set(std::string_view json_text);

/// Accepts an ambiguity-set document (one i.i.d. step) or a step sequence.
template <Scalar T>
[[nodiscard]] StepSequence<T> parse_step_sequence(std::string_view json_text);

template <Scalar T>
[[nodiscard]] JointModel<T> parse_joint_model(std::string_view json_text);

template <Scalar T>
[[nodiscard]] std::string joint_model_to_json(const JointModel<T>& model);

[[nodiscard]] std::string read_text_file(const std::string& path);

}  // namespace sublin
