#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sau/basis_engine.hpp"
#include "sau/matrix_bundle.hpp"
#include "sau/pursuit.hpp"
#include "sau/step_function.hpp"

// JSON forms of every artifact. Rationals are written as "p/q" strings so the
// files stay exact; Model B entries are doubles printed with round-trip
// precision. Every *_from_json throws ParseError on malformed input.
namespace sau::io {

using Json = nlohmann::ordered_json;

// Pretty-printed with a trailing newline; the byte-level format of all artifacts.
std::string dump(const Json& j);
Json parse(std::string_view text);

Json to_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json to_json(const StepFn& f);
StepFn step_from_json(const Json& j);

Json to_json(const BasisState& s);
// Members are loaded without an orthonormality check; run verify_basis on the result.
BasisState basis_from_json(const Json& j);

Json to_json(const PursuitResult& r);
Json to_json(const VerifyReport& r);

Json to_json(const bundle::Matrix& m);
bundle::Matrix matrix_from_json(const Json& j);

Json to_json(const bundle::MatStepFn& f);
bundle::MatStepFn mat_step_from_json(const Json& j);

Json to_json(const bundle::NcBasisState& s);
bundle::NcBasisState nc_basis_from_json(const Json& j);

Json to_json(const bundle::NcPursuitResult& r);
Json to_json(const bundle::NcVerifyReport& r);

// "abelian" or "matrix".
std::string model_of(const Json& j);

}  // namespace sau::io
