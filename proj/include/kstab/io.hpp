#pragma once

// JSON documents: problems, cones, witnesses and certificates.
//
// Problem document:
//   {"kind": "determinantal", "n": 3,
//    "constant": M?, "matrices": [M, ...],
//    "cone": C?, "transform": [[...]]?, "witness": Z?}
//   {"kind": "quadratic", "n": 3, "A": [[...]], "b": [...], "c": 0.0, ...}
// where a matrix M is {"re": [[...]], "im": [[...]]?} or a bare 2D array,
// a complex vector Z is {"re": [...], "im": [...]?}, and a cone C is
// {"name": "psd" | "orthant" | "lorentz", "size": m} or
// {"name": "custom", "pencil": [M, ...], "interior": [...]}.

#include <optional>
#include <string>

#include "json.hpp"
#include "kstab/certify.hpp"

namespace kstab::io {

using nlohmann::json;

enum class ProblemKind { Determinantal, Quadratic };

struct Problem {
  ProblemKind kind = ProblemKind::Determinantal;
  Index n = 0;
  DetPoly det;
  QuadPoly quad;
  std::optional<ConeSpec> cone;
  std::optional<MatrixXd> transform;
  std::optional<VectorXcd> witness;
};

/// Throws ParseError naming the offending field.
Problem parse_problem(const json& doc);
Problem load_problem(const std::string& path);
json read_json(const std::string& path);

ConeSpec parse_cone(const json& doc);
/// "psd:m", "orthant:n", "lorentz:n" or "file:PATH".
ConeSpec parse_cone_selector(const std::string& selector);

MatrixXcd parse_matrix(const json& doc, const std::string& field);
VectorXcd parse_complex_vector(const json& doc, const std::string& field);

json to_json(const MatrixXcd& m);
json to_json(const MatrixXd& m);
json to_json(const VectorXcd& v);
json to_json(const VectorXd& v);

json certificate_to_json(const ChoiCertificate& cert, const VerificationReport& report,
                         const std::optional<DeterminantalRep>& rep = std::nullopt);
ChoiCertificate certificate_from_json(const json& doc);

json witness_to_json(const Witness& w);
json verdict_to_json(const Verdict& v);

}  // namespace kstab::io
