#include "kstab/io.hpp"

#include <fstream>
#include <sstream>

namespace kstab::io {
namespace {

const json& require(const json& doc, const std::string& key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key))
    throw ParseError(where + ": missing field '" + key + "'");
  return doc.at(key);
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ParseError(field + ": expected a number");
  return v.get<double>();
}

MatrixXd parse_real_matrix(const json& doc, const std::string& field) {
  if (!doc.is_array() || doc.empty()) throw ParseError(field + ": expected a non-empty 2D array");
  const Index rows = Index(doc.size());
  if (!doc[0].is_array()) throw ParseError(field + ": expected a 2D array");
  const Index cols = Index(doc[0].size());
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = doc[std::size_t(i)];
    if (!row.is_array() || Index(row.size()) != cols)
      throw ParseError(field + "[" + std::to_string(i) + "]: ragged row");
    for (Index j = 0; j < cols; ++j)
      m(i, j) = as_number(row[std::size_t(j)],
                          field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return m;
}

VectorXd parse_real_vector(const json& doc, const std::string& field) {
  if (!doc.is_array()) throw ParseError(field + ": expected an array");
  VectorXd v(Index(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i)
    v(Index(i)) = as_number(doc[i], field + "[" + std::to_string(i) + "]");
  return v;
}

json matrix_rows(const MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::vector<MatrixXcd> parse_matrix_list(const json& doc, const std::string& field) {
  if (!doc.is_array() || doc.empty()) throw ParseError(field + ": expected a non-empty array");
  std::vector<MatrixXcd> out;
  for (std::size_t k = 0; k < doc.size(); ++k)
    out.push_back(parse_matrix(doc[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace

MatrixXcd parse_matrix(const json& doc, const std::string& field) {
  if (doc.is_array()) return parse_real_matrix(doc, field).cast<Complex>();
  const MatrixXd re = parse_real_matrix(require(doc, "re", field), field + ".re");
  MatrixXcd out = re.cast<Complex>();
  if (doc.contains("im")) {
    const MatrixXd im = parse_real_matrix(doc.at("im"), field + ".im");
    if (im.rows() != re.rows() || im.cols() != re.cols())
      throw ParseError(field + ".im: shape differs from re");
    out.imag() = im;
  }
  return out;
}

VectorXcd parse_complex_vector(const json& doc, const std::string& field) {
  if (doc.is_array()) return parse_real_vector(doc, field).cast<Complex>();
  const VectorXd re = parse_real_vector(require(doc, "re", field), field + ".re");
  VectorXcd out = re.cast<Complex>();
  if (doc.contains("im")) {
    const VectorXd im = parse_real_vector(doc.at("im"), field + ".im");
    if (im.size() != re.size()) throw ParseError(field + ".im: length differs from re");
    out.imag() = im;
  }
  return out;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

ConeSpec parse_cone(const json& doc) {
  const json& name = require(doc, "name", "cone");
  if (!name.is_string()) throw ParseError("cone.name: expected a string");
  const std::string kind = name.get<std::string>();
  if (kind == "custom") {
    SymPencil p;
    for (const auto& m : parse_matrix_list(require(doc, "pencil", "cone"), "cone.pencil")) {
      if (m.imag().cwiseAbs().maxCoeff() != 0.0)
        throw ParseError("cone.pencil: cone pencils must be real symmetric");
      p.coeffs.push_back(m.real());
    }
    const VectorXd e = parse_real_vector(require(doc, "interior", "cone"), "cone.interior");
    try {
      return custom_cone(std::move(p), e);
    } catch (const DimensionError& err) {
      throw ParseError(std::string("cone: ") + err.what());
    }
  }
  const json& size = require(doc, "size", "cone");
  if (!size.is_number_integer()) throw ParseError("cone.size: expected an integer");
  const Index k = size.get<Index>();
  try {
    if (kind == "psd") return psd_pencil(k);
    if (kind == "orthant") return orthant_pencil(k);
    if (kind == "lorentz") return lorentz_pencil(k);
  } catch (const DimensionError& err) {
    throw ParseError(std::string("cone.size: ") + err.what());
  }
  throw ParseError("cone.name: unknown cone '" + kind + "'");
}

ConeSpec parse_cone_selector(const std::string& selector) {
  const auto colon = selector.find(':');
  if (colon == std::string::npos) throw ParseError("--cone: expected NAME:ARG, got '" + selector + "'");
  const std::string name = selector.substr(0, colon);
  const std::string arg = selector.substr(colon + 1);
  if (name == "file") {
    const json doc = read_json(arg);
    return parse_cone(doc.contains("cone") ? doc.at("cone") : doc);
  }
  std::size_t used = 0;
  long long size = 0;
  try {
    size = std::stoll(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != arg.size() || arg.empty()) throw ParseError("--cone: size '" + arg + "' is not an integer");
  return parse_cone(json{{"name", name}, {"size", size}});
}

Problem parse_problem(const json& doc) {
  Problem p;
  const json& kind = require(doc, "kind", "problem");
  if (!kind.is_string()) throw ParseError("kind: expected a string");
  const std::string k = kind.get<std::string>();
  const json& nj = require(doc, "n", "problem");
  if (!nj.is_number_integer() || nj.get<long long>() < 1) throw ParseError("n: expected a positive integer");
  p.n = nj.get<Index>();

  if (k == "determinantal") {
    p.kind = ProblemKind::Determinantal;
    p.det.pencil.coeffs = parse_matrix_list(require(doc, "matrices", "problem"), "matrices");
    if (doc.contains("constant")) p.det.pencil.constant = parse_matrix(doc.at("constant"), "constant");
    if (p.det.num_vars() != p.n)
      throw ParseError("matrices: expected " + std::to_string(p.n) + " matrices, got " +
                       std::to_string(p.det.num_vars()));
    try {
      validate(p.det.pencil);
    } catch (const DimensionError& e) {
      throw ParseError(std::string("matrices: ") + e.what());
    }
  } else if (k == "quadratic") {
    p.kind = ProblemKind::Quadratic;
    const MatrixXd A = parse_real_matrix(require(doc, "A", "problem"), "A");
    if (A.rows() != p.n || A.cols() != p.n) throw ParseError("A: expected an n x n matrix");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()))
      throw ParseError("A: matrix is not symmetric");
    p.quad.A = 0.5 * (A + A.transpose());
    p.quad.b = doc.contains("b") ? parse_real_vector(doc.at("b"), "b") : VectorXd::Zero(p.n);
    if (p.quad.b.size() != p.n) throw ParseError("b: expected length n");
    p.quad.c = doc.contains("c") ? as_number(doc.at("c"), "c") : 0.0;
  } else {
    throw ParseError("kind: expected 'determinantal' or 'quadratic', got '" + k + "'");
  }

  if (doc.contains("cone")) p.cone = parse_cone(doc.at("cone"));
  if (doc.contains("transform")) {
    p.transform = parse_real_matrix(doc.at("transform"), "transform");
    if (p.transform->rows() != p.n || p.transform->cols() != p.n)
      throw ParseError("transform: expected an n x n matrix");
  }
  if (doc.contains("witness")) {
    p.witness = parse_complex_vector(doc.at("witness"), "witness");
    if (p.witness->size() != p.n) throw ParseError("witness: expected length n");
  }
  return p;
}

Problem load_problem(const std::string& path) { return parse_problem(read_json(path)); }

json to_json(const MatrixXd& m) { return json{{"re", matrix_rows(m)}}; }

json to_json(const MatrixXcd& m) {
  json out{{"re", matrix_rows(m.real())}};
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) out["im"] = matrix_rows(m.imag());
  return out;
}

json to_json(const VectorXd& v) {
  json re = json::array();
  for (Index i = 0; i < v.size(); ++i) re.push_back(v(i));
  return json{{"re", re}};
}

json to_json(const VectorXcd& v) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return json{{"re", re}, {"im", im}};
}

json certificate_to_json(const ChoiCertificate& cert, const VerificationReport& report,
                         const std::optional<DeterminantalRep>& rep) {
  json blocks = json::array();
  for (Index i = 0; i < cert.l; ++i) {
    json row = json::array();
    for (Index j = 0; j < cert.l; ++j) row.push_back(to_json(MatrixXcd(cert.block(i, j))));
    blocks.push_back(row);
  }
  json out{{"sigma", cert.sigma},       {"nu", cert.nu},
           {"scaled", cert.scaled},     {"blocks", blocks},
           {"min_eig", report.min_eig}, {"residual", report.residual},
           {"verified", report.passed}};
  if (!cert.is_real()) {
    // Blockwise real form [[Re, -Im], [Im, Re]], the matrix the solver worked with.
    const Index D = 2 * cert.d;
    MatrixXd embedded(cert.l * D, cert.l * D);
    for (Index i = 0; i < cert.l; ++i)
      for (Index j = 0; j < cert.l; ++j) {
        const MatrixXcd b = cert.block(i, j);
        auto e = embedded.block(i * D, j * D, D, D);
        e.topLeftCorner(cert.d, cert.d) = b.real();
        e.bottomRightCorner(cert.d, cert.d) = b.real();
        e.topRightCorner(cert.d, cert.d) = -b.imag();
        e.bottomLeftCorner(cert.d, cert.d) = b.imag();
      }
    out["embedded"] = matrix_rows(embedded);
  }
  if (!report.failures.empty()) out["failures"] = report.failures;
  if (rep) {
    json pencil = json::array();
    for (const auto& m : rep->D.coeffs) pencil.push_back(to_json(m));
    out["representation"] = json{{"ell", to_json(rep->ell)["re"]},
                                 {"pencil", pencil},
                                 {"sign", rep->sign},
                                 {"max_rel_error", rep->max_rel_error}};
  }
  return out;
}

ChoiCertificate certificate_from_json(const json& doc) {
  ChoiCertificate cert;
  const json& sigma = require(doc, "sigma", "certificate");
  if (!sigma.is_number_integer() || (sigma.get<int>() != 1 && sigma.get<int>() != -1))
    throw ParseError("certificate.sigma: expected 1 or -1");
  cert.sigma = sigma.get<int>();
  cert.nu = as_number(require(doc, "nu", "certificate"), "certificate.nu");
  cert.scaled = doc.contains("scaled") && doc.at("scaled").get<bool>();
  const json& blocks = require(doc, "blocks", "certificate");
  if (!blocks.is_array() || blocks.empty()) throw ParseError("certificate.blocks: expected a grid");
  cert.l = Index(blocks.size());
  for (Index i = 0; i < cert.l; ++i) {
    const json& row = blocks[std::size_t(i)];
    if (!row.is_array() || Index(row.size()) != cert.l)
      throw ParseError("certificate.blocks[" + std::to_string(i) + "]: expected " +
                       std::to_string(cert.l) + " blocks");
    for (Index j = 0; j < cert.l; ++j) {
      const std::string field = "certificate.blocks[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      const MatrixXcd b = parse_matrix(row[std::size_t(j)], field);
      if (i == 0 && j == 0) {
        cert.d = b.rows();
        cert.C.resize(cert.l * cert.d, cert.l * cert.d);
      }
      if (b.rows() != cert.d || b.cols() != cert.d) throw ParseError(field + ": block size differs");
      cert.C.block(i * cert.d, j * cert.d, cert.d, cert.d) = b;
    }
  }
  if (doc.contains("min_eig")) cert.min_eig = as_number(doc.at("min_eig"), "certificate.min_eig");
  if (doc.contains("residual")) cert.residual = as_number(doc.at("residual"), "certificate.residual");
  return cert;
}

json witness_to_json(const Witness& w) {
  json out{{"z", to_json(w.z)},
           {"kind", to_string(w.kind)},
           {"f_residual", w.f_residual},
           {"tolerance", w.tolerance},
           {"interior_margin", w.interior_margin},
           {"accepted", w.accepted}};
  if (!w.reason.empty()) out["reason"] = w.reason;
  return out;
}

json verdict_to_json(const Verdict& v) {
  if (const auto* c = std::get_if<Certified>(&v)) {
    return json{{"verdict", "certified"},
                {"route", c->route},
                {"certificate", certificate_to_json(c->certificate, c->report, c->representation)}};
  }
  if (const auto* r = std::get_if<Refuted>(&v))
    return json{{"verdict", "refuted"}, {"witness", witness_to_json(r->witness)}};
  const auto& u = std::get<Unknown>(v);
  json branches = json::array();
  for (const auto& b : u.branches) {
    json jb{{"sigma", b.sigma},
            {"status", sdp::to_string(b.status)},
            {"lambda", b.lambda},
            {"iterations", b.iterations}};
    if (b.farkas_tau) jb["farkas_tau"] = *b.farkas_tau;
    if (!b.message.empty()) jb["message"] = b.message;
    branches.push_back(jb);
  }
  json out{{"verdict", "unknown"}, {"diagnostics", u.diagnostics}, {"branches", branches}};
  if (u.sampling)
    out["sampling"] = json{{"samples", u.sampling->samples},
                           {"degree_drops", u.sampling->degree_drops},
                           {"sign_changes", u.sampling->sign_changes},
                           {"root_failures", u.sampling->root_failures},
                           {"max_imag_ratio", u.sampling->max_imag_ratio}};
  return out;
}

}  // namespace kstab::io
