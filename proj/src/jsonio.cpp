#include "conecert/jsonio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace conecert {

namespace {

using Json = nlohmann::ordered_json;

Json rat_json(const Rat& q) { return rat_to_string(q); }

Rat json_rat(const Json& j) { return rat_from_string(j.get<std::string>()); }

Json vec_json(const std::vector<Rat>& v) {
  Json out = Json::array();
  for (const Rat& q : v) out.push_back(rat_json(q));
  return out;
}

std::vector<Rat> json_vec(const Json& j) {
  std::vector<Rat> out;
  for (const auto& e : j) out.push_back(json_rat(e));
  return out;
}

Json exponent_json(const Exponent& e) { return Json(e); }

Exponent json_exponent(const Json& j) { return j.get<Exponent>(); }

Json matrix_json(const SymMatrix& m) {
  Json entries = Json::array();
  for (const auto& [i, j, v] : m.upper_nonzeros())
    entries.push_back(Json::array({i, j, rat_json(v)}));
  return Json{{"size", m.size()}, {"entries", entries}};
}

SymMatrix json_matrix(const Json& j) {
  SymMatrix m(j.at("size").get<int>());
  for (const auto& t : j.at("entries"))
    m.set(t.at(0).get<int>(), t.at(1).get<int>(), json_rat(t.at(2)));
  return m;
}

Json form_json(const Form& f) {
  return Json{{"nvars", f.nvars()}, {"degree", f.degree()}, {"text", f.to_string()}};
}

Form json_form(const Json& j) {
  Form f = parse_form(j.at("text").get<std::string>(), j.at("nvars").get<int>());
  if (f.degree() != j.at("degree").get<int>() && !f.is_zero())
    throw std::invalid_argument("form degree mismatch in certificate");
  return f;
}

Json poly_json(const Poly& p) {
  return Json{{"nvars", p.nvars()}, {"text", p.to_string("z")}};
}

Poly json_poly(const Json& j) {
  return parse_poly(j.at("text").get<std::string>(), j.at("nvars").get<int>(), "z");
}

Json amgm_json(const AmgmCertificate& c) {
  Json sources = Json::array();
  for (size_t p = 0; p < c.source_exponents.size(); ++p)
    sources.push_back(Json{{"exponent", exponent_json(c.source_exponents[p])},
                           {"coeff", rat_json(c.source_coeffs[p])},
                           {"weight", rat_json(c.weights[p])}});
  return Json{{"target", exponent_json(c.target)},
              {"target_coeff", rat_json(c.target_coeff)},
              {"odd_target", c.odd_target},
              {"sources", sources}};
}

AmgmCertificate json_amgm(const Json& j) {
  AmgmCertificate c;
  c.target = json_exponent(j.at("target"));
  c.target_coeff = json_rat(j.at("target_coeff"));
  c.odd_target = j.at("odd_target").get<bool>();
  for (const auto& s : j.at("sources")) {
    c.source_exponents.push_back(json_exponent(s.at("exponent")));
    c.source_coeffs.push_back(json_rat(s.at("coeff")));
    c.weights.push_back(json_rat(s.at("weight")));
  }
  return c;
}

Json factorization_json(const PsdFactorization& f) {
  Json lower = Json::array();
  const int n = static_cast<int>(f.perm.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (f.lower[i][j] != 0) lower.push_back(Json::array({i, j, rat_json(f.lower[i][j])}));
  return Json{{"perm", f.perm}, {"lower", lower}, {"diag", vec_json(f.diag)}};
}

PsdFactorization json_factorization(const Json& j) {
  PsdFactorization f;
  f.perm = j.at("perm").get<std::vector<int>>();
  const int n = static_cast<int>(f.perm.size());
  f.diag = json_vec(j.at("diag"));
  f.lower.assign(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) f.lower[i][i] = 1;
  for (const auto& t : j.at("lower"))
    f.lower[t.at(0).get<int>()][t.at(1).get<int>()] = json_rat(t.at(2));
  return f;
}

Json chart_proof_json(const ChartProof& proof) {
  if (const auto* ident = std::get_if<IdentityChartProof>(&proof))
    return Json{{"style", "identity_psd_form"},
                {"reference", form_json(ident->reference)},
                {"reference_nonneg", amgm_json(ident->reference_nonneg)}};
  const auto& sos = std::get<SosChartProof>(proof);
  Json squares = Json::array();
  for (const Poly& h : sos.squares) squares.push_back(poly_json(h));
  return Json{{"style", "exact_sos"}, {"squares", squares}, {"weights", vec_json(sos.weights)}};
}

ChartProof json_chart_proof(const Json& j) {
  const std::string style = j.at("style").get<std::string>();
  if (style == "identity_psd_form")
    return IdentityChartProof{json_form(j.at("reference")), json_amgm(j.at("reference_nonneg"))};
  if (style != "exact_sos") throw std::invalid_argument("unknown chart proof style: " + style);
  SosChartProof sos;
  for (const auto& s : j.at("squares")) sos.squares.push_back(json_poly(s));
  sos.weights = json_vec(j.at("weights"));
  return sos;
}

Json dims_json(const Dims& d) { return Json{{"n", d.n}, {"d", d.d}}; }

Dims json_dims(const Json& j) { return Dims(j.at("n").get<int>(), j.at("d").get<int>()); }

}  // namespace

std::string membership_to_json(const MembershipCertificate& cert) {
  Json boundary = Json::array();
  for (const auto& sp : cert.boundary)
    boundary.push_back(Json{{"stratum", sp.stratum.zeros},
                            {"factorization", factorization_json(sp.factorization)}});
  Json j{{"kind", "membership"},
         {"verifier_version", kVerifierVersion},
         {"dims", dims_json(cert.dims)},
         {"level", cert.level},
         {"form", form_json(cert.form)},
         {"payload", Json{{"gram", matrix_json(cert.gram)},
                          {"chart_proof", chart_proof_json(cert.chart_proof)},
                          {"boundary", boundary}}}};
  return j.dump(1);
}

std::string refutation_to_json(const RefutationCertificate& cert) {
  Json points = Json::array();
  for (const auto& z : cert.points) points.push_back(vec_json(z));
  Json j{{"kind", "refutation"},
         {"verifier_version", kVerifierVersion},
         {"dims", dims_json(cert.dims)},
         {"level", cert.level},
         {"form", form_json(cert.form)},
         {"payload", Json{{"points", points},
                          {"farkas", vec_json(cert.farkas.multipliers)}}}};
  return j.dump(1);
}

MembershipCertificate membership_from_json(const std::string& text) {
  Json j = Json::parse(text);
  if (j.at("kind").get<std::string>() != "membership")
    throw std::invalid_argument("not a membership certificate");
  const Dims dims = json_dims(j.at("dims"));
  const Json& payload = j.at("payload");
  MembershipCertificate cert{dims,
                             j.at("level").get<int>(),
                             json_form(j.at("form")),
                             json_matrix(payload.at("gram")),
                             json_chart_proof(payload.at("chart_proof")),
                             {}};
  for (const auto& sp : payload.at("boundary"))
    cert.boundary.push_back(StratumProof{BoundaryStratum{sp.at("stratum").get<std::vector<int>>()},
                                         json_factorization(sp.at("factorization"))});
  return cert;
}

RefutationCertificate refutation_from_json(const std::string& text) {
  Json j = Json::parse(text);
  if (j.at("kind").get<std::string>() != "refutation")
    throw std::invalid_argument("not a refutation certificate");
  const Dims dims = json_dims(j.at("dims"));
  const Json& payload = j.at("payload");
  RefutationCertificate cert{dims, j.at("level").get<int>(), json_form(j.at("form")), {}, {}};
  for (const auto& z : payload.at("points")) cert.points.push_back(json_vec(z));
  cert.farkas.multipliers = json_vec(payload.at("farkas"));
  return cert;
}

VerifyFileResult verify_certificate_text(const std::string& text) {
  std::string kind;
  try {
    Json j = Json::parse(text);
    kind = j.at("kind").get<std::string>();
    if (j.at("verifier_version").get<int>() > kVerifierVersion)
      return {false, kind, "certificate written by a newer verifier"};
    std::string why;
    if (kind == "membership") {
      MembershipCertificate cert = membership_from_json(text);
      if (!check_membership_certificate(cert, &why)) return {false, kind, why};
      return {true, kind, ""};
    }
    if (kind == "refutation") {
      RefutationCertificate cert = refutation_from_json(text);
      if (!check_refutation_certificate(cert, &why)) return {false, kind, why};
      return {true, kind, ""};
    }
    return {false, kind, "unknown certificate kind"};
  } catch (const std::exception& e) {
    return {false, kind, std::string("malformed certificate: ") + e.what()};
  }
}

VerifyFileResult verify_certificate_file(const std::string& path) {
  try {
    return verify_certificate_text(read_file(path));
  } catch (const std::exception& e) {
    return {false, "", std::string("cannot read '") + path + "': " + e.what()};
  }
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace conecert
