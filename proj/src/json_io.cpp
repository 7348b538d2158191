#include "spinr/json_io.hpp"

#include <fstream>
#include <stdexcept>

#include "spinr/clifford.hpp"

namespace spinr {

namespace {

std::vector<double> mat_flat(const RMat& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()) * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
  return out;
}

RMat mat_from_flat(const std::vector<double>& v, int rows, int cols) {
  if (v.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument("json: matrix size mismatch");
  RMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v[static_cast<std::size_t>(i) * cols + j];
  return m;
}

}  // namespace

Json curvature_to_json(const CurvatureTensor& R) {
  return Json{{"n", R.n}, {"R", R.a}};
}

CurvatureTensor curvature_from_json(const Json& j) {
  CurvatureTensor R;
  R.n = j.at("n").get<int>();
  R.a = j.at("R").get<std::vector<double>>();
  std::size_t want = 1;
  for (int k = 0; k < 4; ++k) want *= static_cast<std::size_t>(R.n);
  if (R.a.size() != want) throw std::invalid_argument("json: curvature size mismatch");
  return R;
}

Json sym_to_json(const RMat& h) {
  return Json{{"n", static_cast<int>(h.rows())}, {"h", mat_flat(h)}};
}

RMat sym_from_json(const Json& j) {
  int n = j.at("n").get<int>();
  return mat_from_flat(j.at("h").get<std::vector<double>>(), n, n);
}

Json symbol_to_json(const SecondDerivSymbol& T) {
  return Json{{"n", T.n}, {"T", T.t}};
}

SecondDerivSymbol symbol_from_json(const Json& j) {
  SecondDerivSymbol T;
  T.n = j.at("n").get<int>();
  T.t = j.at("T").get<std::vector<double>>();
  std::size_t want = 1;
  for (int k = 0; k < 4; ++k) want *= static_cast<std::size_t>(T.n);
  if (T.t.size() != want) throw std::invalid_argument("json: symbol size mismatch");
  return T;
}

Json spinor_to_json(const Spinor& psi) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    arr.push_back(Json::array({psi[i].real(), psi[i].imag()}));
  return arr;
}

Spinor spinor_from_json(const Json& j) {
  Spinor psi(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& p = j.at(i);
    psi[static_cast<Eigen::Index>(i)] = cx(p.at(0).get<double>(), p.at(1).get<double>());
  }
  return psi;
}

Json theta_to_json(const TwoFormFamily& f) {
  Json forms = Json::array();
  for (int k = 0; k < f.r; ++k) {
    Json row = Json::array();
    for (int l = 0; l < f.r; ++l) row.push_back(mat_flat(f.form(k, l)));
    forms.push_back(std::move(row));
  }
  return Json{{"n", f.n}, {"r", f.r}, {"forms", std::move(forms)}};
}

TwoFormFamily theta_from_json(const Json& j) {
  TwoFormFamily f;
  f.n = j.at("n").get<int>();
  f.r = j.at("r").get<int>();
  const Json& forms = j.at("forms");
  if (static_cast<int>(forms.size()) != f.r)
    throw std::invalid_argument("json: two-form family rank mismatch");
  f.forms.resize(static_cast<std::size_t>(f.r) * f.r);
  for (int k = 0; k < f.r; ++k)
    for (int l = 0; l < f.r; ++l)
      f.forms[static_cast<std::size_t>(k) * f.r + l] =
          mat_from_flat(forms.at(k).at(l).get<std::vector<double>>(), f.n, f.n);
  return f;
}

Json datum_to_json(const GeometricDatum& datum) {
  Json j{{"label", datum.label},
         {"seed", datum.seed},
         {"kernel_dim", datum.kernel_dim},
         {"rep", Json{{"n", datum.rep->n},
                      {"r", datum.rep->r},
                      {"m", datum.rep->m},
                      {"construction", "pauli-volume-twist"}}},
         {"R", curvature_to_json(datum.R)},
         {"theta", theta_to_json(datum.theta)},
         {"psi", spinor_to_json(datum.psi)}};
  if (datum.psi_prime) j["psi_prime"] = spinor_to_json(*datum.psi_prime);
  return j;
}

GeometricDatum datum_from_json(const Json& j) {
  GeometricDatum d;
  d.label = j.at("label").get<std::string>();
  d.seed = j.at("seed").get<std::uint64_t>();
  d.kernel_dim = j.value("kernel_dim", -1);
  const Json& rep = j.at("rep");
  d.rep = std::make_shared<CliffordRep>(build_twisted_rep(
      rep.at("n").get<int>(), rep.at("r").get<int>(), rep.at("m").get<int>()));
  d.R = curvature_from_json(j.at("R"));
  d.theta = theta_from_json(j.at("theta"));
  d.psi = spinor_from_json(j.at("psi"));
  if (d.psi.size() != d.rep->dim)
    throw std::invalid_argument("json: spinor dimension does not match the representation");
  if (j.contains("psi_prime")) d.psi_prime = spinor_from_json(j.at("psi_prime"));
  return d;
}

Json report_to_json(const VerificationReport& r) {
  return Json{{"check", r.check},
              {"inputs", r.inputs},
              {"residuals", r.residuals},
              {"pass", r.pass},
              {"tol", r.tol}};
}

Json reports_to_json(const std::vector<VerificationReport>& rs) {
  Json arr = Json::array();
  for (const auto& r : rs) arr.push_back(report_to_json(r));
  return arr;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  Json j;
  in >> j;
  return j;
}

}  // namespace spinr
