#include "sectorcert/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace sectorcert {

namespace {

Json matrix_to_json(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  if (!j[0].is_array()) throw InputError(what + ": expected an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw InputError(what + ": ragged rows in matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) throw InputError(what + ": non-numeric entry");
      M(i, c) = j[i][c].get<double>();
    }
  }
  return M;
}

Feedback feedback_from_json(const Json& j, const std::string& what) {
  if (!j.is_string()) throw InputError(what + ": feedback must be a string");
  const auto s = j.get<std::string>();
  if (s == "positive") return Feedback::positive;
  if (s == "negative") return Feedback::negative;
  throw InputError(what + ": feedback must be 'positive' or 'negative'");
}

}  // namespace

Json signal_to_json(const Signal& s) {
  Json steps = Json::array();
  for (int k = 0; k < s.length(); ++k) {
    Json row = Json::array();
    for (int i = 0; i < s.dim(); ++i) row.push_back(s.samples()(i, k));
    steps.push_back(std::move(row));
  }
  return steps;
}

Signal signal_from_json(const Json& j) {
  const Eigen::MatrixXd rows = matrix_from_json(j, "signal");
  if (rows.rows() == 0 || rows.cols() == 0) throw InputError("signal: empty");
  return Signal(rows.transpose());
}

void signal_to_csv(const Signal& s, std::ostream& out, bool header) {
  if (header) {
    out << "k";
    for (int i = 0; i < s.dim(); ++i) out << ",v" << i;
    out << "\n";
  }
  for (int k = 0; k < s.length(); ++k) {
    if (header) out << k << ",";
    for (int i = 0; i < s.dim(); ++i) {
      if (i > 0) out << ",";
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", s.samples()(i, k));
      out << buf;
    }
    out << "\n";
  }
}

Signal signal_from_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool has_index_column = false;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      if (!cells.empty() && (cells[0] == "k" || cells[0] == "\"k\"")) {
        has_index_column = true;
        continue;  // header row
      }
    }
    std::vector<double> values;
    for (std::size_t i = has_index_column ? 1 : 0; i < cells.size(); ++i) {
      try {
        values.push_back(std::stod(cells[i]));
      } catch (const std::exception&) {
        throw InputError("signal CSV: non-numeric cell '" + cells[i] + "'");
      }
    }
    if (values.empty()) throw InputError("signal CSV: empty data row");
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputError("signal CSV: no data rows");
  const std::size_t dim = rows[0].size();
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(dim),
                          static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != dim) throw InputError("signal CSV: inconsistent column count");
    for (std::size_t i = 0; i < dim; ++i) {
      samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[k][i];
    }
  }
  return Signal(std::move(samples));
}

Json statespace_to_json(const StateSpace& G) {
  Json j;
  j["A"] = matrix_to_json(G.A);
  j["B"] = matrix_to_json(G.B);
  j["C"] = matrix_to_json(G.C);
  j["D"] = matrix_to_json(G.D);
  return j;
}

StateSpace statespace_from_json(const Json& j) {
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) throw InputError(std::string("system: missing matrix ") + key);
  }
  Eigen::MatrixXd A = matrix_from_json(j["A"], "system.A");
  Eigen::MatrixXd B = matrix_from_json(j["B"], "system.B");
  Eigen::MatrixXd C = matrix_from_json(j["C"], "system.C");
  Eigen::MatrixXd D = matrix_from_json(j["D"], "system.D");
  if (D.rows() == 0 || D.cols() == 0) throw InputError("system: D must be nonempty");
  if (A.size() == 0) {  // static gain
    return StateSpace(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, D.cols()),
                      Eigen::MatrixXd(D.rows(), 0), std::move(D));
  }
  return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

Json quadspec_to_json(const QuadSpec& K) {
  Json j;
  j["matrix"] = matrix_to_json(K.matrix());
  j["side"] = to_string(K.side());
  j["feedback"] = to_string(K.feedback());
  return j;
}

QuadSpec quadspec_from_json(const Json& j, Side default_side) {
  const Json& mat = j.contains("matrix") ? j["matrix"] : j;
  const Eigen::MatrixXd K = matrix_from_json(mat, "sector matrix");
  if (K.rows() != 2 || K.cols() != 2) throw InputError("sector matrix must be 2x2");
  if (K(0, 1) != K(1, 0)) {
    throw InputError("sector matrix must be symmetric: entry [0][1] = " +
                     std::to_string(K(0, 1)) + " differs from [1][0] = " +
                     std::to_string(K(1, 0)));
  }
  Side side = default_side;
  if (j.is_object() && j.contains("side")) {
    const auto s = j["side"].get<std::string>();
    if (s == "g") side = Side::g;
    else if (s == "phi") side = Side::phi;
    else throw InputError("sector side must be 'g' or 'phi'");
  }
  Feedback fb = Feedback::positive;
  if (j.is_object() && j.contains("feedback")) {
    fb = feedback_from_json(j["feedback"], "sector");
  }
  return QuadSpec::from_matrix(Eigen::Matrix2d(K), side, fb);
}

SectorInput sector_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("sector: expected a JSON object");
  if (j.contains("preset")) {
    const auto name = preset_from_string(j["preset"].get<std::string>());
    std::map<std::string, double> params;
    if (j.contains("params")) {
      for (const auto& [key, value] : j["params"].items()) {
        if (!value.is_number()) throw InputError("sector: parameter '" + key + "' not numeric");
        params[key] = value.get<double>();
      }
    }
    SectorPair pair = preset(name, params);
    if (j.contains("feedback") &&
        feedback_from_json(j["feedback"], "sector") == Feedback::negative) {
      pair.M = flip_sign(pair.M);
      pair.N = flip_sign(pair.N);
    }
    return SectorInput{pair.M, pair.N, pair};
  }
  if (!j.contains("M")) throw InputError("sector: need either 'preset' or 'M'");
  Json m_entry = j["M"];
  Json holder;
  holder["matrix"] = m_entry;
  if (j.contains("side")) holder["side"] = j["side"];
  if (j.contains("feedback")) holder["feedback"] = j["feedback"];
  SectorInput input{quadspec_from_json(holder, Side::phi), std::nullopt, std::nullopt};
  if (j.contains("N")) {
    Json n_holder;
    n_holder["matrix"] = j["N"];
    n_holder["side"] = "g";
    if (j.contains("feedback")) n_holder["feedback"] = j["feedback"];
    input.N = quadspec_from_json(n_holder, Side::g);
  }
  return input;
}

Json nonlinearity_to_json(const Nonlinearity& phi) {
  Json j;
  switch (phi.kind()) {
    case Nonlinearity::Kind::static_map:
      j["kind"] = "static_map";
      j["map"] = phi.label();
      for (const auto& [key, value] : phi.params()) j[key] = value;
      break;
    case Nonlinearity::Kind::time_varying_gain:
      j["kind"] = "time_varying_gain";
      j["gains"] = phi.gains();
      break;
    case Nonlinearity::Kind::delay_gain:
      j["kind"] = "delay_gain";
      j["gain"] = phi.params().at("gain");
      break;
    case Nonlinearity::Kind::pair_relation:
      j["kind"] = "pair_relation";
      j["e2"] = signal_to_json(phi.recorded_e2());
      j["y2"] = signal_to_json(phi.recorded_y2());
      break;
  }
  return j;
}

Nonlinearity nonlinearity_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw InputError("nonlinearity: missing 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  const auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw InputError(std::string("nonlinearity: missing numeric '") + key + "'");
    }
    return j[key].get<double>();
  };
  if (kind == "static_map") {
    const auto map = j.contains("map") ? j["map"].get<std::string>() : "";
    if (map == "zero") return Nonlinearity::zero();
    if (map == "gain") return Nonlinearity::static_gain(number("gain"));
    if (map == "saturation") return Nonlinearity::saturation(number("level"));
    if (map == "sector_saturation") {
      return Nonlinearity::sector_saturation(number("a"), number("b"), number("level"));
    }
    throw InputError("nonlinearity: unknown static map '" + map + "'");
  }
  if (kind == "time_varying_gain") {
    if (!j.contains("gains") || !j["gains"].is_array()) {
      throw InputError("nonlinearity: time_varying_gain needs a 'gains' array");
    }
    std::vector<double> gains;
    for (const auto& g : j["gains"]) {
      if (!g.is_number()) throw InputError("nonlinearity: non-numeric gain");
      gains.push_back(g.get<double>());
    }
    return Nonlinearity::time_varying(std::move(gains));
  }
  if (kind == "delay_gain") return Nonlinearity::delayed_gain(number("gain"));
  if (kind == "pair_relation") {
    if (!j.contains("e2") || !j.contains("y2")) {
      throw InputError("nonlinearity: pair_relation needs 'e2' and 'y2'");
    }
    return Nonlinearity::pair(signal_from_json(j["e2"]), signal_from_json(j["y2"]));
  }
  throw InputError("nonlinearity: unknown kind '" + kind + "'");
}

Json certificate_to_json(const Certificate& cert) {
  Json j;
  j["method"] = to_string(cert.method);
  j["tau"] = cert.tau;
  j["eta"] = cert.eta;
  j["r"] = cert.r;
  j["q"] = cert.q;
  j["gamma"] = cert.gamma;
  j["horizon"] = cert.horizon;
  j["rho"] = cert.weight.rho();
  j["N"] = matrix_to_json(cert.N.matrix());
  return j;
}

Json witness_to_json(const ViolationWitness& w) {
  Json j;
  j["gamma_target"] = w.gamma_target;
  j["T"] = w.horizon;
  j["rho"] = w.weight.rho();
  j["sigma0"] = w.sigma0;
  j["sigma1"] = w.sigma1;
  j["u"] = signal_to_json(w.u);
  j["y"] = signal_to_json(w.y);
  j["e"] = signal_to_json(w.e);
  j["tau_star"] = w.tau_star;
  j["lambda_star"] = w.lambda_star;
  j["operator_realizable"] = w.operator_realizable();
  if (w.realization) {
    Json gains = Json::array();
    for (const auto& g : w.realization->gains) {
      Json step = Json::array();
      for (Eigen::Index i = 0; i < g.size(); ++i) step.push_back(g(i));
      gains.push_back(std::move(step));
    }
    j["gains"] = std::move(gains);
  }
  return j;
}

void trajectory_to_csv(const LoopTrajectory& run, std::ostream& out) {
  const int m = run.e.dim() / 2;
  const int n = static_cast<int>(run.states.rows());
  out << "k";
  for (const char* ch : {"e1", "e2", "y1", "y2"}) {
    for (int i = 0; i < m; ++i) out << "," << ch << "_" << i;
  }
  for (int i = 0; i < n; ++i) out << ",x_" << i;
  out << "\n";
  char buf[40];
  for (int k = 0; k < run.e.length(); ++k) {
    out << k;
    const auto emit = [&](double v) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << "," << buf;
    };
    for (int i = 0; i < 2 * m; ++i) emit(run.e.samples()(i, k));
    for (int i = 0; i < 2 * m; ++i) emit(run.y.samples()(i, k));
    for (int i = 0; i < n; ++i) emit(run.states(i, k));
    out << "\n";
  }
}

namespace {

void dump_value(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + Json(key).dump() + ": ";
        dump_value(value, out, indent, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_value(value, out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_value(j, out, indent, 0);
  out += "\n";
  return out;
}

}  // namespace sectorcert
