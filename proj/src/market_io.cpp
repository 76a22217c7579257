#include "mvp/market_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mvp/io.hpp"

namespace mvp {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw Error(Errc::ParseError, std::string("missing key '") + key + "'");
  return *it;
}

double number(const json& v, const char* what) {
  if (!v.is_number()) throw Error(Errc::ParseError, std::string(what) + " must be a number");
  return v.get<double>();
}

std::vector<double> number_array(const json& v, const char* what) {
  if (!v.is_array()) throw Error(Errc::ParseError, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(number(x, what));
  return out;
}

std::vector<double> merged_breakpoints(const MarketModel& m) {
  std::vector<double> bps;
  for (const auto* src : {&m.rate.breakpoints(), &m.appreciation.breakpoints(),
                          &m.volatility.breakpoints()}) {
    bps.insert(bps.end(), src->begin(), src->end());
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

}  // namespace

MarketModel parse_market(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ParseError, "market document must be an object");

  MarketModel m;
  m.horizon = number(require(doc, "horizon"), "horizon");
  if (!(m.horizon > 0.0)) throw Error(Errc::BadHorizon, "horizon must be positive");
  std::vector<double> bps = number_array(require(doc, "breakpoints"), "breakpoints");
  if (bps.empty() || bps.back() != m.horizon) {
    throw Error(Errc::BadHorizon, "breakpoints must end at the horizon");
  }
  std::vector<double> rate = number_array(require(doc, "rate"), "rate");

  const json& mu_doc = require(doc, "mu");
  const json& sigma_doc = require(doc, "sigma");
  if (!mu_doc.is_array() || !sigma_doc.is_array()) {
    throw Error(Errc::ParseError, "mu and sigma must be arrays");
  }
  std::vector<Vector> mu;
  for (const auto& row : mu_doc) {
    std::vector<double> v = number_array(row, "mu entry");
    mu.emplace_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  std::vector<Matrix> sigma;
  for (const auto& mat : sigma_doc) {
    if (!mat.is_array() || mat.empty()) throw Error(Errc::ParseError, "sigma entry must be a matrix");
    const auto rows = static_cast<Eigen::Index>(mat.size());
    Eigen::Index cols = -1;
    Matrix s;
    for (Eigen::Index i = 0; i < rows; ++i) {
      std::vector<double> row = number_array(mat[static_cast<std::size_t>(i)], "sigma row");
      if (cols < 0) {
        cols = static_cast<Eigen::Index>(row.size());
        s.resize(rows, cols);
      } else if (static_cast<Eigen::Index>(row.size()) != cols) {
        throw Error(Errc::BadDimensions, "sigma rows differ in length");
      }
      for (Eigen::Index j = 0; j < cols; ++j) s(i, j) = row[static_cast<std::size_t>(j)];
    }
    sigma.push_back(std::move(s));
  }

  m.rate = ParameterCurve<double>(bps, std::move(rate));
  m.appreciation = ParameterCurve<Vector>(bps, std::move(mu));
  m.volatility = ParameterCurve<Matrix>(bps, std::move(sigma));
  if (auto it = doc.find("delta"); it != doc.end()) m.delta = number(*it, "delta");
  return m;
}

std::string dump_market(const MarketModel& model) {
  const std::vector<double> bps = merged_breakpoints(model);
  json doc;
  doc["horizon"] = model.horizon;
  doc["breakpoints"] = bps;
  json rate = json::array(), mu = json::array(), sigma = json::array();
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const double t = bps[k];
    rate.push_back(model.rate(t));
    const Vector& v = model.appreciation(t);
    mu.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    const Matrix& s = model.volatility(t);
    json mat = json::array();
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < s.cols(); ++j) row.push_back(s(i, j));
      mat.push_back(std::move(row));
    }
    sigma.push_back(std::move(mat));
  }
  doc["rate"] = std::move(rate);
  doc["mu"] = std::move(mu);
  doc["sigma"] = std::move(sigma);
  doc["delta"] = model.delta;
  return doc.dump(2) + "\n";
}

MarketModel load_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open market file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_market(buf.str());
}

void save_market(const std::filesystem::path& path, const MarketModel& model) {
  write_file_atomic(path, dump_market(model));
}

}  // namespace mvp
