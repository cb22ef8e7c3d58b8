#include "catforge/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "catforge/errors.hpp"

namespace catforge {

namespace {

Json complex_list(const Complex* data, Eigen::Index n) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < n; ++i) {
    out.push_back(Json::array({data[i].real(), data[i].imag()}));
  }
  return out;
}

struct Header {
  std::string kind;
  int n_modes;
  int cutoff;
};

Header read_header(const Json& doc) {
  if (!doc.is_object()) {
    throw InvalidArgument("state document must be a JSON object");
  }
  for (const char* key : {"n_modes", "cutoff", "data"}) {
    if (!doc.contains(key)) {
      throw InvalidArgument(std::string("state document is missing '") + key +
                            "'");
    }
  }
  Header h;
  h.n_modes = doc.at("n_modes").get<int>();
  h.cutoff = doc.at("cutoff").get<int>();
  const auto dim = fock_dim(h.cutoff, h.n_modes);
  const auto len = static_cast<Eigen::Index>(doc.at("data").size());
  if (doc.contains("kind")) {
    h.kind = doc.at("kind").get<std::string>();
  } else {
    h.kind = len == dim ? "pure" : "density";
  }
  return h;
}

std::vector<Complex> read_data(const Json& data, std::size_t expected) {
  if (!data.is_array() || data.size() != expected) {
    throw InvalidArgument("state document 'data' has " +
                          std::to_string(data.size()) + " entries, expected " +
                          std::to_string(expected));
  }
  std::vector<Complex> out;
  out.reserve(expected);
  for (const auto& pair : data) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      throw InvalidArgument("state document entries must be [re, im] pairs");
    }
    out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& text, std::size_t line) {
  const std::string f = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw InvalidArgument("line " + std::to_string(line) + ": cannot parse '" +
                          f + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

Json to_json(const PureState& psi) {
  Json doc;
  doc["kind"] = "pure";
  doc["n_modes"] = psi.n_modes();
  doc["cutoff"] = psi.cutoff();
  doc["data"] = complex_list(psi.amplitudes().data(), psi.dim());
  return doc;
}

Json to_json(const DensityMatrix& rho) {
  // Eigen stores column-major; the document is row-major.
  const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      rows = rho.entries();
  Json doc;
  doc["kind"] = "density";
  doc["n_modes"] = rho.n_modes();
  doc["cutoff"] = rho.cutoff();
  doc["data"] = complex_list(rows.data(), rows.size());
  return doc;
}

Json to_json(const GenerationResult& result) {
  Json doc = to_json(result.rho_plus);
  doc["success_weight"] = result.success_weight;
  doc["c0"] = result.c0;
  return doc;
}

Json to_json(const WignerGrid& grid) {
  Json doc;
  doc["convention"] = std::string(WignerGrid::kConvention);
  doc["x_axis"] = grid.x_axis;
  doc["p_axis"] = grid.p_axis;
  Json values = Json::array();
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(grid.values.cols()));
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
      row[static_cast<std::size_t>(j)] = grid.values(i, j);
    }
    values.push_back(row);
  }
  doc["values"] = std::move(values);
  doc["layout"] = "values[i][j] = W(x_axis[i], p_axis[j])";
  return doc;
}

PureState pure_state_from_json(const Json& doc) {
  const Header h = read_header(doc);
  if (h.kind != "pure") {
    throw InvalidArgument("expected a pure state document, got '" + h.kind +
                          "'");
  }
  const auto dim = fock_dim(h.cutoff, h.n_modes);
  const auto data = read_data(doc.at("data"), static_cast<std::size_t>(dim));
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = data[static_cast<std::size_t>(i)];
  return PureState(std::move(v), h.cutoff, h.n_modes);
}

DensityMatrix density_matrix_from_json(const Json& doc) {
  const Header h = read_header(doc);
  if (h.kind != "density") {
    throw InvalidArgument("expected a density document, got '" + h.kind + "'");
  }
  const auto dim = fock_dim(h.cutoff, h.n_modes);
  const auto data =
      read_data(doc.at("data"), static_cast<std::size_t>(dim * dim));
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = data[static_cast<std::size_t>(i * dim + j)];
    }
  }
  return DensityMatrix(std::move(m), h.cutoff, h.n_modes);
}

StateDocument state_from_json(const Json& doc) {
  const Header h = read_header(doc);
  if (h.kind == "pure") return pure_state_from_json(doc);
  if (h.kind == "density") return density_matrix_from_json(doc);
  throw InvalidArgument("unknown state kind '" + h.kind + "'");
}

DensityMatrix as_density(const StateDocument& doc) {
  if (const auto* psi = std::get_if<PureState>(&doc)) {
    return DensityMatrix::from_pure(*psi);
  }
  return std::get<DensityMatrix>(doc);
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("malformed JSON in " + path.string() + ": " +
                          e.what());
  }
}

std::string wigner_csv(const WignerGrid& grid) {
  std::string out = "x,p,W\n";
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
      out += fmt::format("{},{},{}\n", grid.x_axis[i], grid.p_axis[j],
                         grid.values(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j)));
    }
  }
  return out;
}

std::string photon_distribution_csv(const std::vector<double>& p) {
  std::string out = "n,p\n";
  for (std::size_t n = 0; n < p.size(); ++n) {
    out += fmt::format("{},{}\n", n, p[n]);
  }
  return out;
}

std::string mode_taps_csv(const ModeTaps& taps) {
  std::string out = "time_s,amplitude\n";
  for (std::size_t k = 0; k < taps.times.size(); ++k) {
    out += fmt::format("{},{}\n", taps.times[k], taps.amplitudes[k]);
  }
  return out;
}

std::string quadrature_csv(const QuadratureRecord& record) {
  std::string out = "x,theta\n";
  for (const auto& s : record.samples) {
    out += fmt::format("{},{}\n", s.x, s.theta);
  }
  return out;
}

Json quadrature_metadata(const QuadratureRecord& record) {
  Json doc;
  doc["seed"] = record.seed;
  doc["source"] = record.source;
  doc["n_samples"] = record.samples.size();
  return doc;
}

std::string likelihood_csv(const std::vector<double>& trace) {
  std::string out = "iteration,loglikelihood\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out += fmt::format("{},{}\n", k, trace[k]);
  }
  return out;
}

std::filesystem::path quadrature_metadata_path(const std::filesystem::path& csv) {
  std::filesystem::path meta = csv;
  meta.replace_extension(".meta.json");
  return meta;
}

QuadratureRecord read_quadrature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open quadrature record " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,theta") {
    throw InvalidArgument("quadrature record " + path.string() +
                          " must start with header 'x,theta'");
  }
  QuadratureRecord record;
  record.source = "file:" + path.filename().string();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
      throw InvalidArgument("line " + std::to_string(line_no) +
                            ": expected two fields");
    }
    record.samples.push_back({parse_number(t.substr(0, comma), line_no),
                              parse_number(t.substr(comma + 1), line_no)});
  }
  const auto meta = quadrature_metadata_path(path);
  if (std::filesystem::exists(meta)) {
    const Json doc = read_json(meta);
    if (doc.contains("seed")) record.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("source")) record.source = doc.at("source").get<std::string>();
  }
  record.validate();
  return record;
}

}  // namespace catforge
