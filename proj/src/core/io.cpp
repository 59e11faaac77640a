#include "hawkes/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hawkes {

std::string format_double(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

json mixture_to_json(const BetaMixture& m) { return {{"p", m.weights}, {"a", m.a}, {"b", m.b}}; }

BetaMixture mixture_from_json(const json& j) {
  BetaMixture m;
  m.weights = j.at("p").get<std::vector<double>>();
  m.a = j.at("a").get<std::vector<double>>();
  m.b = j.at("b").get<std::vector<double>>();
  return m;
}

json shape_prior_to_json(const ShapePrior& s) {
  return {{"c_a", s.a_shape}, {"d_a", s.a_rate}, {"c_b", s.b_shape}, {"d_b", s.b_rate}};
}

void shape_prior_from_json(const json& j, ShapePrior& s) {
  s.a_shape = j.value("c_a", s.a_shape);
  s.a_rate = j.value("d_a", s.a_rate);
  s.b_shape = j.value("c_b", s.b_shape);
  s.b_rate = j.value("d_b", s.b_rate);
}

}  // namespace

void write_sequence(const EventSequence& seq, const fs::path& stem) {
  auto out = open_out(with_ext(stem, ".csv"));
  out << "t,d\n";
  for (std::size_t i = 0; i < seq.size(); ++i)
    out << format_double(seq.time(i)) << ',' << seq.dim(i) + 1 << '\n';
  write_json({{"T", seq.horizon()}, {"K", seq.num_dims()}}, with_ext(stem, ".json"));
}

EventSequence read_sequence(const fs::path& stem) {
  const json meta = read_json(with_ext(stem, ".json"));
  const fs::path csv = with_ext(stem, ".csv");
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot read " + csv.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,d", 0) != 0) throw std::runtime_error(csv.string() + ": expected header t,d");
  std::vector<double> t;
  std::vector<int> d;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) + ": malformed row");
    t.push_back(std::stod(line.substr(0, comma)));
    d.push_back(std::stoi(line.substr(comma + 1)) - 1);
  }
  return EventSequence(std::move(t), std::move(d), meta.at("T").get<double>(), meta.at("K").get<int>());
}

json params_to_json(const HawkesParams& p) {
  json alpha = json::array();
  for (Eigen::Index r = 0; r < p.alpha.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < p.alpha.cols(); ++c) row.push_back(p.alpha(r, c));
    alpha.push_back(row);
  }
  const auto& ex = p.excitation;
  json idio = json::array();
  for (int r = 0; r < ex.num_dims; ++r) {
    json row = json::array();
    for (int c = 0; c < ex.num_dims; ++c) row.push_back(mixture_to_json(ex.idio_at(r, c)));
    idio.push_back(row);
  }
  return {{"mu", p.mu},
          {"alpha", alpha},
          {"excitation",
           {{"eps", ex.eps}, {"T0", ex.support}, {"common", mixture_to_json(ex.common)}, {"idio", idio}}}};
}

HawkesParams params_from_json(const json& j) {
  HawkesParams p;
  p.mu = j.at("mu").get<std::vector<double>>();
  const int k = static_cast<int>(p.mu.size());
  const auto& a = j.at("alpha");
  if (static_cast<int>(a.size()) != k) throw std::invalid_argument("params: alpha must be K x K");
  p.alpha.resize(k, k);
  for (int r = 0; r < k; ++r) {
    if (static_cast<int>(a[r].size()) != k) throw std::invalid_argument("params: alpha must be K x K");
    for (int c = 0; c < k; ++c) p.alpha(r, c) = a[r][c].get<double>();
  }
  const auto& ex = j.at("excitation");
  p.excitation.eps = ex.at("eps").get<double>();
  p.excitation.support = ex.at("T0").get<double>();
  p.excitation.num_dims = k;
  p.excitation.common = mixture_from_json(ex.at("common"));
  const auto& idio = ex.at("idio");
  if (static_cast<int>(idio.size()) != k) throw std::invalid_argument("params: idio must be K x K");
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) p.excitation.idio.push_back(mixture_from_json(idio[r].at(c)));
  p.validate();
  return p;
}

void write_params(const HawkesParams& p, const fs::path& path) { write_json(params_to_json(p), path); }

HawkesParams read_params(const fs::path& path) { return params_from_json(read_json(path)); }

json hyper_to_json(const Hyperparams& h) {
  return {{"e", h.mu_shape},
          {"f", h.mu_rate},
          {"g", h.alpha_shape},
          {"h", h.alpha_rate},
          {"common", shape_prior_to_json(h.common)},
          {"idio", shape_prior_to_json(h.idio)},
          {"gamma_dp", h.concentration}};
}

Hyperparams hyper_from_json(const json& j) {
  Hyperparams h;
  h.mu_shape = j.value("e", h.mu_shape);
  h.mu_rate = j.value("f", h.mu_rate);
  h.alpha_shape = j.value("g", h.alpha_shape);
  h.alpha_rate = j.value("h", h.alpha_rate);
  if (j.contains("common")) shape_prior_from_json(j["common"], h.common);
  if (j.contains("idio")) shape_prior_from_json(j["idio"], h.idio);
  h.concentration = j.value("gamma_dp", h.concentration);
  h.validate();
  return h;
}

void write_branching(const LatentState& latent, const fs::path& path) {
  auto out = open_out(path);
  out << "child_index,parent_index\n";
  for (std::size_t j = 0; j < latent.parent.size(); ++j)
    out << j + 1 << ',' << (latent.parent[j] == kImmigrant ? 0 : latent.parent[j] + 1) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

void write_json(const json& j, const fs::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace hawkes
