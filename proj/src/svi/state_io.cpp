#include <fstream>
#include <stdexcept>

#include "hawkes/io.hpp"
#include "hawkes/svi.hpp"

namespace hawkes {

namespace {

json gammas(const std::vector<GammaQ>& v) {
  json out = json::array();
  for (const auto& g : v) out.push_back({g.shape, g.rate});
  return out;
}

std::vector<GammaQ> gammas_from(const json& j) {
  std::vector<GammaQ> out;
  for (const auto& e : j) out.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return out;
}

}  // namespace

json state_to_json(const VariationalState& s) {
  return {{"K", s.k},
          {"H0", s.h0},
          {"H", s.h},
          {"T0", s.support},
          {"variant", to_string(s.variant)},
          {"eta_mu", gammas(s.mu)},
          {"eta_alpha", gammas(s.alpha)},
          {"eta_a0", gammas(s.a0)},
          {"eta_b0", gammas(s.b0)},
          {"eta_a", gammas(s.ai)},
          {"eta_b", gammas(s.bi)},
          {"eta_p0", s.p0},
          {"eta_p", s.pi},
          {"eta_eps", {s.eps1, s.eps2}},
          {"clamp_events", s.clamp_events}};
}

VariationalState state_from_json(const json& j) {
  VariationalState s;
  s.k = j.at("K").get<int>();
  s.h0 = j.at("H0").get<int>();
  s.h = j.at("H").get<int>();
  s.support = j.at("T0").get<double>();
  s.variant = variant_from_string(j.at("variant").get<std::string>());
  s.mu = gammas_from(j.at("eta_mu"));
  s.alpha = gammas_from(j.at("eta_alpha"));
  s.a0 = gammas_from(j.at("eta_a0"));
  s.b0 = gammas_from(j.at("eta_b0"));
  s.ai = gammas_from(j.at("eta_a"));
  s.bi = gammas_from(j.at("eta_b"));
  s.p0 = j.at("eta_p0").get<std::vector<double>>();
  s.pi = j.at("eta_p").get<std::vector<std::vector<double>>>();
  s.eps1 = j.at("eta_eps").at(0).get<double>();
  s.eps2 = j.at("eta_eps").at(1).get<double>();
  s.clamp_events = j.value("clamp_events", std::uint64_t{0});
  const auto kk = static_cast<std::size_t>(s.k) * s.k;
  if (s.mu.size() != static_cast<std::size_t>(s.k) || s.alpha.size() != kk ||
      s.a0.size() != static_cast<std::size_t>(s.h0) || s.b0.size() != s.a0.size() ||
      s.p0.size() != s.a0.size() || s.ai.size() != kk * s.h || s.bi.size() != s.ai.size() || s.pi.size() != kk)
    throw std::invalid_argument("variational state: inconsistent sizes");
  s.validate();
  return s;
}

void write_trace_csv(const std::vector<std::pair<int, double>>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,elbo\n";
  for (const auto& [it, v] : trace) out << it << ',' << format_double(v) << '\n';
}

}  // namespace hawkes
