#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hawkes/io.hpp"
#include "hawkes/mcmc.hpp"

namespace hawkes {

namespace {

std::string name(const char* base, std::initializer_list<int> idx) {
  std::string s = base;
  for (int i : idx) s += '_' + std::to_string(i + 1);
  return s;
}

std::vector<std::string> header(int k, int h0, int h) {
  std::vector<std::string> cols;
  for (int d = 0; d < k; ++d) cols.push_back(name("mu", {d}));
  for (int d = 0; d < k; ++d)
    for (int l = 0; l < k; ++l) cols.push_back(name("alpha", {d, l}));
  cols.push_back("eps");
  for (const char* f : {"p0", "a0", "b0"})
    for (int c = 0; c < h0; ++c) cols.push_back(name(f, {c}));
  for (int d = 0; d < k; ++d)
    for (int l = 0; l < k; ++l)
      for (const char* f : {"p", "a", "b"})
        for (int c = 0; c < h; ++c) cols.push_back(name(f, {d, l, c}));
  cols.push_back("loglik");
  return cols;
}

}  // namespace

void write_samples_csv(const PosteriorSamples& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (s.draws.empty()) {
    out << "loglik\n";
    return;
  }
  const HawkesParams& f = s.draws.front();
  const int k = f.num_dims();
  const int h0 = static_cast<int>(f.excitation.common.size());
  const int h = static_cast<int>(f.excitation.idio.front().size());
  const auto cols = header(k, h0, h);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (std::size_t r = 0; r < s.draws.size(); ++r) {
    const HawkesParams& p = s.draws[r];
    std::vector<double> row(p.mu);
    for (int d = 0; d < k; ++d)
      for (int l = 0; l < k; ++l) row.push_back(p.alpha(d, l));
    row.push_back(p.excitation.eps);
    const auto& cm = p.excitation.common;
    row.insert(row.end(), cm.weights.begin(), cm.weights.end());
    row.insert(row.end(), cm.a.begin(), cm.a.end());
    row.insert(row.end(), cm.b.begin(), cm.b.end());
    for (const auto& m : p.excitation.idio) {
      row.insert(row.end(), m.weights.begin(), m.weights.end());
      row.insert(row.end(), m.a.begin(), m.a.end());
      row.insert(row.end(), m.b.begin(), m.b.end());
    }
    row.push_back(r < s.loglik.size() ? s.loglik[r] : 0.0);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

PosteriorSamples read_samples_csv(const std::string& path, double support) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  PosteriorSamples s;
  if (cols.size() <= 1) return s;
  int k = 0, h0 = 0;
  for (const auto& c : cols) {
    if (c.rfind("mu_", 0) == 0) ++k;
    if (c.rfind("p0_", 0) == 0) ++h0;
  }
  const std::size_t fixed = static_cast<std::size_t>(k + k * k + 1 + 3 * h0 + 1);
  if (k < 1 || h0 < 1 || cols.size() <= fixed || (cols.size() - fixed) % (3 * k * k) != 0)
    throw std::runtime_error(path + ": unrecognized samples header");
  const int h = static_cast<int>((cols.size() - fixed) / (3 * k * k));
  if (cols != header(k, h0, h)) throw std::runtime_error(path + ": unrecognized samples header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) v.push_back(std::stod(c));
    if (v.size() != cols.size()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": wrong column count");
    HawkesParams p;
    std::size_t q = 0;
    p.mu.assign(v.begin(), v.begin() + k);
    q = k;
    p.alpha.resize(k, k);
    for (int d = 0; d < k; ++d)
      for (int l = 0; l < k; ++l) p.alpha(d, l) = v[q++];
    auto& ex = p.excitation;
    ex.eps = v[q++];
    ex.support = support;
    ex.num_dims = k;
    auto take = [&](int n) {
      std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(q), v.begin() + static_cast<std::ptrdiff_t>(q + n));
      q += n;
      return out;
    };
    ex.common.weights = take(h0);
    ex.common.a = take(h0);
    ex.common.b = take(h0);
    for (int pair = 0; pair < k * k; ++pair) {
      BetaMixture m;
      m.weights = take(h);
      m.a = take(h);
      m.b = take(h);
      ex.idio.push_back(std::move(m));
    }
    s.loglik.push_back(v[q]);
    s.draws.push_back(std::move(p));
  }
  return s;
}

}  // namespace hawkes
