#include "hawkes/lobster.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace hawkes {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_num(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

}  // namespace

ParsedMessages parse_messages(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  ParsedMessages out;
  std::string line;
  std::size_t lineno = 0, rows = 0;
  double last_time = -1.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ++rows;
    const auto f = split(line);
    LobsterMessage m;
    std::string bad;
    if (f.size() != 6) {
      bad = "expected 6 columns, found " + std::to_string(f.size());
    } else if (!parse_num(f[0], m.time) || !std::isfinite(m.time) || m.time < 0.0) {
      bad = "bad time";
    } else if (!parse_num(f[1], m.event_type) || m.event_type < 1 || m.event_type > 7) {
      bad = "bad event type";
    } else if (!parse_num(f[2], m.order_id)) {
      bad = "bad order id";
    } else if (!parse_num(f[3], m.size) || m.size < 0) {
      bad = "bad size";
    } else if (!parse_num(f[4], m.price)) {
      bad = "bad price";
    } else if (!parse_num(f[5], m.direction) || (m.direction != 1 && m.direction != -1)) {
      bad = "direction must be 1 or -1";
    } else if (m.time < last_time) {
      bad = "time decreases";
    }
    if (!bad.empty()) {
      out.issues.push_back({lineno, bad});
      continue;
    }
    last_time = m.time;
    out.messages.push_back(m);
    out.lines.push_back(lineno);
  }
  if (rows > 0 && static_cast<double>(out.issues.size()) > 0.01 * static_cast<double>(rows)) {
    std::string msg = path + ": " + std::to_string(out.issues.size()) + " of " + std::to_string(rows) +
                      " rows malformed (first at line " + std::to_string(out.issues.front().line) + ": " +
                      out.issues.front().reason + ")";
    throw std::runtime_error(msg);
  }
  return out;
}

std::vector<BookRow> parse_orderbook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<BookRow> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split(line);
    if (f.size() < 4 || f.size() % 4 != 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": orderbook rows need 4L columns");
    BookRow row;
    for (std::size_t c = 0; c < f.size(); c += 4) {
      std::int64_t ask = 0, bid = 0;
      if (!parse_num(f[c], ask) || !parse_num(f[c + 2], bid))
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad orderbook price");
      row.ask.push_back(ask);
      row.bid.push_back(bid);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::map<std::pair<int, int>, int> IngestConfig::default_grouping() {
  std::map<std::pair<int, int>, int> g;
  g[{1, 1}] = 1;
  g[{1, -1}] = 3;
  for (int t = 2; t <= 5; ++t) {
    g[{t, 1}] = 2;
    g[{t, -1}] = 4;
  }
  return g;
}

void IngestConfig::validate() const {
  if (!(session_start < session_end)) throw std::invalid_argument("IngestConfig: session_start must precede session_end");
  if (min_volume < 0) throw std::invalid_argument("IngestConfig: min_volume must be >= 0");
  if (level < 0) throw std::invalid_argument("IngestConfig: level must be >= 0");
  for (const auto& [key, dim] : grouping)
    if (dim < 1 || dim > 4) throw std::invalid_argument("IngestConfig: grouping targets must be 1..4");
}

namespace {

bool at_level(const BookRow& row, int direction, std::int64_t price, int level) {
  const auto& side = direction == 1 ? row.bid : row.ask;
  const std::size_t n = std::min<std::size_t>(side.size(), static_cast<std::size_t>(level));
  return std::find(side.begin(), side.begin() + static_cast<std::ptrdiff_t>(n), price) !=
         side.begin() + static_cast<std::ptrdiff_t>(n);
}

}  // namespace

EventSequence build_event_sequence(const ParsedMessages& parsed, const std::vector<BookRow>* book,
                                   const IngestConfig& cfg, IngestReport* report) {
  cfg.validate();
  IngestReport local;
  IngestReport& rep = report ? *report : local;
  const bool use_book = cfg.level > 0 && book != nullptr;
  if (cfg.level > 0 && book == nullptr) {
    if (!cfg.accept_without_book)
      throw std::invalid_argument("level filter requested but no orderbook file given (set accept_without_book)");
    rep.warnings.push_back("no orderbook file: level filter skipped, all price levels accepted");
  }
  const std::size_t max_line = parsed.lines.empty() ? 0 : parsed.lines.back();
  if (use_book && book->size() < max_line)
    throw std::invalid_argument("orderbook has fewer rows than the message file");

  const double horizon = cfg.session_end - cfg.session_start;
  std::vector<double> times;
  std::vector<int> dims;
  for (std::size_t r = 0; r < parsed.messages.size(); ++r) {
    const LobsterMessage& m = parsed.messages[r];
    ++rep.read;
    if (m.time < cfg.session_start || m.time > cfg.session_end) {
      ++rep.outside_session;
      continue;
    }
    if (m.event_type == 5 && !cfg.include_hidden) {
      ++rep.ungrouped;
      continue;
    }
    const auto g = cfg.grouping.find({m.event_type, m.direction});
    if (g == cfg.grouping.end()) {
      ++rep.ungrouped;
      continue;
    }
    if (m.size < cfg.min_volume) {
      ++rep.below_volume;
      continue;
    }
    if (use_book) {
      // Book row L is the state after message line L; line L-1 is the state before.
      const std::size_t line = parsed.lines[r];
      bool ok = at_level((*book)[line - 1], m.direction, m.price, cfg.level);
      if (!ok && line >= 2) ok = at_level((*book)[line - 2], m.direction, m.price, cfg.level);
      if (!ok) {
        ++rep.off_level;
        continue;
      }
    }
    double t = m.time - cfg.session_start;
    if (!times.empty() && t <= times.back()) {
      t = times.back() + 1e-9;
      ++rep.jittered;
    }
    if (t > horizon) {
      ++rep.outside_session;
      continue;
    }
    times.push_back(t);
    dims.push_back(g->second - 1);
  }
  if (times.empty()) rep.warnings.push_back("no events survived filtering");
  for (const auto& w : rep.warnings) std::clog << "warning: " << w << '\n';
  return EventSequence(std::move(times), std::move(dims), horizon, 4);
}

}  // namespace hawkes
