#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hawkes/types.hpp"

namespace hawkes {

struct LobsterMessage {
  double time = 0.0;  // seconds after midnight
  int event_type = 0;
  std::int64_t order_id = 0;
  std::int64_t size = 0;
  std::int64_t price = 0;  // dollars x 10^4
  int direction = 0;       // 1 buy, -1 sell
};

struct ParseIssue {
  std::size_t line;
  std::string reason;
};

struct ParsedMessages {
  std::vector<LobsterMessage> messages;
  std::vector<ParseIssue> issues;
  /// For each message, its 1-based line in the source file (to align with
  /// orderbook rows).
  std::vector<std::size_t> lines;
};

/// Malformed rows are reported, not fatal, unless they exceed 1% of rows.
ParsedMessages parse_messages(const std::string& path);

/// Best `levels` prices per side for one orderbook row.
struct BookRow {
  std::vector<std::int64_t> ask;
  std::vector<std::int64_t> bid;
};

/// Orderbook rows, one per message line, level-major (ask p, ask s, bid p, bid s, ...).
std::vector<BookRow> parse_orderbook(const std::string& path);

struct IngestConfig {
  double session_start = 34200.0;  // 09:30:00
  double session_end = 57600.0;    // 16:00:00
  std::int64_t min_volume = 100;
  int level = 1;                   // 0 disables the book-level filter
  bool accept_without_book = false;
  bool include_hidden = true;      // type 5 executions
  /// (event_type, direction) -> dimension 1..4
  std::map<std::pair<int, int>, int> grouping = default_grouping();

  static std::map<std::pair<int, int>, int> default_grouping();
  void validate() const;
};

struct IngestReport {
  std::size_t read = 0;
  std::size_t outside_session = 0;
  std::size_t below_volume = 0;
  std::size_t off_level = 0;
  std::size_t ungrouped = 0;
  std::size_t jittered = 0;
  std::vector<std::string> warnings;
};

/// Filters and groups messages into the four order-flow dimensions with
/// times rebased to the session start. `book`, when given, must align
/// row-for-row with `parsed.lines` of the message file.
EventSequence build_event_sequence(const ParsedMessages& parsed, const std::vector<BookRow>* book,
                                   const IngestConfig& cfg, IngestReport* report = nullptr);

}  // namespace hawkes
