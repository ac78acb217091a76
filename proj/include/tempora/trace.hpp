#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempora/forest_topology.hpp"
#include "tempora/time_value.hpp"

namespace tempora::trace {

// Syntax error in a trace file; `line` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line_no, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + message),
        line(line_no) {}

  std::size_t line;
};

struct ParsedOp {
  TraceOp op;
  std::size_t line = 0;
};

// One op per line, '#' starts a comment, blank lines are skipped:
//   addv v | delv v | link u v l [a] | cut v | addl v l [a] | dell v l [a]
//   | ea u v t | ld u v t | reach u v td ta
// Query times are decimal integers, "+inf" or "-inf"; labels must be
// finite.  An omitted arrival a means a = l.
std::vector<ParsedOp> parse_lines(std::istream& in);
std::vector<TraceOp> parse(std::istream& in);
std::vector<TraceOp> parse(const std::string& text);

// Canonical one-line form.  With `with_latency` label ops always spell out
// the arrival; without it they must carry plain labels.
std::string format_op(const TraceOp& op, bool with_latency);

std::string format_time(TimeValue t);
// Throws std::invalid_argument on anything but an in-range integer or
// "+inf" / "-inf".
TimeValue parse_time(const std::string& token);

}  // namespace tempora::trace
