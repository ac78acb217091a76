#include "tempora/trace.hpp"

#include <charconv>
#include <istream>
#include <sstream>

namespace tempora::trace {

namespace {

std::int64_t parse_int(const std::string& tok, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + tok + "'");
  }
  return v;
}

VertexId parse_vertex(const std::string& tok) {
  std::int64_t v = parse_int(tok, "vertex");
  if (v < 0 || v > static_cast<std::int64_t>(UINT32_MAX)) {
    throw std::invalid_argument("vertex out of range '" + tok + "'");
  }
  return static_cast<VertexId>(v);
}

std::int64_t parse_label_time(const std::string& tok) {
  TimeValue t = parse_time(tok);
  if (!t.is_finite()) {
    throw std::invalid_argument("label must be finite, got '" + tok + "'");
  }
  return t.value();
}

TemporalLabel parse_label(const std::vector<std::string>& tok,
                          std::size_t at) {
  std::int64_t dep = parse_label_time(tok[at]);
  std::int64_t arr = at + 1 < tok.size() ? parse_label_time(tok[at + 1]) : dep;
  return TemporalLabel{dep, arr};
}

void need_args(const std::vector<std::string>& tok, std::size_t lo,
               std::size_t hi) {
  if (tok.size() - 1 < lo || tok.size() - 1 > hi) {
    throw std::invalid_argument("op '" + tok[0] + "' takes " +
                                std::to_string(lo) +
                                (hi == lo ? "" : ".." + std::to_string(hi)) +
                                " arguments");
  }
}

TraceOp parse_tokens(const std::vector<std::string>& tok) {
  const std::string& op = tok[0];
  if (op == "addv") {
    need_args(tok, 1, 1);
    return OpAddVertex{parse_vertex(tok[1])};
  }
  if (op == "delv") {
    need_args(tok, 1, 1);
    return OpDelVertex{parse_vertex(tok[1])};
  }
  if (op == "link") {
    need_args(tok, 3, 4);
    return OpLink{parse_vertex(tok[1]), parse_vertex(tok[2]),
                  parse_label(tok, 3)};
  }
  if (op == "cut") {
    need_args(tok, 1, 1);
    return OpCut{parse_vertex(tok[1])};
  }
  if (op == "addl") {
    need_args(tok, 2, 3);
    return OpAddLabel{parse_vertex(tok[1]), parse_label(tok, 2)};
  }
  if (op == "dell") {
    need_args(tok, 2, 3);
    return OpDelLabel{parse_vertex(tok[1]), parse_label(tok, 2)};
  }
  if (op == "ea") {
    need_args(tok, 3, 3);
    return OpQueryEa{parse_vertex(tok[1]), parse_vertex(tok[2]),
                     parse_time(tok[3])};
  }
  if (op == "ld") {
    need_args(tok, 3, 3);
    return OpQueryLd{parse_vertex(tok[1]), parse_vertex(tok[2]),
                     parse_time(tok[3])};
  }
  if (op == "reach") {
    need_args(tok, 4, 4);
    return OpQueryReach{parse_vertex(tok[1]), parse_vertex(tok[2]),
                        parse_time(tok[3]), parse_time(tok[4])};
  }
  throw std::invalid_argument("unknown op '" + op + "'");
}

}  // namespace

TimeValue parse_time(const std::string& token) {
  if (token == "+inf" || token == "inf") return TimeValue::pos_inf();
  if (token == "-inf") return TimeValue::neg_inf();
  std::int64_t v = parse_int(token, "time");
  if (v < kMinFiniteTime || v > kMaxFiniteTime) {
    throw std::invalid_argument("time out of range '" + token + "'");
  }
  return TimeValue::finite(v);
}

std::string format_time(TimeValue t) { return t.str(); }

std::vector<ParsedOp> parse_lines(std::istream& in) {
  std::vector<ParsedOp> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    try {
      out.push_back(ParsedOp{parse_tokens(tok), line_no});
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

std::vector<TraceOp> parse(std::istream& in) {
  std::vector<TraceOp> out;
  for (ParsedOp& p : parse_lines(in)) out.push_back(std::move(p.op));
  return out;
}

std::vector<TraceOp> parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

std::string format_op(const TraceOp& op, bool with_latency) {
  auto lab = [&](const TemporalLabel& l) {
    if (with_latency) {
      return std::to_string(l.departure) + " " + std::to_string(l.arrival);
    }
    if (!l.is_plain()) {
      throw std::invalid_argument("latency label in a plain trace");
    }
    return std::to_string(l.departure);
  };
  if (const auto* o = std::get_if<OpAddVertex>(&op)) {
    return "addv " + std::to_string(o->v);
  }
  if (const auto* o = std::get_if<OpDelVertex>(&op)) {
    return "delv " + std::to_string(o->v);
  }
  if (const auto* o = std::get_if<OpLink>(&op)) {
    return "link " + std::to_string(o->u) + " " + std::to_string(o->v) + " " +
           lab(o->label);
  }
  if (const auto* o = std::get_if<OpCut>(&op)) {
    return "cut " + std::to_string(o->v);
  }
  if (const auto* o = std::get_if<OpAddLabel>(&op)) {
    return "addl " + std::to_string(o->v) + " " + lab(o->label);
  }
  if (const auto* o = std::get_if<OpDelLabel>(&op)) {
    return "dell " + std::to_string(o->v) + " " + lab(o->label);
  }
  if (const auto* o = std::get_if<OpQueryEa>(&op)) {
    return "ea " + std::to_string(o->u) + " " + std::to_string(o->v) + " " +
           format_time(o->t);
  }
  if (const auto* o = std::get_if<OpQueryLd>(&op)) {
    return "ld " + std::to_string(o->u) + " " + std::to_string(o->v) + " " +
           format_time(o->t);
  }
  const auto& o = std::get<OpQueryReach>(op);
  return "reach " + std::to_string(o.u) + " " + std::to_string(o.v) + " " +
         format_time(o.t_dep) + " " + format_time(o.t_arr);
}

}  // namespace tempora::trace
