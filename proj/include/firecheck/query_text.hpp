// Textual property files (.vq): one statement per line, '#' starts a comment.
//
//   stmt := "pre:" var "in" "[" num "," num "]"
//         | "pre:" var cmp num
//         | "post:" "y" cmp num
//   var  := "x[" index "]"        index := integer | "*"
//   cmp  := "<=" | ">=" | "<" | ">"
//
// Every input dimension must end up bounded on both sides (the wildcard line
// "pre: x[*] in [lo, hi]" is the usual way); multiple constraints on one
// dimension intersect. Strict pre comparisons are interpreted over closed
// intervals: boxes are closed, and the lost boundary points form a measure-
// zero set that exact witness checking handles anyway. Contradictory pre
// lines parse fine (the bounds are kept raw); rendering or verifying such a
// query rejects it as an infeasible precondition.
#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "firecheck/fmt.hpp"
#include "firecheck/query.hpp"

namespace firecheck {

struct QuerySource {
  std::string text;
  std::string origin = "<inline>";
};

class QueryParseError : public std::runtime_error {
 public:
  QueryParseError(const std::string& origin, int line, int col, const std::string& msg)
      : std::runtime_error(format(origin, line, col, msg)), line_(line), col_(col) {}

  int line() const { return line_; }  // 1-based; 0 for whole-file errors
  int col() const { return col_; }

 private:
  static std::string format(const std::string& origin, int line, int col, const std::string& msg) {
    if (line <= 0) return origin + ": " + msg;
    return origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg;
  }

  int line_;
  int col_;
};

namespace detail {

// Single-line scanner; positions are 1-based byte columns.
class LineScanner {
 public:
  LineScanner(const std::string& origin, int line_no, std::string line)
      : origin_(origin), line_no_(line_no), line_(std::move(line)) {}

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= line_.size();
  }

  bool try_literal(const std::string& lit) {
    skip_ws();
    if (line_.compare(pos_, lit.size(), lit) != 0) return false;
    pos_ += lit.size();
    return true;
  }

  // Matches a keyword: the literal must not be followed by a letter or digit.
  bool try_word(const std::string& word) {
    skip_ws();
    if (line_.compare(pos_, word.size(), word) != 0) return false;
    const std::size_t after = pos_ + word.size();
    if (after < line_.size() && (std::isalnum(static_cast<unsigned char>(line_[after])) != 0))
      return false;
    pos_ = after;
    return true;
  }

  void expect(const std::string& lit, const std::string& what) {
    if (!try_literal(lit)) fail("expected " + what);
  }

  double number() {
    skip_ws();
    double value = 0.0;
    const char* begin = line_.data() + pos_;
    const char* end = line_.data() + line_.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec == std::errc::invalid_argument || res.ptr == begin) fail("expected a number");
    if (res.ec == std::errc::result_out_of_range || !std::isfinite(value))
      fail("number out of range");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return value;
  }

  // Returns the dimension index, or -1 for the wildcard '*'.
  std::int64_t index(std::int64_t dim_count) {
    skip_ws();
    if (pos_ < line_.size() && line_[pos_] == '*') {
      ++pos_;
      return -1;
    }
    const std::size_t at = pos_;
    std::int64_t value = 0;
    const char* begin = line_.data() + pos_;
    const char* end = line_.data() + line_.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr == begin) fail("expected a dimension index or '*'");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    if (value < 0 || value >= dim_count) {
      fail_at(static_cast<int>(at) + 1, "index " + std::to_string(value) +
                                            " out of range for " + std::to_string(dim_count) +
                                            " input dimensions");
    }
    return value;
  }

  CmpOp cmp() {
    skip_ws();
    if (try_literal("<=")) return CmpOp::Le;
    if (try_literal(">=")) return CmpOp::Ge;
    if (try_literal("<")) return CmpOp::Lt;
    if (try_literal(">")) return CmpOp::Gt;
    fail("expected a comparison ('<=', '>=', '<', '>')");
  }

  void expect_end() {
    if (!at_end()) fail("unexpected trailing characters");
  }

  [[noreturn]] void fail(const std::string& msg) { fail_at(static_cast<int>(pos_) + 1, msg); }

  [[noreturn]] void fail_at(int col, const std::string& msg) {
    throw QueryParseError(origin_, line_no_, col, "syntax error: " + msg);
  }

 private:
  const std::string& origin_;
  int line_no_;
  std::string line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Query parse_query(const QuerySource& src, const Shape& input_shape) {
  const std::int64_t n = shape_size(input_shape);
  if (n <= 0) throw std::invalid_argument("query input shape must have positive volume");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(static_cast<std::size_t>(n), -inf);
  std::vector<double> hi(static_cast<std::size_t>(n), inf);
  std::vector<PostConstraint> post;

  const auto tighten_lo = [&](std::int64_t idx, double v) {
    if (idx < 0) {
      for (auto& x : lo) x = std::max(x, v);
    } else {
      lo[static_cast<std::size_t>(idx)] = std::max(lo[static_cast<std::size_t>(idx)], v);
    }
  };
  const auto tighten_hi = [&](std::int64_t idx, double v) {
    if (idx < 0) {
      for (auto& x : hi) x = std::min(x, v);
    } else {
      hi[static_cast<std::size_t>(idx)] = std::min(hi[static_cast<std::size_t>(idx)], v);
    }
  };

  std::istringstream lines(src.text);
  std::string raw;
  int line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t'))
      raw.pop_back();

    detail::LineScanner sc(src.origin, line_no, std::move(raw));
    if (sc.at_end()) continue;

    if (sc.try_word("pre")) {
      sc.expect(":", "':' after 'pre'");
      sc.expect("x", "'x'");
      sc.expect("[", "'['");
      const std::int64_t idx = sc.index(n);
      sc.expect("]", "']'");
      if (sc.try_word("in")) {
        sc.expect("[", "'['");
        const double a = sc.number();
        sc.expect(",", "','");
        const double b = sc.number();
        sc.expect("]", "']'");
        sc.expect_end();
        tighten_lo(idx, a);
        tighten_hi(idx, b);
      } else {
        const CmpOp op = sc.cmp();
        const double v = sc.number();
        sc.expect_end();
        if (op == CmpOp::Le || op == CmpOp::Lt) {
          tighten_hi(idx, v);
        } else {
          tighten_lo(idx, v);
        }
      }
    } else if (sc.try_word("post")) {
      sc.expect(":", "':' after 'post'");
      sc.expect("y", "'y'");
      const CmpOp op = sc.cmp();
      const double v = sc.number();
      sc.expect_end();
      post.push_back({1.0, op, v});
    } else {
      sc.fail("expected 'pre:' or 'post:'");
    }
  }

  if (post.empty()) throw QueryParseError(src.origin, 0, 0, "empty post section");
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (lo[u] == -inf || hi[u] == inf)
      throw QueryParseError(src.origin, 0, 0, "unbounded dimension " + std::to_string(i));
  }
  return Query(input_shape, std::move(lo), std::move(hi), std::move(post));
}

// Canonical text: one intersected interval per dimension in ascending order,
// then the post constraints. parse(render(q)) == q for every renderable q.
inline std::string render_query(const Query& q) {
  if (!q.feasible()) throw std::invalid_argument("infeasible precondition");
  for (const auto& c : q.post) {
    if (c.coeff != 1.0)
      throw std::invalid_argument("only unit-coefficient post constraints can be rendered");
  }
  std::string out;
  for (std::size_t i = 0; i < q.lo.size(); ++i) {
    out += "pre: x[" + std::to_string(i) + "] in [" + format_double(q.lo[i]) + "," +
           format_double(q.hi[i]) + "]\n";
  }
  for (const auto& c : q.post) {
    out += std::string("post: y ") + cmp_str(c.op) + " " + format_double(c.bound) + "\n";
  }
  return out;
}

inline Query load_query(const std::string& path, const Shape& input_shape) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open query file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_query({buf.str(), path}, input_shape);
}

}  // namespace firecheck
