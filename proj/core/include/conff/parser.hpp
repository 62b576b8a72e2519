// Text format for target programs.
//
//   fn main(a, b) {
//     block entry:
//       r = in[0] + 1
//       s = call helper(r, 7)
//       br site=S1 (s == 42) -> hit, miss
//     block hit:
//       crash "demo.c:9" "heap-buffer-overflow"
//       ret 1
//     block miss:
//       ret 0
//   }
//
// See docs/ir-format.md for the full grammar. parse_program throws
// ParseError with 1-based line/column on any syntax or resolution problem.
// serialize_program emits canonical text; parsing it back yields an
// identical program (round-trip identity).

#ifndef CONFF_PARSER_HPP
#define CONFF_PARSER_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include "conff/ir.hpp"

namespace conff {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& what)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + what),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

TargetProgram parse_program(std::string_view text);

// Refuses (throws std::invalid_argument) when validate() reports problems.
std::string serialize_program(const TargetProgram& p);

}  // namespace conff

#endif
