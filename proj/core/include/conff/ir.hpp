// Program representation for the target IR.
//
// A program is a set of functions made of basic blocks. Blocks hold straight
// line instructions and end in exactly one terminator. Conditional branches
// and switches carry a constraint site id that is unique program-wide; the
// ids are what the runtime reports back in traces and what the analysis
// attaches distances to.
//
// Everything is interned: blocks, sites, functions and registers are dense
// indices into program tables, with the original spelling kept for
// serialization and diagnostics. Registers hold 64-bit integers only.
// Byte-string expressions (bytes(off,len) and hex literals) are allowed
// solely as the two operands of a bytes-compare branch.

#ifndef CONFF_IR_HPP
#define CONFF_IR_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace conff {

using Bytes = std::vector<uint8_t>;

enum class ArithOp : uint8_t { Add, Sub, Mul, Div, Mod, Xor, And, Or, Shl, Shr };
enum class CompareOp : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
enum class ExprKind : uint8_t { Const, Reg, InputByte, InputLen, Arith, ByteSlice, BytesLit };
enum class SiteKind : uint8_t { IntCompare, BytesCompare, Switch };
enum class InstrKind : uint8_t { Assign, Call, Crash, Nop };
enum class TermKind : uint8_t { Jump, CondBranch, Switch, Return };

// Expression node inside a per-function pool. Children are pool indices.
struct ExprNode {
  ExprKind kind = ExprKind::Const;
  ArithOp op = ArithOp::Add;  // Arith
  int32_t a = -1;             // Arith lhs, InputByte index, ByteSlice offset
  int32_t b = -1;             // Arith rhs
  int64_t konst = 0;          // Const
  int32_t reg = -1;           // Reg
  uint32_t slice_len = 0;     // ByteSlice
  Bytes lit;                  // BytesLit
};

struct Instr {
  InstrKind kind = InstrKind::Nop;
  int32_t dest = -1;            // Assign/Call destination register
  int32_t expr = -1;            // Assign rhs
  int32_t callee = -1;          // Call target function
  std::vector<int32_t> args;    // Call argument expressions
  std::string crash_location;   // Crash "file.c:123"
  std::string crash_type;       // Crash "heap-buffer-overflow"
};

struct SwitchCase {
  int64_t value = 0;
  int32_t target = -1;  // block index
};

struct Terminator {
  TermKind kind = TermKind::Return;
  int32_t site = -1;     // CondBranch/Switch site index
  CompareOp cmp = CompareOp::Eq;
  bool bytes_compare = false;
  int32_t lhs = -1;      // condition / scrutinee / return expression
  int32_t rhs = -1;
  int32_t target_true = -1;
  int32_t target_false = -1;
  int32_t jump_target = -1;
  std::vector<SwitchCase> cases;
  int32_t default_target = -1;
};

struct Block {
  std::string id;
  int32_t function = -1;
  std::vector<Instr> body;
  Terminator term;
};

struct Site {
  std::string id;
  SiteKind kind = SiteKind::IntCompare;
  int32_t block = -1;  // block whose terminator carries this site
};

struct Function {
  std::string name;
  std::vector<int32_t> params;        // register indices
  std::vector<std::string> reg_names; // index -> spelling
  std::vector<ExprNode> exprs;        // expression pool
  std::vector<int32_t> blocks;        // indices into TargetProgram::blocks
  int32_t entry_block = -1;
};

struct TargetProgram {
  std::vector<Function> functions;
  std::vector<Block> blocks;  // program-wide table
  std::vector<Site> sites;
  int32_t entry_function = -1;

  std::unordered_map<std::string, int32_t> block_index;
  std::unordered_map<std::string, int32_t> site_index;
  std::unordered_map<std::string, int32_t> function_index;

  uint32_t total_block_count() const { return static_cast<uint32_t>(blocks.size()); }

  int32_t find_block(const std::string& id) const {
    auto it = block_index.find(id);
    return it == block_index.end() ? -1 : it->second;
  }
  int32_t find_site(const std::string& id) const {
    auto it = site_index.find(id);
    return it == site_index.end() ? -1 : it->second;
  }
  int32_t find_function(const std::string& name) const {
    auto it = function_index.find(name);
    return it == function_index.end() ? -1 : it->second;
  }

  // Rebuilds the name -> index maps from the tables. Needed after
  // constructing or editing a program programmatically.
  void reindex();
};

struct Diagnostic {
  std::string message;
};

// Structural and semantic checks: unique block/site ids, resolvable branch
// targets and callees, an entry function, int-typed operands everywhere
// except bytes-compare sites, distinct switch case values, non-empty crash
// labels. Returns one diagnostic per problem; empty means valid.
std::vector<Diagnostic> validate(const TargetProgram& p);

// True when the expression (and its children) produce a byte-string.
bool expr_is_bytes(const Function& f, int32_t expr);

const char* arith_op_name(ArithOp op);
const char* compare_op_name(CompareOp op);

}  // namespace conff

#endif
