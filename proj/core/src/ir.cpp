#include "conff/ir.hpp"

#include <set>

namespace conff {

void TargetProgram::reindex() {
  block_index.clear();
  site_index.clear();
  function_index.clear();
  for (size_t i = 0; i < blocks.size(); ++i) block_index.emplace(blocks[i].id, static_cast<int32_t>(i));
  for (size_t i = 0; i < sites.size(); ++i) site_index.emplace(sites[i].id, static_cast<int32_t>(i));
  for (size_t i = 0; i < functions.size(); ++i) function_index.emplace(functions[i].name, static_cast<int32_t>(i));
}

bool expr_is_bytes(const Function& f, int32_t expr) {
  if (expr < 0 || expr >= static_cast<int32_t>(f.exprs.size())) return false;
  ExprKind k = f.exprs[expr].kind;
  return k == ExprKind::ByteSlice || k == ExprKind::BytesLit;
}

const char* arith_op_name(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    case ArithOp::Mod: return "%";
    case ArithOp::Xor: return "^";
    case ArithOp::And: return "&";
    case ArithOp::Or: return "|";
    case ArithOp::Shl: return "<<";
    case ArithOp::Shr: return ">>";
  }
  return "?";
}

const char* compare_op_name(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

namespace {

void check_expr(const TargetProgram& p, const Function& f, int32_t e, bool want_bytes,
                const std::string& where, std::vector<Diagnostic>& out) {
  if (e < 0 || e >= static_cast<int32_t>(f.exprs.size())) {
    out.push_back({where + ": expression index out of range"});
    return;
  }
  const ExprNode& n = f.exprs[e];
  bool is_bytes = n.kind == ExprKind::ByteSlice || n.kind == ExprKind::BytesLit;
  if (want_bytes != is_bytes) {
    out.push_back({where + ": expected " + (want_bytes ? "byte-string" : "integer") + " operand"});
    return;
  }
  switch (n.kind) {
    case ExprKind::Const:
    case ExprKind::InputLen:
    case ExprKind::BytesLit:
      break;
    case ExprKind::Reg:
      if (n.reg < 0 || n.reg >= static_cast<int32_t>(f.reg_names.size()))
        out.push_back({where + ": register index out of range"});
      break;
    case ExprKind::InputByte:
      check_expr(p, f, n.a, false, where, out);
      break;
    case ExprKind::ByteSlice:
      check_expr(p, f, n.a, false, where, out);
      break;
    case ExprKind::Arith:
      check_expr(p, f, n.a, false, where, out);
      check_expr(p, f, n.b, false, where, out);
      break;
  }
}

void check_target(const TargetProgram& p, int32_t from_func, int32_t target,
                  const std::string& where, std::vector<Diagnostic>& out) {
  if (target < 0 || target >= static_cast<int32_t>(p.blocks.size())) {
    out.push_back({where + ": branch target out of range"});
    return;
  }
  if (p.blocks[target].function != from_func)
    out.push_back({where + ": branch target '" + p.blocks[target].id + "' is in another function"});
}

}  // namespace

std::vector<Diagnostic> validate(const TargetProgram& p) {
  std::vector<Diagnostic> out;

  if (p.functions.empty()) {
    out.push_back({"program has no functions"});
    return out;
  }
  if (p.entry_function < 0 || p.entry_function >= static_cast<int32_t>(p.functions.size()))
    out.push_back({"no entry function designated"});

  std::unordered_map<std::string, int32_t> seen_block;
  for (size_t i = 0; i < p.blocks.size(); ++i) {
    auto [it, fresh] = seen_block.emplace(p.blocks[i].id, static_cast<int32_t>(i));
    if (!fresh)
      out.push_back({"duplicate block id '" + p.blocks[i].id + "' (blocks #" +
                     std::to_string(it->second) + " and #" + std::to_string(i) + ")"});
  }
  std::unordered_map<std::string, int32_t> seen_site;
  for (size_t i = 0; i < p.sites.size(); ++i) {
    auto [it, fresh] = seen_site.emplace(p.sites[i].id, static_cast<int32_t>(i));
    if (!fresh)
      out.push_back({"duplicate site id '" + p.sites[i].id + "' (sites #" +
                     std::to_string(it->second) + " and #" + std::to_string(i) + ")"});
  }

  for (size_t fi = 0; fi < p.functions.size(); ++fi) {
    const Function& f = p.functions[fi];
    if (f.blocks.empty()) {
      out.push_back({"function '" + f.name + "' has no blocks"});
      continue;
    }
    if (f.entry_block < 0 || f.entry_block >= static_cast<int32_t>(p.blocks.size()))
      out.push_back({"function '" + f.name + "' has no entry block"});
    for (int32_t bi : f.blocks) {
      if (bi < 0 || bi >= static_cast<int32_t>(p.blocks.size())) {
        out.push_back({"function '" + f.name + "' references a block out of range"});
        continue;
      }
      const Block& b = p.blocks[bi];
      const std::string where = "block '" + b.id + "'";
      if (b.function != static_cast<int32_t>(fi))
        out.push_back({where + ": inconsistent owning function"});

      for (const Instr& ins : b.body) {
        switch (ins.kind) {
          case InstrKind::Assign:
            if (ins.dest < 0 || ins.dest >= static_cast<int32_t>(f.reg_names.size()))
              out.push_back({where + ": assignment to unknown register"});
            check_expr(p, f, ins.expr, false, where, out);
            break;
          case InstrKind::Call: {
            if (ins.dest < 0 || ins.dest >= static_cast<int32_t>(f.reg_names.size()))
              out.push_back({where + ": call result to unknown register"});
            if (ins.callee < 0 || ins.callee >= static_cast<int32_t>(p.functions.size())) {
              out.push_back({where + ": call to unknown function"});
              break;
            }
            const Function& callee = p.functions[ins.callee];
            if (ins.args.size() != callee.params.size())
              out.push_back({where + ": call to '" + callee.name + "' with " +
                             std::to_string(ins.args.size()) + " args, expected " +
                             std::to_string(callee.params.size())});
            for (int32_t a : ins.args) check_expr(p, f, a, false, where, out);
            break;
          }
          case InstrKind::Crash:
            if (ins.crash_location.empty()) out.push_back({where + ": crash with empty location label"});
            if (ins.crash_type.empty()) out.push_back({where + ": crash with empty type label"});
            break;
          case InstrKind::Nop:
            break;
        }
      }

      const Terminator& t = b.term;
      switch (t.kind) {
        case TermKind::Jump:
          check_target(p, b.function, t.jump_target, where, out);
          break;
        case TermKind::CondBranch: {
          check_expr(p, f, t.lhs, t.bytes_compare, where, out);
          check_expr(p, f, t.rhs, t.bytes_compare, where, out);
          if (t.bytes_compare && t.cmp != CompareOp::Eq)
            out.push_back({where + ": bytes-compare supports == only"});
          check_target(p, b.function, t.target_true, where, out);
          check_target(p, b.function, t.target_false, where, out);
          if (t.site < 0 || t.site >= static_cast<int32_t>(p.sites.size()))
            out.push_back({where + ": branch without a valid site"});
          break;
        }
        case TermKind::Switch: {
          check_expr(p, f, t.lhs, false, where, out);
          std::set<int64_t> vals;
          for (const SwitchCase& c : t.cases) {
            if (!vals.insert(c.value).second)
              out.push_back({where + ": duplicate switch case value " + std::to_string(c.value)});
            check_target(p, b.function, c.target, where, out);
          }
          check_target(p, b.function, t.default_target, where, out);
          if (t.site < 0 || t.site >= static_cast<int32_t>(p.sites.size()))
            out.push_back({where + ": switch without a valid site"});
          break;
        }
        case TermKind::Return:
          check_expr(p, f, t.lhs, false, where, out);
          break;
      }
    }
  }

  for (size_t si = 0; si < p.sites.size(); ++si) {
    const Site& s = p.sites[si];
    if (s.block < 0 || s.block >= static_cast<int32_t>(p.blocks.size())) {
      out.push_back({"site '" + s.id + "' points to a block out of range"});
      continue;
    }
    if (p.blocks[s.block].term.site != static_cast<int32_t>(si))
      out.push_back({"site '" + s.id + "' is not carried by its block's terminator"});
  }

  return out;
}

}  // namespace conff
