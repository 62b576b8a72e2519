#include "conff/executor.hpp"

namespace conff {

namespace {

inline int64_t wrap_add(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b)); }
inline int64_t wrap_sub(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b)); }
inline int64_t wrap_mul(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b)); }

inline int64_t safe_div(int64_t a, int64_t b) {
  if (b == 0) return 0;
  if (a == INT64_MIN && b == -1) return INT64_MIN;
  return a / b;
}

inline int64_t safe_mod(int64_t a, int64_t b) {
  if (b == 0) return 0;
  if (a == INT64_MIN && b == -1) return 0;
  return a % b;
}

inline bool compare(CompareOp op, int64_t a, int64_t b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
  }
  return false;
}

struct Frame {
  int32_t func = -1;
  int32_t block = -1;
  size_t instr = 0;
  size_t reg_base = 0;
  int32_t ret_dest = -1;  // caller register receiving the return value
};

}  // namespace

Executor::Executor(const TargetProgram& p) : p_(&p), visit_epoch_(p.blocks.size(), 0) {}

int64_t Executor::eval(const Function& f, int32_t e, std::span<const uint8_t> input,
                       const int64_t* regs) const {
  const ExprNode& n = f.exprs[static_cast<size_t>(e)];
  switch (n.kind) {
    case ExprKind::Const: return n.konst;
    case ExprKind::Reg: return regs[n.reg];
    case ExprKind::InputLen: return static_cast<int64_t>(input.size());
    case ExprKind::InputByte: {
      int64_t idx = eval(f, n.a, input, regs);
      if (idx < 0 || static_cast<uint64_t>(idx) >= input.size()) return 0;
      return input[static_cast<size_t>(idx)];
    }
    case ExprKind::Arith: {
      int64_t a = eval(f, n.a, input, regs);
      int64_t b = eval(f, n.b, input, regs);
      switch (n.op) {
        case ArithOp::Add: return wrap_add(a, b);
        case ArithOp::Sub: return wrap_sub(a, b);
        case ArithOp::Mul: return wrap_mul(a, b);
        case ArithOp::Div: return safe_div(a, b);
        case ArithOp::Mod: return safe_mod(a, b);
        case ArithOp::Xor: return a ^ b;
        case ArithOp::And: return a & b;
        case ArithOp::Or: return a | b;
        case ArithOp::Shl: return static_cast<int64_t>(static_cast<uint64_t>(a) << (b & 63));
        case ArithOp::Shr: return static_cast<int64_t>(static_cast<uint64_t>(a) >> (b & 63));
      }
      return 0;
    }
    case ExprKind::ByteSlice:
    case ExprKind::BytesLit:
      return 0;  // unreachable in validated programs
  }
  return 0;
}

Bytes Executor::eval_bytes(const Function& f, int32_t e, std::span<const uint8_t> input,
                           const int64_t* regs) const {
  const ExprNode& n = f.exprs[static_cast<size_t>(e)];
  if (n.kind == ExprKind::BytesLit) return n.lit;
  Bytes out;
  if (n.kind == ExprKind::ByteSlice) {
    int64_t off = eval(f, n.a, input, regs);
    out.reserve(n.slice_len);
    for (uint32_t j = 0; j < n.slice_len; ++j) {
      int64_t idx = off + static_cast<int64_t>(j);
      if (idx >= 0 && static_cast<uint64_t>(idx) < input.size())
        out.push_back(input[static_cast<size_t>(idx)]);
    }
  }
  return out;
}

void Executor::run(std::span<const uint8_t> input, int32_t focus, uint64_t step_budget,
                   ExecutionTrace& out) {
  out.path.clear();
  out.sites_hit.clear();
  out.focused_observations.clear();
  out.coverage_count = 0;
  out.crash.reset();
  out.exec_steps = 0;
  out.halt = HaltReason::Returned;
  out.return_value = 0;

  if (++epoch_ == 0) {
    std::fill(visit_epoch_.begin(), visit_epoch_.end(), 0u);
    epoch_ = 1;
  }
  const TargetProgram& p = *p_;

  auto enter_block = [&](int32_t bi) {
    out.path.push_back(bi);
    if (visit_epoch_[static_cast<size_t>(bi)] != epoch_) {
      visit_epoch_[static_cast<size_t>(bi)] = epoch_;
      ++out.coverage_count;
    }
  };

  std::vector<Frame> frames;
  reg_stack_.clear();
  uint32_t focus_occurrence = 0;

  {
    const Function& entry = p.functions[static_cast<size_t>(p.entry_function)];
    Frame fr;
    fr.func = p.entry_function;
    fr.block = entry.entry_block;
    fr.reg_base = 0;
    frames.push_back(fr);
    reg_stack_.resize(entry.reg_names.size(), 0);
    enter_block(fr.block);
  }

  while (!frames.empty()) {
    Frame& fr = frames.back();
    const Function& f = p.functions[static_cast<size_t>(fr.func)];
    const Block& b = p.blocks[static_cast<size_t>(fr.block)];
    int64_t* regs = reg_stack_.data() + fr.reg_base;

    if (fr.instr < b.body.size()) {
      if (out.exec_steps >= step_budget) {
        out.halt = HaltReason::BudgetExhausted;
        return;
      }
      ++out.exec_steps;
      const Instr& ins = b.body[fr.instr];
      switch (ins.kind) {
        case InstrKind::Assign:
          regs[ins.dest] = eval(f, ins.expr, input, regs);
          ++fr.instr;
          break;
        case InstrKind::Nop:
          ++fr.instr;
          break;
        case InstrKind::Crash:
          out.crash = CrashRecord{ins.crash_location, ins.crash_type};
          out.halt = HaltReason::Crashed;
          return;
        case InstrKind::Call: {
          const Function& callee = p.functions[static_cast<size_t>(ins.callee)];
          size_t base = reg_stack_.size();
          // Evaluate arguments in the caller frame before pushing.
          std::vector<int64_t> argv(ins.args.size());
          for (size_t i = 0; i < ins.args.size(); ++i) argv[i] = eval(f, ins.args[i], input, regs);
          ++fr.instr;  // resume after the call on return

          Frame nf;
          nf.func = ins.callee;
          nf.block = callee.entry_block;
          nf.reg_base = base;
          nf.ret_dest = ins.dest;
          frames.push_back(nf);  // invalidates fr
          reg_stack_.resize(base + callee.reg_names.size(), 0);
          for (size_t i = 0; i < argv.size() && i < callee.params.size(); ++i)
            reg_stack_[base + static_cast<size_t>(callee.params[i])] = argv[i];
          enter_block(nf.block);
          break;
        }
      }
      continue;
    }

    // Terminator.
    if (out.exec_steps >= step_budget) {
      out.halt = HaltReason::BudgetExhausted;
      return;
    }
    ++out.exec_steps;
    const Terminator& t = b.term;
    switch (t.kind) {
      case TermKind::Jump:
        fr.block = t.jump_target;
        fr.instr = 0;
        enter_block(fr.block);
        break;

      case TermKind::CondBranch: {
        bool taken;
        DataCondition dc;
        bool observe = t.site == focus;
        if (t.bytes_compare) {
          Bytes lv = eval_bytes(f, t.lhs, input, regs);
          Bytes rv = eval_bytes(f, t.rhs, input, regs);
          taken = lv == rv;
          if (observe) {
            dc.bytes_kind = true;
            dc.lhs_len = static_cast<uint32_t>(lv.size());
            dc.rhs_len = static_cast<uint32_t>(rv.size());
            dc.lhs_bytes = std::move(lv);
            dc.rhs_bytes = std::move(rv);
          }
        } else {
          int64_t lv = eval(f, t.lhs, input, regs);
          int64_t rv = eval(f, t.rhs, input, regs);
          taken = compare(t.cmp, lv, rv);
          if (observe) {
            dc.lhs_int = lv;
            dc.rhs_int = rv;
            dc.lhs_len = dc.rhs_len = 8;
          }
        }
        uint8_t edge = taken ? 0 : 1;
        out.sites_hit.push_back({t.site, edge});
        if (observe) {
          dc.site = t.site;
          dc.occurrence = focus_occurrence++;
          dc.taken_edge = edge;
          out.focused_observations.push_back(std::move(dc));
        }
        fr.block = taken ? t.target_true : t.target_false;
        fr.instr = 0;
        enter_block(fr.block);
        break;
      }

      case TermKind::Switch: {
        int64_t sv = eval(f, t.lhs, input, regs);
        uint8_t edge = static_cast<uint8_t>(t.cases.size());
        int32_t target = t.default_target;
        for (size_t i = 0; i < t.cases.size(); ++i) {
          if (t.cases[i].value == sv) {
            edge = static_cast<uint8_t>(i);
            target = t.cases[i].target;
            break;
          }
        }
        out.sites_hit.push_back({t.site, edge});
        if (t.site == focus) {
          DataCondition dc;
          dc.site = t.site;
          dc.lhs_int = sv;
          dc.rhs_int = 0;  // cases carry the constants; nothing varies here
          dc.lhs_len = 8;
          dc.rhs_len = 0;
          dc.occurrence = focus_occurrence++;
          dc.taken_edge = edge;
          out.focused_observations.push_back(std::move(dc));
        }
        fr.block = target;
        fr.instr = 0;
        enter_block(fr.block);
        break;
      }

      case TermKind::Return: {
        int64_t value = eval(f, t.lhs, input, regs);
        int32_t dest = fr.ret_dest;
        size_t base = fr.reg_base;
        frames.pop_back();
        if (frames.empty()) {
          out.return_value = value;
          out.halt = HaltReason::Returned;
          return;
        }
        reg_stack_.resize(base);
        if (dest >= 0) reg_stack_[frames.back().reg_base + static_cast<size_t>(dest)] = value;
        break;
      }
    }
  }
}

ExecutionTrace execute(const TargetProgram& p, std::span<const uint8_t> input, int32_t focus,
                       uint64_t step_budget) {
  Executor ex(p);
  return ex.run(input, focus, step_budget);
}

double coverage_of(const TargetProgram& p, const ExecutionTrace& t) {
  uint32_t total = p.total_block_count();
  if (total == 0) return 0.0;
  return static_cast<double>(t.coverage_count) / static_cast<double>(total);
}

}  // namespace conff
