#include "conff/parser.hpp"

#include <cctype>
#include <optional>
#include <sstream>

namespace conff {

namespace {

enum class Tok : uint8_t {
  End, Ident, Int, Str, XStr,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Colon, Assign, Arrow,
  EqEq, NotEq, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Slash, Percent, Caret, Amp, Pipe, Shl, Shr,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;   // Ident/Str
  uint64_t value = 0; // Int magnitude
  bool negative = false;
  Bytes bytes;        // XStr
  int line = 1, col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(tok_.line, tok_.col, msg); }

 private:
  void advance() {
    skip_space();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= s_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    char c = s_[pos_];
    if (ident_start(c)) {
      size_t start = pos_;
      while (pos_ < s_.size() && ident_char(s_[pos_])) step();
      tok_.text.assign(s_.substr(start, pos_ - start));
      // Hex byte-string literal: x"AABB"
      if (tok_.text == "x" && pos_ < s_.size() && s_[pos_] == '"') {
        step();
        std::string hex;
        while (pos_ < s_.size() && s_[pos_] != '"' && s_[pos_] != '\n') {
          hex.push_back(s_[pos_]);
          step();
        }
        if (pos_ >= s_.size() || s_[pos_] != '"') throw ParseError(tok_.line, tok_.col, "unterminated byte-string literal");
        step();
        if (hex.size() % 2 != 0) throw ParseError(tok_.line, tok_.col, "byte-string literal needs an even number of hex digits");
        for (size_t i = 0; i < hex.size(); i += 2) {
          int hi = hex_digit(hex[i]), lo = hex_digit(hex[i + 1]);
          if (hi < 0 || lo < 0) throw ParseError(tok_.line, tok_.col, "bad hex digit in byte-string literal");
          tok_.bytes.push_back(static_cast<uint8_t>(hi * 16 + lo));
        }
        tok_.kind = Tok::XStr;
        return;
      }
      tok_.kind = Tok::Ident;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(false);
      return;
    }
    if (c == '"') {
      step();
      std::string out;
      while (pos_ < s_.size() && s_[pos_] != '"' && s_[pos_] != '\n') {
        out.push_back(s_[pos_]);
        step();
      }
      if (pos_ >= s_.size() || s_[pos_] != '"') throw ParseError(tok_.line, tok_.col, "unterminated string");
      step();
      tok_.kind = Tok::Str;
      tok_.text = out;
      return;
    }
    step();
    switch (c) {
      case '(': tok_.kind = Tok::LParen; return;
      case ')': tok_.kind = Tok::RParen; return;
      case '{': tok_.kind = Tok::LBrace; return;
      case '}': tok_.kind = Tok::RBrace; return;
      case '[': tok_.kind = Tok::LBracket; return;
      case ']': tok_.kind = Tok::RBracket; return;
      case ',': tok_.kind = Tok::Comma; return;
      case ':': tok_.kind = Tok::Colon; return;
      case '+': tok_.kind = Tok::Plus; return;
      case '*': tok_.kind = Tok::Star; return;
      case '/': tok_.kind = Tok::Slash; return;
      case '%': tok_.kind = Tok::Percent; return;
      case '^': tok_.kind = Tok::Caret; return;
      case '&': tok_.kind = Tok::Amp; return;
      case '|': tok_.kind = Tok::Pipe; return;
      case '=':
        if (pos_ < s_.size() && s_[pos_] == '=') { step(); tok_.kind = Tok::EqEq; } else tok_.kind = Tok::Assign;
        return;
      case '!':
        if (pos_ < s_.size() && s_[pos_] == '=') { step(); tok_.kind = Tok::NotEq; return; }
        throw ParseError(tok_.line, tok_.col, "stray '!'");
      case '<':
        if (pos_ < s_.size() && s_[pos_] == '=') { step(); tok_.kind = Tok::Le; }
        else if (pos_ < s_.size() && s_[pos_] == '<') { step(); tok_.kind = Tok::Shl; }
        else tok_.kind = Tok::Lt;
        return;
      case '>':
        if (pos_ < s_.size() && s_[pos_] == '=') { step(); tok_.kind = Tok::Ge; }
        else if (pos_ < s_.size() && s_[pos_] == '>') { step(); tok_.kind = Tok::Shr; }
        else tok_.kind = Tok::Gt;
        return;
      case '-':
        if (pos_ < s_.size() && s_[pos_] == '>') { step(); tok_.kind = Tok::Arrow; return; }
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) { lex_number(true); return; }
        tok_.kind = Tok::Minus;
        return;
      default:
        throw ParseError(tok_.line, tok_.col, std::string("unexpected character '") + c + "'");
    }
  }

  static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  void lex_number(bool negative) {
    tok_.kind = Tok::Int;
    tok_.negative = negative;
    uint64_t v = 0;
    if (pos_ + 1 < s_.size() && s_[pos_] == '0' && (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'X')) {
      step(); step();
      bool any = false;
      while (pos_ < s_.size()) {
        int d = hex_digit(s_[pos_]);
        if (d < 0) break;
        if (v > (UINT64_MAX >> 4)) throw ParseError(tok_.line, tok_.col, "integer literal out of range");
        v = (v << 4) | static_cast<uint64_t>(d);
        any = true;
        step();
      }
      if (!any) throw ParseError(tok_.line, tok_.col, "bad hex literal");
    } else {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        uint64_t d = static_cast<uint64_t>(s_[pos_] - '0');
        if (v > (UINT64_MAX - d) / 10) throw ParseError(tok_.line, tok_.col, "integer literal out of range");
        v = v * 10 + d;
        step();
      }
    }
    tok_.value = v;
  }

  void skip_space() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) step();
      if (pos_ < s_.size() && (s_[pos_] == '#' || s_[pos_] == ';')) {
        if (s_[pos_] == ';') { step(); continue; }
        while (pos_ < s_.size() && s_[pos_] != '\n') step();
        continue;
      }
      break;
    }
  }

  void step() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

const char* kKeywords[] = {"fn", "block", "crash", "nop", "call", "jmp", "br",
                           "switch", "ret", "site", "default", "in", "inlen", "bytes"};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

// Unresolved branch target recorded during block parsing.
struct PendingTarget {
  int32_t block = -1;  // block whose terminator needs patching
  int slot = 0;        // 0=true/jump, 1=false/default, >=2 -> case slot-2
  std::string name;
  int line = 1, col = 1;
};

struct PendingCall {
  int32_t block = -1;
  size_t instr = 0;
  std::string name;
  int line = 1, col = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  TargetProgram run() {
    while (lex_.peek().kind != Tok::End) parse_function();
    if (p_.functions.empty()) lex_.fail("expected at least one function");

    for (const PendingTarget& t : targets_) {
      int32_t bi = resolve_block(t);
      Terminator& term = p_.blocks[t.block].term;
      if (t.slot == 0) {
        if (term.kind == TermKind::Jump) term.jump_target = bi;
        else term.target_true = bi;
      } else if (t.slot == 1) {
        if (term.kind == TermKind::Switch) term.default_target = bi;
        else term.target_false = bi;
      } else {
        term.cases[static_cast<size_t>(t.slot - 2)].target = bi;
      }
    }
    for (const PendingCall& c : calls_) {
      int32_t fi = p_.find_function(c.name);
      if (fi < 0) throw ParseError(c.line, c.col, "call to undefined function '" + c.name + "'");
      p_.blocks[c.block].body[c.instr].callee = fi;
    }
    for (Site& s : p_.sites) {
      // Filled during block parsing; nothing further to resolve.
      (void)s;
    }

    int32_t main_fi = p_.find_function("main");
    p_.entry_function = main_fi >= 0 ? main_fi : 0;
    return std::move(p_);
  }

 private:
  int32_t resolve_block(const PendingTarget& t) {
    int32_t bi = p_.find_block(t.name);
    if (bi < 0) throw ParseError(t.line, t.col, "undefined block '" + t.name + "'");
    if (p_.blocks[bi].function != p_.blocks[t.block].function)
      throw ParseError(t.line, t.col, "branch target '" + t.name + "' is in another function");
    return bi;
  }

  Token expect(Tok k, const char* what) {
    if (lex_.peek().kind != k) lex_.fail(std::string("expected ") + what);
    return lex_.take();
  }

  std::string expect_name(const char* what) {
    Token t = expect(Tok::Ident, what);
    if (is_keyword(t.text)) throw ParseError(t.line, t.col, "'" + t.text + "' is a keyword");
    return t.text;
  }

  bool at_ident(const char* word) const {
    return lex_.peek().kind == Tok::Ident && lex_.peek().text == word;
  }

  void eat_ident(const char* word) {
    if (!at_ident(word)) lex_.fail(std::string("expected '") + word + "'");
    lex_.take();
  }

  void parse_function() {
    eat_ident("fn");
    Token name = lex_.take();
    if (name.kind != Tok::Ident || is_keyword(name.text)) throw ParseError(name.line, name.col, "expected function name");
    if (p_.find_function(name.text) >= 0) throw ParseError(name.line, name.col, "duplicate function '" + name.text + "'");

    fi_ = static_cast<int32_t>(p_.functions.size());
    p_.functions.emplace_back();
    f().name = name.text;
    p_.function_index.emplace(name.text, fi_);

    expect(Tok::LParen, "'('");
    if (lex_.peek().kind != Tok::RParen) {
      for (;;) {
        std::string pn = expect_name("parameter name");
        f().params.push_back(intern_reg(pn));
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.take();
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::LBrace, "'{'");
    if (!at_ident("block")) lex_.fail("function body needs at least one block");
    while (at_ident("block")) parse_block();
    expect(Tok::RBrace, "'}'");
    fi_ = -1;
  }

  void parse_block() {
    eat_ident("block");
    Token name = lex_.take();
    if (name.kind != Tok::Ident || is_keyword(name.text)) throw ParseError(name.line, name.col, "expected block id");
    if (p_.find_block(name.text) >= 0) throw ParseError(name.line, name.col, "duplicate block id '" + name.text + "'");
    expect(Tok::Colon, "':'");

    int32_t bi = static_cast<int32_t>(p_.blocks.size());
    p_.blocks.emplace_back();
    p_.blocks[bi].id = name.text;
    p_.blocks[bi].function = fi_;
    p_.block_index.emplace(name.text, bi);
    f().blocks.push_back(bi);
    if (f().entry_block < 0) f().entry_block = bi;

    for (;;) {
      if (at_ident("jmp")) { parse_jump(bi); return; }
      if (at_ident("br")) { parse_br(bi); return; }
      if (at_ident("switch")) { parse_switch(bi); return; }
      if (at_ident("ret")) { parse_ret(bi); return; }
      if (at_ident("crash")) { parse_crash(bi); continue; }
      if (at_ident("nop")) { lex_.take(); p_.blocks[bi].body.push_back({InstrKind::Nop}); continue; }
      if (lex_.peek().kind == Tok::Ident && !is_keyword(lex_.peek().text)) { parse_assign(bi); continue; }
      lex_.fail("expected instruction or terminator");
    }
  }

  void parse_crash(int32_t bi) {
    lex_.take();
    Token loc = expect(Tok::Str, "crash location string");
    Token type = expect(Tok::Str, "crash type string");
    Instr ins;
    ins.kind = InstrKind::Crash;
    ins.crash_location = loc.text;
    ins.crash_type = type.text;
    p_.blocks[bi].body.push_back(std::move(ins));
  }

  void parse_assign(int32_t bi) {
    std::string dest = expect_name("register");
    expect(Tok::Assign, "'='");
    Instr ins;
    ins.dest = intern_reg(dest);
    if (at_ident("call")) {
      lex_.take();
      Token callee = lex_.take();
      if (callee.kind != Tok::Ident || is_keyword(callee.text))
        throw ParseError(callee.line, callee.col, "expected function name after call");
      ins.kind = InstrKind::Call;
      expect(Tok::LParen, "'('");
      if (lex_.peek().kind != Tok::RParen) {
        for (;;) {
          ins.args.push_back(parse_expr());
          if (lex_.peek().kind != Tok::Comma) break;
          lex_.take();
        }
      }
      expect(Tok::RParen, "')'");
      calls_.push_back({bi, p_.blocks[bi].body.size(), callee.text, callee.line, callee.col});
    } else {
      ins.kind = InstrKind::Assign;
      ins.expr = parse_expr();
    }
    p_.blocks[bi].body.push_back(std::move(ins));
  }

  void parse_jump(int32_t bi) {
    lex_.take();
    Token target = expect(Tok::Ident, "block id");
    p_.blocks[bi].term.kind = TermKind::Jump;
    targets_.push_back({bi, 0, target.text, target.line, target.col});
  }

  int32_t parse_site(SiteKind kind, int32_t bi) {
    eat_ident("site");
    expect(Tok::Assign, "'='");
    Token id = lex_.take();
    if (id.kind != Tok::Ident || is_keyword(id.text)) throw ParseError(id.line, id.col, "expected site id");
    if (p_.find_site(id.text) >= 0) throw ParseError(id.line, id.col, "duplicate site id '" + id.text + "'");
    int32_t si = static_cast<int32_t>(p_.sites.size());
    p_.sites.push_back({id.text, kind, bi});
    p_.site_index.emplace(id.text, si);
    return si;
  }

  void parse_br(int32_t bi) {
    lex_.take();
    int32_t si = parse_site(SiteKind::IntCompare, bi);
    expect(Tok::LParen, "'('");

    Terminator& t = p_.blocks[bi].term;
    t.kind = TermKind::CondBranch;
    t.site = si;

    bool lhs_bytes = false;
    t.lhs = parse_operand(lhs_bytes);
    Token op = lex_.take();
    CompareOp cmp;
    switch (op.kind) {
      case Tok::EqEq: cmp = CompareOp::Eq; break;
      case Tok::NotEq: cmp = CompareOp::Ne; break;
      case Tok::Lt: cmp = CompareOp::Lt; break;
      case Tok::Le: cmp = CompareOp::Le; break;
      case Tok::Gt: cmp = CompareOp::Gt; break;
      case Tok::Ge: cmp = CompareOp::Ge; break;
      default: throw ParseError(op.line, op.col, "expected comparison operator");
    }
    bool rhs_bytes = false;
    t.rhs = parse_operand(rhs_bytes);
    if (lhs_bytes != rhs_bytes) throw ParseError(op.line, op.col, "cannot compare bytes with an integer");
    t.bytes_compare = lhs_bytes;
    if (t.bytes_compare && cmp != CompareOp::Eq)
      throw ParseError(op.line, op.col, "bytes comparisons support == only");
    t.cmp = cmp;
    p_.sites[si].kind = t.bytes_compare ? SiteKind::BytesCompare : SiteKind::IntCompare;

    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    Token tt = expect(Tok::Ident, "block id");
    targets_.push_back({bi, 0, tt.text, tt.line, tt.col});
    expect(Tok::Comma, "','");
    Token tf = expect(Tok::Ident, "block id");
    targets_.push_back({bi, 1, tf.text, tf.line, tf.col});
  }

  void parse_switch(int32_t bi) {
    lex_.take();
    int32_t si = parse_site(SiteKind::Switch, bi);
    Terminator& t = p_.blocks[bi].term;
    t.kind = TermKind::Switch;
    t.site = si;
    expect(Tok::LParen, "'('");
    t.lhs = parse_expr();
    expect(Tok::RParen, "')'");
    expect(Tok::LBracket, "'['");
    int slot = 2;
    if (lex_.peek().kind != Tok::RBracket) {
      for (;;) {
        Token v = expect(Tok::Int, "case value");
        SwitchCase c;
        c.value = v.negative ? -static_cast<int64_t>(v.value) : static_cast<int64_t>(v.value);
        t.cases.push_back(c);
        expect(Tok::Arrow, "'->'");
        Token target = expect(Tok::Ident, "block id");
        targets_.push_back({bi, slot++, target.text, target.line, target.col});
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.take();
      }
    }
    expect(Tok::RBracket, "']'");
    eat_ident("default");
    Token d = expect(Tok::Ident, "block id");
    targets_.push_back({bi, 1, d.text, d.line, d.col});
  }

  void parse_ret(int32_t bi) {
    lex_.take();
    Terminator& t = p_.blocks[bi].term;
    t.kind = TermKind::Return;
    t.lhs = parse_expr();
  }

  // Either an integer expression or (at a bytes-compare site) a byte-string
  // operand: bytes(off, len) or a hex literal.
  int32_t parse_operand(bool& is_bytes) {
    if (lex_.peek().kind == Tok::XStr) {
      Token t = lex_.take();
      is_bytes = true;
      ExprNode n;
      n.kind = ExprKind::BytesLit;
      n.lit = std::move(t.bytes);
      return add_expr(std::move(n));
    }
    if (at_ident("bytes")) {
      lex_.take();
      expect(Tok::LParen, "'('");
      ExprNode n;
      n.kind = ExprKind::ByteSlice;
      n.a = parse_expr();
      expect(Tok::Comma, "','");
      Token len = expect(Tok::Int, "slice length");
      if (len.negative) throw ParseError(len.line, len.col, "slice length must be non-negative");
      n.slice_len = static_cast<uint32_t>(len.value);
      expect(Tok::RParen, "')'");
      is_bytes = true;
      return add_expr(std::move(n));
    }
    is_bytes = false;
    return parse_expr();
  }

  // Integer expression with C-like precedence:
  //   unary -  >  * / %  >  + -  >  << >>  >  &  >  ^  >  |
  int32_t parse_expr() { return parse_bin(0); }

  static int level_of(Tok k) {
    switch (k) {
      case Tok::Pipe: return 1;
      case Tok::Caret: return 2;
      case Tok::Amp: return 3;
      case Tok::Shl:
      case Tok::Shr: return 4;
      case Tok::Plus:
      case Tok::Minus: return 5;
      case Tok::Star:
      case Tok::Slash:
      case Tok::Percent: return 6;
      default: return 0;
    }
  }

  static ArithOp op_of(Tok k) {
    switch (k) {
      case Tok::Pipe: return ArithOp::Or;
      case Tok::Caret: return ArithOp::Xor;
      case Tok::Amp: return ArithOp::And;
      case Tok::Shl: return ArithOp::Shl;
      case Tok::Shr: return ArithOp::Shr;
      case Tok::Plus: return ArithOp::Add;
      case Tok::Minus: return ArithOp::Sub;
      case Tok::Star: return ArithOp::Mul;
      case Tok::Slash: return ArithOp::Div;
      default: return ArithOp::Mod;
    }
  }

  int32_t parse_bin(int min_level) {
    int32_t lhs = parse_factor();
    for (;;) {
      int level = level_of(lex_.peek().kind);
      if (level == 0 || level < min_level) return lhs;
      Tok k = lex_.take().kind;
      int32_t rhs = parse_bin(level + 1);
      ExprNode n;
      n.kind = ExprKind::Arith;
      n.op = op_of(k);
      n.a = lhs;
      n.b = rhs;
      lhs = add_expr(std::move(n));
    }
  }

  int32_t parse_factor() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::Int: {
        Token v = lex_.take();
        ExprNode n;
        n.kind = ExprKind::Const;
        n.konst = v.negative ? -static_cast<int64_t>(v.value) : static_cast<int64_t>(v.value);
        return add_expr(std::move(n));
      }
      case Tok::Minus: {
        lex_.take();
        int32_t inner = parse_factor();
        ExprNode zero;
        zero.kind = ExprKind::Const;
        zero.konst = 0;
        ExprNode n;
        n.kind = ExprKind::Arith;
        n.op = ArithOp::Sub;
        n.a = add_expr(std::move(zero));
        n.b = inner;
        return add_expr(std::move(n));
      }
      case Tok::LParen: {
        lex_.take();
        int32_t inner = parse_expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        if (t.text == "inlen") {
          lex_.take();
          ExprNode n;
          n.kind = ExprKind::InputLen;
          return add_expr(std::move(n));
        }
        if (t.text == "in") {
          lex_.take();
          expect(Tok::LBracket, "'['");
          ExprNode n;
          n.kind = ExprKind::InputByte;
          n.a = parse_expr();
          expect(Tok::RBracket, "']'");
          return add_expr(std::move(n));
        }
        if (is_keyword(t.text)) lex_.fail("'" + t.text + "' is a keyword");
        Token r = lex_.take();
        ExprNode n;
        n.kind = ExprKind::Reg;
        n.reg = intern_reg(r.text);
        return add_expr(std::move(n));
      }
      default:
        lex_.fail("expected expression");
    }
  }

  int32_t add_expr(ExprNode&& n) {
    f().exprs.push_back(std::move(n));
    return static_cast<int32_t>(f().exprs.size() - 1);
  }

  int32_t intern_reg(const std::string& name) {
    Function& fn = f();
    for (size_t i = 0; i < fn.reg_names.size(); ++i)
      if (fn.reg_names[i] == name) return static_cast<int32_t>(i);
    fn.reg_names.push_back(name);
    return static_cast<int32_t>(fn.reg_names.size() - 1);
  }

  Function& f() { return p_.functions[static_cast<size_t>(fi_)]; }

  Lexer lex_;
  TargetProgram p_;
  int32_t fi_ = -1;
  std::vector<PendingTarget> targets_;
  std::vector<PendingCall> calls_;
};

void print_expr(std::ostream& os, const Function& f, int32_t e, bool parens);

void print_operand(std::ostream& os, const Function& f, int32_t e) {
  const ExprNode& n = f.exprs[static_cast<size_t>(e)];
  if (n.kind == ExprKind::BytesLit) {
    os << "x\"";
    static const char* hexd = "0123456789ABCDEF";
    for (uint8_t b : n.lit) os << hexd[b >> 4] << hexd[b & 15];
    os << '"';
    return;
  }
  if (n.kind == ExprKind::ByteSlice) {
    os << "bytes(";
    print_expr(os, f, n.a, false);
    os << ", " << n.slice_len << ")";
    return;
  }
  print_expr(os, f, e, false);
}

void print_expr(std::ostream& os, const Function& f, int32_t e, bool parens) {
  const ExprNode& n = f.exprs[static_cast<size_t>(e)];
  switch (n.kind) {
    case ExprKind::Const: os << n.konst; return;
    case ExprKind::Reg: os << f.reg_names[static_cast<size_t>(n.reg)]; return;
    case ExprKind::InputLen: os << "inlen"; return;
    case ExprKind::InputByte:
      os << "in[";
      print_expr(os, f, n.a, false);
      os << ']';
      return;
    case ExprKind::Arith:
      if (parens) os << '(';
      print_expr(os, f, n.a, true);
      os << ' ' << arith_op_name(n.op) << ' ';
      print_expr(os, f, n.b, true);
      if (parens) os << ')';
      return;
    case ExprKind::ByteSlice:
    case ExprKind::BytesLit:
      print_operand(os, f, e);
      return;
  }
}

}  // namespace

TargetProgram parse_program(std::string_view text) { return Parser(text).run(); }

std::string serialize_program(const TargetProgram& p) {
  auto diags = validate(p);
  if (!diags.empty()) throw std::invalid_argument("cannot serialize invalid program: " + diags.front().message);

  std::ostringstream os;
  for (size_t fi = 0; fi < p.functions.size(); ++fi) {
    const Function& f = p.functions[fi];
    if (fi) os << '\n';
    os << "fn " << f.name << '(';
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << f.reg_names[static_cast<size_t>(f.params[i])];
    }
    os << ") {\n";
    for (int32_t bi : f.blocks) {
      const Block& b = p.blocks[static_cast<size_t>(bi)];
      os << "  block " << b.id << ":\n";
      for (const Instr& ins : b.body) {
        os << "    ";
        switch (ins.kind) {
          case InstrKind::Assign:
            os << f.reg_names[static_cast<size_t>(ins.dest)] << " = ";
            print_expr(os, f, ins.expr, false);
            break;
          case InstrKind::Call:
            os << f.reg_names[static_cast<size_t>(ins.dest)] << " = call "
               << p.functions[static_cast<size_t>(ins.callee)].name << '(';
            for (size_t i = 0; i < ins.args.size(); ++i) {
              if (i) os << ", ";
              print_expr(os, f, ins.args[i], false);
            }
            os << ')';
            break;
          case InstrKind::Crash:
            os << "crash \"" << ins.crash_location << "\" \"" << ins.crash_type << '"';
            break;
          case InstrKind::Nop:
            os << "nop";
            break;
        }
        os << '\n';
      }
      const Terminator& t = b.term;
      os << "    ";
      switch (t.kind) {
        case TermKind::Jump:
          os << "jmp " << p.blocks[static_cast<size_t>(t.jump_target)].id;
          break;
        case TermKind::CondBranch:
          os << "br site=" << p.sites[static_cast<size_t>(t.site)].id << " (";
          print_operand(os, f, t.lhs);
          os << ' ' << compare_op_name(t.cmp) << ' ';
          print_operand(os, f, t.rhs);
          os << ") -> " << p.blocks[static_cast<size_t>(t.target_true)].id << ", "
             << p.blocks[static_cast<size_t>(t.target_false)].id;
          break;
        case TermKind::Switch:
          os << "switch site=" << p.sites[static_cast<size_t>(t.site)].id << " (";
          print_expr(os, f, t.lhs, false);
          os << ") [";
          for (size_t i = 0; i < t.cases.size(); ++i) {
            if (i) os << ", ";
            os << t.cases[i].value << " -> " << p.blocks[static_cast<size_t>(t.cases[i].target)].id;
          }
          os << "] default " << p.blocks[static_cast<size_t>(t.default_target)].id;
          break;
        case TermKind::Return:
          os << "ret ";
          print_expr(os, f, t.lhs, false);
          break;
      }
      os << '\n';
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace conff
