#include "pal/assembly.hpp"

#include <charconv>
#include <map>
#include <optional>

namespace pal {

AssemblyError::AssemblyError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(diagnostics.empty()
                             ? "assembly error"
                             : format_diagnostic(diagnostics.front()) +
                                   (diagnostics.size() > 1
                                        ? " (+" + std::to_string(diagnostics.size() - 1) + " more)"
                                        : "")),
      diagnostics_(std::move(diagnostics)) {}

namespace {

constexpr int kMaxDiagnostics = 50;

enum class Tok { Ident, Number, LParen, RParen, LBrace, RBrace, Semi, Colon, Comma, Arrow, At, Eq, End };

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  int line = 1;
  int col = 1;
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view text, std::vector<Diagnostic>& diags) : text_(text), diags_(diags) {}

  // The "#transformed" marker is only legal as the very first line.
  bool consume_transformed_header() {
    if (pos_ + 12 <= text_.size() && text_.substr(pos_, 12) == "#transformed") {
      pos_ += 12;
      return true;
    }
    return false;
  }

  void skip_bom() {
    if (text_.size() >= 3 && text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.col = col();
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
      t.kind = Tok::Ident;
      t.text = text_.substr(start, pos_ - start);
      return t;
    }
    if (digit(c) || c == '.' ||
        ((c == '-' || c == '+') && pos_ + 1 < text_.size() &&
         (digit(text_[pos_ + 1]) || text_[pos_ + 1] == '.' || ident_start(text_[pos_ + 1])))) {
      // Numbers, including "-inf" / "nan" spellings produced by the emitter.
      std::size_t start = pos_;
      ++pos_;
      while (pos_ < text_.size() &&
             (ident_char(text_[pos_]) || text_[pos_] == '.' ||
              ((text_[pos_] == '+' || text_[pos_] == '-') &&
               (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
        ++pos_;
      t.kind = Tok::Number;
      t.text = text_.substr(start, pos_ - start);
      return t;
    }
    switch (c) {
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case ';': t.kind = Tok::Semi; break;
      case ':': t.kind = Tok::Colon; break;
      case ',': t.kind = Tok::Comma; break;
      case '=': t.kind = Tok::Eq; break;
      case '@': t.kind = Tok::At; break;
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          ++pos_;
          t.kind = Tok::Arrow;
          break;
        }
        [[fallthrough]];
      default:
        error(t.line, t.col, std::string("unexpected character '") + c + "'");
        ++pos_;
        return next();
    }
    ++pos_;
    return t;
  }

  void error(int line, int column, std::string msg) {
    if (static_cast<int>(diags_.size()) >= kMaxDiagnostics) return;
    Diagnostic d;
    d.severity = Severity::Error;
    d.code = std::string(codes::SyntaxError);
    d.line = line;
    d.column = column;
    d.message = std::move(msg);
    diags_.push_back(std::move(d));
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        line_start_ = ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  int col() const { return static_cast<int>(pos_ - line_start_) + 1; }

  std::string_view text_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
};

const std::map<std::string_view, Opcode>& opcode_table() {
  static const std::map<std::string_view, Opcode> table = {
      {"CONST_I", Opcode::CONST_I}, {"CONST_F", Opcode::CONST_F}, {"LOAD", Opcode::LOAD},
      {"STORE", Opcode::STORE},     {"ADD", Opcode::ADD},         {"SUB", Opcode::SUB},
      {"MUL", Opcode::MUL},         {"DIV", Opcode::DIV},         {"NEG", Opcode::NEG},
      {"CMP_LT", Opcode::CMP_LT},   {"CMP_EQ", Opcode::CMP_EQ},   {"JMP", Opcode::JMP},
      {"JZ", Opcode::JZ},           {"CALL", Opcode::CALL},       {"SPAWN", Opcode::SPAWN},
      {"TOUCH", Opcode::TOUCH},     {"NEWARR", Opcode::NEWARR},   {"ALOAD", Opcode::ALOAD},
      {"ASTORE", Opcode::ASTORE},   {"ALEN", Opcode::ALEN},       {"GETSTATIC", Opcode::GETSTATIC},
      {"PUTSTATIC", Opcode::PUTSTATIC}, {"RET", Opcode::RET},     {"HALT", Opcode::HALT},
  };
  return table;
}

struct PendingCall {
  std::string method;  // method containing the site
  std::size_t instr;
  int line, col;
};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options)
      : lexer_(text, diags_), options_(options) {
    lexer_.skip_bom();
    header_ = lexer_.consume_transformed_header();
    advance();
  }

  Program parse() {
    Program program;
    if (header_) {
      if (options_.trusted) {
        program.transformed = true;
      } else {
        restricted(1, 1, "#transformed programs are only accepted in trusted mode");
        program.transformed = true;  // keep parsing under the marker's rules
      }
    }
    parse_directives(program);
    while (cur_.kind != Tok::End) {
      if (static_cast<int>(diags_.size()) >= kMaxDiagnostics) break;
      std::optional<ParallelAnnotation> annotation;
      if (cur_.kind == Tok::At) annotation = parse_annotation();
      if (cur_.kind == Tok::Ident && cur_.text == "method") {
        parse_method(program, std::move(annotation));
      } else {
        syntax(cur_, "expected 'method'");
        recover_to_method();
      }
    }
    resolve(program);
    if (!diags_.empty()) throw AssemblyError(std::move(diags_));
    return program;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  bool eat(Tok k) {
    if (cur_.kind != k) return false;
    advance();
    return true;
  }

  bool expect(Tok k, const char* what) {
    if (eat(k)) return true;
    syntax(cur_, std::string("expected ") + what);
    return false;
  }

  void syntax(const Token& at, std::string msg) {
    if (static_cast<int>(diags_.size()) >= kMaxDiagnostics) return;
    Diagnostic d;
    d.severity = Severity::Error;
    d.code = std::string(codes::SyntaxError);
    d.line = at.line;
    d.column = at.col;
    d.message = std::move(msg);
    diags_.push_back(std::move(d));
  }

  void resolution(int line, int col, std::string msg) {
    if (static_cast<int>(diags_.size()) >= kMaxDiagnostics) return;
    Diagnostic d;
    d.severity = Severity::Error;
    d.code = std::string(codes::ResolutionError);
    d.line = line;
    d.column = col;
    d.message = std::move(msg);
    diags_.push_back(std::move(d));
  }

  void restricted(int line, int col, std::string msg) {
    if (static_cast<int>(diags_.size()) >= kMaxDiagnostics) return;
    Diagnostic d;
    d.severity = Severity::Error;
    d.code = std::string(codes::RestrictedOpcode);
    d.line = line;
    d.column = col;
    d.message = std::move(msg);
    diags_.push_back(std::move(d));
  }

  void recover_to_method() {
    while (cur_.kind != Tok::End && !(cur_.kind == Tok::Ident && cur_.text == "method") &&
           cur_.kind != Tok::At)
      advance();
  }

  void recover_in_body() {
    int depth = 0;
    while (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::Semi && depth == 0) {
        advance();
        return;
      }
      if (cur_.kind == Tok::LBrace) ++depth;
      if (cur_.kind == Tok::RBrace) {
        if (depth == 0) return;
        --depth;
      }
      advance();
    }
  }

  void parse_directives(Program& program) {
    bool saw_name = false, saw_entry = false;
    while (cur_.kind == Tok::Ident && (cur_.text == "program" || cur_.text == "entry")) {
      bool is_name = cur_.text == "program";
      Token at = cur_;
      advance();
      if (cur_.kind != Tok::Ident) {
        syntax(cur_, "expected identifier");
        recover_in_body();
        continue;
      }
      if (is_name) {
        if (saw_name) syntax(at, "duplicate 'program' directive");
        program.name = std::string(cur_.text);
        saw_name = true;
      } else {
        if (saw_entry) syntax(at, "duplicate 'entry' directive");
        program.entry = std::string(cur_.text);
        saw_entry = true;
      }
      advance();
      expect(Tok::Semi, "';'");
    }
  }

  ParallelAnnotation parse_annotation() {
    ParallelAnnotation ann;
    advance();  // '@'
    if (cur_.kind != Tok::Ident || cur_.text != "Parallel") {
      syntax(cur_, "expected 'Parallel' after '@'");
      recover_to_method();
      return ann;
    }
    advance();
    if (!expect(Tok::LParen, "'('")) return ann;
    if (cur_.kind != Tok::Ident || cur_.text != "parDegree") {
      syntax(cur_, "expected 'parDegree'");
      recover_to_method();
      return ann;
    }
    advance();
    if (!expect(Tok::Eq, "'='")) return ann;
    if (cur_.kind != Tok::Number) {
      syntax(cur_, "expected integer parDegree");
      recover_to_method();
      return ann;
    }
    if (auto v = parse_int(cur_)) ann.par_degree = *v;
    advance();
    expect(Tok::RParen, "')'");
    return ann;
  }

  std::optional<std::int64_t> parse_int(const Token& t) {
    std::int64_t v = 0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last) {
      syntax(t, "malformed integer '" + std::string(t.text) + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> parse_float(const Token& t) {
    double v = 0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last) {
      syntax(t, "malformed float '" + std::string(t.text) + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<ValueKind> parse_kind() {
    if (cur_.kind != Tok::Ident) {
      syntax(cur_, "expected a kind");
      return std::nullopt;
    }
    std::string_view name = cur_.text;
    Token at = cur_;
    advance();
    if (name == "Int") return kind_int();
    if (name == "Float") return kind_float();
    if (name == "Bool") return kind_bool();
    if (name == "Void") return kind_void();
    if (name == "ArrayOf" || name == "FutureOf") {
      if (!expect(Tok::LParen, "'('")) return std::nullopt;
      auto inner = parse_kind();
      if (!inner) return std::nullopt;
      if (!expect(Tok::RParen, "')'")) return std::nullopt;
      try {
        return name == "ArrayOf" ? array_of(*inner) : future_of(*inner);
      } catch (const std::invalid_argument& e) {
        syntax(at, e.what());
        return std::nullopt;
      }
    }
    syntax(at, "unknown kind '" + std::string(name) + "'");
    return std::nullopt;
  }

  void parse_method(Program& program, std::optional<ParallelAnnotation> annotation) {
    advance();  // 'method'
    MethodDef method;
    method.annotation = std::move(annotation);
    Token name_tok = cur_;
    if (cur_.kind != Tok::Ident) {
      syntax(cur_, "expected method name");
      recover_to_method();
      return;
    }
    method.name = std::string(cur_.text);
    advance();
    if (program.find_method(method.name) != nullptr)
      resolution(name_tok.line, name_tok.col, "duplicate method '" + method.name + "'");
    if (!expect(Tok::LParen, "'('")) {
      recover_to_method();
      return;
    }
    if (cur_.kind != Tok::RParen) {
      do {
        if (cur_.kind != Tok::Ident) {
          syntax(cur_, "expected parameter name");
          break;
        }
        Slot p;
        Token ptok = cur_;
        p.name = std::string(cur_.text);
        advance();
        if (!expect(Tok::Colon, "':'")) break;
        auto k = parse_kind();
        if (!k) break;
        if (k->is_void()) {
          syntax(ptok, "parameter '" + p.name + "' may not be Void");
          break;
        }
        p.kind = *k;
        declare_slot(method, p, ptok);
        method.params.push_back(std::move(p));
      } while (eat(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    if (eat(Tok::Arrow)) {
      if (auto k = parse_kind()) method.return_kind = *k;
    } else {
      method.return_kind = kind_void();
    }
    if (!expect(Tok::LBrace, "'{'")) {
      recover_to_method();
      return;
    }
    parse_body(method);
    program.methods.push_back(std::move(method));
  }

  void declare_slot(const MethodDef& method, const Slot& s, const Token& at) {
    for (const auto& p : method.params)
      if (p.name == s.name) {
        resolution(at.line, at.col, "duplicate slot '" + s.name + "'");
        return;
      }
    for (const auto& l : method.locals)
      if (l.name == s.name) {
        resolution(at.line, at.col, "duplicate slot '" + s.name + "'");
        return;
      }
  }

  void parse_body(MethodDef& method) {
    bool instructions_started = false;
    while (true) {
      if (cur_.kind == Tok::RBrace) {
        advance();
        return;
      }
      if (cur_.kind == Tok::End) {
        syntax(cur_, "unterminated method body");
        return;
      }
      if (static_cast<int>(diags_.size()) >= kMaxDiagnostics) {
        recover_to_method();
        return;
      }
      if (cur_.kind == Tok::Ident && cur_.text == "local") {
        Token at = cur_;
        if (instructions_started)
          syntax(cur_, "local declarations must precede instructions");
        advance();
        if (cur_.kind != Tok::Ident) {
          syntax(cur_, "expected local name");
          recover_in_body();
          continue;
        }
        Slot l;
        l.name = std::string(cur_.text);
        advance();
        if (!expect(Tok::Colon, "':'")) {
          recover_in_body();
          continue;
        }
        auto k = parse_kind();
        if (!k) {
          recover_in_body();
          continue;
        }
        if (k->is_void()) {
          syntax(at, "local '" + l.name + "' may not be Void");
          recover_in_body();
          continue;
        }
        l.kind = *k;
        declare_slot(method, l, at);
        method.locals.push_back(std::move(l));
        expect(Tok::Semi, "';'");
        continue;
      }
      instructions_started = true;
      parse_instruction(method);
    }
  }

  void parse_instruction(MethodDef& method) {
    if (cur_.kind != Tok::Ident) {
      syntax(cur_, "expected an instruction");
      recover_in_body();
      return;
    }
    Token at = cur_;
    auto it = opcode_table().find(cur_.text);
    if (it == opcode_table().end()) {
      syntax(cur_, "unknown instruction '" + std::string(cur_.text) + "'");
      recover_in_body();
      return;
    }
    advance();
    Opcode op = it->second;
    Instruction in;
    in.op = op;
    bool ok = true;
    switch (op) {
      case Opcode::CONST_I: {
        if (cur_.kind != Tok::Number) {
          syntax(cur_, "CONST_I expects an integer");
          ok = false;
          break;
        }
        if (auto v = parse_int(cur_)) in.int_operand = *v; else ok = false;
        advance();
        break;
      }
      case Opcode::CONST_F: {
        if (cur_.kind != Tok::Number && cur_.kind != Tok::Ident) {
          syntax(cur_, "CONST_F expects a float");
          ok = false;
          break;
        }
        if (auto v = parse_float(cur_)) in.float_operand = *v; else ok = false;
        advance();
        break;
      }
      case Opcode::LOAD:
      case Opcode::STORE: {
        if (cur_.kind != Tok::Ident) {
          syntax(cur_, "expected a slot name");
          ok = false;
          break;
        }
        std::int64_t slot = -1;
        for (std::size_t i = 0; i < method.slot_count(); ++i)
          if (method.slot(i).name == cur_.text) slot = static_cast<std::int64_t>(i);
        if (slot < 0) {
          resolution(cur_.line, cur_.col,
                     "unknown slot '" + std::string(cur_.text) + "' in " + method.name);
          ok = false;
        }
        in.int_operand = slot;
        advance();
        break;
      }
      case Opcode::JMP:
      case Opcode::JZ: {
        if (cur_.kind != Tok::Number) {
          syntax(cur_, "expected an instruction index");
          ok = false;
          break;
        }
        if (auto v = parse_int(cur_)) in.int_operand = *v; else ok = false;
        advance();
        break;
      }
      case Opcode::SPAWN:
        if (!header_)
          restricted(at.line, at.col, "SPAWN is not accepted in source text");
        [[fallthrough]];
      case Opcode::CALL: {
        if (cur_.kind != Tok::Ident) {
          syntax(cur_, "expected a method name");
          ok = false;
          break;
        }
        in.name = std::string(cur_.text);
        pending_calls_.push_back(
            {method.name, method.body.size(), cur_.line, cur_.col});
        advance();
        break;
      }
      case Opcode::NEWARR: {
        auto k = parse_kind();
        if (!k || k->is_void()) {
          if (k && k->is_void()) syntax(at, "NEWARR Void is not allowed");
          ok = false;
          break;
        }
        in.kind = *k;
        break;
      }
      case Opcode::GETSTATIC:
      case Opcode::PUTSTATIC: {
        if (cur_.kind != Tok::Ident) {
          syntax(cur_, "expected a global slot name");
          ok = false;
          break;
        }
        in.name = std::string(cur_.text);
        advance();
        break;
      }
      default:
        break;
    }
    if (!ok) {
      recover_in_body();
      return;
    }
    if (cur_.kind != Tok::RBrace) expect(Tok::Semi, "';'");
    method.body.push_back(std::move(in));
  }

  void resolve(Program& program) {
    // Call targets may be defined after their call sites; resolve once the
    // whole program is known, filling in argument counts.
    for (const auto& pc : pending_calls_) {
      MethodDef* site_method = nullptr;
      for (auto& m : program.methods)
        if (m.name == pc.method) site_method = &m;
      if (!site_method || pc.instr >= site_method->body.size()) continue;
      Instruction& in = site_method->body[pc.instr];
      const MethodDef* target = program.find_method(in.name);
      if (!target) {
        resolution(pc.line, pc.col, "unknown method '" + in.name + "'");
        continue;
      }
      in.int_operand = static_cast<std::int64_t>(target->params.size());
    }
    if (program.find_method(program.entry) == nullptr)
      resolution(1, 1, "entry method '" + program.entry + "' not found");
  }

  std::vector<Diagnostic> diags_;
  Lexer lexer_;
  ParseOptions options_;
  bool header_ = false;
  Token cur_;
  std::vector<PendingCall> pending_calls_;
};

void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

void append_float(std::string& out, double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

}  // namespace

Program parse_assembly(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).parse();
}

std::string emit_assembly(const Program& program) {
  std::string out;
  if (program.transformed) out += "#transformed\n";
  if (program.name != "program") out += "program " + program.name + ";\n";
  if (program.entry != "main") out += "entry " + program.entry + ";\n";
  bool first = true;
  for (const auto& m : program.methods) {
    if (!first) out += '\n';
    first = false;
    if (m.annotation) {
      out += "@Parallel(parDegree=";
      append_int(out, m.annotation->par_degree);
      out += ")\n";
    }
    out += "method " + m.name + "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      if (i) out += ", ";
      out += m.params[i].name + ": " + to_string(m.params[i].kind);
    }
    out += ")";
    if (!m.return_kind.is_void()) out += " -> " + to_string(m.return_kind);
    out += " {\n";
    for (const auto& l : m.locals) out += "  local " + l.name + ": " + to_string(l.kind) + ";\n";
    for (const auto& in : m.body) {
      out += "  ";
      out += mnemonic(in.op);
      switch (in.op) {
        case Opcode::CONST_I:
        case Opcode::JMP:
        case Opcode::JZ:
          out += ' ';
          append_int(out, in.int_operand);
          break;
        case Opcode::CONST_F:
          out += ' ';
          append_float(out, in.float_operand);
          break;
        case Opcode::LOAD:
        case Opcode::STORE: {
          out += ' ';
          auto slot = static_cast<std::size_t>(in.int_operand);
          if (slot < m.slot_count()) {
            out += m.slot(slot).name;
          } else {
            append_int(out, in.int_operand);  // out-of-range slot; kept numeric
          }
          break;
        }
        case Opcode::CALL:
        case Opcode::SPAWN:
        case Opcode::GETSTATIC:
        case Opcode::PUTSTATIC:
          out += ' ';
          out += in.name;
          break;
        case Opcode::NEWARR:
          out += ' ';
          out += to_string(in.kind);
          break;
        default:
          break;
      }
      out += ";\n";
    }
    out += "}\n";
  }
  return out;
}

}  // namespace pal
