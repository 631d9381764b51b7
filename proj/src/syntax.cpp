#include "axon/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace axon {

bool is_element_type_name(std::string_view name) {
  static constexpr std::array<std::string_view, 12> kNames = {
      "f16", "f32", "f64", "i8", "i16", "i32", "i64", "u8", "u16", "u32", "u64", "bool"};
  return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

std::string TopBinding::display_name() const {
  if (names.empty()) return "_" + std::to_string(index);
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

namespace {

enum class Tok { ident, number, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string_view text;
  std::size_t offset = 0;

  bool is(std::string_view p) const { return kind == Tok::punct && text == p; }
  bool is_ident(std::string_view name) const { return kind == Tok::ident && text == name; }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n') line_starts_.push_back(i + 1);
    }
  }

  Program program() {
    Program program;
    std::set<std::string> seen;
    while (peek().kind != Tok::end) {
      TopBinding binding;
      std::size_t begin = peek().offset;
      if (pattern_ahead()) {
        binding.names = pattern();
        expect("=");
      }
      binding.expr = tuple_expr();
      binding.span = span(begin, pos_);
      binding.index = static_cast<int>(program.bindings.size()) + 1;
      for (const auto& name : binding.names) {
        if (name != "_" && !seen.insert(name).second) {
          throw SyntaxError("duplicate top-level name '" + name + "'", binding.span);
        }
      }
      program.bindings.push_back(std::move(binding));
      if (peek().is(";")) next();
    }
    return program;
  }

 private:
  // ---- lexing ----

  std::size_t skip_trivia(std::size_t pos) const {
    for (;;) {
      while (pos < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos]))) ++pos;
      if (pos + 1 < text_.size() && text_[pos] == '/' && text_[pos + 1] == '/') {
        while (pos < text_.size() && text_[pos] != '\n') ++pos;
        continue;
      }
      return pos;
    }
  }

  Token lex(std::size_t& pos) const {
    pos = skip_trivia(pos);
    Token tok;
    tok.offset = pos;
    if (pos >= text_.size()) return tok;
    std::size_t begin = pos;
    char c = text_[pos];
    if (ident_start(c)) {
      while (pos < text_.size() && ident_char(text_[pos])) ++pos;
      tok.kind = Tok::ident;
    } else if (digit(c)) {
      while (pos < text_.size() && digit(text_[pos])) ++pos;
      if (pos + 1 < text_.size() && text_[pos] == '.' && digit(text_[pos + 1])) {
        ++pos;
        while (pos < text_.size() && digit(text_[pos])) ++pos;
      }
      if (pos < text_.size() && text_[pos] == 'f') ++pos;
      if (pos < text_.size() && ident_char(text_[pos])) {
        throw SyntaxError("malformed number", span(begin, pos + 1));
      }
      tok.kind = Tok::number;
    } else if (c == '-' && pos + 1 < text_.size() && text_[pos + 1] == '>') {
      pos += 2;
      tok.kind = Tok::punct;
    } else if (std::string_view("(){},;:=+-*/[]@").find(c) != std::string_view::npos) {
      ++pos;
      tok.kind = Tok::punct;
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", span(begin, begin + 1));
    }
    tok.text = text_.substr(begin, pos - begin);
    return tok;
  }

  Token peek(int ahead = 0) const {
    std::size_t pos = pos_;
    Token tok = lex(pos);
    for (int i = 0; i < ahead; ++i) tok = lex(pos);
    return tok;
  }

  Token next() { return lex(pos_); }

  Token expect(std::string_view punct) {
    Token tok = peek();
    if (!tok.is(punct)) {
      throw SyntaxError("expected '" + std::string(punct) + "' but found " + describe(tok), token_span(tok));
    }
    return next();
  }

  std::string expect_ident(const char* what) {
    Token tok = peek();
    if (tok.kind != Tok::ident || tok.text == "fn") {
      throw SyntaxError(std::string("expected ") + what + " but found " + describe(tok), token_span(tok));
    }
    next();
    return std::string(tok.text);
  }

  static std::string describe(const Token& tok) {
    if (tok.kind == Tok::end) return "end of input";
    return "'" + std::string(tok.text) + "'";
  }

  Span span(std::size_t begin, std::size_t end) const {
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), begin);
    std::size_t line_start = *(it - 1);
    Span s;
    s.offset = begin;
    s.length = end > begin ? end - begin : 0;
    s.line = static_cast<int>(it - line_starts_.begin());
    s.col = static_cast<int>(begin - line_start) + 1;
    return s;
  }

  Span token_span(const Token& tok) const { return span(tok.offset, tok.offset + tok.text.size()); }

  // ---- patterns ----

  // True when the upcoming tokens are `name (, name)* =`.
  bool pattern_ahead() const {
    for (int k = 0;; k += 2) {
      Token name = peek(k);
      if (name.kind != Tok::ident || name.text == "fn") return false;
      Token sep = peek(k + 1);
      if (sep.is("=")) return true;
      if (!sep.is(",")) return false;
    }
  }

  std::vector<std::string> pattern() {
    std::vector<std::string> names;
    std::size_t begin = peek().offset;
    for (;;) {
      names.push_back(expect_ident("a name"));
      if (!peek().is(",")) break;
      next();
    }
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (n != "_" && !seen.insert(n).second) {
        throw SyntaxError("name '" + n + "' bound twice in one pattern", span(begin, pos_));
      }
    }
    return names;
  }

  // ---- annotations ----

  Shape shape_here() {
    std::size_t pos = skip_trivia(pos_);
    Shape shape;
    try {
      shape = parse_shape_at(text_, pos);
    } catch (const ShapeSyntaxError& e) {
      throw SyntaxError(e.what(), span(e.position(), e.position() + 1));
    }
    std::vector<Violation> violations = validate_shape(shape);
    if (!violations.empty()) throw SyntaxError(violations.front().message, span(pos_, pos));
    pos_ = pos;
    return shape;
  }

  Annotation annotation() {
    Annotation ann;
    std::size_t begin = peek().offset;
    Token tok = peek();
    if (tok.is("(")) {
      next();
      std::vector<Annotation> items;
      for (;;) {
        items.push_back(annotation());
        if (!peek().is(",")) break;
        next();
      }
      expect(")");
      if (items.size() == 1) return items.front();
      ann.tuple = std::move(items);
    } else if (tok.is("[")) {
      ann.shape = shape_here();
    } else if (tok.kind == Tok::ident && tok.text != "fn") {
      Token after = peek(1);
      bool shape_follows = after.is("[") || (after.kind == Tok::ident && after.text != "fn");
      if (shape_follows) {
        ann.element = std::string(tok.text);
        next();
        ann.shape = shape_here();
      } else if (is_element_type_name(tok.text)) {
        ann.element = std::string(tok.text);
        next();
      } else {
        ann.shape = shape_here();
      }
    } else {
      throw SyntaxError("expected a type annotation but found " + describe(tok), token_span(tok));
    }
    ann.span = span(begin, pos_);
    return ann;
  }

  // ---- expressions ----

  ExprPtr make(decltype(Expr::node) node, std::size_t begin) {
    return std::make_shared<const Expr>(Expr{std::move(node), span(begin, pos_)});
  }

  ExprPtr tuple_expr() {
    std::size_t begin = peek().offset;
    ExprPtr first = expr();
    if (!peek().is(",")) return first;
    std::vector<ExprPtr> elements{first};
    while (peek().is(",")) {
      next();
      elements.push_back(expr());
    }
    return make(TupleExpr{std::move(elements)}, begin);
  }

  ExprPtr expr() {
    std::size_t begin = peek().offset;
    ExprPtr lhs = term();
    while (peek().is("+") || peek().is("-")) {
      char op = next().text[0];
      ExprPtr rhs = term();
      lhs = make(BinOp{op, lhs, rhs}, begin);
    }
    return lhs;
  }

  ExprPtr term() {
    std::size_t begin = peek().offset;
    ExprPtr lhs = primary();
    while (peek().is("*") || peek().is("/")) {
      char op = next().text[0];
      ExprPtr rhs = primary();
      lhs = make(BinOp{op, lhs, rhs}, begin);
    }
    return lhs;
  }

  ExprPtr primary() {
    Token tok = peek();
    std::size_t begin = tok.offset;

    if (tok.is("(")) {
      next();
      ExprPtr inner = tuple_expr();
      expect(")");
      return inner;
    }
    if (tok.is("+") || tok.is("-") || tok.is("*") || tok.is("/")) {
      Token after = peek(1);
      if (after.is(",") || after.is(")")) {
        next();
        return make(VarRef{std::string(tok.text)}, begin);
      }
      if (tok.is("-") && after.is_ident("inf")) {
        next();
        next();
        return make(Literal{Literal::Kind::neg_inf, "-inf"}, begin);
      }
      if (tok.is("-") && after.kind == Tok::number && after.offset == tok.offset + 1) {
        next();
        next();
        return make(number_literal("-" + std::string(after.text)), begin);
      }
      throw SyntaxError("unexpected operator " + describe(tok), token_span(tok));
    }
    if (tok.kind == Tok::number) {
      next();
      return make(number_literal(std::string(tok.text)), begin);
    }
    if (tok.is_ident("fn")) return fn_expr();
    if (tok.kind == Tok::ident) {
      if (tok.text == "_") throw SyntaxError("'_' may only appear in a pattern", token_span(tok));
      next();
      if (peek().is("(")) {
        Span callee_span = token_span(tok);
        next();
        std::vector<ExprPtr> args;
        if (!peek().is(")")) {
          for (;;) {
            args.push_back(expr());
            if (!peek().is(",")) break;
            next();
          }
        }
        expect(")");
        return make(Call{std::string(tok.text), callee_span, std::move(args)}, begin);
      }
      return make(VarRef{std::string(tok.text)}, begin);
    }
    throw SyntaxError("expected an expression but found " + describe(tok), token_span(tok));
  }

  static Literal number_literal(std::string text) {
    bool integer = std::all_of(text.begin(), text.end(), [](char c) { return digit(c) || c == '-'; });
    return Literal{integer ? Literal::Kind::integer : Literal::Kind::floating, std::move(text)};
  }

  ExprPtr fn_expr() {
    std::size_t begin = next().offset;  // `fn`
    FnExpr fn;
    expect("(");
    if (!peek().is(")")) {
      for (;;) {
        Param param;
        std::size_t param_begin = peek().offset;
        param.name = expect_ident("a parameter name");
        if (peek().is(":")) {
          next();
          param.annotation = annotation();
        }
        param.span = span(param_begin, pos_);
        fn.params.push_back(std::move(param));
        if (!peek().is(",")) break;
        next();
      }
    }
    expect(")");
    std::set<std::string> seen;
    for (const Param& p : fn.params) {
      if (p.name != "_" && !seen.insert(p.name).second) {
        throw SyntaxError("duplicate parameter '" + p.name + "'", p.span);
      }
    }
    if (peek().is(":")) {
      next();
      fn.result_annotation = annotation();
    }
    expect("{");
    while (pattern_ahead()) {
      Let let;
      std::size_t let_begin = peek().offset;
      let.names = pattern();
      expect("=");
      let.value = tuple_expr();
      let.span = span(let_begin, pos_);
      expect(";");
      fn.body.lets.push_back(std::move(let));
    }
    if (peek().is("}")) throw SyntaxError("function body has no result expression", token_span(peek()));
    fn.body.result = tuple_expr();
    if (peek().is(";")) next();
    expect("}");
    return make(std::move(fn), begin);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> line_starts_;
};

// ---- printing ----

int precedence(char op) { return op == '+' || op == '-' ? 1 : 2; }

void print(const Expr& e, int indent, bool statement, std::string& out);

void print_statement_tuple(const Expr& e, int indent, std::string& out) { print(e, indent, true, out); }

void print_body(const Body& body, int indent, std::string& out) {
  std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  for (const Let& let : body.lets) {
    out += pad;
    for (std::size_t i = 0; i < let.names.size(); ++i) {
      if (i) out += ", ";
      out += let.names[i];
    }
    out += " = ";
    print_statement_tuple(*let.value, indent + 2, out);
    out += ";\n";
  }
  out += pad;
  print_statement_tuple(*body.result, indent + 2, out);
  out += "\n";
}

void print(const Expr& e, int indent, bool statement, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FnExpr>) {
          out += "fn (";
          for (std::size_t i = 0; i < node.params.size(); ++i) {
            if (i) out += ", ";
            out += node.params[i].name;
            if (node.params[i].annotation) out += " : " + pretty_print(*node.params[i].annotation);
          }
          out += ")";
          if (node.result_annotation) out += " : " + pretty_print(*node.result_annotation);
          out += " {\n";
          print_body(node.body, indent, out);
          out += std::string(static_cast<std::size_t>(indent), ' ') + "}";
        } else if constexpr (std::is_same_v<T, Call>) {
          out += node.callee + "(";
          for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i) out += ", ";
            print(*node.args[i], indent, false, out);
          }
          out += ")";
        } else if constexpr (std::is_same_v<T, BinOp>) {
          auto operand = [&](const Expr& child, bool right) {
            const auto* bin = std::get_if<BinOp>(&child.node);
            bool parens = std::holds_alternative<TupleExpr>(child.node);
            if (bin) {
              int mine = precedence(node.op);
              int theirs = precedence(bin->op);
              parens = theirs < mine || (right && theirs == mine);
            }
            if (parens) out += "(";
            print(child, indent, false, out);
            if (parens) out += ")";
          };
          operand(*node.lhs, false);
          out += std::string(" ") + node.op + " ";
          operand(*node.rhs, true);
        } else if constexpr (std::is_same_v<T, VarRef>) {
          out += node.name;
        } else if constexpr (std::is_same_v<T, TupleExpr>) {
          if (!statement) out += "(";
          for (std::size_t i = 0; i < node.elements.size(); ++i) {
            if (i) out += ", ";
            print(*node.elements[i], indent, false, out);
          }
          if (!statement) out += ")";
        } else {
          out += node.text;
        }
      },
      e.node);
}

std::string sexpr_annotation(const Annotation& a) {
  if (a.is_tuple()) {
    std::string out = "(tuple";
    for (const auto& item : a.tuple) out += " " + sexpr_annotation(item);
    return out + ")";
  }
  std::string out = "(ann";
  if (a.element) out += " elem=" + *a.element;
  if (a.shape) out += " shape=" + to_string(*a.shape);
  return out + ")";
}

void sexpr(const Expr& e, std::string& out);

void sexpr_names(const std::vector<std::string>& names, std::string& out) {
  out += "(";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += " ";
    out += names[i];
  }
  out += ")";
}

void sexpr(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FnExpr>) {
          out += "(fn (";
          for (std::size_t i = 0; i < node.params.size(); ++i) {
            if (i) out += " ";
            out += "(" + node.params[i].name;
            if (node.params[i].annotation) out += " " + sexpr_annotation(*node.params[i].annotation);
            out += ")";
          }
          out += ")";
          if (node.result_annotation) out += " (returns " + sexpr_annotation(*node.result_annotation) + ")";
          for (const Let& let : node.body.lets) {
            out += " (let ";
            sexpr_names(let.names, out);
            out += " ";
            sexpr(*let.value, out);
            out += ")";
          }
          out += " ";
          sexpr(*node.body.result, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, Call>) {
          out += "(call " + node.callee;
          for (const auto& arg : node.args) {
            out += " ";
            sexpr(*arg, out);
          }
          out += ")";
        } else if constexpr (std::is_same_v<T, BinOp>) {
          out += std::string("(") + node.op + " ";
          sexpr(*node.lhs, out);
          out += " ";
          sexpr(*node.rhs, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, VarRef>) {
          out += "(var " + node.name + ")";
        } else if constexpr (std::is_same_v<T, TupleExpr>) {
          out += "(tuple";
          for (const auto& item : node.elements) {
            out += " ";
            sexpr(*item, out);
          }
          out += ")";
        } else {
          out += "(lit " + node.text + ")";
        }
      },
      e.node);
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).program(); }

std::string pretty_print(const Annotation& a) {
  if (a.is_tuple()) {
    std::string out = "(";
    for (std::size_t i = 0; i < a.tuple.size(); ++i) {
      if (i) out += ", ";
      out += pretty_print(a.tuple[i]);
    }
    return out + ")";
  }
  std::string out = a.element.value_or("");
  if (a.shape) {
    if (!out.empty()) out += " ";
    out += to_string(*a.shape);
  }
  return out;
}

std::string pretty_print(const Expr& expr) {
  std::string out;
  print(expr, 0, false, out);
  return out;
}

std::string pretty_print(const Program& program) {
  std::string out;
  for (const TopBinding& b : program.bindings) {
    if (!b.names.empty()) {
      for (std::size_t i = 0; i < b.names.size(); ++i) {
        if (i) out += ", ";
        out += b.names[i];
      }
      out += " = ";
    }
    print(*b.expr, 0, true, out);
    out += ";\n";
  }
  return out;
}

std::string to_sexpr(const Expr& expr) {
  std::string out;
  sexpr(expr, out);
  return out;
}

std::string to_sexpr(const Program& program) {
  std::string out;
  for (const TopBinding& b : program.bindings) {
    out += "(binding ";
    sexpr_names(b.names, out);
    out += " ";
    sexpr(*b.expr, out);
    out += ")\n";
  }
  return out;
}

}  // namespace axon
