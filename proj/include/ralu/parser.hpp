#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "ralu/ast.hpp"
#include "ralu/lexer.hpp"

namespace ralu {

class FunctionNotFound : public Error {
public:
  explicit FunctionNotFound(const std::string& name)
      : Error("function_not_found", "function not found: " + name) {}
};

namespace detail {

// Recursive-descent parser for the object-language subset: module-level
// function definitions, if/elif/else, while, for-in, return, pass,
// (augmented) assignment and expression statements over calls, arithmetic /
// boolean / comparison / unary operators, literals, attribute and subscript
// access, and plain list/tuple displays. Everything else raises
// UnsupportedConstruct so callers can fall back to line-by-line units.
class Parser {
public:
  Parser(std::string_view source, std::vector<Token> tokens)
      : src_(source), toks_(std::move(tokens)) {}

  SyntaxNode parse_module() {
    SyntaxNode mod;
    mod.kind = NodeKind::Module;
    mod.span = Span{0, src_.size(), 1};
    mod.text = std::string(src_);
    while (!peek().is(TokKind::EndOfFile)) {
      mod.children.push_back(parse_statement(/*module_level=*/true));
    }
    return mod;
  }

private:
  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t idx_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = idx_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& advance() {
    const Token& t = toks_[idx_];
    if (idx_ + 1 < toks_.size()) ++idx_;
    return t;
  }
  Token expect_op(std::string_view op, const char* what) {
    if (!peek().is_op(op))
      throw SyntaxError(peek().span(), std::string("expected '") +
                                           std::string(op) + "' " + what);
    return advance();
  }
  void expect_newline() {
    if (peek().is_op(";"))
      throw SyntaxError(peek().span(),
                        "semicolon-separated statements are not supported");
    if (!peek().is(TokKind::Newline))
      throw SyntaxError(peek().span(), "expected end of statement");
    advance();
  }

  std::string slice(std::size_t from, std::size_t to) const {
    return std::string(src_.substr(from, to - from));
  }

  static bool is_keyword(const Token& t, std::string_view kw) {
    return t.kind == TokKind::Name && t.text == kw;
  }

  [[noreturn]] void reject(const Token& t, const std::string& construct) {
    throw UnsupportedConstruct(t.span(), construct);
  }

  // ---- statements ----

  SyntaxNode parse_statement(bool module_level) {
    const Token& t = peek();
    if (t.kind == TokKind::Name) {
      static const std::initializer_list<std::string_view> rejected = {
          "class",  "try",    "except", "finally",  "with",   "import",
          "from",   "raise",  "assert", "del",      "global", "nonlocal",
          "yield",  "break",  "continue", "lambda", "async",  "await",
          "match"};
      for (auto kw : rejected)
        if (t.text == kw) reject(t, std::string(kw) + " statement");
      if (t.text == "def") {
        if (!module_level) reject(t, "nested function definition");
        return parse_funcdef();
      }
      if (t.text == "if") return parse_if("if");
      if (t.text == "elif")
        throw SyntaxError(t.span(), "elif without a leading if");
      if (t.text == "else")
        throw SyntaxError(t.span(), "else without a leading if");
      if (t.text == "while") return parse_while();
      if (t.text == "for") return parse_for();
      if (t.text == "return") return parse_return();
      if (t.text == "pass") return parse_pass();
    }
    return parse_simple_statement();
  }

  SyntaxNode parse_funcdef() {
    const Token& def_tok = advance(); // def
    if (peek().kind != TokKind::Name)
      throw SyntaxError(peek().span(), "expected function name after def");
    SyntaxNode fn;
    fn.kind = NodeKind::FunctionDef;
    fn.name = std::string(advance().text);
    expect_op("(", "after function name");
    while (!peek().is_op(")")) {
      if (peek().is_op("*") || peek().is_op("**"))
        reject(peek(), "starred parameter");
      if (peek().kind != TokKind::Name)
        throw SyntaxError(peek().span(), "expected parameter name");
      fn.params.push_back(std::string(advance().text));
      if (peek().is_op(":")) { // annotation
        advance();
        parse_expression();
      }
      if (peek().is_op("=")) { // default value
        advance();
        parse_expression();
      }
      if (peek().is_op(","))
        advance();
      else
        break;
    }
    expect_op(")", "to close parameter list");
    if (peek().is_op("->")) { // return annotation
      advance();
      parse_expression();
    }
    expect_op(":", "after function signature");
    fn.children = parse_suite();
    fn.span = Span{def_tok.byte_start, body_end(fn.children), def_tok.line};
    fn.text = slice(fn.span.byte_start, fn.span.byte_end);
    return fn;
  }

  std::vector<SyntaxNode> parse_suite() {
    std::vector<SyntaxNode> body;
    if (!peek().is(TokKind::Newline)) {
      // Inline suite: "def f(): return 0". Simple statements only.
      body.push_back(parse_simple_suite_statement());
      return body;
    }
    advance(); // newline
    if (!peek().is(TokKind::Indent))
      throw SyntaxError(peek().span(), "expected an indented block");
    advance();
    while (!peek().is(TokKind::Dedent) && !peek().is(TokKind::EndOfFile))
      body.push_back(parse_statement(/*module_level=*/false));
    if (peek().is(TokKind::Dedent)) advance();
    if (body.empty())
      throw SyntaxError(peek().span(), "empty block");
    return body;
  }

  SyntaxNode parse_simple_suite_statement() {
    const Token& t = peek();
    if (is_keyword(t, "return")) return parse_return();
    if (is_keyword(t, "pass")) return parse_pass();
    return parse_simple_statement();
  }

  SyntaxNode parse_if(std::string_view lead_kw) {
    const Token& kw = advance(); // if / elif
    (void)lead_kw;
    std::size_t cond_start = peek().byte_start;
    parse_expression(/*no_in=*/false);
    std::size_t cond_end = prev_end();
    SyntaxNode node;
    node.kind = NodeKind::If;
    node.header_text =
        std::string(kw.text) + " " + slice(cond_start, cond_end);
    expect_op(":", "after condition");
    auto then_body = parse_suite();
    node.then_count = then_body.size();
    node.children = std::move(then_body);
    std::size_t end = body_end(node.children);
    if (is_keyword(peek(), "elif")) {
      SyntaxNode nested = parse_if("elif");
      end = nested.span.byte_end;
      node.children.push_back(std::move(nested));
    } else if (is_keyword(peek(), "else")) {
      advance();
      expect_op(":", "after else");
      auto else_body = parse_suite();
      end = body_end(else_body);
      for (auto& s : else_body) node.children.push_back(std::move(s));
    }
    node.span = Span{kw.byte_start, end, kw.line};
    node.text = slice(node.span.byte_start, node.span.byte_end);
    return node;
  }

  SyntaxNode parse_while() {
    const Token& kw = advance();
    std::size_t cond_start = peek().byte_start;
    parse_expression();
    std::size_t cond_end = prev_end();
    SyntaxNode node;
    node.kind = NodeKind::While;
    node.header_text = "while " + slice(cond_start, cond_end);
    expect_op(":", "after loop condition");
    node.children = parse_suite();
    node.span = Span{kw.byte_start, body_end(node.children), kw.line};
    node.text = slice(node.span.byte_start, node.span.byte_end);
    return node;
  }

  SyntaxNode parse_for() {
    const Token& kw = advance();
    std::size_t target_start = peek().byte_start;
    parse_expression(/*no_in=*/true);
    std::size_t target_end = prev_end();
    if (!is_keyword(peek(), "in"))
      throw SyntaxError(peek().span(), "expected 'in' in for statement");
    advance();
    std::size_t iter_start = peek().byte_start;
    parse_expression();
    std::size_t iter_end = prev_end();
    SyntaxNode node;
    node.kind = NodeKind::For;
    node.target_text = slice(target_start, target_end);
    node.iter_text = slice(iter_start, iter_end);
    node.header_text = "for " + node.target_text + " in " + node.iter_text;
    expect_op(":", "after for header");
    node.children = parse_suite();
    node.span = Span{kw.byte_start, body_end(node.children), kw.line};
    node.text = slice(node.span.byte_start, node.span.byte_end);
    return node;
  }

  SyntaxNode parse_return() {
    const Token& kw = advance();
    SyntaxNode node;
    node.kind = NodeKind::Return;
    std::size_t end = kw.byte_end;
    if (!peek().is(TokKind::Newline) && !peek().is(TokKind::EndOfFile)) {
      parse_expression();
      end = prev_end();
    }
    expect_newline();
    node.span = Span{kw.byte_start, end, kw.line};
    node.text = slice(node.span.byte_start, node.span.byte_end);
    return node;
  }

  SyntaxNode parse_pass() {
    const Token& kw = advance();
    expect_newline();
    SyntaxNode node;
    node.kind = NodeKind::ExprStmt;
    node.span = kw.span();
    node.text = "pass";
    return node;
  }

  SyntaxNode parse_simple_statement() {
    std::size_t start = peek().byte_start;
    int line = peek().line;
    parse_expression();
    SyntaxNode node;
    node.kind = NodeKind::ExprStmt;
    static const std::initializer_list<std::string_view> aug = {
        "+=", "-=", "*=", "/=", "//=", "%=", "**=",
        "&=", "|=", "^=", "<<=", ">>="};
    bool matched_aug = false;
    for (auto op : aug) {
      if (peek().is_op(op)) {
        advance();
        parse_expression();
        node.kind = NodeKind::AugAssign;
        matched_aug = true;
        break;
      }
    }
    if (!matched_aug) {
      while (peek().is_op("=")) {
        advance();
        parse_expression();
        node.kind = NodeKind::Assign;
      }
    }
    std::size_t end = prev_end();
    expect_newline();
    node.span = Span{start, end, line};
    node.text = slice(start, end);
    return node;
  }

  // ---- expressions (precedence climbing; no AST, spans only) ----

  void parse_expression(bool no_in = false) { parse_testlist(no_in); }

  void parse_testlist(bool no_in) {
    parse_ternary_guard(no_in);
    while (peek().is_op(",")) {
      advance();
      // Trailing comma: "x," — stop if the next token cannot start an atom.
      if (starts_expression(peek())) {
        parse_ternary_guard(no_in);
      } else {
        break;
      }
    }
  }

  void parse_ternary_guard(bool no_in) {
    parse_or(no_in);
    if (is_keyword(peek(), "if"))
      reject(peek(), "conditional expression");
  }

  void parse_or(bool no_in) {
    parse_and(no_in);
    while (is_keyword(peek(), "or")) {
      advance();
      parse_and(no_in);
    }
  }

  void parse_and(bool no_in) {
    parse_not(no_in);
    while (is_keyword(peek(), "and")) {
      advance();
      parse_not(no_in);
    }
  }

  void parse_not(bool no_in) {
    if (is_keyword(peek(), "not")) {
      advance();
      parse_not(no_in);
      return;
    }
    parse_comparison(no_in);
  }

  void parse_comparison(bool no_in) {
    parse_bitor();
    while (true) {
      const Token& t = peek();
      bool is_cmp = t.is_op("<") || t.is_op(">") || t.is_op("<=") ||
                    t.is_op(">=") || t.is_op("==") || t.is_op("!=");
      bool is_word_cmp = is_keyword(t, "is") || (!no_in && is_keyword(t, "in"));
      if (is_keyword(t, "not") && !no_in) {
        // "not in"
        if (peek(1).is_name("in")) {
          advance();
          advance();
          parse_bitor();
          continue;
        }
        break;
      }
      if (!is_cmp && !is_word_cmp) break;
      advance();
      if (is_keyword(t, "is") && is_keyword(peek(), "not")) advance();
      parse_bitor();
    }
  }

  void parse_bitor() {
    parse_bitxor();
    while (peek().is_op("|")) {
      advance();
      parse_bitxor();
    }
  }
  void parse_bitxor() {
    parse_bitand();
    while (peek().is_op("^")) {
      advance();
      parse_bitand();
    }
  }
  void parse_bitand() {
    parse_shift();
    while (peek().is_op("&")) {
      advance();
      parse_shift();
    }
  }
  void parse_shift() {
    parse_additive();
    while (peek().is_op("<<") || peek().is_op(">>")) {
      advance();
      parse_additive();
    }
  }
  void parse_additive() {
    parse_multiplicative();
    while (peek().is_op("+") || peek().is_op("-")) {
      advance();
      parse_multiplicative();
    }
  }
  void parse_multiplicative() {
    parse_unary();
    while (peek().is_op("*") || peek().is_op("/") || peek().is_op("//") ||
           peek().is_op("%")) {
      advance();
      parse_unary();
    }
  }
  void parse_unary() {
    if (peek().is_op("-") || peek().is_op("+") || peek().is_op("~")) {
      advance();
      parse_unary();
      return;
    }
    parse_power();
  }
  void parse_power() {
    parse_postfix();
    if (peek().is_op("**")) {
      advance();
      parse_unary(); // right-associative, binds tighter than unary on the left
    }
  }

  void parse_postfix() {
    parse_atom();
    while (true) {
      if (peek().is_op("(")) {
        advance();
        parse_call_args();
        expect_op(")", "to close call");
      } else if (peek().is_op("[")) {
        advance();
        parse_subscript();
        expect_op("]", "to close subscript");
      } else if (peek().is_op(".")) {
        advance();
        if (peek().kind != TokKind::Name)
          throw SyntaxError(peek().span(), "expected attribute name");
        advance();
      } else {
        break;
      }
    }
  }

  void parse_call_args() {
    while (!peek().is_op(")")) {
      if (peek().is_op("*") || peek().is_op("**"))
        reject(peek(), "argument unpacking");
      if (peek().kind == TokKind::Name && peek(1).is_op("=")) {
        advance(); // keyword argument name
        advance();
      }
      parse_ternary_guard(false);
      if (is_keyword(peek(), "for")) reject(peek(), "comprehension");
      if (peek().is_op(","))
        advance();
      else
        break;
    }
  }

  void parse_subscript() {
    // Slices: a[1:3], a[::-1], a[:, ...] is rejected by ':' handling below.
    auto slice_part = [&] {
      if (!peek().is_op(":") && !peek().is_op("]")) parse_ternary_guard(false);
    };
    slice_part();
    while (peek().is_op(":")) {
      advance();
      slice_part();
    }
    while (peek().is_op(",")) {
      advance();
      slice_part();
      while (peek().is_op(":")) {
        advance();
        slice_part();
      }
    }
  }

  void parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Name: {
        if (t.text == "lambda") reject(t, "lambda");
        if (t.text == "yield") reject(t, "yield expression");
        if (t.text == "await") reject(t, "await expression");
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          advance();
          return;
        }
        if (t.text == "not" || t.text == "and" || t.text == "or" ||
            t.text == "in" || t.text == "is" || t.text == "if" ||
            t.text == "else" || t.text == "for" || t.text == "while" ||
            t.text == "def" || t.text == "return" || t.text == "elif" ||
            t.text == "pass")
          throw SyntaxError(t.span(), "unexpected keyword '" +
                                          std::string(t.text) + "'");
        advance();
        return;
      }
      case TokKind::Number:
      case TokKind::String:
        advance();
        // adjacent string literal concatenation: "a" "b"
        while (peek().is(TokKind::String)) advance();
        return;
      case TokKind::Op: {
        if (t.is_op("(")) {
          advance();
          if (!peek().is_op(")")) {
            parse_testlist(false);
            if (is_keyword(peek(), "for")) reject(peek(), "comprehension");
          }
          expect_op(")", "to close parenthesis");
          return;
        }
        if (t.is_op("[")) {
          advance();
          if (!peek().is_op("]")) {
            parse_testlist(false);
            if (is_keyword(peek(), "for")) reject(peek(), "comprehension");
          }
          expect_op("]", "to close list display");
          return;
        }
        if (t.is_op("{")) reject(t, "dict or set display");
        if (t.is_op(":=")) reject(t, "assignment expression");
        break;
      }
      default:
        break;
    }
    throw SyntaxError(t.span(), "expected an expression");
  }

  static bool starts_expression(const Token& t) {
    if (t.kind == TokKind::Number || t.kind == TokKind::String) return true;
    if (t.kind == TokKind::Name)
      return !(t.text == "in" || t.text == "if" || t.text == "else" ||
               t.text == "for");
    return t.is_op("(") || t.is_op("[") || t.is_op("-") || t.is_op("+") ||
           t.is_op("~");
  }

  std::size_t prev_end() const {
    return idx_ > 0 ? toks_[idx_ - 1].byte_end : 0;
  }

  static std::size_t body_end(const std::vector<SyntaxNode>& body) {
    return body.empty() ? 0 : body.back().span.byte_end;
  }
};

} // namespace detail

// Parses object-language source into a syntax tree. Verbatim text is
// preserved per node; see ast.hpp for the node layout.
inline SyntaxTree parse_program(std::string_view source) {
  if (source.empty())
    throw SyntaxError(Span{0, 0, 1}, "empty source");
  SyntaxTree tree;
  tree.source = std::string(source);
  detail::Parser parser(tree.source, lex(tree.source));
  tree.root = parser.parse_module();
  return tree;
}

// Returns the exact source slice for a statement node. Spans start at the
// first token, so there is no leading indentation to strip.
inline std::string slice_statement(const SyntaxTree& tree,
                                   const SyntaxNode& node) {
  if (node.span.byte_end > tree.source.size() ||
      node.span.byte_start >= node.span.byte_end)
    throw Error("bad_span", "node span outside source bounds");
  return tree.source.substr(node.span.byte_start,
                            node.span.byte_end - node.span.byte_start);
}

} // namespace ralu
