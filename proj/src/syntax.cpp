#include "rescueplan/syntax.hpp"

#include <cctype>
#include <charconv>

namespace rescueplan::syntax {

namespace {

enum class Tok {
  ident, variable, anonymous, quoted, integer,
  lparen, rparen, lbracket, rbracket, comma, period, neck, slash, end,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::int64_t number = 0;
  bool space_before = false;
  int line = 1;
  int column = 1;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::variable: return "variable";
    case Tok::anonymous: return "'_'";
    case Tok::quoted: return "quoted constant";
    case Tok::integer: return "integer";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::comma: return "','";
    case Tok::period: return "'.'";
    case Tok::neck: return "':-'";
    case Tok::slash: return "'/'";
    case Tok::end: return "end of input";
  }
  return "token";
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

class Lexer {
 public:
  Lexer(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      bool space = skip_blank();
      Token t = next();
      t.space_before = space;
      out.push_back(std::move(t));
      if (out.back().kind == Tok::end) return out;
    }
  }

 private:
  [[noreturn]] void error(int line, int column, const std::string& msg) const {
    throw ParseError(ErrorKind::syntax, {std::string(source_), line, column}, msg);
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool at_end() const { return pos_ >= text_.size(); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool skip_blank() {
    bool skipped = false;
    while (!at_end()) {
      char c = peek();
      if (c == '%') {
        while (!at_end() && peek() != '\n') advance();
        skipped = true;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        skipped = true;
      } else {
        break;
      }
    }
    return skipped;
  }

  Token next() {
    Token t;
    t.line = line_;
    t.column = col_;
    if (at_end()) return t;
    char c = peek();
    auto single = [&](Tok k) {
      advance();
      t.kind = k;
      return t;
    };
    switch (c) {
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case '[': return single(Tok::lbracket);
      case ']': return single(Tok::rbracket);
      case ',': return single(Tok::comma);
      case '.': return single(Tok::period);
      case '/': return single(Tok::slash);
      case ':':
        if (peek(1) == '-') {
          advance();
          return single(Tok::neck);
        }
        error(t.line, t.column, "unexpected character ':'");
      case '\'': return quoted(t);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return integer(t);
    }
    if (word_char(c)) {
      std::size_t start = pos_;
      while (!at_end() && word_char(peek())) advance();
      t.text = std::string(text_.substr(start, pos_ - start));
      if (t.text == "_") {
        t.kind = Tok::anonymous;
      } else if (is_identifier(t.text)) {
        t.kind = Tok::ident;
      } else if (is_variable_name(t.text)) {
        t.kind = Tok::variable;
      } else {
        error(t.line, t.column, "bad token '" + t.text + "'");
      }
      return t;
    }
    if (static_cast<unsigned char>(c) >= 0x80) {
      error(t.line, t.column, "non-ASCII character outside a quoted constant");
    }
    error(t.line, t.column, std::string("unexpected character '") + c + "'");
  }

  Token integer(Token t) {
    std::size_t start = pos_;
    if (peek() == '-') advance();
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (!at_end() && word_char(peek())) {
      error(t.line, t.column, "bad token: digits followed by letters");
    }
    std::string_view digits = text_.substr(start, pos_ - start);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.number);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      error(t.line, t.column, "integer out of range: " + std::string(digits));
    }
    t.kind = Tok::integer;
    return t;
  }

  Token quoted(Token t) {
    advance();  // opening quote
    std::string value;
    for (;;) {
      if (at_end() || peek() == '\n') error(t.line, t.column, "unterminated quoted constant");
      char c = peek();
      if (c == '\'') {
        if (peek(1) == '\'') {
          value += '\'';
          advance();
          advance();
          continue;
        }
        advance();
        break;
      }
      if (c == '\\') {
        char e = peek(1);
        switch (e) {
          case '\\': value += '\\'; break;
          case '\'': value += '\''; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default:
            error(line_, col_, std::string("unknown escape sequence '\\") + e + "'");
        }
        advance();
        advance();
        continue;
      }
      value += c;
      advance();
    }
    t.kind = Tok::quoted;
    t.text = std::move(value);
    return t;
  }

  std::string_view text_;
  std::string_view source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Reader {
 public:
  Reader(std::string_view text, std::string_view source)
      : tokens_(Lexer(text, source).run()), source_(source) {}

  std::vector<Clause> clauses() {
    std::vector<Clause> out;
    while (peek().kind != Tok::end) out.push_back(clause());
    return out;
  }

  std::vector<Node> sequence() {
    std::vector<Node> out;
    if (peek().kind == Tok::end) return out;
    out.push_back(literal());
    while (peek().kind == Tok::comma) {
      take();
      out.push_back(literal());
    }
    if (peek().kind == Tok::period) take();
    expect(Tok::end, "end of input");
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& take() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  SourceLocation here(const Token& t) const { return {std::string(source_), t.line, t.column}; }

  [[noreturn]] void unexpected(const Token& t, std::string_view wanted) const {
    std::string msg = "expected " + std::string(wanted) + ", found " + std::string(describe(t.kind));
    if (!t.text.empty() && t.kind != Tok::quoted) msg += " '" + t.text + "'";
    throw ParseError(ErrorKind::syntax, here(t), msg);
  }

  const Token& expect(Tok kind, std::string_view wanted) {
    if (peek().kind != kind) unexpected(peek(), wanted);
    return take();
  }

  Clause clause() {
    Clause c;
    c.where = here(peek());
    c.head = term();
    if (peek().kind == Tok::neck) {
      take();
      c.body.push_back(literal());
      while (peek().kind == Tok::comma) {
        take();
        c.body.push_back(literal());
      }
    }
    if (peek().kind != Tok::period) unexpected(peek(), "',' or '.' (missing period?)");
    take();
    return c;
  }

  // `not` followed by whitespace and an identifier negates; anything else
  // reads `not` as an ordinary name.
  Node literal() {
    const Token& t = peek();
    if (t.kind == Tok::ident && t.text == "not" && peek(1).kind == Tok::ident &&
        peek(1).space_before) {
      Node n;
      n.kind = Node::Kind::negation;
      n.where = here(t);
      take();
      n.children.push_back(term());
      return n;
    }
    return term();
  }

  Node term() {
    const Token& t = peek();
    Node n;
    n.where = here(t);
    switch (t.kind) {
      case Tok::ident: {
        n.text = take().text;
        if (peek().kind == Tok::lparen && !peek().space_before) {
          take();
          n.kind = Node::Kind::compound;
          n.children.push_back(literal());
          while (peek().kind == Tok::comma) {
            take();
            n.children.push_back(literal());
          }
          expect(Tok::rparen, "',' or ')'");
        } else if (peek().kind == Tok::slash) {
          take();
          n.kind = Node::Kind::indicator;
          n.number = expect(Tok::integer, "arity after '/'").number;
          if (n.number < 0) fail(n, "negative arity");
        } else {
          n.kind = Node::Kind::constant;
        }
        return n;
      }
      case Tok::quoted:
        n.kind = Node::Kind::constant;
        n.quoted = true;
        n.text = take().text;
        return n;
      case Tok::variable:
        n.kind = Node::Kind::variable;
        n.text = take().text;
        return n;
      case Tok::anonymous:
        take();
        n.kind = Node::Kind::anonymous;
        n.text = "_";
        return n;
      case Tok::integer:
        n.kind = Node::Kind::number;
        n.number = take().number;
        n.text = std::to_string(n.number);
        return n;
      case Tok::lbracket:
        take();
        n.kind = Node::Kind::list;
        if (peek().kind != Tok::rbracket) {
          n.children.push_back(literal());
          while (peek().kind == Tok::comma) {
            take();
            n.children.push_back(literal());
          }
        }
        expect(Tok::rbracket, "',' or ']'");
        return n;
      default:
        unexpected(t, "a term");
    }
  }

  std::vector<Token> tokens_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Clause> read_clauses(std::string_view text, std::string_view source) {
  return Reader(text, source).clauses();
}

std::vector<Node> read_sequence(std::string_view text, std::string_view source) {
  return Reader(text, source).sequence();
}

void fail(const Node& at, const std::string& message) {
  throw ParseError(ErrorKind::syntax, at.where, message);
}

Term to_term(const Node& n) {
  switch (n.kind) {
    case Node::Kind::constant: return Term::constant(n.text);
    case Node::Kind::number: return Term::number(n.number);
    case Node::Kind::variable: return Term::variable(n.text);
    case Node::Kind::anonymous: return Term::anonymous();
    case Node::Kind::compound:
      fail(n, "nested term '" + n.text + "(...)' is not allowed as an argument");
    case Node::Kind::list: fail(n, "lists are not allowed here");
    case Node::Kind::negation: fail(n, "'not' is not allowed inside an argument");
    case Node::Kind::indicator: fail(n, "predicate indicator is not allowed here");
  }
  fail(n, "bad term");
}

Atom to_atom(const Node& n) {
  if (n.kind == Node::Kind::constant && !n.quoted) return Atom{n.text, {}};
  if (n.kind != Node::Kind::compound) {
    switch (n.kind) {
      case Node::Kind::negation: fail(n, "negation is not allowed here");
      case Node::Kind::constant: fail(n, "predicate name must be an unquoted identifier");
      default: fail(n, "expected an atom");
    }
  }
  Atom a{n.text, {}};
  a.args.reserve(n.children.size());
  for (const Node& c : n.children) a.args.push_back(to_term(c));
  return a;
}

Literal to_literal(const Node& n) {
  if (n.kind == Node::Kind::negation) return Literal{to_atom(n.children.front()), true};
  return Literal{to_atom(n), false};
}

}  // namespace rescueplan::syntax
