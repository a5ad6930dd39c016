#include "bcg/parser.h"

#include <cctype>
#include <optional>

#include "bcg/errors.h"

namespace bcg {
namespace {

enum class Tok { kName, kQuoted, kLParen, kRParen, kComma, kDot, kNeck, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_blank();
    const std::size_t line = line_, column = column_;
    if (pos_ >= src_.size()) return {Tok::kEnd, "", line, column};
    const char c = src_[pos_];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance();
      }
      return {Tok::kName, std::string(src_.substr(start, pos_ - start)), line, column};
    }
    switch (c) {
      case '(': advance(); return {Tok::kLParen, "(", line, column};
      case ')': advance(); return {Tok::kRParen, ")", line, column};
      case ',': advance(); return {Tok::kComma, ",", line, column};
      case '.': advance(); return {Tok::kDot, ".", line, column};
      case '"': return quoted(line, column);
      case ':':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
          advance();
          advance();
          return {Tok::kNeck, ":-", line, column};
        }
        break;
      case ';': case '|': case '&': case '~': case '!': case '\\':
        throw ParseError(std::string("connective '") + c + "' is not allowed: only Horn clauses are accepted",
                         line, column);
      case '-':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
          throw ParseError("implication '->' is not allowed: write clauses as head :- body.", line, column);
        }
        break;
      default:
        break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, column);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token quoted(std::size_t line, std::size_t column) {
    advance();  // opening quote
    std::string text;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw ParseError("unterminated quoted constant", line, column);
      }
      char c = src_[pos_];
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) throw ParseError("unterminated escape", line, column);
        c = src_[pos_];
        advance();
      }
      text.push_back(c);
    }
    return {Tok::kQuoted, std::move(text), line, column};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

bool is_variable_name(std::string_view s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

class Parser {
 public:
  Parser(std::string_view src, SymbolTable& symbols) : lex_(src), symbols_(symbols) { shift(); }

  bool at_end() const { return tok_.kind == Tok::kEnd; }

  HornClause clause() {
    const Token start = tok_;
    HornClause c;
    c.head = atom();
    if (tok_.kind == Tok::kDot) {
      throw ParseError("clause has no body: facts belong in the fact file", tok_.line, tok_.column);
    }
    expect(Tok::kNeck, "':-'");
    c.body.push_back(atom());
    while (tok_.kind == Tok::kComma) {
      shift();
      c.body.push_back(atom());
    }
    expect(Tok::kDot, "'.' or ','");
    for (Term t : c.head.args) {
      if (!t.is_variable()) continue;
      bool found = false;
      for (const Atom& b : c.body) {
        for (Term u : b.args) found = found || u == t;
      }
      if (!found) {
        throw ParseError("head variable " + symbols_.name(t.as_variable()) + " does not occur in the body",
                         start.line, start.column);
      }
    }
    return c;
  }

  Atom atom() {
    if (tok_.kind != Tok::kName) fail("predicate name");
    const Token name = tok_;
    if (name.text == "not") {
      throw ParseError("negation is not allowed in Horn clauses", name.line, name.column);
    }
    shift();
    expect(Tok::kLParen, "'('");
    std::vector<Term> args;
    args.push_back(term());
    while (tok_.kind == Tok::kComma) {
      shift();
      args.push_back(term());
    }
    expect(Tok::kRParen, "')' or ','");
    Atom a;
    try {
      a.predicate = symbols_.intern_predicate(name.text, args.size());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), name.line, name.column);
    }
    a.args = std::move(args);
    return a;
  }

  const Token& current() const { return tok_; }

 private:
  Term term() {
    if (tok_.kind == Tok::kQuoted) {
      Term t = Term::constant(symbols_.intern_constant(tok_.text));
      shift();
      return t;
    }
    if (tok_.kind != Tok::kName) fail("term");
    Term t = is_variable_name(tok_.text) ? Term::variable(symbols_.intern_variable(tok_.text))
                                         : Term::constant(symbols_.intern_constant(tok_.text));
    shift();
    if (tok_.kind == Tok::kLParen) {
      throw ParseError("function symbols are not supported", tok_.line, tok_.column);
    }
    return t;
  }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(what);
    shift();
  }

  [[noreturn]] void fail(const std::string& what) {
    const std::string got = tok_.kind == Tok::kEnd ? "end of input" : "'" + tok_.text + "'";
    throw ParseError("expected " + what + ", got " + got, tok_.line, tok_.column);
  }

  void shift() { tok_ = lex_.next(); }

  Lexer lex_;
  SymbolTable& symbols_;
  Token tok_;
};

}  // namespace

void parse_theory_into(std::string_view text, Theory& theory) {
  Parser p(text, theory.symbols);
  while (!p.at_end()) {
    HornClause c = p.clause();
    c.rule_id = theory.clauses.size();
    theory.clauses.push_back(std::move(c));
  }
}

Theory parse_theory(std::string_view text) {
  Theory t;
  parse_theory_into(text, t);
  return t;
}

Atom parse_atom(std::string_view text, SymbolTable& symbols) {
  Parser p(text, symbols);
  Atom a = p.atom();
  if (!p.at_end()) {
    throw ParseError("trailing input after atom", p.current().line, p.current().column);
  }
  return a;
}

std::string format_constant(std::string_view name) {
  bool bare = !name.empty() && (std::islower(static_cast<unsigned char>(name[0])) ||
                                std::isdigit(static_cast<unsigned char>(name[0])));
  for (char c : name) bare = bare && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
  if (bare) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_atom(const Atom& atom, const SymbolTable& symbols) {
  std::string out = symbols.name(atom.predicate);
  out.push_back('(');
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out.push_back(',');
    const Term t = atom.args[i];
    out += t.is_variable() ? symbols.name(t.as_variable()) : format_constant(symbols.name(t.as_constant()));
  }
  out.push_back(')');
  return out;
}

std::string format_clause(const HornClause& clause, const SymbolTable& symbols) {
  std::string out = format_atom(clause.head, symbols) + " :- ";
  for (std::size_t i = 0; i < clause.body.size(); ++i) {
    if (i) out += ", ";
    out += format_atom(clause.body[i], symbols);
  }
  out.push_back('.');
  return out;
}

std::string format_theory(const Theory& theory) {
  std::string out;
  for (const HornClause& c : theory.clauses) {
    out += format_clause(c, theory.symbols);
    out.push_back('\n');
  }
  return out;
}

}  // namespace bcg
