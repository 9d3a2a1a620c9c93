#pragma once

#include "swfam/families.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace swfam {

// Parse failures carry the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& msg)
      : Error(Errc::usage, msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

struct Token {
  enum class Kind { end, integer, ident, hash, star, lparen, rparen, comma, at };
  Kind kind = Kind::end;
  std::string text;
  i64 value = 0;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_ = Token{};
    cur_.offset = pos_;
    if (pos_ >= src_.size()) {
      cur_.kind = Token::Kind::end;
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t start = pos_;
      if (c == '-') ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      cur_.kind = Token::Kind::integer;
      cur_.text = src_.substr(start, pos_ - start);
      try {
        cur_.value = std::stoll(cur_.text);
      } catch (const std::exception&) {
        throw ParseError(start, "integer literal out of range");
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      cur_.kind = Token::Kind::ident;
      cur_.text = src_.substr(start, pos_ - start);
      return;
    }
    ++pos_;
    switch (c) {
      case '#':
        cur_.kind = Token::Kind::hash;
        return;
      case '*':
        cur_.kind = Token::Kind::star;
        return;
      case '(':
        cur_.kind = Token::Kind::lparen;
        return;
      case ')':
        cur_.kind = Token::Kind::rparen;
        return;
      case ',':
        cur_.kind = Token::Kind::comma;
        return;
      case '@':
        cur_.kind = Token::Kind::at;
        return;
      default:
        throw ParseError(pos_ - 1, std::string("unexpected character '") + c + "'");
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Token cur_;
};

inline Atom parse_atom(Lexer& lex) {
  Token t = lex.take();
  if (t.kind != Token::Kind::ident) throw ParseError(t.offset, "expected an atom name");
  if (t.text == "CP2") return Atom::cp2();
  if (t.text == "CP2bar") return Atom::cp2bar();
  if (t.text == "S2xS2") return Atom::s2xs2();
  if (t.text == "K3") return Atom::k3();
  if (t.text == "E1") {
    if (lex.peek().kind != Token::Kind::lparen) return Atom::e1();
    lex.take();
    Token m = lex.take();
    if (m.kind != Token::Kind::integer) throw ParseError(m.offset, "expected multiplicity m");
    Token comma = lex.take();
    if (comma.kind != Token::Kind::comma) throw ParseError(comma.offset, "expected ','");
    Token n = lex.take();
    if (n.kind != Token::Kind::integer) throw ParseError(n.offset, "expected multiplicity n");
    Token close = lex.take();
    if (close.kind != Token::Kind::rparen) throw ParseError(close.offset, "expected ')'");
    try {
      return Atom::e1log(m.value, n.value);
    } catch (const Error& e) {
      throw ParseError(m.offset, e.what());
    }
  }
  throw ParseError(t.offset, "unknown atom '" + t.text + "'");
}

}  // namespace detail

// Grammar: expr := term ('#' term)*, term := [INT] atom,
// atom := CP2 | CP2bar | S2xS2 | K3 | E1 | E1(m,n). Whitespace-insensitive.
inline ManifoldExpr parse_manifold(const std::string& text) {
  detail::Lexer lex(text);
  std::vector<Atom> atoms;
  while (true) {
    i64 repeat = 1;
    if (lex.peek().kind == detail::Token::Kind::integer) {
      detail::Token t = lex.take();
      repeat = t.value;
      if (repeat < 1) throw ParseError(t.offset, "repetition count must be positive");
      if (repeat > 4096) throw ParseError(t.offset, "repetition count too large");
    }
    Atom a = detail::parse_atom(lex);
    for (i64 i = 0; i < repeat; ++i) atoms.push_back(a);
    if (lex.peek().kind == detail::Token::Kind::hash) {
      lex.take();
      continue;
    }
    break;
  }
  detail::Token t = lex.take();
  if (t.kind != detail::Token::Kind::end) throw ParseError(t.offset, "trailing input after expression");
  return ManifoldExpr(std::move(atoms));
}

// "1,-2,3" with optional surrounding (), [].
inline IVec parse_int_vector(const std::string& text) {
  std::string body = text;
  if (!body.empty() && (body.front() == '(' || body.front() == '[')) {
    char open = body.front();
    char close = open == '(' ? ')' : ']';
    if (body.back() != close) throw ParseError(body.size() - 1, "unbalanced bracket");
    body = body.substr(1, body.size() - 2);
  }
  IVec out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t next = body.find(',', pos);
    std::string piece = body.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    std::size_t s = piece.find_first_not_of(" \t");
    std::size_t e = piece.find_last_not_of(" \t");
    if (s == std::string::npos) throw ParseError(pos, "empty vector entry");
    try {
      out.push_back(std::stoll(piece.substr(s, e - s + 1)));
    } catch (const std::exception&) {
      throw ParseError(pos, "bad integer '" + piece + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

// Named lattice isometries usable in conj(NAME, f); when inner_manifold is
// set, the conjugand is elaborated against that presentation.
struct NamedAutomorphism {
  IMat matrix;
  std::optional<std::string> inner_manifold;
};

using AutomorphismTable = std::map<std::string, NamedAutomorphism>;

namespace detail {

// Untyped diffeomorphism syntax tree, elaborated against a manifold segment.
struct DiffeoSyntax {
  enum class Kind { id, rho, conn_sum, compose, inverse, conj };
  Kind kind = Kind::id;
  int rho_ordinal = 0;
  std::string conj_name;
  std::size_t offset = 0;
  std::vector<DiffeoSyntax> children;
};

inline DiffeoSyntax parse_dexpr(Lexer& lex);

inline DiffeoSyntax parse_dfactor(Lexer& lex) {
  Token t = lex.peek();
  if (t.kind == Token::Kind::lparen) {
    lex.take();
    DiffeoSyntax inner = parse_dexpr(lex);
    Token close = lex.take();
    if (close.kind != Token::Kind::rparen) throw ParseError(close.offset, "expected ')'");
    return inner;
  }
  if (t.kind != Token::Kind::ident) throw ParseError(t.offset, "expected a diffeomorphism");
  lex.take();
  DiffeoSyntax out;
  out.offset = t.offset;
  if (t.text == "id") {
    out.kind = DiffeoSyntax::Kind::id;
    return out;
  }
  if (t.text == "rho") {
    Token at = lex.take();
    if (at.kind != Token::Kind::at) throw ParseError(at.offset, "expected '@' after rho");
    Token k = lex.take();
    if (k.kind != Token::Kind::integer || k.value < 1)
      throw ParseError(k.offset, "expected a positive summand index");
    out.kind = DiffeoSyntax::Kind::rho;
    out.rho_ordinal = static_cast<int>(k.value);
    return out;
  }
  if (t.text == "inv") {
    Token open = lex.take();
    if (open.kind != Token::Kind::lparen) throw ParseError(open.offset, "expected '(' after inv");
    out.kind = DiffeoSyntax::Kind::inverse;
    out.children.push_back(parse_dexpr(lex));
    Token close = lex.take();
    if (close.kind != Token::Kind::rparen) throw ParseError(close.offset, "expected ')'");
    return out;
  }
  if (t.text == "conj") {
    Token open = lex.take();
    if (open.kind != Token::Kind::lparen) throw ParseError(open.offset, "expected '(' after conj");
    Token name = lex.take();
    if (name.kind != Token::Kind::ident) throw ParseError(name.offset, "expected automorphism name");
    Token comma = lex.take();
    if (comma.kind != Token::Kind::comma) throw ParseError(comma.offset, "expected ','");
    out.kind = DiffeoSyntax::Kind::conj;
    out.conj_name = name.text;
    out.children.push_back(parse_dexpr(lex));
    Token close = lex.take();
    if (close.kind != Token::Kind::rparen) throw ParseError(close.offset, "expected ')'");
    return out;
  }
  throw ParseError(t.offset, "unknown diffeomorphism '" + t.text + "'");
}

inline DiffeoSyntax parse_dterm(Lexer& lex) {
  DiffeoSyntax left = parse_dfactor(lex);
  while (lex.peek().kind == Token::Kind::hash) {
    std::size_t off = lex.take().offset;
    DiffeoSyntax right = parse_dfactor(lex);
    DiffeoSyntax sum;
    sum.kind = DiffeoSyntax::Kind::conn_sum;
    sum.offset = off;
    sum.children.push_back(std::move(left));
    sum.children.push_back(std::move(right));
    left = std::move(sum);
  }
  return left;
}

inline DiffeoSyntax parse_dexpr(Lexer& lex) {
  DiffeoSyntax left = parse_dterm(lex);
  while (lex.peek().kind == Token::Kind::star) {
    std::size_t off = lex.take().offset;
    DiffeoSyntax right = parse_dterm(lex);
    DiffeoSyntax comp;
    comp.kind = DiffeoSyntax::Kind::compose;
    comp.offset = off;
    comp.children.push_back(std::move(left));
    comp.children.push_back(std::move(right));
    left = std::move(comp);
  }
  return left;
}

// Connected-sum syntax splits the ambient segment with the rightmost atom
// going to the right factor.
inline DiffeoExpr elaborate(const DiffeoSyntax& syn, const ManifoldExpr& segment,
                            const AutomorphismTable& autos) {
  switch (syn.kind) {
    case DiffeoSyntax::Kind::id:
      return DiffeoExpr::identity(segment);
    case DiffeoSyntax::Kind::rho: {
      try {
        return DiffeoExpr::rho(segment, syn.rho_ordinal);
      } catch (const Error& e) {
        throw ParseError(syn.offset, e.what());
      }
    }
    case DiffeoSyntax::Kind::conn_sum: {
      if (segment.summands().size() < 2)
        throw ParseError(syn.offset, "cannot split a single summand with '#'");
      std::vector<Atom> left_atoms(segment.summands().begin(), segment.summands().end() - 1);
      std::vector<Atom> right_atoms{segment.summands().back()};
      ManifoldExpr left_seg(std::move(left_atoms));
      ManifoldExpr right_seg(std::move(right_atoms));
      DiffeoExpr l = elaborate(syn.children[0], left_seg, autos);
      DiffeoExpr r = elaborate(syn.children[1], right_seg, autos);
      return DiffeoExpr::connected_sum(l, r);
    }
    case DiffeoSyntax::Kind::compose: {
      DiffeoExpr l = elaborate(syn.children[0], segment, autos);
      DiffeoExpr r = elaborate(syn.children[1], segment, autos);
      return DiffeoExpr::compose(l, r);
    }
    case DiffeoSyntax::Kind::inverse:
      return DiffeoExpr::inverse(elaborate(syn.children[0], segment, autos));
    case DiffeoSyntax::Kind::conj: {
      auto it = autos.find(syn.conj_name);
      if (it == autos.end())
        throw ParseError(syn.offset, "automorphism '" + syn.conj_name + "' not in the side table");
      ManifoldExpr inner_seg =
          it->second.inner_manifold ? parse_manifold(*it->second.inner_manifold) : segment;
      DiffeoExpr inner = elaborate(syn.children[0], inner_seg, autos);
      try {
        LatticeAutomorphism psi = make_automorphism(segment.lattice(), it->second.matrix);
        return DiffeoExpr::relabel(segment, std::move(psi), inner, syn.conj_name);
      } catch (const Error& e) {
        throw ParseError(syn.offset, e.what());
      }
    }
  }
  fail(Errc::internal, "unreachable diffeo syntax kind");
}

}  // namespace detail

// Grammar: dexpr := dterm ('*' dterm)*, dterm := dfactor ('#' dfactor)*,
// dfactor := id | rho@K | inv(dexpr) | conj(NAME, dexpr) | '(' dexpr ')'.
inline DiffeoExpr parse_diffeo(const std::string& text, const ManifoldExpr& ambient,
                               const AutomorphismTable& autos = {}) {
  detail::Lexer lex(text);
  detail::DiffeoSyntax syn = detail::parse_dexpr(lex);
  detail::Token t = lex.take();
  if (t.kind != detail::Token::Kind::end) throw ParseError(t.offset, "trailing input after expression");
  return detail::elaborate(syn, ambient, autos);
}

}  // namespace swfam
