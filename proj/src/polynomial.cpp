#include "sublap/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace sublap {

Polynomial::Polynomial(int n, std::vector<Monomial> terms) : n_(n), terms_(std::move(terms)) {
  for (auto& t : terms_) {
    if (static_cast<int>(t.powers.size()) != n_) {
      throw Error(ErrorKind::Input, "monomial with " + std::to_string(t.powers.size()) +
                                        " exponents in dimension " + std::to_string(n_));
    }
    for (int p : t.powers) {
      if (p < 0) throw Error(ErrorKind::Input, "negative exponent in monomial");
    }
  }
}

double Polynomial::operator()(const Vec& q) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double m = t.coef;
    for (int a = 0; a < n_; ++a) {
      if (t.powers[static_cast<size_t>(a)]) m *= std::pow(q(a), t.powers[static_cast<size_t>(a)]);
    }
    sum += m;
  }
  return sum;
}

Vec Polynomial::gradient(const Vec& q) const {
  Vec g = Vec::Zero(n_);
  for (const auto& t : terms_) {
    for (int b = 0; b < n_; ++b) {
      const int pb = t.powers[static_cast<size_t>(b)];
      if (pb == 0) continue;
      double m = t.coef * pb;
      for (int a = 0; a < n_; ++a) {
        const int pa = t.powers[static_cast<size_t>(a)] - (a == b ? 1 : 0);
        if (pa) m *= std::pow(q(a), pa);
      }
      g(b) += m;
    }
  }
  return g;
}

ScalarFunction Polynomial::as_function() const {
  return {[p = *this](const Vec& q) { return p(q); },
          [p = *this](const Vec& q) { return p.gradient(q); }};
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, int n) : text_(text), n_(n) {}

  Polynomial parse() {
    std::vector<Monomial> terms;
    skip();
    if (at_end()) fail("empty expression");
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = take() == '-' ? -1.0 : 1.0;
    }
    terms.push_back(term(sign));
    while (true) {
      skip();
      if (at_end()) break;
      char op = take();
      if (op != '+' && op != '-') fail(std::string("unexpected '") + op + "'");
      terms.push_back(term(op == '-' ? -1.0 : 1.0));
    }
    return Polynomial(n_, std::move(terms));
  }

 private:
  Monomial term(double sign) {
    Monomial m{sign, std::vector<int>(static_cast<size_t>(n_), 0)};
    factor(m);
    while (true) {
      skip();
      if (at_end() || peek() != '*') break;
      take();
      factor(m);
    }
    return m;
  }

  void factor(Monomial& m) {
    skip();
    if (at_end()) fail("expected a factor");
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<size_t>(end - begin);
      m.coef *= v;
      return;
    }
    int var = variable();
    int power = 1;
    skip();
    if (!at_end() && peek() == '^') {
      take();
      skip();
      size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) take();
      if (start == pos_) fail("expected integer exponent");
      power = std::stoi(text_.substr(start, pos_ - start));
    }
    m.powers[static_cast<size_t>(var)] += power;
  }

  int variable() {
    char c = take();
    int index = -1;
    if (c == 'q') {
      size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) take();
      if (start == pos_) fail("expected index after 'q'");
      index = std::stoi(text_.substr(start, pos_ - start)) - 1;
    } else if (c == 'x') {
      index = 0;
    } else if (c == 'y') {
      index = 1;
    } else if (c == 'z') {
      index = 2;
    } else if (c == 'w') {
      index = 3;
    } else {
      fail(std::string("unknown variable '") + c + "'");
    }
    if (index < 0 || index >= n_) fail("variable outside chart dimension");
    return index;
  }

  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() { return text_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Input, "polynomial '" + text_ + "' at column " +
                                      std::to_string(pos_ + 1) + ": " + what);
  }

  const std::string& text_;
  int n_;
  size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(const std::string& text, int n) { return Parser(text, n).parse(); }

}  // namespace sublap
