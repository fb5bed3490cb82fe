#include "curvflow/curvature_function.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "curvflow/errors.hpp"

namespace curvflow {
namespace detail {

struct Node {
  virtual ~Node() = default;
  virtual double value(std::span<const double> x) const = 0;
  /// Writes the gradient into g (same length as x) and returns the value.
  virtual double value_grad(std::span<const double> x, std::span<double> g) const = 0;
  virtual std::string spec() const = 0;
};

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct ArithmeticMean final : Node {
  double value(std::span<const double> x) const override {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
  }
  double value_grad(std::span<const double> x, std::span<double> g) const override {
    const double w = 1.0 / static_cast<double>(x.size());
    for (auto& gi : g) gi = w;
    return value(x);
  }
  std::string spec() const override { return "arithmetic-mean"; }
};

struct PowerMean final : Node {
  explicit PowerMean(double p) : p(p) {}
  double p;

  double value(std::span<const double> x) const override {
    double s = 0.0;
    for (double v : x) s += std::pow(v, p);
    return std::pow(s / static_cast<double>(x.size()), 1.0 / p);
  }
  double value_grad(std::span<const double> x, std::span<double> g) const override {
    const double f = value(x);
    // df/dx_i = f^(1-p) x_i^(p-1) / n
    const double scale = std::pow(f, 1.0 - p) / static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = scale * std::pow(x[i], p - 1.0);
    return f;
  }
  std::string spec() const override { return "power-mean(" + format_number(p) + ")"; }
};

/// sigma_k of x with entry `skip` removed (skip = -1 keeps everything).
double elementary_symmetric(std::span<const double> x, int k, int skip) {
  std::array<double, kMaxDimension + 1> e{};
  e[0] = 1.0;
  int used = 0;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    if (i == skip) continue;
    ++used;
    for (int j = std::min(used, k); j >= 1; --j) e[j] += x[i] * e[j - 1];
  }
  return k <= used ? e[k] : 0.0;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

struct EkRoot final : Node {
  EkRoot(int k, int n) : k(k), norm(binomial(n, k)) {}
  int k;
  double norm;

  double value(std::span<const double> x) const override {
    return std::pow(elementary_symmetric(x, k, -1) / norm, 1.0 / k);
  }
  double value_grad(std::span<const double> x, std::span<double> g) const override {
    const double sk = elementary_symmetric(x, k, -1);
    const double f = std::pow(sk / norm, 1.0 / k);
    // d sigma_k / dx_i = sigma_{k-1}(x without i)
    const double scale = f / (static_cast<double>(k) * sk);
    for (int i = 0; i < static_cast<int>(x.size()); ++i)
      g[i] = scale * elementary_symmetric(x, k - 1, i);
    return f;
  }
  std::string spec() const override { return "ek-root(" + std::to_string(k) + ")"; }
};

struct GaussRoot final : Node {
  double value(std::span<const double> x) const override {
    // Sum of logs keeps the product from over/underflowing for large n.
    double s = 0.0;
    for (double v : x) s += std::log(v);
    return std::exp(s / static_cast<double>(x.size()));
  }
  double value_grad(std::span<const double> x, std::span<double> g) const override {
    const double f = value(x);
    const double w = f / static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = w / x[i];
    return f;
  }
  std::string spec() const override { return "gauss-root"; }
};

struct Blend final : Node {
  Blend(std::shared_ptr<const Node> a, std::shared_ptr<const Node> b, double s)
      : a(std::move(a)), b(std::move(b)), s(s) {}
  std::shared_ptr<const Node> a, b;
  double s;

  double value(std::span<const double> x) const override {
    if (s == 1.0) return a->value(x);
    if (s == 0.0) return b->value(x);
    return std::pow(a->value(x), s) * std::pow(b->value(x), 1.0 - s);
  }
  double value_grad(std::span<const double> x, std::span<double> g) const override {
    if (s == 1.0) return a->value_grad(x, g);
    if (s == 0.0) return b->value_grad(x, g);
    std::array<double, kMaxDimension> ga{}, gb{};
    const std::size_t n = x.size();
    const double fa = a->value_grad(x, std::span<double>(ga.data(), n));
    const double fb = b->value_grad(x, std::span<double>(gb.data(), n));
    const double f = std::pow(fa, s) * std::pow(fb, 1.0 - s);
    for (std::size_t i = 0; i < n; ++i) g[i] = f * (s * ga[i] / fa + (1.0 - s) * gb[i] / fb);
    return f;
  }
  std::string spec() const override {
    return "blend(" + a->spec() + "," + b->spec() + "," + format_number(s) + ")";
  }
};

/// f*(x) = 1 / f(1/x).
struct Dual final : Node {
  explicit Dual(std::shared_ptr<const Node> inner) : inner(std::move(inner)) {}
  std::shared_ptr<const Node> inner;

  double value(std::span<const double> x) const override {
    std::array<double, kMaxDimension> inv;
    for (std::size_t i = 0; i < x.size(); ++i) inv[i] = 1.0 / x[i];
    return 1.0 / inner->value(std::span<const double>(inv.data(), x.size()));
  }
  double value_grad(std::span<const double> x, std::span<double> g) const override {
    std::array<double, kMaxDimension> inv, gi;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) inv[i] = 1.0 / x[i];
    const double fi = inner->value_grad(std::span<const double>(inv.data(), n),
                                        std::span<double>(gi.data(), n));
    // d/dx_i [1/f(1/x)] = f(1/x)^-2 * fdot_i(1/x) / x_i^2
    const double w = 1.0 / (fi * fi);
    for (std::size_t i = 0; i < n; ++i) g[i] = w * gi[i] * inv[i] * inv[i];
    return 1.0 / fi;
  }
  std::string spec() const override { return "dual(" + inner->spec() + ")"; }
};

struct Custom final : Node {
  Custom(std::string name, CurvatureFunction::ValueFn v, CurvatureFunction::GradFn g)
      : name(std::move(name)), v(std::move(v)), g(std::move(g)) {}
  std::string name;
  CurvatureFunction::ValueFn v;
  CurvatureFunction::GradFn g;

  double value(std::span<const double> x) const override { return v(x); }
  double value_grad(std::span<const double> x, std::span<double> out) const override {
    return g(x, out);
  }
  std::string spec() const override { return name; }
};

// Recursive-descent parser for the registry grammar. Whitespace is
// stripped up front.
class Parser {
 public:
  Parser(std::string_view text, int n) : n_(n) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) src_.push_back(c);
  }

  std::shared_ptr<const Node> parse_all() {
    auto node = parse_expr();
    if (pos_ != src_.size()) fail("trailing characters");
    return node;
  }

 private:
  std::shared_ptr<const Node> parse_expr() {
    if (accept("arithmetic-mean")) return std::make_shared<ArithmeticMean>();
    if (accept("gauss-root")) return std::make_shared<GaussRoot>();
    if (accept("power-mean(")) {
      const double p = parse_number();
      expect(')');
      if (!(p > 0.0)) throw DomainError("power-mean exponent must be > 0, got " + format_number(p));
      return std::make_shared<PowerMean>(p);
    }
    if (accept("ek-root(")) {
      const double k = parse_number();
      expect(')');
      if (k != std::floor(k) || k < 1.0)
        throw DomainError("ek-root order must be a positive integer, got " + format_number(k));
      if (k > n_)
        throw DomainError("ek-root order k=" + format_number(k) + " exceeds dimension n=" +
                          std::to_string(n_));
      return std::make_shared<EkRoot>(static_cast<int>(k), n_);
    }
    if (accept("blend(")) {
      auto a = parse_expr();
      expect(',');
      auto b = parse_expr();
      expect(',');
      const double s = parse_number();
      expect(')');
      if (!(s >= 0.0 && s <= 1.0))
        throw DomainError("blend weight must lie in [0,1], got " + format_number(s));
      return std::make_shared<Blend>(std::move(a), std::move(b), s);
    }
    fail("expected a registry function");
  }

  double parse_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) fail("expected a decimal literal");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  bool accept(std::string_view token) {
    if (src_.compare(pos_, token.size(), token) == 0) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (pos_ >= src_.size() || src_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("curvature function: " + msg + " at offset " + std::to_string(pos_) +
                     " in \"" + src_ + "\"");
  }

  std::string src_;
  std::size_t pos_ = 0;
  int n_;
};

}  // namespace
}  // namespace detail

CurvatureFunction CurvatureFunction::parse(std::string_view spec, int n) {
  if (n < 1 || n > kMaxDimension)
    throw DomainError("dimension n must lie in [1," + std::to_string(kMaxDimension) + "]");
  detail::Parser parser(spec, n);
  return CurvatureFunction(parser.parse_all(), n, false);
}

CurvatureFunction CurvatureFunction::custom(std::string name, int n, ValueFn value, GradFn grad) {
  if (n < 1 || n > kMaxDimension)
    throw DomainError("dimension n must lie in [1," + std::to_string(kMaxDimension) + "]");
  return CurvatureFunction(
      std::make_shared<detail::Custom>(std::move(name), std::move(value), std::move(grad)), n,
      false);
}

std::string CurvatureFunction::describe() const { return root_->spec(); }

void CurvatureFunction::validate(std::span<const double> lambda) const {
  if (static_cast<int>(lambda.size()) != n_)
    throw DomainError("expected " + std::to_string(n_) + " principal curvatures, got " +
                      std::to_string(lambda.size()));
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i]))
      throw DomainError("principal curvature lambda_" + std::to_string(i + 1) +
                        " = " + detail::format_number(lambda[i]) + " is outside the positive cone");
  }
}

double CurvatureFunction::eval(std::span<const double> lambda) const {
  validate(lambda);
  return root_->value(lambda);
}

double CurvatureFunction::gradient(std::span<const double> lambda, std::span<double> grad) const {
  validate(lambda);
  if (grad.size() != lambda.size()) throw DomainError("gradient buffer has the wrong length");
  return root_->value_grad(lambda, grad);
}

std::vector<double> CurvatureFunction::gradient(std::span<const double> lambda) const {
  std::vector<double> g(lambda.size());
  gradient(lambda, g);
  return g;
}

double CurvatureFunction::eval_unchecked(std::span<const double> lambda) const {
  return root_->value(lambda);
}

double CurvatureFunction::gradient_unchecked(std::span<const double> lambda,
                                             std::span<double> grad) const {
  return root_->value_grad(lambda, grad);
}

CurvatureFunction CurvatureFunction::dual() const {
  return CurvatureFunction(std::make_shared<detail::Dual>(root_), n_, !dual_);
}

}  // namespace curvflow
