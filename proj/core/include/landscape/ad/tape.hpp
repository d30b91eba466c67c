#pragma once

// Reverse-mode automatic differentiation on an explicit Wengert list.
//
// A Var<T> is a handle into a Tape<T>. Every operation appends one node that
// stores the indices of its (at most two) operands and the local partial
// derivatives. Reverse accumulation walks the list once from the output.
//
// T is the scalar carried by primals, partials and adjoints. With T = double
// the sweep yields a gradient; with T = Dual and inputs seeded with a tangent
// direction, the tangent parts of the adjoints are a Hessian-vector product.

#include <cstdint>
#include <span>
#include <vector>

#include "landscape/ad/dual.hpp"

namespace landscape::ad {

template <class T>
class Tape;

template <class T>
struct Var {
  static constexpr std::int64_t kConstant = -1;

  Tape<T>* tape = nullptr;
  std::int64_t index = kConstant;
  T value{};

  Var() = default;
  Var(double c) : value(c) {}  // NOLINT(google-explicit-constructor)
  Var(Tape<T>* t, std::int64_t i, T v) : tape(t), index(i), value(v) {}

  [[nodiscard]] bool is_constant() const { return index == kConstant; }
};

template <class T>
class Tape {
 public:
  struct Node {
    std::int64_t lhs;
    std::int64_t rhs;
    T dlhs;
    T drhs;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void reserve(std::size_t n) { nodes_.reserve(n); }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }

  Var<T> variable(T value) {
    nodes_.push_back({Var<T>::kConstant, Var<T>::kConstant, T{}, T{}});
    return {this, static_cast<std::int64_t>(nodes_.size() - 1), value};
  }

  Var<T> unary(T value, const Var<T>& a, T da) {
    if (a.is_constant()) return constant(value);
    nodes_.push_back({a.index, Var<T>::kConstant, da, T{}});
    return {this, static_cast<std::int64_t>(nodes_.size() - 1), value};
  }

  Var<T> binary(T value, const Var<T>& a, T da, const Var<T>& b, T db) {
    if (a.is_constant()) return unary(value, b, db);
    if (b.is_constant()) return unary(value, a, da);
    nodes_.push_back({a.index, b.index, da, db});
    return {this, static_cast<std::int64_t>(nodes_.size() - 1), value};
  }

  /// Adjoints of the first n_inputs nodes (the independent variables, which
  /// must be created before any operation) with respect to `out`.
  std::vector<T> gradient(const Var<T>& out, std::size_t n_inputs) const {
    std::vector<T> result(n_inputs, T{});
    if (out.is_constant()) return result;
    std::vector<T> adj(static_cast<std::size_t>(out.index) + 1, T{});
    adj[static_cast<std::size_t>(out.index)] = T{1.0};
    for (std::int64_t i = out.index; i >= 0; --i) {
      const auto& node = nodes_[static_cast<std::size_t>(i)];
      const T& a = adj[static_cast<std::size_t>(i)];
      if (node.lhs != Var<T>::kConstant) adj[static_cast<std::size_t>(node.lhs)] += node.dlhs * a;
      if (node.rhs != Var<T>::kConstant) adj[static_cast<std::size_t>(node.rhs)] += node.drhs * a;
    }
    for (std::size_t i = 0; i < n_inputs && i < adj.size(); ++i) result[i] = adj[i];
    return result;
  }

 private:
  static Var<T> constant(T value) {
    Var<T> v;
    v.value = value;
    return v;
  }

  std::vector<Node> nodes_;
};

namespace detail {
template <class T>
Tape<T>* tape_of(const Var<T>& a, const Var<T>& b) {
  return a.tape != nullptr ? a.tape : b.tape;
}
}  // namespace detail

template <class T>
Var<T> operator+(const Var<T>& a, const Var<T>& b) {
  auto* t = detail::tape_of(a, b);
  if (t == nullptr) return Var<T>(t, Var<T>::kConstant, a.value + b.value);
  return t->binary(a.value + b.value, a, T{1.0}, b, T{1.0});
}

template <class T>
Var<T> operator-(const Var<T>& a, const Var<T>& b) {
  auto* t = detail::tape_of(a, b);
  if (t == nullptr) return Var<T>(t, Var<T>::kConstant, a.value - b.value);
  return t->binary(a.value - b.value, a, T{1.0}, b, T{-1.0});
}

template <class T>
Var<T> operator*(const Var<T>& a, const Var<T>& b) {
  auto* t = detail::tape_of(a, b);
  if (t == nullptr) return Var<T>(t, Var<T>::kConstant, a.value * b.value);
  return t->binary(a.value * b.value, a, b.value, b, a.value);
}

template <class T>
Var<T> operator/(const Var<T>& a, const Var<T>& b) {
  const T q = a.value / b.value;
  auto* t = detail::tape_of(a, b);
  if (t == nullptr) return Var<T>(t, Var<T>::kConstant, q);
  const T inv = T{1.0} / b.value;
  return t->binary(q, a, inv, b, -(q * inv));
}

template <class T>
Var<T> operator-(const Var<T>& a) {
  if (a.tape == nullptr) return Var<T>(nullptr, Var<T>::kConstant, -a.value);
  return a.tape->unary(-a.value, a, T{-1.0});
}

template <class T>
Var<T> operator+(const Var<T>& a, double c) { return a + Var<T>(c); }
template <class T>
Var<T> operator+(double c, const Var<T>& a) { return Var<T>(c) + a; }
template <class T>
Var<T> operator-(const Var<T>& a, double c) { return a - Var<T>(c); }
template <class T>
Var<T> operator-(double c, const Var<T>& a) { return Var<T>(c) - a; }
template <class T>
Var<T> operator*(const Var<T>& a, double c) { return a * Var<T>(c); }
template <class T>
Var<T> operator*(double c, const Var<T>& a) { return Var<T>(c) * a; }
template <class T>
Var<T> operator/(double c, const Var<T>& a) { return Var<T>(c) / a; }
template <class T>
Var<T> operator/(const Var<T>& a, double c) { return a / Var<T>(c); }

template <class T>
Var<T>& operator+=(Var<T>& a, const Var<T>& b) {
  a = a + b;
  return a;
}

template <class T>
Var<T> exp(const Var<T>& a) {
  using std::exp;
  const T e = exp(a.value);
  if (a.tape == nullptr) return Var<T>(nullptr, Var<T>::kConstant, e);
  return a.tape->unary(e, a, e);
}

template <class T>
Var<T> tanh(const Var<T>& a) {
  using std::tanh;
  const T th = tanh(a.value);
  if (a.tape == nullptr) return Var<T>(nullptr, Var<T>::kConstant, th);
  return a.tape->unary(th, a, T{1.0} - th * th);
}

template <class T>
Var<T> ipow(const Var<T>& a, int n) {
  if (n == 0) return Var<T>(1.0);
  const T lower = ipow(a.value, n - 1);
  const T value = lower * a.value;
  if (a.tape == nullptr) return Var<T>(nullptr, Var<T>::kConstant, value);
  return a.tape->unary(value, a, T{static_cast<double>(n)} * lower);
}

template <class T>
double primal(const Var<T>& a) {
  return primal(a.value);
}

}  // namespace landscape::ad
