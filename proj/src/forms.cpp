#include "sublap/forms.hpp"

#include "sublap/structure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace sublap {

namespace {

// Sign of the permutation sorting the concatenation (A, B) of two disjoint sorted sets.
int merge_sign(unsigned a, unsigned b) {
  int inversions = 0;
  for (unsigned rest = a; rest; rest &= rest - 1) {
    const int i = std::countr_zero(rest);
    inversions += std::popcount(b & ((1u << i) - 1u));
  }
  return (inversions & 1) ? -1 : 1;
}

// Sorted mask and permutation sign of an ordered index list; mask 0 and sign 0 on repeats.
std::pair<unsigned, int> sort_indices(const std::vector<int>& indices, int n) {
  std::vector<int> idx = indices;
  int sign = 1;
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= n) throw Error(ErrorKind::Input, "form index out of range");
    for (size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return {0u, 0};
      if (idx[i] > idx[j]) sign = -sign;
    }
  }
  unsigned mask = 0;
  for (int i : idx) mask |= 1u << i;
  return {mask, sign};
}

template <typename F>
void for_each_mask(int n, int p, F&& f) {
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) == p) f(mask);
  }
}

}  // namespace

Form::Form(int n, int degree) : n_(n), p_(degree) {
  if (n < 1 || n > 8 || degree < 0 || degree > n) {
    throw Error(ErrorKind::Input, "form of degree " + std::to_string(degree) + " in dimension " +
                                      std::to_string(n));
  }
}

Form Form::one_form(const Vec& coeffs) {
  Form f(static_cast<int>(coeffs.size()), 1);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) f.c_[1u << i] = coeffs(i);
  return f;
}

Form Form::two_form(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  Form f(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) f.c_[(1u << i) | (1u << j)] = a(i, j);
  }
  return f;
}

double Form::component(std::initializer_list<int> indices) const {
  return component(std::vector<int>(indices));
}

double Form::component(const std::vector<int>& indices) const {
  if (static_cast<int>(indices.size()) != p_) throw Error(ErrorKind::Input, "index count");
  auto [mask, sign] = sort_indices(indices, n_);
  return sign == 0 ? 0.0 : sign * c_[mask];
}

void Form::set_component(const std::vector<int>& indices, double value) {
  if (static_cast<int>(indices.size()) != p_) throw Error(ErrorKind::Input, "index count");
  auto [mask, sign] = sort_indices(indices, n_);
  if (sign == 0) throw Error(ErrorKind::Input, "repeated index in form component");
  c_[mask] = sign * value;
}

double Form::evaluate(const std::vector<Vec>& vectors) const {
  if (static_cast<int>(vectors.size()) != p_) throw Error(ErrorKind::Input, "argument count");
  if (p_ == 0) return c_[0];
  double sum = 0.0;
  Eigen::MatrixXd sub(p_, p_);
  for_each_mask(n_, p_, [&](unsigned mask) {
    if (c_[mask] == 0.0) return;
    int row = 0;
    for (unsigned rest = mask; rest; rest &= rest - 1, ++row) {
      const int i = std::countr_zero(rest);
      for (int col = 0; col < p_; ++col) sub(row, col) = vectors[static_cast<size_t>(col)](i);
    }
    sum += c_[mask] * sub.determinant();
  });
  return sum;
}

Mat Form::to_matrix() const {
  if (p_ != 2) throw Error(ErrorKind::Input, "to_matrix needs a 2-form");
  Mat a = Mat::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      a(i, j) = c_[(1u << i) | (1u << j)];
      a(j, i) = -a(i, j);
    }
  }
  return a;
}

double Form::max_abs() const {
  double m = 0.0;
  for_each_mask(n_, p_, [&](unsigned mask) { m = std::max(m, std::abs(c_[mask])); });
  return m;
}

Form& Form::operator+=(const Form& other) {
  if (other.n_ != n_ || other.p_ != p_) throw Error(ErrorKind::Input, "form shape mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
  return *this;
}

Form& Form::operator-=(const Form& other) {
  if (other.n_ != n_ || other.p_ != p_) throw Error(ErrorKind::Input, "form shape mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
  return *this;
}

Form& Form::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }
Form operator*(double s, Form a) { return a *= s; }

Form wedge(const Form& a, const Form& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::Input, "wedge of forms in different dimensions");
  const int n = a.dim();
  if (a.degree() + b.degree() > n) throw Error(ErrorKind::Input, "wedge degree exceeds dimension");
  Form out(n, a.degree() + b.degree());
  for_each_mask(n, a.degree(), [&](unsigned ma) {
    if (a.at_mask(ma) == 0.0) return;
    for_each_mask(n, b.degree(), [&](unsigned mb) {
      if ((ma & mb) || b.at_mask(mb) == 0.0) return;
      out.at_mask(ma | mb) += merge_sign(ma, mb) * a.at_mask(ma) * b.at_mask(mb);
    });
  });
  return out;
}

Form interior(const Vec& x, const Form& omega) {
  const int n = omega.dim();
  const int p = omega.degree();
  if (p == 0) throw Error(ErrorKind::Input, "interior product of a 0-form");
  Form out(n, p - 1);
  for_each_mask(n, p - 1, [&](unsigned mj) {
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
      if (mj & (1u << a)) continue;
      // omega(e_a, e_J) = (-1)^{#{j in J : j < a}} omega_{J u a}
      const int before = std::popcount(mj & ((1u << a) - 1u));
      sum += ((before & 1) ? -1.0 : 1.0) * x(a) * omega.at_mask(mj | (1u << a));
    }
    out.at_mask(mj) = sum;
  });
  return out;
}

Form exterior_d(const FormField& field, const Vec& q, double base_step) {
  const Form center = field(q);
  const int n = center.dim();
  const int p = center.degree();
  if (p >= n) throw Error(ErrorKind::Input, "exterior derivative of a top-degree form");
  const double h = fd_step(q, base_step);

  std::vector<Form> partial;
  partial.reserve(static_cast<size_t>(n));
  Vec x = q;
  for (int b = 0; b < n; ++b) {
    auto at = [&](double t) {
      x(b) = q(b) + t;
      Form f = field(x);
      x(b) = q(b);
      return f;
    };
    Form d = at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h);
    d *= 1.0 / (12 * h);
    partial.push_back(d);
  }

  Form out(n, p + 1);
  for_each_mask(n, p + 1, [&](unsigned mask) {
    double sum = 0.0;
    int position = 0;
    for (unsigned rest = mask; rest; rest &= rest - 1, ++position) {
      const int b = std::countr_zero(rest);
      const double term = partial[static_cast<size_t>(b)].at_mask(mask & ~(1u << b));
      sum += (position & 1) ? -term : term;
    }
    out.at_mask(mask) = sum;
  });
  for_each_mask(n, p + 1, [&](unsigned mask) {
    if (!std::isfinite(out.at_mask(mask))) {
      throw Error(ErrorKind::Evaluation, "non-finite exterior derivative at " + format_point(q));
    }
  });
  return out;
}

Form exterior_d_scalar(const std::function<double(const Vec&)>& f, const Vec& q,
                       double base_step) {
  const int n = static_cast<int>(q.size());
  return exterior_d(
      [&f, n](const Vec& x) {
        Form zero(n, 0);
        zero.at_mask(0) = f(x);
        return zero;
      },
      q, base_step);
}

}  // namespace sublap
