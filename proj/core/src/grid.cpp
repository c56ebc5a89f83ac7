#include "gradbif/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gradbif {

DomainSpec DomainSpec::interval(double a, double b, int n) {
  DomainSpec d;
  d.kind = DomainKind::interval;
  d.ax = a;
  d.bx = b;
  d.ay = 0.0;
  d.by = 0.0;
  d.n = n;
  d.validate();
  return d;
}

DomainSpec DomainSpec::rectangle(double ax, double bx, double ay, double by, int n) {
  DomainSpec d;
  d.kind = DomainKind::rectangle;
  d.ax = ax;
  d.bx = bx;
  d.ay = ay;
  d.by = by;
  d.n = n;
  d.validate();
  return d;
}

std::size_t DomainSpec::size() const {
  const auto m = static_cast<std::size_t>(n);
  return dim() == 1 ? m : m * m;
}

double DomainSpec::min_h() const { return dim() == 1 ? hx() : std::min(hx(), hy()); }

void DomainSpec::validate() const {
  if (n < 3) {
    throw std::invalid_argument("domain: need n >= 3 interior nodes per axis, got " +
                                std::to_string(n));
  }
  if (!(std::isfinite(ax) && std::isfinite(bx) && ax < bx)) {
    throw std::invalid_argument("domain: x bounds must satisfy a < b");
  }
  if (kind == DomainKind::rectangle && !(std::isfinite(ay) && std::isfinite(by) && ay < by)) {
    throw std::invalid_argument("domain: y bounds must satisfy a < b");
  }
}

DomainSpec DomainSpec::refined(int new_n) const {
  DomainSpec d = *this;
  d.n = new_n;
  d.validate();
  return d;
}

Grid::Grid(const DomainSpec& domain) : domain_(domain) {
  domain_.validate();
  const int n = domain_.n;
  const double hx = domain_.hx();
  if (domain_.dim() == 1) {
    x_.resize(n);
    y_.assign(n, 0.0);
    for (int i = 0; i < n; ++i) x_[i] = domain_.ax + (i + 1) * hx;
    return;
  }
  const double hy = domain_.hy();
  x_.resize(domain_.size());
  y_.resize(domain_.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      x_[k] = domain_.ax + (i + 1) * hx;
      y_[k] = domain_.ay + (j + 1) * hy;
    }
  }
}

Grid build_grid(const DomainSpec& domain) { return Grid(domain); }

ScalarField::ScalarField(DomainSpec domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  domain_.validate();
  if (values_.size() != domain_.size()) {
    throw std::invalid_argument("field: expected " + std::to_string(domain_.size()) +
                                " node values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("field: non-finite node value");
  }
}

ScalarField ScalarField::zeros(const DomainSpec& domain) { return constant(domain, 0.0); }

ScalarField ScalarField::constant(const DomainSpec& domain, double value) {
  return ScalarField(domain, std::vector<double>(domain.size(), value));
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::center_value() const { return values_[center_node(domain_)]; }

ScalarField ScalarField::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  return ScalarField(domain_, std::move(v));
}

namespace stencil {

void neg_laplacian(const DomainSpec& d, std::span<const double> u, std::span<double> out) {
  const int n = d.n;
  const double ix2 = 1.0 / (d.hx() * d.hx());
  if (d.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const double l = i > 0 ? u[i - 1] : 0.0;
      const double r = i + 1 < n ? u[i + 1] : 0.0;
      out[i] = (2.0 * u[i] - l - r) * ix2;
    }
    return;
  }
  const double iy2 = 1.0 / (d.hy() * d.hy());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      const double w = i > 0 ? u[k - n] : 0.0;
      const double e = i + 1 < n ? u[k + n] : 0.0;
      const double s = j > 0 ? u[k - 1] : 0.0;
      const double nn = j + 1 < n ? u[k + 1] : 0.0;
      out[k] = (2.0 * u[k] - w - e) * ix2 + (2.0 * u[k] - s - nn) * iy2;
    }
  }
}

void neg_laplacian_magnitude(const DomainSpec& d, std::span<const double> u,
                             std::span<double> out) {
  const int n = d.n;
  const double ix2 = 1.0 / (d.hx() * d.hx());
  if (d.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const double l = i > 0 ? std::abs(u[i - 1]) : 0.0;
      const double r = i + 1 < n ? std::abs(u[i + 1]) : 0.0;
      out[i] = (2.0 * std::abs(u[i]) + l + r) * ix2;
    }
    return;
  }
  const double iy2 = 1.0 / (d.hy() * d.hy());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      const double c = 2.0 * std::abs(u[k]);
      const double w = i > 0 ? std::abs(u[k - n]) : 0.0;
      const double e = i + 1 < n ? std::abs(u[k + n]) : 0.0;
      const double s = j > 0 ? std::abs(u[k - 1]) : 0.0;
      const double nn = j + 1 < n ? std::abs(u[k + 1]) : 0.0;
      out[k] = (c + w + e) * ix2 + (c + s + nn) * iy2;
    }
  }
}

void gradient(const DomainSpec& d, std::span<const double> u, std::span<double> gx,
              std::span<double> gy) {
  const int n = d.n;
  const double ihx = 0.5 / d.hx();
  if (d.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const double l = i > 0 ? u[i - 1] : 0.0;
      const double r = i + 1 < n ? u[i + 1] : 0.0;
      gx[i] = (r - l) * ihx;
      if (!gy.empty()) gy[i] = 0.0;
    }
    return;
  }
  const double ihy = 0.5 / d.hy();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      const double w = i > 0 ? u[k - n] : 0.0;
      const double e = i + 1 < n ? u[k + n] : 0.0;
      const double s = j > 0 ? u[k - 1] : 0.0;
      const double nn = j + 1 < n ? u[k + 1] : 0.0;
      gx[k] = (e - w) * ihx;
      gy[k] = (nn - s) * ihy;
    }
  }
}

void gradient_p(const DomainSpec& d, std::span<const double> u, double p,
                std::span<double> out) {
  std::vector<double> gx(u.size()), gy(u.size());
  gradient(d, u, gx, gy);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double norm2 = gx[k] * gx[k] + gy[k] * gy[k];
    // p == 2 avoids a sqrt/pow round trip so the p=2 Jacobian is exact.
    out[k] = p == 2.0 ? norm2 : std::pow(norm2, 0.5 * p);
  }
}

}  // namespace stencil

ScalarField neg_laplacian(const ScalarField& u) {
  std::vector<double> out(u.size());
  stencil::neg_laplacian(u.domain(), u.values(), out);
  return ScalarField(u.domain(), std::move(out));
}

ScalarField gradient_p(const ScalarField& u, double p) {
  if (!(p > 0.0 && p <= 2.0)) {
    throw std::invalid_argument("gradient_p: p must lie in (0, 2], got " + format_real(p));
  }
  std::vector<double> out(u.size());
  stencil::gradient_p(u.domain(), u.values(), p, out);
  return ScalarField(u.domain(), std::move(out));
}

ScalarField boundary_distance(const DomainSpec& domain) {
  return ScalarField::from_function(domain, [&](double x, double y) {
    double d = std::min(x - domain.ax, domain.bx - x);
    if (domain.dim() == 2) d = std::min({d, y - domain.ay, domain.by - y});
    return d;
  });
}

std::size_t center_node(const DomainSpec& domain) {
  const int c = domain.n / 2;  // nearest to the midpoint (upper one for even n)
  if (domain.dim() == 1) return static_cast<std::size_t>(c);
  return static_cast<std::size_t>(c) * domain.n + c;
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_field_csv(std::ostream& os, const ScalarField& field) {
  const Grid grid(field.domain());
  const bool two_d = field.domain().dim() == 2;
  os << (two_d ? "x,y,value\n" : "x,value\n");
  for (std::size_t k = 0; k < field.size(); ++k) {
    os << format_real(grid.x(k)) << ',';
    if (two_d) os << format_real(grid.y(k)) << ',';
    os << format_real(field[k]) << '\n';
  }
}

void write_field_csv(const std::string& path, const ScalarField& field) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_field_csv(os, field);
}

ScalarField read_field_csv(std::istream& is, const DomainSpec& domain) {
  const Grid grid(domain);
  const bool two_d = domain.dim() == 2;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("field csv: empty input");
  std::vector<double> values;
  values.reserve(grid.size());
  const double tol = 1e-9 * domain.min_h();
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0.0, y = 0.0, v = 0.0;
    ls >> x;
    if (two_d) ls >> y;
    ls >> v;
    if (!ls) throw std::runtime_error("field csv: malformed row " + std::to_string(row + 2));
    if (row >= grid.size() || std::abs(x - grid.x(row)) > tol ||
        (two_d && std::abs(y - grid.y(row)) > tol)) {
      throw std::runtime_error("field csv: node " + std::to_string(row) +
                               " does not match the domain grid");
    }
    values.push_back(v);
    ++row;
  }
  return ScalarField(domain, std::move(values));
}

ScalarField read_field_csv(const std::string& path, const DomainSpec& domain) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field_csv(is, domain);
}

}  // namespace gradbif
