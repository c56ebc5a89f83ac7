#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gradbif {

enum class DomainKind { interval, rectangle };

/// Axis-aligned box with a uniform interior grid of `n` nodes per axis.
///
/// Boundary nodes are not stored; the Dirichlet value there is always 0.
/// For rectangles the node layout is row-major with x outer, y inner:
/// node (i, j) lives at index i * n + j.
struct DomainSpec {
  DomainKind kind = DomainKind::interval;
  double ax = 0.0;
  double bx = 1.0;
  double ay = 0.0;  // rectangle only
  double by = 1.0;  // rectangle only
  int n = 3;

  static DomainSpec interval(double a, double b, int n);
  static DomainSpec rectangle(double ax, double bx, double ay, double by, int n);

  int dim() const { return kind == DomainKind::interval ? 1 : 2; }
  std::size_t size() const;
  double hx() const { return (bx - ax) / (n + 1); }
  double hy() const { return dim() == 2 ? (by - ay) / (n + 1) : 0.0; }
  double min_h() const;

  /// Throws std::invalid_argument unless a < b on every axis and n >= 3.
  void validate() const;

  /// Same domain with n replaced.
  DomainSpec refined(int new_n) const;

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Node coordinates and mesh widths of a validated domain.
class Grid {
 public:
  explicit Grid(const DomainSpec& domain);

  const DomainSpec& domain() const { return domain_; }
  std::size_t size() const { return x_.size(); }
  double hx() const { return domain_.hx(); }
  double hy() const { return domain_.hy(); }
  double x(std::size_t node) const { return x_[node]; }
  double y(std::size_t node) const { return y_[node]; }
  std::span<const double> xs() const { return x_; }
  std::span<const double> ys() const { return y_; }

 private:
  DomainSpec domain_;
  std::vector<double> x_;
  std::vector<double> y_;
};

Grid build_grid(const DomainSpec& domain);

/// Interior node values of a function vanishing on the boundary.
class ScalarField {
 public:
  ScalarField() = default;
  /// Throws std::invalid_argument on a size mismatch or a non-finite value.
  ScalarField(DomainSpec domain, std::vector<double> values);

  static ScalarField zeros(const DomainSpec& domain);
  static ScalarField constant(const DomainSpec& domain, double value);

  /// Samples fn(x, y) at every interior node (y is 0 on intervals).
  template <class Fn>
  static ScalarField from_function(const DomainSpec& domain, Fn&& fn) {
    const Grid grid(domain);
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid.x(k), grid.y(k));
    return ScalarField(domain, std::move(v));
  }

  const DomainSpec& domain() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }

  double sup_norm() const;
  double max() const;
  double min() const;
  /// Value at the node closest to the domain center.
  double center_value() const;

  ScalarField scaled(double factor) const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  DomainSpec domain_;
  std::vector<double> values_;
};

/// Centered second-order -Δ (3-point / 5-point) with zero ghost values.
ScalarField neg_laplacian(const ScalarField& u);

/// |∇u|^p with centered differences; p must lie in (0, 2].
ScalarField gradient_p(const ScalarField& u, double p);

/// Exact distance from every interior node to the box boundary.
ScalarField boundary_distance(const DomainSpec& domain);

/// Index of the interior node closest to the domain center.
std::size_t center_node(const DomainSpec& domain);

namespace stencil {

// Raw-span kernels shared by the solvers. `u` and `out` have domain.size()
// entries; nothing is validated here.
void neg_laplacian(const DomainSpec& domain, std::span<const double> u,
                   std::span<double> out);
/// Σ_j |A_ij u_j|, the rounding scale of the discrete Laplacian at node i.
void neg_laplacian_magnitude(const DomainSpec& domain, std::span<const double> u,
                             std::span<double> out);
void gradient(const DomainSpec& domain, std::span<const double> u,
              std::span<double> gx, std::span<double> gy);
void gradient_p(const DomainSpec& domain, std::span<const double> u, double p,
                std::span<double> out);

}  // namespace stencil

/// Formats with 17 significant digits (round-trips doubles exactly).
std::string format_real(double value);

/// CSV with header `x,value` or `x,y,value`, one row per interior node.
void write_field_csv(std::ostream& os, const ScalarField& field);
void write_field_csv(const std::string& path, const ScalarField& field);
/// Reads a field written by write_field_csv; node coordinates must match.
ScalarField read_field_csv(std::istream& is, const DomainSpec& domain);
ScalarField read_field_csv(const std::string& path, const DomainSpec& domain);

}  // namespace gradbif
