#pragma once

// Periodic Cartesian grids, staggered field storage and the fine/coarse grid
// pairing used by the two-grid filters.
//
// Index conventions (0-based storage, per axis):
//   cell-centered along an axis:  x = (i + 1/2) h
//   face-located along an axis:   x = (i + 1) h   (right face of cell i)
// A 3D location is described by which axes are face-located: the center has
// none, face(i) has axis i, edge(i, j) has axes i and j.

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dles {

/// Thrown for contract violations that a caller can trigger with bad input.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Grid1D {
    std::size_t n_points;
    double length;

    Grid1D(std::size_t n, double l) : n_points(n), length(l) {
        if (n < 3) {
            throw Error("Grid1D: need at least 3 points, got " + std::to_string(n));
        }
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw Error("Grid1D: domain length must be positive");
        }
    }

    double spacing() const { return length / static_cast<double>(n_points); }
    bool operator==(const Grid1D&) const = default;
};

/// Cubic periodic box [0, L]^3 with N volumes per axis.
struct Grid3D {
    std::size_t n_points;
    double length;

    Grid3D(std::size_t n, double l = 1.0) : n_points(n), length(l) {
        if (n < 3) {
            throw Error("Grid3D: need at least 3 points per axis, got " + std::to_string(n));
        }
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw Error("Grid3D: domain length must be positive");
        }
    }

    double spacing() const { return length / static_cast<double>(n_points); }
    bool operator==(const Grid3D&) const = default;
};

template <int Dim>
using GridFor = std::conditional_t<Dim == 1, Grid1D, Grid3D>;

/// Staggered position inside a reference volume, stored as a bit mask of the
/// face-located axes. edge(i, j) and edge(j, i) are the same value.
class Stagger {
  public:
    constexpr Stagger() = default;

    static constexpr Stagger center() { return Stagger(0); }
    static constexpr Stagger face(int axis) { return Stagger(static_cast<std::uint8_t>(1u << axis)); }
    static constexpr Stagger edge(int a, int b) {
        if (a == b) {
            throw Error("Stagger::edge: axes must differ");
        }
        return Stagger(static_cast<std::uint8_t>((1u << a) | (1u << b)));
    }
    static Stagger from_tag(std::uint8_t tag) {
        if (tag > 6 || std::popcount(tag) > 2) {
            throw Error("Stagger: invalid tag " + std::to_string(tag));
        }
        return Stagger(tag);
    }

    constexpr bool is_face(int axis) const { return (mask_ >> axis) & 1u; }
    constexpr int face_count() const { return std::popcount(mask_); }
    constexpr std::uint8_t tag() const { return mask_; }

    /// Location reached by a staggered difference or interpolation along axis.
    /// Throws when the result leaves the center/face/edge set (a corner).
    Stagger toggled(int axis) const {
        Stagger out(static_cast<std::uint8_t>(mask_ ^ (1u << axis)));
        if (out.face_count() > 2) {
            throw Error("Stagger: operator along axis " + std::to_string(axis + 1) + " maps " +
                        name() + " to a cell corner, which has no field storage");
        }
        return out;
    }

    std::string name() const {
        switch (face_count()) {
        case 0:
            return "center";
        case 1:
            return "face(" + std::to_string(std::countr_zero(mask_) + 1) + ")";
        default: {
            int a = std::countr_zero(mask_);
            int b = 31 - std::countl_zero(static_cast<unsigned>(mask_));
            return "edge(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")";
        }
        }
    }

    constexpr bool operator==(const Stagger&) const = default;

  private:
    constexpr explicit Stagger(std::uint8_t m) : mask_(m) {}
    std::uint8_t mask_ = 0;
};

/// Physical coordinate of storage index i along an axis.
inline double axis_coordinate(std::size_t i, double h, bool face) {
    return face ? static_cast<double>(i + 1) * h : (static_cast<double>(i) + 0.5) * h;
}

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    auto m = static_cast<std::ptrdiff_t>(n);
    auto r = i % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

/// Real periodic field on a (possibly per-axis coarsened) uniform grid.
/// Storage is row-major with axis 0 slowest; no ghost layers.
template <int Dim>
class Field {
    static_assert(Dim == 1 || Dim == 3);

  public:
    using Shape = std::array<std::size_t, Dim>;
    using Index = std::array<std::ptrdiff_t, Dim>;

    Field() = default;

    Field(const Shape& shape, double length, Stagger loc)
        : shape_(shape), length_(length), loc_(loc) {
        for (int a = 0; a < Dim; ++a) {
            if (shape_[a] == 0) {
                throw Error("Field: empty axis");
            }
        }
        if (Dim == 1 && loc_.tag() > 1) {
            throw Error("Field: 1D fields are centered or face-located");
        }
        if (loc_.face_count() > 2) {
            throw Error("Field: corner locations are not supported");
        }
        std::size_t total = 1;
        for (auto s : shape_) {
            total *= s;
        }
        values_.assign(total, 0.0);
    }

    Field(const GridFor<Dim>& g, Stagger loc) : Field(uniform_shape(g.n_points), g.length, loc) {}

    static Field from_function(const GridFor<Dim>& g, Stagger loc,
                               const std::function<double(const std::array<double, Dim>&)>& f) {
        Field out(g, loc);
        out.fill_from(f);
        return out;
    }

    void fill_from(const std::function<double(const std::array<double, Dim>&)>& f) {
        for (std::size_t lin = 0; lin < values_.size(); ++lin) {
            auto idx = unravel(lin);
            std::array<double, Dim> x{};
            for (int a = 0; a < Dim; ++a) {
                x[a] = axis_coordinate(idx[a], spacing(a), loc_.is_face(a));
            }
            values_[lin] = f(x);
        }
    }

    const Shape& shape() const { return shape_; }
    std::size_t extent(int axis) const { return shape_[axis]; }
    std::size_t size() const { return values_.size(); }
    double length() const { return length_; }
    double spacing(int axis) const { return length_ / static_cast<double>(shape_[axis]); }
    Stagger location() const { return loc_; }
    void set_location(Stagger loc) { loc_ = loc; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }

    double& operator[](std::size_t lin) { return values_[lin]; }
    double operator[](std::size_t lin) const { return values_[lin]; }

    /// Periodic access: any integer index is wrapped into range.
    double at(const Index& idx) const { return values_[linear(idx)]; }
    double& at(const Index& idx) { return values_[linear(idx)]; }

    std::size_t linear(const Index& idx) const {
        std::size_t lin = 0;
        for (int a = 0; a < Dim; ++a) {
            lin = lin * shape_[a] + wrap(idx[a], shape_[a]);
        }
        return lin;
    }

    std::array<std::size_t, Dim> unravel(std::size_t lin) const {
        std::array<std::size_t, Dim> idx{};
        for (int a = Dim - 1; a >= 0; --a) {
            idx[a] = lin % shape_[a];
            lin /= shape_[a];
        }
        return idx;
    }

    double coordinate(int axis, std::size_t i) const {
        return axis_coordinate(i, spacing(axis), loc_.is_face(axis));
    }

    /// Same shape, length and location.
    bool same_layout(const Field& o) const {
        return shape_ == o.shape_ && length_ == o.length_ && loc_ == o.loc_;
    }

    bool on_grid(const GridFor<Dim>& g) const {
        return length_ == g.length && shape_ == uniform_shape(g.n_points);
    }

    bool all_finite() const {
        for (double v : values_) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }

    Field& operator+=(const Field& o) {
        check_layout(o);
        for (std::size_t i = 0; i < values_.size(); ++i) {
            values_[i] += o.values_[i];
        }
        return *this;
    }
    Field& operator-=(const Field& o) {
        check_layout(o);
        for (std::size_t i = 0; i < values_.size(); ++i) {
            values_[i] -= o.values_[i];
        }
        return *this;
    }
    Field& operator*=(double s) {
        for (auto& v : values_) {
            v *= s;
        }
        return *this;
    }
    /// this += s * o
    Field& axpy(double s, const Field& o) {
        check_layout(o);
        for (std::size_t i = 0; i < values_.size(); ++i) {
            values_[i] += s * o.values_[i];
        }
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

    static Shape uniform_shape(std::size_t n) {
        Shape s{};
        s.fill(n);
        return s;
    }

  private:
    void check_layout(const Field& o) const {
        if (!same_layout(o)) {
            throw Error("Field: layout mismatch (" + loc_.name() + " vs " + o.loc_.name() + ")");
        }
    }

    Shape shape_{};
    double length_ = 1.0;
    Stagger loc_{};
    std::vector<double> values_;
};

using Field1D = Field<1>;
using Field3D = Field<3>;

/// Staggered velocity: component i lives on face(i).
struct VectorField {
    std::array<Field3D, 3> c;

    VectorField() = default;
    explicit VectorField(const Grid3D& g)
        : c{Field3D(g, Stagger::face(0)), Field3D(g, Stagger::face(1)), Field3D(g, Stagger::face(2))} {}

    Field3D& operator[](int i) { return c[i]; }
    const Field3D& operator[](int i) const { return c[i]; }

    std::size_t n_points() const { return c[0].extent(0); }
    double length() const { return c[0].length(); }
    Grid3D grid() const { return Grid3D(n_points(), length()); }

    VectorField& operator+=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) {
            c[i] += o.c[i];
        }
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) {
            c[i] -= o.c[i];
        }
        return *this;
    }
    VectorField& operator*=(double s) {
        for (auto& f : c) {
            f *= s;
        }
        return *this;
    }
    VectorField& axpy(double s, const VectorField& o) {
        for (int i = 0; i < 3; ++i) {
            c[i].axpy(s, o.c[i]);
        }
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

    bool all_finite() const {
        return c[0].all_finite() && c[1].all_finite() && c[2].all_finite();
    }
};

/// Stress tensor: (i, i) at centers, (i, j) at edge(i, j). Not assumed symmetric.
struct TensorField {
    std::array<Field3D, 9> c;

    TensorField() = default;
    explicit TensorField(const Grid3D& g) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                c[3 * i + j] = Field3D(g, location(i, j));
            }
        }
    }

    static Stagger location(int i, int j) { return i == j ? Stagger::center() : Stagger::edge(i, j); }

    Field3D& operator()(int i, int j) { return c[3 * i + j]; }
    const Field3D& operator()(int i, int j) const { return c[3 * i + j]; }

    std::size_t n_points() const { return c[0].extent(0); }
    double length() const { return c[0].length(); }
    Grid3D grid() const { return Grid3D(n_points(), length()); }

    TensorField& operator+=(const TensorField& o) {
        for (int k = 0; k < 9; ++k) {
            c[k] += o.c[k];
        }
        return *this;
    }
    TensorField& operator-=(const TensorField& o) {
        for (int k = 0; k < 9; ++k) {
            c[k] -= o.c[k];
        }
        return *this;
    }
    TensorField& operator*=(double s) {
        for (auto& f : c) {
            f *= s;
        }
        return *this;
    }
    friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
    friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }

    /// Checks the canonical stagger layout on a single cubic grid.
    bool valid_layout() const {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const auto& f = (*this)(i, j);
                if (f.location() != location(i, j) || !f.same_layout(Field3D(grid(), location(i, j)))) {
                    return false;
                }
            }
        }
        return true;
    }
};

/// Fine grid with spacing h and coarse grid with spacing H = (2n + 1) h.
struct GridPair {
    std::size_t n_fine;
    std::size_t n_coarse;
    std::size_t factor;
    double length;

    std::size_t half_width() const { return (factor - 1) / 2; }
    double fine_spacing() const { return length / static_cast<double>(n_fine); }
    double coarse_spacing() const { return length / static_cast<double>(n_coarse); }

    Grid1D fine_1d() const { return Grid1D(n_fine, length); }
    Grid1D coarse_1d() const { return Grid1D(n_coarse, length); }
    Grid3D fine_3d() const { return Grid3D(n_fine, length); }
    Grid3D coarse_3d() const { return Grid3D(n_coarse, length); }

    /// Fine storage index that sits at the same coordinate as coarse index I
    /// along one axis.
    std::size_t fine_index(std::size_t coarse, bool face) const {
        return factor * coarse + half_width() + (face ? half_width() : 0);
    }

    /// Fine and coarse grids coincide; used to check degenerate limits.
    static GridPair identity(std::size_t n, double length) {
        if (n < 3) {
            throw Error("GridPair::identity: need at least 3 points");
        }
        return GridPair{n, n, 1, length};
    }
};

inline GridPair make_grid_pair(std::size_t n_fine, std::size_t n_coarse, double length) {
    auto fail = [&](const std::string& why) {
        std::ostringstream os;
        os << "make_grid_pair(N_fine=" << n_fine << ", N_coarse=" << n_coarse << "): " << why;
        throw Error(os.str());
    };
    if (n_coarse < 3) {
        fail("coarse grid needs at least 3 points");
    }
    if (!(length > 0.0)) {
        fail("domain length must be positive");
    }
    if (n_fine % n_coarse != 0) {
        fail("compression factor is not an integer");
    }
    std::size_t factor = n_fine / n_coarse;
    if (factor % 2 == 0) {
        fail("compression factor " + std::to_string(factor) + " is even; it must be odd");
    }
    if (factor < 3) {
        fail("compression factor must be at least 3");
    }
    return GridPair{n_fine, n_coarse, factor, length};
}

template <int Dim>
std::array<std::size_t, Dim> coincident_fine_index(const GridPair& pair,
                                                   const std::array<std::size_t, Dim>& coarse,
                                                   Stagger loc) {
    std::array<std::size_t, Dim> out{};
    for (int a = 0; a < Dim; ++a) {
        if (coarse[a] >= pair.n_coarse) {
            throw Error("coincident_fine_index: coarse index out of range");
        }
        out[a] = pair.fine_index(coarse[a], loc.is_face(a));
    }
    return out;
}

} // namespace dles
