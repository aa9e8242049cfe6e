#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fks {

using cplx = std::complex<double>;

// Periodic box [-L/2, L/2)^n sampled at N points per axis, x_j = -L/2 + j h.
struct GridSpec {
    int n = 2;
    int points_per_axis = 128;
    double side_length = 40.0;
    double dealias_fraction = 2.0 / 3.0;

    void validate() const;
    double spacing() const { return side_length / points_per_axis; }
    double cell_volume() const;
    double coordinate(int j) const { return -0.5 * side_length + j * spacing(); }
    std::size_t size() const;           // N^n
    std::size_t spectral_size() const;  // N^{n-1} (N/2 + 1)
    bool operator==(const GridSpec&) const = default;
};

class PhysicalField {
  public:
    PhysicalField() = default;
    explicit PhysicalField(const GridSpec& grid);
    PhysicalField(const GridSpec& grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    bool all_finite() const;

  private:
    GridSpec grid_;
    std::vector<double> values_;
};

// Half spectrum of a real field in r2c layout: the last axis keeps
// k = 0..N/2, the others run over 0..N-1 (k >= N/2 meaning k - N).
// Coefficients follow the continuum convention: rho_hat(xi) ~ int rho e^{-i x.xi} dx.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(const GridSpec& grid);
    SpectralField(const GridSpec& grid, std::vector<cplx> coefficients);

    const GridSpec& grid() const { return grid_; }
    std::vector<cplx>& coefficients() { return coef_; }
    const std::vector<cplx>& coefficients() const { return coef_; }
    cplx& operator[](std::size_t i) { return coef_[i]; }
    cplx operator[](std::size_t i) const { return coef_[i]; }
    std::size_t size() const { return coef_.size(); }

    // Coefficient at an arbitrary integer wavenumber vector, using Hermitian
    // symmetry for the omitted half.
    cplx at(std::span<const int> k) const;

  private:
    GridSpec grid_;
    std::vector<cplx> coef_;
};

// Integer wavenumbers of every stored mode plus derived masks; shared per grid.
class ModeTable {
  public:
    explicit ModeTable(const GridSpec& grid);

    std::size_t size() const { return k2_.size(); }
    int k(std::size_t mode, int axis) const { return k_[mode * n_ + axis]; }
    long k2(std::size_t mode) const { return k2_[mode]; }
    // Component-wise Nyquist: |k_axis| == N/2.
    bool nyquist(std::size_t mode, int axis) const { return std::abs(k(mode, axis)) == half_; }
    bool retained(std::size_t mode) const { return retained_[mode]; }
    // Index of the mode's |k|^2 among the distinct values (sorted ascending).
    std::size_t shell(std::size_t mode) const { return shell_[mode]; }
    const std::vector<long>& shells() const { return shells_; }
    const std::vector<std::size_t>& retained_modes() const { return retained_list_; }
    double wavenumber_unit() const { return unit_; }  // 2 pi / L

  private:
    int n_;
    int half_;
    double unit_;
    std::vector<int> k_;
    std::vector<long> k2_;
    std::vector<char> retained_;
    std::vector<std::size_t> shell_;
    std::vector<long> shells_;
    std::vector<std::size_t> retained_list_;
};

std::shared_ptr<const ModeTable> mode_table(const GridSpec& grid);

// Evaluates a symbol once per distinct |k|^2 and expands it over all modes.
// f receives |xi| (not squared).
std::vector<double> radial_symbol(const GridSpec& grid, const std::function<double(double)>& f);

SpectralField forward(const PhysicalField& f);
// Throws DataError if the input is not Hermitian to 1e-10.
PhysicalField inverse(const SpectralField& F);

double integrate(const PhysicalField& f);
// p >= 1; p = infinity gives the max norm.
double lp_norm(const PhysicalField& f, double p);
// phi(x) = (1 + |x|^2)^{nu/2} - 1, 1 < nu <= 2.
PhysicalField moment_weight(const GridSpec& grid, double nu);

// Samples f(x) at every grid point; x has n components.
PhysicalField sample(const GridSpec& grid, const std::function<double(std::span<const double>)>& f);

// FKS1 raw dump: "FKS1", u32 n, u32 N, f64 L, N^n f64, little endian, row major.
void write_fks1(const std::string& path, const PhysicalField& f);
PhysicalField read_fks1(const std::string& path);

// Value of the trigonometric interpolant of F at an arbitrary point x.
double evaluate_at(const SpectralField& F, std::span<const double> x);

}  // namespace fks
