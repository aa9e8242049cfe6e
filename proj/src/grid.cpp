#include "fks/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include "fks/errors.hpp"
#include "fks/simd.hpp"

namespace fks {

void GridSpec::validate() const {
    if (n != 2 && n != 3)
        throw ParameterError("GridSpec: n must be 2 or 3");
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
        throw ParameterError("GridSpec: points_per_axis must be even and >= 8");
    if (!(side_length > 0.0) || !std::isfinite(side_length))
        throw ParameterError("GridSpec: side_length must be > 0");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        throw ParameterError("GridSpec: dealias_fraction must lie in (0, 1]");
}

double GridSpec::cell_volume() const { return std::pow(spacing(), n); }

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int a = 0; a < n; ++a)
        s *= static_cast<std::size_t>(points_per_axis);
    return s;
}

std::size_t GridSpec::spectral_size() const {
    std::size_t s = static_cast<std::size_t>(points_per_axis / 2 + 1);
    for (int a = 1; a < n; ++a)
        s *= static_cast<std::size_t>(points_per_axis);
    return s;
}

PhysicalField::PhysicalField(const GridSpec& grid) : grid_(grid), values_(grid.size(), 0.0) {
    grid_.validate();
}

PhysicalField::PhysicalField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size())
        throw ParameterError("PhysicalField: value count does not match the grid");
}

bool PhysicalField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

SpectralField::SpectralField(const GridSpec& grid)
    : grid_(grid), coef_(grid.spectral_size(), cplx(0.0, 0.0)) {
    grid_.validate();
}

SpectralField::SpectralField(const GridSpec& grid, std::vector<cplx> coefficients)
    : grid_(grid), coef_(std::move(coefficients)) {
    grid_.validate();
    if (coef_.size() != grid_.spectral_size())
        throw ParameterError("SpectralField: coefficient count does not match the grid");
}

cplx SpectralField::at(std::span<const int> k) const {
    const int N = grid_.points_per_axis;
    const int n = grid_.n;
    if (static_cast<int>(k.size()) != n)
        throw ParameterError("SpectralField::at: wavenumber has the wrong dimension");
    auto wrap = [N](int v) { return ((v % N) + N) % N; };
    int last = wrap(k[n - 1]);
    bool conj = false;
    int idx[3] = {0, 0, 0};
    if (last > N / 2) {
        conj = true;
        for (int a = 0; a < n; ++a)
            idx[a] = wrap(-k[a]);
    } else {
        for (int a = 0; a < n; ++a)
            idx[a] = wrap(k[a]);
    }
    std::size_t m = 0;
    for (int a = 0; a < n - 1; ++a)
        m = m * N + idx[a];
    m = m * (N / 2 + 1) + idx[n - 1];
    return conj ? std::conj(coef_[m]) : coef_[m];
}

ModeTable::ModeTable(const GridSpec& grid)
    : n_(grid.n), half_(grid.points_per_axis / 2), unit_(2.0 * M_PI / grid.side_length) {
    grid.validate();
    const int N = grid.points_per_axis;
    const std::size_t M = grid.spectral_size();
    const double cut = grid.dealias_fraction * half_;
    k_.resize(M * n_);
    k2_.resize(M);
    retained_.resize(M);
    int idx[3] = {0, 0, 0};
    for (std::size_t m = 0; m < M; ++m) {
        std::size_t r = m;
        idx[n_ - 1] = static_cast<int>(r % (half_ + 1));
        r /= (half_ + 1);
        for (int a = n_ - 2; a >= 0; --a) {
            idx[a] = static_cast<int>(r % N);
            r /= N;
        }
        long s = 0;
        bool keep = true;
        for (int a = 0; a < n_; ++a) {
            int k = (a == n_ - 1) ? idx[a] : (idx[a] < half_ ? idx[a] : idx[a] - N);
            k_[m * n_ + a] = k;
            s += static_cast<long>(k) * k;
            if (std::abs(k) > cut)
                keep = false;
        }
        k2_[m] = s;
        retained_[m] = keep;
        if (keep)
            retained_list_.push_back(m);
    }
    shells_ = k2_;
    std::sort(shells_.begin(), shells_.end());
    shells_.erase(std::unique(shells_.begin(), shells_.end()), shells_.end());
    shell_.resize(M);
    for (std::size_t m = 0; m < M; ++m)
        shell_[m] = static_cast<std::size_t>(
            std::lower_bound(shells_.begin(), shells_.end(), k2_[m]) - shells_.begin());
}

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct Plans {
    fftw_plan r2c;
    fftw_plan c2r;
};

// FFTW plans are created once per (n, N) and executed through the new-array
// interface, which is safe to call concurrently.
const Plans& plans(const GridSpec& g) {
    static std::map<std::pair<int, int>, Plans> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto key = std::make_pair(g.n, g.points_per_axis);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    int dims[3] = {g.points_per_axis, g.points_per_axis, g.points_per_axis};
    double* in = fftw_alloc_real(g.size());
    fftw_complex* out = fftw_alloc_complex(g.spectral_size());
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p;
    p.r2c = fftw_plan_dft_r2c(g.n, dims, in, out, flags);
    p.c2r = fftw_plan_dft_c2r(g.n, dims, out, in, flags);
    fftw_free(in);
    fftw_free(out);
    return cache.emplace(key, p).first->second;
}

// (-1)^{sum k}: shifts the DFT origin from the box corner to its centre.
inline double parity(const ModeTable& mt, std::size_t m, int n) {
    int s = 0;
    for (int a = 0; a < n; ++a)
        s += mt.k(m, a);
    return (s & 1) ? -1.0 : 1.0;
}

}  // namespace

std::shared_ptr<const ModeTable> mode_table(const GridSpec& grid) {
    static std::mutex mu;
    static std::vector<std::pair<GridSpec, std::shared_ptr<const ModeTable>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (auto& e : cache)
        if (e.first == grid)
            return e.second;
    auto t = std::make_shared<const ModeTable>(grid);
    if (cache.size() >= 16)
        cache.erase(cache.begin());
    cache.emplace_back(grid, t);
    return t;
}

std::vector<double> radial_symbol(const GridSpec& grid, const std::function<double(double)>& f) {
    auto mt = mode_table(grid);
    const auto& shells = mt->shells();
    std::vector<double> per_shell(shells.size());
    for (std::size_t s = 0; s < shells.size(); ++s)
        per_shell[s] = f(mt->wavenumber_unit() * std::sqrt(static_cast<double>(shells[s])));
    std::vector<double> out(mt->size());
    for (std::size_t m = 0; m < out.size(); ++m)
        out[m] = per_shell[mt->shell(m)];
    return out;
}

SpectralField forward(const PhysicalField& f) {
    const GridSpec& g = f.grid();
    SpectralField F(g);
    const Plans& p = plans(g);
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(f.values().data()),
                         reinterpret_cast<fftw_complex*>(F.coefficients().data()));
    auto mt = mode_table(g);
    const double scale = g.cell_volume();
    for (std::size_t m = 0; m < F.size(); ++m)
        F[m] *= scale * parity(*mt, m, g.n);
    return F;
}

PhysicalField inverse(const SpectralField& F) {
    const GridSpec& g = F.grid();
    const int N = g.points_per_axis;
    const int n = g.n;
    auto mt = mode_table(g);
    const auto& c = F.coefficients();

    // Only the self-conjugate planes (last index 0 or N/2) carry redundant data.
    double cmax = 0.0;
    for (const auto& v : c)
        cmax = std::max(cmax, std::abs(v));
    double worst = 0.0;
    int kneg[3];
    for (std::size_t m = 0; m < c.size(); ++m) {
        int kl = mt->k(m, n - 1);
        if (kl != 0 && kl != N / 2)
            continue;
        for (int a = 0; a < n; ++a)
            kneg[a] = -mt->k(m, a);
        worst = std::max(worst, std::abs(c[m] - std::conj(F.at(std::span<const int>(kneg, n)))));
    }
    if (worst > 1e-10 * cmax)
        throw DataError("inverse: spectrum is not Hermitian (residual " + std::to_string(worst / cmax) +
                        " relative)");

    std::vector<cplx> work(c.size());
    const double scale = 1.0 / std::pow(g.side_length, n);
    for (std::size_t m = 0; m < c.size(); ++m)
        work[m] = c[m] * (scale * parity(*mt, m, n));
    PhysicalField f(g);
    const Plans& p = plans(g);
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(work.data()), f.values().data());
    return f;
}

double integrate(const PhysicalField& f) {
    return f.grid().cell_volume() * simd::sum(f.values().data(), f.size());
}

double lp_norm(const PhysicalField& f, double p) {
    if (!(p >= 1.0))
        throw ParameterError("lp_norm: p must be >= 1");
    const double* v = f.values().data();
    const std::size_t n = f.size();
    const double dv = f.grid().cell_volume();
    if (std::isinf(p))
        return simd::max_abs(v, n);
    if (p == 1.0)
        return dv * simd::sum_abs(v, n);
    if (p == 2.0)
        return std::sqrt(dv * simd::sum_squares(v, n));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += std::pow(std::abs(v[i]), p);
    return std::pow(dv * s, 1.0 / p);
}

PhysicalField sample(const GridSpec& grid, const std::function<double(std::span<const double>)>& f) {
    PhysicalField out(grid);
    const int N = grid.points_per_axis;
    const int n = grid.n;
    std::vector<double> x(n);
    std::vector<int> idx(n, 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t r = i;
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(r % N);
            r /= N;
        }
        for (int a = 0; a < n; ++a)
            x[a] = grid.coordinate(idx[a]);
        out[i] = f(x);
    }
    return out;
}

PhysicalField moment_weight(const GridSpec& grid, double nu) {
    if (!(nu > 1.0 && nu <= 2.0))
        throw ParameterError("moment_weight: nu must lie in (1, 2]");
    return sample(grid, [nu](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x)
            r2 += v * v;
        if (nu == 2.0)
            return r2;
        // (1 + r2)^{nu/2} - 1 without cancellation near the origin
        return std::expm1(0.5 * nu * std::log1p(r2));
    });
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T)))
        throw DataError("FKS1: truncated file");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

void write_fks1(const std::string& path, const PhysicalField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw DataError("FKS1: cannot open " + path + " for writing");
    os.write("FKS1", 4);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().n));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().points_per_axis));
    put_le<double>(os, f.grid().side_length);
    for (double v : f.values())
        put_le<double>(os, v);
    if (!os)
        throw DataError("FKS1: write failed for " + path);
}

PhysicalField read_fks1(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw DataError("FKS1: cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "FKS1", 4) != 0)
        throw DataError("FKS1: bad magic in " + path);
    GridSpec g;
    g.n = static_cast<int>(get_le<std::uint32_t>(is));
    g.points_per_axis = static_cast<int>(get_le<std::uint32_t>(is));
    g.side_length = get_le<double>(is);
    try {
        g.validate();
    } catch (const ParameterError& e) {
        throw DataError(std::string("FKS1: invalid header: ") + e.what());
    }
    std::vector<double> v(g.size());
    for (auto& x : v)
        x = get_le<double>(is);
    return PhysicalField(g, std::move(v));
}

double evaluate_at(const SpectralField& F, std::span<const double> x) {
    const GridSpec& g = F.grid();
    const int n = g.n;
    const int half = g.points_per_axis / 2;
    if (static_cast<int>(x.size()) != n)
        throw ParameterError("evaluate_at: point has the wrong dimension");
    auto mt = mode_table(g);
    const double u = mt->wavenumber_unit();
    double s = 0.0;
    for (std::size_t m = 0; m < F.size(); ++m) {
        double phase = 0.0;
        for (int a = 0; a < n; ++a)
            phase += mt->k(m, a) * x[a];
        phase *= u;
        int kl = mt->k(m, n - 1);
        double w = (kl == 0 || kl == half) ? 1.0 : 2.0;
        s += w * (F[m].real() * std::cos(phase) - F[m].imag() * std::sin(phase));
    }
    return s / std::pow(g.side_length, n);
}

}  // namespace fks
