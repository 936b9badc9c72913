/**
 * @file spectral.cpp
 * @brief Truncated Fourier series, Wiener norms, products and compositions.
 */
#include "muskat/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>

#include "muskat/errors.hpp"

namespace muskat::spectral {

// =============================================================================
// Spectrum
// =============================================================================

Spectrum::Spectrum(int cutoff) : cutoff_(cutoff), c_(static_cast<size_t>(cutoff) + 1, cplx(0.0)) {
    if (cutoff < 0) throw ShapeError("negative cutoff");
}

Spectrum::Spectrum(int cutoff, std::vector<cplx> nonneg) : cutoff_(cutoff), c_(std::move(nonneg)) {
    if (cutoff < 0 || c_.size() != static_cast<size_t>(cutoff) + 1)
        throw ShapeError("coefficient vector does not match cutoff");
    c_[0] = cplx(c_[0].real(), 0.0);
}

cplx Spectrum::coeff(int n) const {
    int a = std::abs(n);
    if (a > cutoff_) return 0.0;
    return n >= 0 ? c_[a] : std::conj(c_[a]);
}

bool Spectrum::finite() const {
    return std::all_of(c_.begin(), c_.end(),
                       [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

bool Spectrum::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](cplx z) { return z == cplx(0.0); });
}

Spectrum& Spectrum::operator+=(const Spectrum& o) {
    if (o.cutoff_ != cutoff_) throw ShapeError("cutoff mismatch in sum");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Spectrum& Spectrum::operator-=(const Spectrum& o) {
    if (o.cutoff_ != cutoff_) throw ShapeError("cutoff mismatch in difference");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Spectrum& Spectrum::operator*=(double a) {
    for (auto& z : c_) z *= a;
    return *this;
}

Spectrum& Spectrum::operator*=(cplx a) {
    for (auto& z : c_) z *= a;
    c_[0] = cplx(c_[0].real(), 0.0);
    return *this;
}

Spectrum Spectrum::cosine(int cutoff, int n, double a) {
    Spectrum s(cutoff);
    if (n == 0) s[0] = a;
    else if (n <= cutoff) s[n] = a / 2.0;
    return s;
}

Spectrum Spectrum::sine(int cutoff, int n, double a) {
    Spectrum s(cutoff);
    if (n > 0 && n <= cutoff) s[n] = cplx(0.0, -a / 2.0);
    return s;
}

Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
Spectrum operator*(double s, Spectrum a) { return a *= s; }
Spectrum operator*(cplx s, Spectrum a) { return a *= s; }

// =============================================================================
// Norms
// =============================================================================

namespace {

void guard(double lambda, int N) {
    if (lambda * N > 700.0) throw OverflowRisk(lambda, N);
}

}  // namespace

double wiener_norm(const Spectrum& v, double s, double lambda) {
    if (s < 0.0 || lambda < 0.0) throw DomainError("Wiener index must be nonnegative", std::min(s, lambda));
    guard(lambda, v.cutoff());
    double sum = std::abs(v[0]);
    for (int n = 1; n <= v.cutoff(); ++n)
        sum += 2.0 * std::pow(1.0 + n, s) * std::exp(lambda * n) * std::abs(v[n]);
    return sum;
}

double wiener_norm(const Spectrum& v, WienerIndex idx) { return wiener_norm(v, idx.s, idx.lambda); }

double wiener_norm_hom(const Spectrum& v, double s, double lambda) {
    guard(lambda, v.cutoff());
    double sum = 0.0;
    for (int n = 1; n <= v.cutoff(); ++n)
        sum += 2.0 * std::pow(static_cast<double>(n), s) * std::exp(lambda * n) * std::abs(v[n]);
    return sum;
}

// =============================================================================
// Multipliers
// =============================================================================

Spectrum apply_multiplier(const std::function<double(int)>& m, double at_zero, const Spectrum& v) {
    Spectrum out(v.cutoff());
    out[0] = at_zero * v[0];
    for (int n = 1; n <= v.cutoff(); ++n) out[n] = m(n) * v[n];
    return out;
}

Spectrum apply_multiplier(const Multiplier& m, const Spectrum& v) { return apply_multiplier(m.m, m.at_zero, v); }

Spectrum derivative(const Spectrum& v, int order) {
    Spectrum out(v.cutoff());
    for (int n = 1; n <= v.cutoff(); ++n) out[n] = std::pow(cplx(0.0, n), order) * v[n];
    if (order == 0) out[0] = v[0];
    return out;
}

Spectrum lambda_power(const Spectrum& v, int p) {
    return apply_multiplier([p](int n) { return std::pow(static_cast<double>(n), p); }, p == 0 ? 1.0 : 0.0, v);
}

Spectrum tanh_sqrt_delta(const Spectrum& v, double delta) {
    const double sd = std::sqrt(delta);
    return apply_multiplier([sd](int n) { return std::tanh(sd * n); }, 0.0, v);
}

Spectrum dn_symbol(const Spectrum& v) {
    return apply_multiplier([](int n) { return n / std::tanh(static_cast<double>(n)); }, 1.0, v);
}

// =============================================================================
// FFT plumbing
// =============================================================================

namespace {

struct Plans {
    fftw_plan r2c;
    fftw_plan c2r;
};

std::mutex plan_mutex;
std::map<int, Plans>& plan_cache() {
    static std::map<int, Plans> cache;
    return cache;
}

const Plans& plans_for(int P) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(P);
    if (it != cache.end()) return it->second;
    double* r = fftw_alloc_real(static_cast<size_t>(P));
    fftw_complex* c = fftw_alloc_complex(static_cast<size_t>(P / 2 + 1));
    Plans p{fftw_plan_dft_r2c_1d(P, r, c, FFTW_ESTIMATE), fftw_plan_dft_c2r_1d(P, c, r, FFTW_ESTIMATE)};
    fftw_free(r);
    fftw_free(c);
    return cache.emplace(P, p).first->second;
}

struct Buffers {
    int P = 0;
    double* r = nullptr;
    fftw_complex* c = nullptr;
    void ensure(int n) {
        if (n == P) return;
        if (r) fftw_free(r);
        if (c) fftw_free(c);
        P = n;
        r = fftw_alloc_real(static_cast<size_t>(n));
        c = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
    }
    ~Buffers() {
        if (r) fftw_free(r);
        if (c) fftw_free(c);
    }
};

thread_local Buffers tl_buf;

}  // namespace

int fft_size(int n) {
    for (int m = std::max(n, 1);; ++m) {
        int k = m;
        for (int p : {2, 3, 5})
            while (k % p == 0) k /= p;
        if (k == 1) return m;
    }
}

int product_grid(int cutoff) { return fft_size(2 * (2 * cutoff + 1)); }
int composition_grid(int cutoff) { return fft_size(4 * (2 * cutoff + 1)); }

void grid_from_modes(const cplx* modes, int ncoef, int P, double* out) {
    if (ncoef > P / 2) throw ShapeError("grid too coarse for the requested modes");
    const Plans& pl = plans_for(P);
    tl_buf.ensure(P);
    fftw_complex* c = tl_buf.c;
    const int half = P / 2 + 1;
    for (int k = 0; k < half; ++k) {
        if (k < ncoef) {
            c[k][0] = modes[k].real();
            c[k][1] = modes[k].imag();
        } else {
            c[k][0] = 0.0;
            c[k][1] = 0.0;
        }
    }
    c[0][1] = 0.0;
    fftw_execute_dft_c2r(pl.c2r, c, tl_buf.r);
    std::memcpy(out, tl_buf.r, sizeof(double) * static_cast<size_t>(P));
}

void modes_from_grid(const double* in, int P, cplx* modes, int ncoef) {
    if (ncoef > P / 2) throw ShapeError("grid too coarse for the requested modes");
    const Plans& pl = plans_for(P);
    tl_buf.ensure(P);
    std::memcpy(tl_buf.r, in, sizeof(double) * static_cast<size_t>(P));
    fftw_execute_dft_r2c(pl.r2c, tl_buf.r, tl_buf.c);
    const double inv = 1.0 / P;
    for (int k = 0; k < ncoef; ++k) modes[k] = cplx(tl_buf.c[k][0] * inv, tl_buf.c[k][1] * inv);
    modes[0] = cplx(modes[0].real(), 0.0);
}

std::vector<double> to_grid(const Spectrum& v, int P) {
    std::vector<double> out(static_cast<size_t>(P));
    grid_from_modes(v.data().data(), v.cutoff() + 1, P, out.data());
    return out;
}

Spectrum from_grid(const std::vector<double>& samples, int cutoff) {
    Spectrum out(cutoff);
    modes_from_grid(samples.data(), static_cast<int>(samples.size()), out.data().data(), cutoff + 1);
    return out;
}

// =============================================================================
// Products and compositions
// =============================================================================

Spectrum product(const Spectrum& f, const Spectrum& g) {
    if (f.cutoff() != g.cutoff()) throw ShapeError("cutoff mismatch in product");
    const int P = product_grid(f.cutoff());
    auto a = to_grid(f, P);
    auto b = to_grid(g, P);
    for (size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    return from_grid(a, f.cutoff());
}

Spectrum pointwise(const Spectrum& v, const std::function<double(double)>& fn, int P) {
    auto a = to_grid(v, P);
    for (auto& x : a) x = fn(x);
    return from_grid(a, v.cutoff());
}

Spectrum compose_F(const Spectrum& v, double alpha) {
    return pointwise(v, [alpha](double x) { return F_fn(alpha * x); }, composition_grid(v.cutoff()));
}

Spectrum compose_G(const Spectrum& v) {
    const int P = composition_grid(v.cutoff());
    auto a = to_grid(v, P);
    double sup = 0.0;
    for (double x : a) sup = std::max(sup, std::abs(x));
    if (!(sup < 1.0)) throw DomainError("pole guard: sup|v| >= 1 in G(v) = v/(1+v)", sup);
    for (auto& x : a) x = G_fn(x);
    return from_grid(a, v.cutoff());
}

Spectrum project_JN(const Spectrum& v, int M) {
    if (M < 0 || M > v.cutoff()) throw ShapeError("projection cutoff outside [0, N]");
    Spectrum out = v;
    for (int n = M + 1; n <= v.cutoff(); ++n) out[n] = 0.0;
    return out;
}

double sup_abs(const Spectrum& v, int P) {
    if (P <= 0) P = composition_grid(v.cutoff());
    auto a = to_grid(v, P);
    double sup = 0.0;
    for (double x : a) sup = std::max(sup, std::abs(x));
    return sup;
}

double kappa_s(double s) { return s <= 1.0 ? 1.0 : std::pow(2.0, s); }

double ksn_constant(double s, int n) {
    if (n < 2) throw DomainError("K_{s,n} requires n >= 2", n);
    if (s <= 1.0) return n;
    const double k = kappa_s(s);
    return k * (std::pow(k, n - 1) - 1.0) / (k - 1.0);
}

// =============================================================================
// Serialization
// =============================================================================

nlohmann::json to_json(const Spectrum& v) {
    nlohmann::json modes = nlohmann::json::array();
    for (int n = 1; n <= v.cutoff(); ++n) modes.push_back({n, v[n].real(), v[n].imag()});
    nlohmann::json j = {{"cutoff", v.cutoff()}, {"modes", modes}};
    if (v[0] != 0.0) j["mean"] = v[0].real();
    return j;
}

Spectrum spectrum_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("cutoff") || !j.contains("modes"))
        throw ShapeError("spectrum JSON needs 'cutoff' and 'modes'");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "cutoff" && it.key() != "modes" && it.key() != "mean") throw ShapeError("unknown spectrum key: " + it.key());
    Spectrum v(j.at("cutoff").get<int>());
    if (j.contains("mean")) v[0] = j.at("mean").get<double>();
    for (const auto& m : j.at("modes")) {
        if (!m.is_array() || m.size() != 3) throw ShapeError("mode entries are [n, re, im]");
        int n = m[0].get<int>();
        if (n < 1 || n > v.cutoff()) throw ShapeError("mode index outside [1, cutoff]: " + std::to_string(n));
        v[n] = cplx(m[1].get<double>(), m[2].get<double>());
    }
    return v;
}

namespace {

void put_f64(std::ostream& os, double x) {
    uint64_t u;
    std::memcpy(&u, &x, 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    os.write(reinterpret_cast<const char*>(&u), 8);
}

double get_f64(std::istream& is) {
    uint64_t u = 0;
    is.read(reinterpret_cast<char*>(&u), 8);
    if (!is) throw ShapeError("truncated binary spectrum");
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    double x;
    std::memcpy(&x, &u, 8);
    return x;
}

}  // namespace

void write_binary(std::ostream& os, const Spectrum& v) {
    for (int n = 0; n <= v.cutoff(); ++n) {
        put_f64(os, v[n].real());
        put_f64(os, v[n].imag());
    }
}

Spectrum read_binary(std::istream& is, int cutoff) {
    Spectrum v(cutoff);
    for (int n = 0; n <= cutoff; ++n) {
        double re = get_f64(is);
        double im = get_f64(is);
        v[n] = cplx(re, im);
    }
    return v;
}

}  // namespace muskat::spectral
