//==============================================================================
// spectral.hpp
//
// Truncated Fourier series of real 2*pi-periodic functions.
//
//   - Spectrum stores modes n = 0..N; negative modes follow from reality.
//   - Wiener norms |v|_{s,lambda} = sum (1+|n|)^s e^{lambda|n|} |v(n)|.
//   - Fourier multipliers m(|n|) with an explicit value at n = 0.
//   - Dealiased products and pointwise compositions through FFTW.
//==============================================================================
#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace muskat::spectral {

using cplx = std::complex<double>;

class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(int cutoff);
    Spectrum(int cutoff, std::vector<cplx> nonneg);

    int cutoff() const { return cutoff_; }
    cplx coeff(int n) const;
    cplx& operator[](int n) { return c_[static_cast<size_t>(n)]; }
    const cplx& operator[](int n) const { return c_[static_cast<size_t>(n)]; }
    const std::vector<cplx>& data() const { return c_; }
    std::vector<cplx>& data() { return c_; }

    bool finite() const;
    bool is_zero() const;

    Spectrum& operator+=(const Spectrum& o);
    Spectrum& operator-=(const Spectrum& o);
    Spectrum& operator*=(double a);
    Spectrum& operator*=(cplx a);

    // single-mode helpers: a*cos(n x) and a*sin(n x)
    static Spectrum cosine(int cutoff, int n, double a);
    static Spectrum sine(int cutoff, int n, double a);

private:
    int cutoff_ = 0;
    std::vector<cplx> c_;
};

Spectrum operator+(Spectrum a, const Spectrum& b);
Spectrum operator-(Spectrum a, const Spectrum& b);
Spectrum operator*(double s, Spectrum a);
Spectrum operator*(cplx s, Spectrum a);

struct WienerIndex {
    double s = 0.0;
    double lambda = 0.0;
};

// Throws OverflowRisk when lambda*N > 700.
double wiener_norm(const Spectrum& v, WienerIndex idx);
double wiener_norm(const Spectrum& v, double s, double lambda = 0.0);
// sum |n|^s e^{lambda|n|} |v(n)| (homogeneous weight)
double wiener_norm_hom(const Spectrum& v, double s, double lambda = 0.0);

struct Multiplier {
    std::function<double(int)> m;  // evaluated for |n| >= 1
    double at_zero = 0.0;
};

Spectrum apply_multiplier(const Multiplier& m, const Spectrum& v);
Spectrum apply_multiplier(const std::function<double(int)>& m, double at_zero, const Spectrum& v);

Spectrum derivative(const Spectrum& v, int order = 1);
Spectrum lambda_power(const Spectrum& v, int p);  // |n|^p
Spectrum tanh_sqrt_delta(const Spectrum& v, double delta);
Spectrum dn_symbol(const Spectrum& v);  // |n|/tanh|n|, 1 at n = 0

// Physical samples at x_j = 2 pi j / P.
std::vector<double> to_grid(const Spectrum& v, int P);
Spectrum from_grid(const std::vector<double>& samples, int cutoff);
// smallest 2^a 3^b 5^c >= n
int fft_size(int n);
int product_grid(int cutoff);      // >= 2(2N+1)
int composition_grid(int cutoff);  // >= 4(2N+1)

// Low-level transforms used by the strip code (P real samples <-> ncoef modes).
void grid_from_modes(const cplx* modes, int ncoef, int P, double* out);
void modes_from_grid(const double* in, int P, cplx* modes, int ncoef);

Spectrum product(const Spectrum& f, const Spectrum& g);
Spectrum pointwise(const Spectrum& v, const std::function<double(double)>& fn, int P);
Spectrum compose_F(const Spectrum& v, double alpha);
Spectrum compose_G(const Spectrum& v);
Spectrum project_JN(const Spectrum& v, int M);
double sup_abs(const Spectrum& v, int P = 0);

double kappa_s(double s);          // 1 on [0,1], 2^s above
double ksn_constant(double s, int n);

inline double F_fn(double x) { return std::pow(1.0 + x * x, -1.5) - 1.0; }
inline double G_fn(double x) { return x / (1.0 + x); }

// {"cutoff": N, "modes": [[n, re, im], ...]} for n >= 1, plus "mean" when the mean is nonzero.
nlohmann::json to_json(const Spectrum& v);
Spectrum spectrum_from_json(const nlohmann::json& j);
void write_binary(std::ostream& os, const Spectrum& v);
Spectrum read_binary(std::istream& is, int cutoff);

}  // namespace muskat::spectral
