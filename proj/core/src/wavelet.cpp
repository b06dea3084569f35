#include "wavesq/wavelet.hpp"

#include "wavesq/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace wavesq {

namespace {

// Daubechies extremal-phase lowpass coefficients, N = 1..10, generated
// offline by spectral factorization at 50-digit precision and normalized to
// sum sqrt(2). Checked to 1e-30 (sum, orthonormal shifts) and 1e-25
// (vanishing moments) before embedding; make_daubechies_filter re-checks the
// double-precision invariants at every construction.
const std::vector<std::vector<double>> k_daubechies_lowpass = {
    // db1
    {0.70710678118654752440,
     0.70710678118654752440},
    // db2
    {0.48296291314453414337,
     0.83651630373780790558,
     0.22414386804201338103,
     -0.12940952255126038117},
    // db3
    {0.33267055295008261600,
     0.80689150931109257649,
     0.45987750211849157010,
     -0.13501102001025458870,
     -0.085441273882026661693,
     0.035226291885709536603},
    // db4
    {0.23037781330889650086,
     0.71484657055291564709,
     0.63088076792985890788,
     -0.027983769416859854211,
     -0.18703481171909308408,
     0.030841381835560763627,
     0.032883011666885199735,
     -0.010597401785069032105},
    // db5
    {0.16010239797419291448,
     0.60382926979718967054,
     0.72430852843777292773,
     0.13842814590132073151,
     -0.24229488706638203186,
     -0.032244869584638374648,
     0.077571493840045713523,
     -0.0062414902127982742742,
     -0.012580751999081999469,
     0.0033357252854737712780},
    // db6
    {0.11154074335010946362,
     0.49462389039845308568,
     0.75113390802109535068,
     0.31525035170919762909,
     -0.22626469396543982008,
     -0.12976686756726193556,
     0.097501605587323049102,
     0.027522865530305728626,
     -0.031582039317486029565,
     0.00055384220116149613925,
     0.0047772575109455106396,
     -0.0010773010853084795649},
    // db7
    {0.077852054085009179020,
     0.39653931948191730654,
     0.72913209084623511992,
     0.46978228740519312247,
     -0.14390600392856497541,
     -0.22403618499387498264,
     0.071309219266830264751,
     0.080612609151083071913,
     -0.038029936935014413580,
     -0.016574541630666880654,
     0.012550998556099840613,
     0.00042957797292136652113,
     -0.0018016407040474909153,
     0.00035371379997452024845},
    // db8
    {0.054415842243104009955,
     0.31287159091429997066,
     0.67563073629728980681,
     0.58535468365420671277,
     -0.015829105256349305667,
     -0.28401554296154692652,
     0.00047248457391328277036,
     0.12874742662047845886,
     -0.017369301001807546170,
     -0.044088253930794751507,
     0.013981027917398281649,
     0.0087460940474057767164,
     -0.0048703529934515743104,
     -0.00039174037337694704630,
     0.00067544940645056936637,
     -0.00011747678412476953373},
    // db9
    {0.038077947363878346589,
     0.24383467461259035373,
     0.60482312369011111190,
     0.65728807805130053808,
     0.13319738582500757619,
     -0.29327378327917490881,
     -0.096840783222976460514,
     0.14854074933810638014,
     0.030725681479333379212,
     -0.067632829061329973676,
     0.00025094711483145195759,
     0.022361662123679097205,
     -0.0047232047577513972779,
     -0.0042815036824634298345,
     0.0018476468830562264766,
     0.00023038576352319596721,
     -0.00025196318894271013697,
     0.000039347320316271599481},
    // db10
    {0.026670057900555553587,
     0.18817680007769148902,
     0.52720118893172558648,
     0.68845903945360356574,
     0.28117234366057746075,
     -0.24984642432731537942,
     -0.19594627437737704350,
     0.12736934033579326008,
     0.093057364603572351160,
     -0.071394147166397087145,
     -0.029457536821875812858,
     0.033212674059341001740,
     0.0036065535669561696554,
     -0.010733175483330575044,
     0.0013953517470529011658,
     0.0019924052951850561172,
     -0.00068585669495971162656,
     -0.00011646685512928545095,
     0.000093588670320069591334,
     -0.000013264202894521244812},
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
    int j = 0;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

void check_filter_invariants(const WaveletFilter& f) {
    const std::size_t len = f.lowpass.size();
    const double sqrt2 = std::sqrt(2.0);
    double sum = 0.0;
    for (double h : f.lowpass) sum += h;
    if (std::fabs(sum - sqrt2) > 1e-12)
        throw numerical_error("daubechies table corrupt: lowpass sum != sqrt(2)");
    for (std::size_t m = 0; 2 * m < len; ++m) {
        double dot = 0.0;
        for (std::size_t k = 0; k + 2 * m < len; ++k)
            dot += f.lowpass[k] * f.lowpass[k + 2 * m];
        const double want = (m == 0) ? 1.0 : 0.0;
        if (std::fabs(dot - want) > 1e-12)
            throw numerical_error(
                "daubechies table corrupt: lowpass shifts not orthonormal");
    }
    for (int p = 0; p < f.vanishing_moments; ++p) {
        // compare against the term scale sum |g_k| k^p: the raw sum grows like
        // k^p * ulp even for correctly rounded taps (≈5e-6 at N=10, p=9)
        double moment = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double kp = std::pow(static_cast<double>(k), p);
            moment += f.highpass[k] * kp;
            scale += std::fabs(f.highpass[k]) * kp;
        }
        if (std::fabs(moment) > 1e-8 * std::max(1.0, scale))
            throw numerical_error(
                "daubechies table corrupt: vanishing moment violated");
    }
}

} // namespace

WaveletFilter make_daubechies_filter(int vanishing_moments) {
    if (vanishing_moments < 1 || vanishing_moments > 10)
        throw validation_error("unsupported filter order " +
                               std::to_string(vanishing_moments) +
                               " (supported: 1..10 vanishing moments)");
    WaveletFilter f;
    f.vanishing_moments = vanishing_moments;
    f.lowpass = k_daubechies_lowpass[vanishing_moments - 1];
    const std::size_t len = f.lowpass.size();
    f.highpass.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double h = f.lowpass[len - 1 - k];
        f.highpass[k] = (k % 2 == 0) ? h : -h;
    }
    check_filter_invariants(f);
    return f;
}

std::size_t CoefficientPyramid::total_size() const {
    std::size_t total = approx.size();
    for (const auto& [level, d] : details) total += d.size();
    return total;
}

int CoefficientPyramid::signal_level() const {
    if (details.empty()) return coarse_level;
    return details.rbegin()->first + 1;
}

CoefficientPyramid dwt_periodic(const std::vector<double>& signal,
                                int coarse_level,
                                const WaveletFilter& filter) {
    if (!is_power_of_two(signal.size()))
        throw validation_error("dwt input length must be a power of two, got " +
                               std::to_string(signal.size()));
    const int j_max = log2_exact(signal.size());
    if (coarse_level < 0 || coarse_level > j_max)
        throw validation_error("coarse level " + std::to_string(coarse_level) +
                               " outside 0.." + std::to_string(j_max));

    CoefficientPyramid pyramid;
    pyramid.coarse_level = coarse_level;
    std::vector<double> s = signal;
    std::vector<double> approx, detail;
    const std::size_t taps = filter.length();
    for (int level = j_max - 1; level >= coarse_level; --level) {
        const std::size_t n = s.size();
        const std::size_t m = n / 2;
        approx.assign(m, 0.0);
        detail.assign(m, 0.0);
        for (std::size_t t = 0; t < m; ++t) {
            double a = 0.0, d = 0.0;
            for (std::size_t k = 0; k < taps; ++k) {
                const double v = s[(2 * t + k) % n];
                a += filter.lowpass[k] * v;
                d += filter.highpass[k] * v;
            }
            approx[t] = a;
            detail[t] = d;
        }
        pyramid.details.emplace(level, detail);
        s.swap(approx);
    }
    pyramid.approx = std::move(s);
    return pyramid;
}

std::vector<double> idwt_periodic(const CoefficientPyramid& pyramid,
                                  const WaveletFilter& filter) {
    if (pyramid.approx.size() != (std::size_t{1} << pyramid.coarse_level))
        throw validation_error("pyramid approx size does not match coarse level");
    std::vector<double> s = pyramid.approx;
    std::vector<double> next;
    const std::size_t taps = filter.length();
    int expected = pyramid.coarse_level;
    for (const auto& [level, detail] : pyramid.details) {
        if (level != expected)
            throw validation_error("pyramid detail levels not contiguous");
        if (detail.size() != (std::size_t{1} << level))
            throw validation_error("pyramid detail size mismatch at level " +
                                   std::to_string(level));
        const std::size_t m = detail.size();
        const std::size_t n = 2 * m;
        next.assign(n, 0.0);
        // adjoint of the analysis step: scatter each coefficient through the
        // same (2t+k) mod n indexing
        for (std::size_t t = 0; t < m; ++t) {
            const double a = s[t];
            const double d = detail[t];
            for (std::size_t k = 0; k < taps; ++k) {
                next[(2 * t + k) % n] += filter.lowpass[k] * a +
                                         filter.highpass[k] * d;
            }
        }
        s.swap(next);
        ++expected;
    }
    return s;
}

double ScalingTable::phi_at(double x) const {
    const double scaled = x * static_cast<double>(std::size_t{1} << depth);
    const long long idx = std::llround(scaled);
    if (idx < 0 || idx >= static_cast<long long>(values_phi.size())) return 0.0;
    return values_phi[static_cast<std::size_t>(idx)];
}

double ScalingTable::psi_at(double x) const {
    const double scaled = x * static_cast<double>(std::size_t{1} << depth);
    const long long idx = std::llround(scaled);
    if (idx < 0 || idx >= static_cast<long long>(values_psi.size())) return 0.0;
    return values_psi[static_cast<std::size_t>(idx)];
}

ScalingTable cascade_scaling_table(const WaveletFilter& filter, int depth) {
    if (depth < 1) throw validation_error("cascade depth must be >= 1");
    const int support = static_cast<int>(filter.length()) - 1; // 2N-1
    const double sqrt2 = std::sqrt(2.0);

    // phi at the integers 0..2N-1. Endpoints are 0 except for Haar, where the
    // right-continuous indicator of [0,1) forces phi(0)=1, phi(1)=0.
    std::vector<double> at_integers(support + 1, 0.0);
    if (filter.vanishing_moments == 1) {
        at_integers[0] = 1.0;
    } else {
        // fixed point of v[a] = sqrt(2) sum_b h[2a-b] v[b] over the interior
        // integers 1..2N-2; the matrix has simple eigenvalue 1 and the rest of
        // its spectrum inside the unit disc, so iteration with sum-1
        // normalization converges to the unique integer-value profile
        const int interior = support - 1; // 2N-2 points
        std::vector<double> v(interior, 1.0 / interior), mv(interior, 0.0);
        bool converged = false;
        for (int iter = 0; iter < 200 && !converged; ++iter) {
            for (int a = 1; a <= interior; ++a) {
                double acc = 0.0;
                for (int b = 1; b <= interior; ++b) {
                    const int tap = 2 * a - b;
                    if (tap >= 0 && tap <= support)
                        acc += filter.lowpass[tap] * v[b - 1];
                }
                mv[a - 1] = sqrt2 * acc;
            }
            double sum = 0.0;
            for (double c : mv) sum += c;
            if (sum == 0.0)
                throw numerical_error("refinement matrix has no unit eigenvalue");
            double drift = 0.0;
            for (int i = 0; i < interior; ++i) {
                mv[i] /= sum;
                drift = std::max(drift, std::fabs(mv[i] - v[i]));
            }
            v.swap(mv);
            converged = drift < 1e-15;
        }
        if (!converged)
            throw numerical_error(
                "refinement fixed point did not converge (no unit eigenvalue "
                "within tolerance)");
        // the normalized iteration converges for any dominant eigenvalue;
        // only eigenvalue 1 leaves the limit an actual fixed point
        double residual = 0.0;
        for (int a = 1; a <= interior; ++a) {
            double acc = 0.0;
            for (int b = 1; b <= interior; ++b) {
                const int tap = 2 * a - b;
                if (tap >= 0 && tap <= support)
                    acc += filter.lowpass[tap] * v[b - 1];
            }
            residual = std::max(residual, std::fabs(sqrt2 * acc - v[a - 1]));
        }
        if (residual > 1e-10)
            throw numerical_error("refinement matrix has no unit eigenvalue");
        for (int a = 1; a <= interior; ++a) at_integers[a] = v[a - 1];
    }

    // Refine dyadically: every point of the next grid is recomputed from the
    // two-scale relation (even points included), so the grid sum doubles each
    // step and the final Riemann sum 2^-depth * sum(phi) stays 1 to rounding.
    std::vector<double> cur = at_integers;
    for (int d = 0; d < depth; ++d) {
        const std::size_t step = std::size_t{1} << d; // index stride of 1 unit
        const std::size_t fine_size = static_cast<std::size_t>(support) *
                                          (step * 2) + 1;
        std::vector<double> fine(fine_size, 0.0);
        for (std::size_t i = 0; i < fine_size; ++i) {
            // x = i/2^{d+1}; phi(x) = sqrt(2) sum_k h[k] phi(2x - k), and
            // 2x - k sits at index i - k*2^d of the current grid
            double acc = 0.0;
            for (std::size_t k = 0; k < filter.length(); ++k) {
                const long long src = static_cast<long long>(i) -
                                      static_cast<long long>(k * step);
                if (src >= 0 && src < static_cast<long long>(cur.size()))
                    acc += filter.lowpass[k] * cur[static_cast<std::size_t>(src)];
            }
            fine[i] = sqrt2 * acc;
        }
        cur.swap(fine);
    }

    ScalingTable table;
    table.filter = filter;
    table.depth = depth;
    table.values_phi = std::move(cur);

    // psi on the same grid: psi(x) = sqrt(2) sum_k g[k] phi(2x - k); the
    // argument 2x - k sits at index 2i - k*2^depth of the phi grid
    const std::size_t grid = table.values_phi.size();
    const std::size_t unit = std::size_t{1} << depth;
    table.values_psi.assign(grid, 0.0);
    for (std::size_t i = 0; i < grid; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < filter.length(); ++k) {
            const long long src = 2 * static_cast<long long>(i) -
                                  static_cast<long long>(k * unit);
            if (src >= 0 && src < static_cast<long long>(grid))
                acc += filter.highpass[k] *
                       table.values_phi[static_cast<std::size_t>(src)];
        }
        table.values_psi[i] = sqrt2 * acc;
    }
    return table;
}

double eval_basis_periodized(const ScalingTable& table, BasisKind kind, int j,
                             int k, double x) {
    if (j < 0) throw validation_error("negative resolution level");
    const int slots = 1 << j;
    if (k < 0 || k >= slots)
        throw validation_error("shift index " + std::to_string(k) +
                               " outside 0..2^j-1");
    if (!(x >= 0.0 && x < 1.0))
        throw validation_error("basis evaluation point outside [0,1)");

    const double period = static_cast<double>(slots);
    const double support = static_cast<double>(table.filter.length() - 1);
    const double t = period * x - static_cast<double>(k);
    // wraparound copies with argument t + m*2^j inside [0, 2N-1]
    const int m_lo = static_cast<int>(std::ceil((0.0 - t) / period)) - 1;
    const int m_hi = static_cast<int>(std::floor((support - t) / period)) + 1;
    double acc = 0.0;
    for (int m = m_lo; m <= m_hi; ++m) {
        const double arg = t + period * static_cast<double>(m);
        acc += (kind == BasisKind::phi) ? table.phi_at(arg) : table.psi_at(arg);
    }
    return std::sqrt(period) * acc;
}

void dump_scaling_table_csv(const ScalingTable& table, std::ostream& out) {
    const double step = 1.0 / static_cast<double>(std::size_t{1} << table.depth);
    out << "grid_x,phi,psi\n";
    char line[128];
    for (std::size_t i = 0; i < table.values_phi.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n",
                      static_cast<double>(i) * step, table.values_phi[i],
                      table.values_psi[i]);
        out << line;
    }
}

} // namespace wavesq
