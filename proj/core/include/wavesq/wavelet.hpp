#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <vector>

namespace wavesq {

// Daubechies filter pair. lowpass h has length 2N and sums to sqrt(2);
// highpass is the quadrature mirror g[k] = (-1)^k h[2N-1-k].
struct WaveletFilter {
    int vanishing_moments = 0; // N
    std::vector<double> lowpass;
    std::vector<double> highpass;

    std::size_t length() const { return lowpass.size(); } // 2N
};

// Returns the Daubechies filter with N vanishing moments, N in 1..10.
// Coefficients are embedded constants; construction re-checks the filter
// invariants (sum, orthonormal shifts, mirror relation, vanishing moments)
// and throws numerical_error if the table is corrupt.
WaveletFilter make_daubechies_filter(int vanishing_moments);

// Output of the periodized Mallat pyramid on a signal of length 2^J:
// approx holds the 2^j0 scaling coefficients at the coarse level, details[j]
// the 2^j wavelet coefficients for j = j0 .. J-1.
struct CoefficientPyramid {
    int coarse_level = 0;
    std::vector<double> approx;
    std::map<int, std::vector<double>> details;

    std::size_t total_size() const;
    // J such that the reconstructed signal has length 2^J.
    int signal_level() const;
};

// Periodized forward transform down to coarse_level. Convention: output
// sample m of each decimated circular convolution is
//   sum_k filter[k] * signal[(2m+k) mod n].
CoefficientPyramid dwt_periodic(const std::vector<double>& signal,
                                int coarse_level, const WaveletFilter& filter);

// Exact inverse of dwt_periodic (adjoint of each orthogonal step).
std::vector<double> idwt_periodic(const CoefficientPyramid& pyramid,
                                  const WaveletFilter& filter);

// phi and psi sampled on the dyadic grid k/2^depth over the support
// [0, 2N-1]; values_phi/values_psi have (2N-1)*2^depth + 1 entries.
struct ScalingTable {
    WaveletFilter filter;
    int depth = 0;
    std::vector<double> values_phi;
    std::vector<double> values_psi;

    // nearest-grid-point lookup; 0 outside the support
    double phi_at(double x) const;
    double psi_at(double x) const;
};

// Cascade evaluation: phi at the integers is the eigenvector (eigenvalue 1)
// of the refinement matrix M[a][b] = sqrt(2) h[2a-b], normalized to sum 1;
// finer dyadic values follow from phi(x) = sqrt(2) sum_k h[k] phi(2x-k), and
// psi(x) = sqrt(2) sum_k g[k] phi(2x-k). Throws numerical_error if the
// fixed-point iteration fails to converge.
ScalingTable cascade_scaling_table(const WaveletFilter& filter, int depth = 12);

enum class BasisKind { phi, psi };

// Periodized basis value 2^{j/2} sum_m base(2^j (x+m) - k) for x in [0,1),
// k in 0..2^j-1, via nearest-grid-point lookup in the table.
double eval_basis_periodized(const ScalingTable& table, BasisKind kind, int j,
                             int k, double x);

// CSV dump with columns grid_x, phi, psi (plotting/debugging aid).
void dump_scaling_table_csv(const ScalingTable& table, std::ostream& out);

} // namespace wavesq
