#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qpnls/lattice.hpp"

namespace qpnls {

using Complex = std::complex<double>;

// Dense complex amplitudes over a lattice box, lexicographic order: the
// truncated avatar of the coefficient family c(n).
class CoefficientField {
public:
  explicit CoefficientField(LatticeBox box);
  CoefficientField(LatticeBox box, std::vector<Complex> values);

  const LatticeBox& box() const { return box_; }
  std::size_t size() const { return values_.size(); }

  Complex& operator[](std::size_t flat) { return values_[flat]; }
  const Complex& operator[](std::size_t flat) const { return values_[flat]; }
  Complex at(const MultiIndex& n) const { return values_[box_.flat_index(n)]; }
  void set(const MultiIndex& n, Complex v) { values_[box_.flat_index(n)] = v; }

  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }

  friend bool operator==(const CoefficientField&, const CoefficientField&) = default;

private:
  LatticeBox box_;
  std::vector<Complex> values_;
};

enum class PhaseScheme { zero, deterministic, seeded_random };
enum class DecayModel { polynomial, exponential };

// Generated initial data remembers its decay class so downstream checks can
// refuse class mismatches without re-deriving the envelope.
struct InitialData {
  CoefficientField field;
  DecayModel model;
  double amplitude;  // A
  double rate;       // r (polynomial) or kappa (exponential)
  int p;
};

// |c(n)| = A^(1/2p) (1+|n|)^-r, phases per scheme.
InitialData make_poly_data(double A, double r, const LatticeBox& box, int p,
                           PhaseScheme scheme, std::uint64_t seed = 0);

// |c(n)| = A^(1/2p) e^(-kappa |n|), kappa in (0,1].
InitialData make_exp_data(double A, double kappa, const LatticeBox& box, int p,
                          PhaseScheme scheme, std::uint64_t seed = 0);

// g(m) = conj(c(-m)); the coefficient family of conj(u).
CoefficientField conj_reflect(const CoefficientField& c);

// The Fourier image of |u|^2p u on the box: the P-fold alternating discrete
// convolution, realized as pairwise standard convolutions
// c * conj_reflect(c) * c * ... with every intermediate clipped back to the
// box (closed-box Galerkin policy). discarded_l1 totals the ell^1 mass
// dropped by the clipping.
struct ConvolutionResult {
  CoefficientField field;
  double discarded_l1;
};
ConvolutionResult alt_convolution_with_report(const CoefficientField& c, int p);
CoefficientField alt_convolution(const CoefficientField& c, int p);

// Independent oracle: direct enumeration of all P-tuples over the box,
// keeping exactly the tuples whose alternating partial sums stay in the box
// (the same clipping policy, so agreement is exact up to rounding).
CoefficientField brute_force_alt_convolution(const CoefficientField& c, int p,
                                             std::uint64_t budget = 200'000'000);

// u(x) = sum c(n) e^{i <n> x}.
Complex evaluate(const CoefficientField& c, const FrequencyVector& omega, double x);

// Rigorous sup-norm bound: sum |c(n)|.
double coefficient_l1(const CoefficientField& c);

// Sampled sup over x in [0, L], L = 2 pi * multiplier / min_divisor scale;
// a proxy only, dominated by coefficient_l1.
double sup_norm(const CoefficientField& c, int samples,
                const FrequencyVector& omega, double length_multiplier = 1.0);

// { sum_{m=0}^{s} sum_n <n>^{2m} |c(n)|^2 }^(1/2).
double hs_norm(const CoefficientField& c, const FrequencyVector& omega, int s);

// Least-squares decay estimate against the max modulus per ell^1 shell.
struct DecayFit {
  double rate;
  double amplitude;
  DecayModel model;
  double residual;  // rms residual in log space
};
DecayFit decay_fit(const CoefficientField& c, DecayModel model);

// CSV with header "n_1,...,n_nu,re,im", lexicographic rows, shortest
// round-trip number format.
void write_field_csv(std::ostream& os, const CoefficientField& c);
std::string field_to_csv(const CoefficientField& c);
CoefficientField read_field_csv(std::istream& is);

}  // namespace qpnls
