#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lma/types.hpp"

namespace lma {

using MatrixFamily = std::function<StateMatrix(double)>;

// Two weakly coupled damped oscillators in real 2x2 block form; the second
// block's eigenfrequency is a function of the sweep parameter and crosses
// the first one. Coupling must stay small enough that the block
// eigenvalues move by less than 10%.
MatrixFamily two_oscillator_family(double alpha1, double alpha2,
                                   double omega1,
                                   std::function<double(double)> omega2,
                                   double coupling);

// Companion-form 2x2 with characteristic polynomial
// s^2 + 2 a s + (a^2 + (gamma - b)): real eigenvalues for gamma < b,
// a conjugate pair for gamma > b, double root exactly at gamma = b.
MatrixFamily merge_family(double a, double b);

// A(gamma) = A0 + gamma * direction (identity by default): the spectrum
// translates right and crosses the imaginary axis at a closed-form gamma.
MatrixFamily instability_family(const StateMatrix& a0,
                                const MatrixXd& direction = MatrixXd());

// The reference spectrum used to seed desk-scale test systems.
std::vector<Complex> table1_reference_spectrum();

// A real matrix with the given spectrum, mixed through a deterministic
// non-orthogonal similarity so states couple across modes.
StateMatrix matrix_with_spectrum(const std::vector<Complex>& spectrum,
                                 unsigned seed = 1);

// Parses a matrix from CSV rows ("0,1\n-2,-3") or a JSON object with
// fields n, data (row-major), optional scale.
StateMatrix load_matrix(const std::string& text);
StateMatrix load_matrix_file(const std::string& path);

// Reproducible random matrix with all Re(lambda) <= -margin and a simple
// spectrum (rejection-sampled).
StateMatrix random_stable(int n, unsigned seed, double margin);

}  // namespace lma
