#pragma once

namespace gwi::tol {

// Structural checks: normalization, hermiticity, unit Bloch vectors.
inline constexpr double kStructural = 1e-12;
// Numerical results: probabilities, expectation values, sums over outcomes.
inline constexpr double kNumerical = 1e-10;
// Lowest admissible eigenvalue for a user-supplied density matrix.
inline constexpr double kPositivity = 1e-10;
// Constraint residual for the JPD linear program.
inline constexpr double kLinearProgram = 1e-9;
// Probability treated as zero by the Hardy predicate.
inline constexpr double kHardyZero = 1e-9;

}  // namespace gwi::tol
