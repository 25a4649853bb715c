#pragma once

#include <array>

#include "epiclust/types.hpp"

namespace epiclust {

/// Weighted sum of the four setting matrices. The default weights {1,1,1,1}
/// give the plain no-intervention sum.
ContactMatrix sum_settings(const ContactMatrix& home, const ContactMatrix& school,
                           const ContactMatrix& work, const ContactMatrix& other,
                           const std::array<double, 4>& weights = {1.0, 1.0, 1.0, 1.0});

/// Enforce population-weighted reciprocity:
///   mu(i,j) = (mu_in(i,j) W(i) + mu_in(j,i) W(j)) / (2 W(i)).
ContactMatrix symmetrize(const ContactMatrix& m, const PopulationVector& pop);

/// Merge age bins, preserving population-weighted contact totals:
///   mu(i,j) = sum_{(m,n) in I_i x I_j} M(m,n) N(m) / W(i).
ContactMatrix aggregate_matrix(const ContactMatrix& m, const PopulationVector& pop,
                               const AgePartition& part);

PopulationVector aggregate_population(const PopulationVector& pop, const AgePartition& part);

}  // namespace epiclust
