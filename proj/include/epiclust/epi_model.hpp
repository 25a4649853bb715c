#pragma once

#include <functional>
#include <vector>

#include "epiclust/types.hpp"

namespace epiclust {

/// Compartments of the age-structured transmission model.
enum Compartment : int {
    kS = 0,
    kL1, kL2,
    kIp,
    kIa1, kIa2, kIa3,
    kIs1, kIs2, kIs3,
    kIh, kIc, kIcr,
    kR, kD,
    kNumCompartments
};

const char* compartment_name(int c);

struct EpiParams {
    Vector theta;   // asymptomatic course probability per age group
    Vector eta;     // fatal outcome probability (given intensive care)
    Vector zeta;    // intensive care probability (given hospitalization)
    Vector h;       // hospitalization probability
    double phi_l = 1.0 / 2.5;   // latent stage rate (two stages at 2*phi_l)
    double phi_p = 1.0 / 3.0;   // presymptomatic exit rate
    double delta_a = 0.25;      // asymptomatic stage rate (three stages at 3*delta_a)
    double delta_s = 0.25;      // symptomatic stage rate
    double delta_h = 0.1;       // hospital exit rate
    double delta_c = 0.1;       // intensive-care exit rate
    double delta_cr = 0.125;    // post-intensive-care rehabilitation rate
    double inf_a = 0.75;        // relative infectiousness of asymptomatic cases
    double beta0 = 1.0;         // transmission probability per contact

    std::size_t num_ages() const { return static_cast<std::size_t>(theta.size()); }
    void validate() const;
};

/// Per-age compartment values; rows are compartments, columns age groups.
struct EpiState {
    Matrix values;  // kNumCompartments x n_age

    std::size_t num_ages() const { return static_cast<std::size_t>(values.cols()); }
    static EpiState zero(std::size_t n_age);
    /// Disease-free state with all mass susceptible.
    static EpiState disease_free(const PopulationVector& pop);
    Vector age_totals() const { return values.colwise().sum(); }
};

/// Jacobian split of the infected subsystem (L1, L2, Ip, Ia1-3, Is1-3 per age),
/// ordered compartment-major: index = comp * n_age + age.
struct NgmDecomposition {
    Matrix transmission;  // T, beta0 factored out
    Matrix transition;    // Sigma
};

/// Right-hand side of the transmission model.
EpiState derivative(const EpiState& state, const EpiParams& params,
                    const ContactMatrix& contacts, const PopulationVector& pop);

struct Trajectory {
    std::vector<double> times;
    std::vector<EpiState> states;
};

struct SolverOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    bool fixed_step = false;  // classic RK4 at the output step, for reproducibility
};

/// Integrate the model with an adaptive Dormand-Prince RK5(4) scheme,
/// reporting states every `step` days up to `horizon`.
Trajectory simulate(const EpiState& init, const EpiParams& params,
                    const ContactMatrix& contacts, const PopulationVector& pop,
                    double horizon, double step, const SolverOptions& opts = {});

NgmDecomposition build_ngm(const EpiParams& params, const ContactMatrix& contacts,
                           const PopulationVector& pop);

/// Perron root of -T * Sigma^{-1}.
double spectral_radius(const NgmDecomposition& ngm);

/// beta0 such that beta0 * rho(-T Sigma^{-1}) == target_r0.
double calibrate_beta(const ContactMatrix& contacts, const EpiParams& params,
                      const PopulationVector& pop, double target_r0);

/// S_C = beta0 * mu_C; marks the result standardized.
ContactMatrix standardize_contacts(double beta0, const ContactMatrix& mu);

/// Population-weighted mean of a per-bin parameter over each partition group.
Vector aggregate_params(const Vector& p, const PopulationVector& pop, const AgePartition& part);

}  // namespace epiclust
