#include "epiclust/epi_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace epiclust {

const char* compartment_name(int c) {
    static const char* names[kNumCompartments] = {
        "S", "L1", "L2", "Ip", "Ia1", "Ia2", "Ia3",
        "Is1", "Is2", "Is3", "Ih", "Ic", "Icr", "R", "D"};
    return names[c];
}

void EpiParams::validate() const {
    const auto n = theta.size();
    for (const Vector* v : {&theta, &eta, &zeta, &h}) {
        if (v->size() != n) throw InputError("per-age parameter vectors have different lengths");
        for (Eigen::Index i = 0; i < n; ++i)
            if (!((*v)[i] >= 0.0 && (*v)[i] <= 1.0))
                throw InputError("age-dependent probabilities must lie in [0,1]");
    }
    for (double r : {phi_l, phi_p, delta_a, delta_s, delta_h, delta_c, delta_cr})
        if (!(r > 0)) throw InputError("stage rates must be positive");
    if (!(inf_a >= 0 && inf_a <= 1)) throw InputError("inf_a must lie in [0,1]");
    if (!(beta0 >= 0)) throw InputError("beta0 must be nonnegative");
}

EpiState EpiState::zero(std::size_t n_age) {
    return EpiState{Matrix::Zero(kNumCompartments, static_cast<Eigen::Index>(n_age))};
}

EpiState EpiState::disease_free(const PopulationVector& pop) {
    EpiState s = zero(pop.ages.size());
    s.values.row(kS) = pop.counts.transpose();
    return s;
}

EpiState derivative(const EpiState& state, const EpiParams& params,
                    const ContactMatrix& contacts, const PopulationVector& pop) {
    const auto n = static_cast<Eigen::Index>(pop.ages.size());
    if (state.values.cols() != n || contacts.values.rows() != n ||
        params.theta.size() != n)
        throw InputError("state, contacts, parameters and population must share the age dimension");
    if ((state.values.array() < 0.0).any())
        throw InputError("state has negative compartment values");

    const Matrix& x = state.values;
    const Matrix& mu = contacts.values;

    // infectious pressure per age group j
    Vector infectious = x.row(kIp).transpose() +
                        params.inf_a * (x.row(kIa1) + x.row(kIa2) + x.row(kIa3)).transpose() +
                        (x.row(kIs1) + x.row(kIs2) + x.row(kIs3)).transpose();

    EpiState out = EpiState::zero(n);
    Matrix& d = out.values;
    for (Eigen::Index i = 0; i < n; ++i) {
        double foi = 0;
        for (Eigen::Index j = 0; j < n; ++j) foi += mu(j, i) * infectious[j];
        foi *= params.beta0 * x(kS, i) / pop.counts[i];

        const double th = params.theta[i];
        d(kS, i) = -foi;
        d(kL1, i) = foi - 2 * params.phi_l * x(kL1, i);
        d(kL2, i) = 2 * params.phi_l * (x(kL1, i) - x(kL2, i));
        d(kIp, i) = 2 * params.phi_l * x(kL2, i) - params.phi_p * x(kIp, i);
        d(kIa1, i) = th * params.phi_p * x(kIp, i) - 3 * params.delta_a * x(kIa1, i);
        d(kIa2, i) = 3 * params.delta_a * (x(kIa1, i) - x(kIa2, i));
        d(kIa3, i) = 3 * params.delta_a * (x(kIa2, i) - x(kIa3, i));
        d(kIs1, i) = (1 - th) * params.phi_p * x(kIp, i) - 3 * params.delta_s * x(kIs1, i);
        d(kIs2, i) = 3 * params.delta_s * (x(kIs1, i) - x(kIs2, i));
        d(kIs3, i) = 3 * params.delta_s * (x(kIs2, i) - x(kIs3, i));
        d(kIh, i) = params.h[i] * (1 - params.zeta[i]) * 3 * params.delta_s * x(kIs3, i) -
                    params.delta_h * x(kIh, i);
        d(kIc, i) = params.h[i] * params.zeta[i] * 3 * params.delta_s * x(kIs3, i) -
                    params.delta_c * x(kIc, i);
        d(kIcr, i) = (1 - params.eta[i]) * params.delta_c * x(kIc, i) -
                     params.delta_cr * x(kIcr, i);
        d(kR, i) = 3 * params.delta_a * x(kIa3, i) +
                   (1 - params.h[i]) * 3 * params.delta_s * x(kIs3, i) +
                   params.delta_h * x(kIh, i) + params.delta_cr * x(kIcr, i);
        d(kD, i) = params.eta[i] * params.delta_c * x(kIc, i);
    }
    return out;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0};
constexpr double kB4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

using Rhs = std::function<Matrix(const Matrix&)>;

// One adaptive sub-interval [t, t_end]; y updated in place.
void integrate_to(Matrix& y, double t, double t_end, const Rhs& f,
                  double rel_tol, double abs_tol) {
    double h = std::min(0.1, t_end - t);
    Matrix k[7];
    int rejects_in_a_row = 0;
    while (t < t_end) {
        h = std::min(h, t_end - t);
        k[0] = f(y);
        for (int s = 1; s < 7; ++s) {
            Matrix ys = y;
            for (int q = 0; q < s; ++q) ys += h * kA[s][q] * k[q];
            k[s] = f(ys);
        }
        Matrix y5 = y, y4 = y;
        for (int s = 0; s < 7; ++s) {
            y5 += h * kB5[s] * k[s];
            y4 += h * kB4[s] * k[s];
        }
        double err = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double sc = abs_tol + rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
            err = std::max(err, std::abs(y5(i) - y4(i)) / sc);
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
            rejects_in_a_row = 0;
        } else if (++rejects_in_a_row > 60) {
            throw NumericalError("ODE step failure at t = " + std::to_string(t));
        }
        double factor = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (!(h > 1e-12))
            throw NumericalError("ODE step underflow at t = " + std::to_string(t));
    }
}

void rk4_to(Matrix& y, double t, double t_end, const Rhs& f, double h_fixed) {
    while (t < t_end - 1e-12) {
        double h = std::min(h_fixed, t_end - t);
        Matrix k1 = f(y);
        Matrix k2 = f(y + 0.5 * h * k1);
        Matrix k3 = f(y + 0.5 * h * k2);
        Matrix k4 = f(y + h * k3);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
    }
}

}  // namespace

Trajectory simulate(const EpiState& init, const EpiParams& params,
                    const ContactMatrix& contacts, const PopulationVector& pop,
                    double horizon, double step, const SolverOptions& opts) {
    if (!(horizon > 0) || !(step > 0))
        throw InputError("simulation horizon and step must be positive");
    params.validate();

    // The RHS itself is evaluated without the negativity guard so transient
    // round-off excursions below zero do not abort a run.
    auto rhs = [&](const Matrix& y) {
        EpiState s{y.cwiseMax(0.0)};
        return derivative(s, params, contacts, pop).values;
    };

    Trajectory traj;
    Matrix y = init.values;
    double t = 0;
    traj.times.push_back(0);
    traj.states.push_back(EpiState{y.cwiseMax(0.0)});
    while (t < horizon - 1e-12) {
        double t_next = std::min(t + step, horizon);
        if (opts.fixed_step)
            rk4_to(y, t, t_next, rhs, step);
        else
            integrate_to(y, t, t_next, rhs, opts.rel_tol, opts.abs_tol);
        t = t_next;
        if ((y.array() < -1e-10).any())
            throw NumericalError("negative compartment beyond tolerance at t = " +
                                 std::to_string(t));
        traj.times.push_back(t);
        traj.states.push_back(EpiState{y.cwiseMax(0.0)});
    }
    return traj;
}

NgmDecomposition build_ngm(const EpiParams& params, const ContactMatrix& contacts,
                           const PopulationVector& pop) {
    params.validate();
    contacts.validate();
    pop.validate();
    const auto n = static_cast<Eigen::Index>(pop.ages.size());
    if (contacts.values.rows() != n || params.theta.size() != n)
        throw InputError("contacts, parameters and population must share the age dimension");

    // infected subsystem: L1 L2 Ip Ia1-3 Is1-3, compartment-major.
    constexpr int L1 = 0, L2 = 1, IP = 2, IA = 3, IS = 6, NC = 9;
    auto idx = [n](int comp, Eigen::Index age) { return comp * n + age; };

    NgmDecomposition ngm;
    ngm.transmission = Matrix::Zero(NC * n, NC * n);
    ngm.transition = Matrix::Zero(NC * n, NC * n);
    Matrix& T = ngm.transmission;
    Matrix& S = ngm.transition;
    for (Eigen::Index i = 0; i < n; ++i) {
        // at the disease-free equilibrium S^i = W^i, so the force-of-infection
        // coefficient toward L1 of age i from age j is just mu(j, i)
        for (Eigen::Index j = 0; j < n; ++j) {
            T(idx(L1, i), idx(IP, j)) = contacts.values(j, i);
            for (int k = 0; k < 3; ++k) {
                T(idx(L1, i), idx(IA + k, j)) = params.inf_a * contacts.values(j, i);
                T(idx(L1, i), idx(IS + k, j)) = contacts.values(j, i);
            }
        }
        const double th = params.theta[i];
        S(idx(L1, i), idx(L1, i)) = -2 * params.phi_l;
        S(idx(L2, i), idx(L1, i)) = 2 * params.phi_l;
        S(idx(L2, i), idx(L2, i)) = -2 * params.phi_l;
        S(idx(IP, i), idx(L2, i)) = 2 * params.phi_l;
        S(idx(IP, i), idx(IP, i)) = -params.phi_p;
        S(idx(IA, i), idx(IP, i)) = th * params.phi_p;
        S(idx(IS, i), idx(IP, i)) = (1 - th) * params.phi_p;
        for (int k = 0; k < 3; ++k) {
            S(idx(IA + k, i), idx(IA + k, i)) = -3 * params.delta_a;
            S(idx(IS + k, i), idx(IS + k, i)) = -3 * params.delta_s;
            if (k > 0) {
                S(idx(IA + k, i), idx(IA + k - 1, i)) = 3 * params.delta_a;
                S(idx(IS + k, i), idx(IS + k - 1, i)) = 3 * params.delta_s;
            }
        }
    }
    return ngm;
}

double spectral_radius(const NgmDecomposition& ngm) {
    // K = -T * Sigma^{-1}  solved as  Sigma^T K^T = -T^T
    Eigen::PartialPivLU<Matrix> lu(ngm.transition.transpose());
    Matrix k = lu.solve(Matrix(-ngm.transmission.transpose())).transpose();
    Eigen::EigenSolver<Matrix> es(k, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigenvalue computation did not converge");
    double rho = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        rho = std::max(rho, std::abs(es.eigenvalues()[i]));
    return rho;
}

double calibrate_beta(const ContactMatrix& contacts, const EpiParams& params,
                      const PopulationVector& pop, double target_r0) {
    if (!(target_r0 > 0)) throw InputError("target R0 must be positive");
    double rho = spectral_radius(build_ngm(params, contacts, pop));
    if (!(rho > 0))
        throw InputError("zero spectral radius: no transmission possible (" +
                         contacts.country + ")");
    return target_r0 / rho;
}

ContactMatrix standardize_contacts(double beta0, const ContactMatrix& mu) {
    if (!(beta0 >= 0)) throw InputError("beta0 must be nonnegative");
    mu.validate();
    ContactMatrix out = mu;
    out.setting = Setting::Full;
    out.standardized = true;
    out.values *= beta0;
    return out;
}

Vector aggregate_params(const Vector& p, const PopulationVector& pop, const AgePartition& part) {
    pop.validate();
    part.validate(pop.ages.size());
    if (p.size() != pop.counts.size())
        throw InputError("parameter vector not aligned with population bins");
    Vector out = Vector::Zero(static_cast<Eigen::Index>(part.size()));
    for (std::size_t i = 0; i < part.size(); ++i) {
        double num = 0, den = 0;
        for (int s = part.groups[i].first; s <= part.groups[i].second; ++s) {
            num += pop.counts[s] * p[s];
            den += pop.counts[s];
        }
        if (!(den > 0)) throw InputError("parameter aggregation group has zero population");
        out[static_cast<Eigen::Index>(i)] = num / den;
    }
    return out;
}

}  // namespace epiclust
