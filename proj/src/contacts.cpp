#include "epiclust/contacts.hpp"

namespace epiclust {

namespace {

void require_same_frame(const ContactMatrix& a, const ContactMatrix& b) {
    if (a.country != b.country)
        throw InputError("contact matrices belong to different countries: " + a.country +
                         " vs " + b.country);
    if (!(a.ages == b.ages))
        throw InputError("contact matrices have different age structures (" + a.country + ")");
}

}  // namespace

ContactMatrix sum_settings(const ContactMatrix& home, const ContactMatrix& school,
                           const ContactMatrix& work, const ContactMatrix& other,
                           const std::array<double, 4>& weights) {
    home.validate();
    for (const ContactMatrix* m : {&school, &work, &other}) {
        m->validate();
        require_same_frame(home, *m);
    }
    ContactMatrix out = home;
    out.setting = Setting::Full;
    out.values = weights[0] * home.values + weights[1] * school.values +
                 weights[2] * work.values + weights[3] * other.values;
    return out;
}

ContactMatrix symmetrize(const ContactMatrix& m, const PopulationVector& pop) {
    m.validate();
    pop.validate();
    if (!(m.ages == pop.ages))
        throw InputError("matrix and population age structures differ (" + m.country + ")");
    for (Eigen::Index i = 0; i < pop.counts.size(); ++i)
        if (!(pop.counts[i] > 0))
            throw InputError("zero-population age bin '" + pop.ages.labels[i] +
                             "' cannot be symmetrized (" + m.country + ")");

    ContactMatrix out = m;
    const Eigen::Index n = m.values.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out.values(i, j) = (m.values(i, j) * pop.counts[i] + m.values(j, i) * pop.counts[j]) /
                               (2.0 * pop.counts[i]);
    return out;
}

ContactMatrix aggregate_matrix(const ContactMatrix& m, const PopulationVector& pop,
                               const AgePartition& part) {
    m.validate();
    pop.validate();
    if (!(m.ages == pop.ages))
        throw InputError("matrix and population age structures differ (" + m.country + ")");
    part.validate(m.dim());

    const auto k = static_cast<Eigen::Index>(part.size());
    Vector w = Vector::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (int s = part.groups[i].first; s <= part.groups[i].second; ++s)
            w[i] += pop.counts[s];
        if (!(w[i] > 0))
            throw InputError("aggregated age bin has zero population (" + m.country + ")");
    }

    ContactMatrix out;
    out.country = m.country;
    out.setting = m.setting;
    out.standardized = m.standardized;
    out.ages = part.size() == 6 && m.dim() == 16 ? AgeStructure::coarse_6() : AgeStructure{};
    if (out.ages.labels.empty()) {
        for (const auto& [lo, hi] : part.groups) {
            out.ages.labels.push_back(lo == hi ? m.ages.labels[lo]
                                               : m.ages.labels[lo] + ".." + m.ages.labels[hi]);
            out.ages.lower_bounds.push_back(m.ages.lower_bounds[lo]);
        }
    }
    out.values = Matrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            double acc = 0;
            for (int a = part.groups[i].first; a <= part.groups[i].second; ++a)
                for (int b = part.groups[j].first; b <= part.groups[j].second; ++b)
                    acc += m.values(a, b) * pop.counts[a];
            out.values(i, j) = acc / w[i];
        }
    return out;
}

PopulationVector aggregate_population(const PopulationVector& pop, const AgePartition& part) {
    pop.validate();
    part.validate(pop.ages.size());
    PopulationVector out;
    out.country = pop.country;
    out.ages = part.size() == 6 && pop.ages.size() == 16 ? AgeStructure::coarse_6() : AgeStructure{};
    if (out.ages.labels.empty()) {
        for (const auto& [lo, hi] : part.groups) {
            out.ages.labels.push_back(lo == hi ? pop.ages.labels[lo]
                                               : pop.ages.labels[lo] + ".." + pop.ages.labels[hi]);
            out.ages.lower_bounds.push_back(pop.ages.lower_bounds[lo]);
        }
    }
    out.counts = Vector::Zero(static_cast<Eigen::Index>(part.size()));
    for (std::size_t i = 0; i < part.size(); ++i)
        for (int s = part.groups[i].first; s <= part.groups[i].second; ++s)
            out.counts[static_cast<Eigen::Index>(i)] += pop.counts[s];
    return out;
}

}  // namespace epiclust
