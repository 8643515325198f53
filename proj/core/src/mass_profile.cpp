#include "fallball/mass_profile.hpp"

#include "fallball/errors.hpp"

namespace fallball {

std::string to_string(MassOrdering ordering) {
    switch (ordering) {
        case MassOrdering::StrictTop: return "strict-top";
        case MassOrdering::Nonincreasing: return "nonincreasing";
        case MassOrdering::Unordered: return "unordered";
    }
    return "unordered";
}

namespace {

MassOrdering classify(const Eigen::VectorXd& m) {
    const int n = static_cast<int>(m.size());
    bool nonincreasing = true;
    for (int i = 0; i + 1 < n; ++i) {
        if (m(i) < m(i + 1)) {
            nonincreasing = false;
            break;
        }
    }
    if (!nonincreasing) return MassOrdering::Unordered;
    return m(0) > m(1) ? MassOrdering::StrictTop : MassOrdering::Nonincreasing;
}

}  // namespace

MassProfile::MassProfile(const Eigen::VectorXd& masses) : m_(masses) {
    const int n = static_cast<int>(m_.size());
    if (n < 2) throw InvalidConfigurationError("mass profile needs at least 2 particles");
    for (int i = 0; i < n; ++i) {
        if (!(m_(i) > 0.0))
            throw InvalidConfigurationError("mass " + std::to_string(i + 1) + " must be positive");
    }
    gamma_.resize(n - 1);
    c_.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        const double sum = m_(i) + m_(i + 1);
        gamma_(i) = (m_(i) - m_(i + 1)) / sum;
        c_(i) = 2.0 * m_(i) * m_(i + 1) / sum;
    }
    ordering_ = classify(m_);
}

MassProfile::MassProfile(std::vector<double> masses)
    : MassProfile(Eigen::Map<const Eigen::VectorXd>(masses.data(),
                                                    static_cast<Eigen::Index>(masses.size()))) {}

}  // namespace fallball
