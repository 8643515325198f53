#ifndef FALLBALL_MASS_PROFILE_HPP
#define FALLBALL_MASS_PROFILE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fallball {

/// How the masses are ordered from the floor up.
enum class MassOrdering {
    StrictTop,      ///< m1 > m2 >= ... >= mn
    Nonincreasing,  ///< m1 >= m2 >= ... >= mn, but not StrictTop
    Unordered,
};

std::string to_string(MassOrdering ordering);

/// The masses m_1..m_n together with the derived collision parameters:
/// gamma_i = (m_i - m_{i+1}) / (m_i + m_{i+1}) and the reduced-mass factor
/// c_i = 2 m_i m_{i+1} / (m_i + m_{i+1}) for each bond i in 1..n-1.
/// Immutable after construction. The ordering class is always recomputed
/// from the masses, never taken on trust.
class MassProfile {
public:
    explicit MassProfile(std::vector<double> masses);
    explicit MassProfile(const Eigen::VectorXd& masses);

    int size() const { return static_cast<int>(m_.size()); }

    const Eigen::VectorXd& m() const { return m_; }
    const Eigen::VectorXd& gamma() const { return gamma_; }
    const Eigen::VectorXd& c() const { return c_; }

    /// Particle mass, particle index 1..n.
    double mass(int particle) const { return m_(particle - 1); }

    /// Bond index 1..n-1 couples particles (i, i+1); matches collision type
    /// sigma = i.
    double gamma_at(int bond) const { return gamma_(bond - 1); }
    double c_at(int bond) const { return c_(bond - 1); }

    MassOrdering ordering_class() const { return ordering_; }

private:
    Eigen::VectorXd m_;
    Eigen::VectorXd gamma_;
    Eigen::VectorXd c_;
    MassOrdering ordering_;
};

}  // namespace fallball

#endif
