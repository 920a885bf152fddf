#pragma once

#include <span>
#include <vector>

namespace runway {

struct JumpAtom {
    double size;          ///< proportional jump, in (-1, 0]
    double probability;

    bool operator==(const JumpAtom&) const = default;
};

/// Distribution of the proportional jump Z: a constant or a finite discrete law.
class JumpSpec {
public:
    /// Constant jump Z = size.
    static JumpSpec constant(double size);

    /// Finite discrete law; probabilities must sum to 1 within 1e-12.
    static JumpSpec discrete(std::vector<JumpAtom> atoms);

    std::span<const JumpAtom> atoms() const { return atoms_; }
    bool is_constant() const { return atoms_.size() == 1; }

    /// Jump size for a uniform variate u in [0, 1), by inverse CDF over the atoms.
    double size_for(double u) const;

    bool operator==(const JumpSpec&) const = default;

private:
    explicit JumpSpec(std::vector<JumpAtom> atoms);

    std::vector<JumpAtom> atoms_;
};

/// Jump-diffusion demand: dQ/Q = eta dt + sigma dW + dJ, with Poisson(lambda)
/// proportional jumps distributed as `jump`.
struct DemandParams {
    double eta = 0.02;
    double sigma = 0.05;
    double lambda = 0.05;
    JumpSpec jump = JumpSpec::constant(-0.10);

    void validate() const;

    bool operator==(const DemandParams&) const = default;
};

/// E[(1+Z)^b].
double power_moment(const JumpSpec& jump, double b);

/// E[Z].
double mean_jump(const JumpSpec& jump);

/// Q0 * exp(eta * t).
double deterministic_demand(double t, double q0, double eta);

}  // namespace runway
