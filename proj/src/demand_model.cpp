#include "runway/demand_model.hpp"

#include <cmath>
#include <numeric>

#include "runway/errors.hpp"

namespace runway {

JumpSpec::JumpSpec(std::vector<JumpAtom> atoms) : atoms_(std::move(atoms))
{
    if (atoms_.empty())
        throw ValidationError("jump_size", "jump distribution has no atoms");
    double total = 0.0;
    for (const auto& atom : atoms_) {
        if (!std::isfinite(atom.size) || atom.size <= -1.0 || atom.size > 0.0)
            throw ValidationError("jump_size", "jump sizes must lie in (-1, 0]");
        if (!std::isfinite(atom.probability) || atom.probability < 0.0)
            throw ValidationError("jump_size", "jump probabilities must be non-negative");
        total += atom.probability;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("jump_size", "jump probabilities must sum to 1");
}

JumpSpec JumpSpec::constant(double size)
{
    return JumpSpec({{size, 1.0}});
}

JumpSpec JumpSpec::discrete(std::vector<JumpAtom> atoms)
{
    return JumpSpec(std::move(atoms));
}

double JumpSpec::size_for(double u) const
{
    double cumulative = 0.0;
    for (const auto& atom : atoms_) {
        cumulative += atom.probability;
        if (u < cumulative)
            return atom.size;
    }
    return atoms_.back().size;
}

void DemandParams::validate() const
{
    if (!std::isfinite(eta))
        throw ValidationError("eta", "must be finite");
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw ValidationError("sigma", "must be finite and non-negative");
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw ValidationError("lambda", "must be finite and non-negative");
}

double power_moment(const JumpSpec& jump, double b)
{
    double moment = 0.0;
    for (const auto& atom : jump.atoms())
        moment += atom.probability * std::pow(1.0 + atom.size, b);
    return moment;
}

double mean_jump(const JumpSpec& jump)
{
    return power_moment(jump, 1.0) - 1.0;
}

double deterministic_demand(double t, double q0, double eta)
{
    return q0 * std::exp(eta * t);
}

}  // namespace runway
