#pragma once

#include <stdexcept>

#include "edpd/vec.hpp"

namespace edpd {

enum class Mode { three_d, plane_stress, plane_strain };

/// Isotropic linear-elastic constants plus the peridynamic calibration for the
/// linear peridynamic solid in each dimensional mode.
struct MaterialModel {
    double youngs = 0.0;    // Pa
    double poisson = 0.0;
    double density = 0.0;   // kg/m^3
    Mode mode = Mode::three_d;
    Vec3 body_force{};      // N/m^3

    void validate() const {
        if (youngs <= 0.0) throw std::invalid_argument("material: Young's modulus must be positive");
        if (poisson <= -1.0 || poisson >= 0.5) throw std::invalid_argument("material: Poisson ratio out of range");
        if (density <= 0.0) throw std::invalid_argument("material: density must be positive");
    }

    double shear() const { return youngs / (2.0 * (1.0 + poisson)); }
    double bulk() const { return youngs / (3.0 * (1.0 - 2.0 * poisson)); }
    double lame_lambda() const {
        return youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    }

    /// Modified bulk modulus k' of the strain energy volumetric term.
    double k_prime() const {
        const double k = bulk();
        const double mu = shear();
        const double nu = poisson;
        switch (mode) {
            case Mode::three_d: return k;
            case Mode::plane_stress: {
                const double r = (nu + 1.0) / (2.0 * nu - 1.0);
                return k + mu / 9.0 * r * r;
            }
            case Mode::plane_strain: return k + mu / 9.0;
        }
        return k;
    }

    /// Deviatoric coefficient times weighted volume: alpha = this / m.
    double alpha_numerator() const {
        return (mode == Mode::three_d ? 15.0 : 8.0) * shear();
    }

    /// Prefactor c of the dilatation theta' = (c/m) (omega x) . e'.
    double dilatation_coefficient() const {
        const double nu = poisson;
        switch (mode) {
            case Mode::three_d: return 3.0;
            case Mode::plane_stress: return 2.0 * (2.0 * nu - 1.0) / (nu - 1.0);
            case Mode::plane_strain: return 2.0;
        }
        return 3.0;
    }

    int dim() const { return mode == Mode::three_d ? 3 : 2; }
};

} // namespace edpd
