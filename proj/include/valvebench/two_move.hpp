#pragma once

#include <cmath>

#include "valvebench/errors.hpp"

namespace valvebench {

/**
 * Two-move stiction compensation parameters: friction estimates, the
 * first-move amplification factor a (no default — it must be supplied),
 * and the estimated steady-state valve position.
 */
struct TwoMoveParams {
    double fs_hat = 0.0;
    double fd_hat = 0.0;
    double a = 1.0;
    double x_ss_hat = 0.0;

    void validate() const {
        if (!(fs_hat >= 0.0) || !(fd_hat >= 0.0))
            throw ConfigError("two_move: friction estimates must be >= 0");
        if (!std::isfinite(a) || !std::isfinite(x_ss_hat))
            throw ConfigError("two_move: a and x_ss_hat must be finite");
    }
};

enum class TwoMovePhase { First, Second, Hold };

/**
 * Open-loop two-move command sequence: an amplified first move breaks
 * stiction, the second move corrects onto the steady-state target, and
 * the hold phase keeps the second-move command.
 *
 * Both move branches are selected by the command in force before the
 * sequence started; pass that command as u_prev for First and Second.
 * For Hold pass the second-move output; it is returned unchanged.
 */
inline double two_move_step(const TwoMoveParams& params, double u_prev, TwoMovePhase phase) {
    if (!std::isfinite(u_prev))
        throw ConfigError("two_move_step: non-finite u_prev");
    switch (phase) {
        case TwoMovePhase::First:
            return u_prev >= params.x_ss_hat ? u_prev + params.a * params.fs_hat
                                             : u_prev - params.a * params.fs_hat;
        case TwoMovePhase::Second:
            return u_prev >= params.x_ss_hat ? params.x_ss_hat - params.fd_hat
                                             : params.x_ss_hat + params.fd_hat;
        case TwoMovePhase::Hold:
            return u_prev;
    }
    throw ConfigError("two_move_step: unknown phase");
}

} // namespace valvebench
