#pragma once

namespace nmc {

enum class TerminationCause { horizon_reached, dirichlet_hit };

// Result of one Feynman-Kac trajectory.
struct WalkOutcome {
    double score = 0.0;             // accumulated functional
    double elapsed = 0.0;           // process time at termination
    TerminationCause cause = TerminationCause::horizon_reached;
};

} // namespace nmc
