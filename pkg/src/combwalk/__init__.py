"""Continuous-time quantum walk on the comb lattice: exact evolution, contour
representation, large-time asymptotics, escape probabilities and the Stokes
structure of the velocity quadrant."""
from .airy import airy_ai
from .asymptotics import (U_C, V_C, ReturnBreakdown, SpineSaddles, ToothSaddles, coarse_profile_spine,
                          coarse_profile_tooth, coarse_profile_tooth_closed, critical_velocities,
                          return_amplitude_asymptotic, saddle_polynomial, spine_amplitude_asymptotic,
                          spine_decay_rate, spine_regime, spine_saddles, tooth_amplitude_asymptotic,
                          tooth_bounds, tooth_decay_rate, tooth_regime, tooth_saddles,
                          v_c_from_discriminant)
from .comb import Truncation, Vertex, WaveState, apply_hamiltonian, degree, hamiltonian_matvec, spectral_bound
from .contour import (ContourSpec, CutPoint, amplitude_contour, potential, potential_w, sqrt_cut, w_minus,
                      w_plus, z_of_w)
from .errors import (ClassificationAmbiguous, CombWalkError, DomainError, OnCutError, QuadratureDivergence,
                     QuadratureFailure, RangeError, RootFindingFailure, StallError, ToleranceNotReached)
from .escape import (prob_spine_dist, prob_spine_total, prob_spine_total_j0, prob_teeth_total,
                     prob_teeth_total_j0, prob_tooth, prob_tooth_j0, prob_tooth_pole, profile_initial_tooth)
from .evolution import amplitude_exact, evolve, evolve_times
from .spectral import (ExtendedState, LocalizedState, QuadratureSpec, completeness_defect, completeness_matrix,
                       extended_eigenfunction, extended_norm, localized_eigenfunction, localized_state)
from .stokes import (DescentPath, RegionLabel, amplitude_asymptotic, anti_stokes_lines, anti_stokes_point,
                     allowed_saddles, classify_region, region_atlas, relevant_amplitude, relevant_saddles, saddle_contributions,
                     stokes_lines, stokes_point_on_u_axis, trace_descent)

__all__ = [name for name in dir() if not name.startswith("_")]
