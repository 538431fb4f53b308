"""actiongate: quantum computation in action variables of integrable systems.

Simulation and verification toolkit for resonant-control quantum
computation encoded in the action variables of four central-potential
models, with independent numerical oracles for every closed form.
"""

from .errors import (ActionGateError, ConfigError, ConvergenceError,
                     CutoffError, DimensionMismatch, DomainError, NoBoundOrbit,
                     NoStrategy, PairError, QuadratureError, ResonanceCollision,
                     SizeError, ZeroCoupling)
from .spectra import (ClassicalActions, LevelSet, ModelSpec, QuantumNumbers,
                      classical_frequencies, degeneracy_and_resonance_scan,
                      energy_classical, energy_quantum, enumerate_levels,
                      find_resonances, semiclassical_frequency,
                      transition_frequency)
from .action_oracle import (ActionResult, OrbitSpec, RadialGrid,
                            action_integrals, converged_radial_levels,
                            eigensolve_radial, random_orbits,
                            verify_closed_form)
from .drive import (Basis, ControlMatrix, DriveSpec, TwoLevelParams,
                    ZeroDriveParams, dyson_propagator, exact_propagator,
                    interaction_split, rabi_propagator, rwa_validity_report,
                    two_level_analytic, zero_drive_propagator)
from .gates import (PulseSchedule, PulseSegment, Rotation, cnot_schedule,
                    execute_schedule, fidelity, rotation_matrix,
                    single_qubit_schedule, standard_gate, synthesize_rotation)
from .encodings import (EncodingSpec, SelectivityReport, build_encoding_basis,
                        build_two_qubit_basis, selectivity_check,
                        two_qubit_plan)
from .birkhoff import (ExpansionCoeffs, QuantizedBirkhoff, TorusPoint,
                       coupling_phase_gate, incommensurability_check,
                       nondegeneracy_determinant, quantize_truncated,
                       taylor_expand)
from .robustness import (LocalizationReport, PerturbationSpec, fidelity_sweep,
                         localization_report, perturbation_matrix,
                         perturbed_eigensystem)

__version__ = "0.1.0"
