"""Classical laboratory for learning Hamiltonians of untrusted quantum systems.

Exact state-vector simulation, Ising model families, sequential Monte Carlo
inference, boson sampling distributions and distribution-distinguishing
tools, at sizes a laptop handles exactly.
"""

from .boson import (
    Interferometer,
    build_A_S,
    enumerate_outcomes,
    full_distribution,
    haar_random_interferometer,
    haar_random_unitary,
    outcome_probability,
    permanent_minors,
    permanent_ryser,
    sample_outcome,
)
from .distance import (
    DiscreteDistribution,
    distinguish_probability,
    empirical_distinguish,
    random_dice_distribution,
    repetitions_for_confidence,
    total_variation,
)
from .ising import CouplingGraph, ising_diagonal, model_norm_diff, uniform_superposition
from .qhl import (
    DegeneratePosterior,
    EstimatorConfig,
    ExperimentRecord,
    QHLConfig,
    UntrustedSystem,
    cost_model,
    distinguish_by_inversion,
    guess_experiment,
    log_star,
    noisy_likelihood,
    qhl_run,
    run_untrusted,
)
from .smc import (
    ParticleCloud,
    bayes_update,
    effective_sample_size,
    liu_west_resample,
    mean_estimate,
    quadratic_loss,
)
from .statevector import (
    DiagonalHermitian,
    HermitianOperator,
    evolve,
    hadamard_gate,
    inner_product,
    measure,
    survival_probability,
    toffoli_gate,
)

__version__ = "0.1.0"
