"""Network formation with local-average peer effects: equilibrium efforts,
pairwise Nash stability, formation dynamics and counterexample mining."""

from .model import (
    ConditioningWarning,
    GuardError,
    Instance,
    Network,
    ValidationError,
    best_response,
    best_response_iteration,
    equilibrium_efforts,
    neighbors,
    payoffs,
    utility,
)
from .exact import compare_exact_float, equilibrium_efforts_exact, payoffs_exact
from .stability import (
    AddLink,
    Sever,
    StabilityReport,
    enumerate_deviations,
    interval_agents,
    is_locally_complete,
    is_pairwise_nash_stable,
    lemma2_violation,
    myopic_link_preference,
)
from .dynamics import (
    best_profitable_severance,
    formation_step,
    is_reachable,
    mutual_link_beneficial,
    run_formation,
)
from .search import (
    SearchSpace,
    enumerate_networks,
    find_lemma2_counterexamples,
    find_prop1_counterexamples,
    verify_record,
)

__version__ = "0.1.0"
