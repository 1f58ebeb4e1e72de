"""Scheduling and market analysis for duration-differentiated electric loads."""

__version__ = "0.1.0"

from .adequacy import (  # noqa: E402
    InadequateSupplyError,
    flow_adequacy_oracle,
    is_adequate,
    is_exactly_adequate,
    llf_allocate,
    verify_allocation,
)
from .dayahead import ScenarioDistribution, TwoStagePrices, minimize_dayahead  # noqa: E402
from .demand import DemandProfile, DurationVector, demand_profile, duration_vector  # noqa: E402
from .majorization import majorizes, rh_chain, rh_transfer, weakly_majorizes  # noqa: E402
from .market import (  # noqa: E402
    UtilitySpec,
    efficiency_gap,
    equilibrium,
    social_welfare_optimum,
    spot_simulate,
    verify_equilibrium,
)
from .procurement import oracle_purchase, runtime_purchase, shortfall  # noqa: E402
from .rate import RateSpec, compose_allocation, decompose, split_allocation  # noqa: E402

__all__ = [
    "DemandProfile", "DurationVector", "InadequateSupplyError", "RateSpec",
    "ScenarioDistribution", "TwoStagePrices", "UtilitySpec", "compose_allocation",
    "decompose", "demand_profile", "duration_vector", "efficiency_gap", "equilibrium",
    "flow_adequacy_oracle", "is_adequate", "is_exactly_adequate", "llf_allocate",
    "majorizes", "minimize_dayahead", "oracle_purchase", "rh_chain", "rh_transfer",
    "runtime_purchase", "shortfall", "social_welfare_optimum", "split_allocation",
    "spot_simulate", "verify_allocation", "verify_equilibrium", "weakly_majorizes",
]
