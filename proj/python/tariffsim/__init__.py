"""Revenue-neutral network tariff and redistribution simulator."""

from ._core import (
    AuditResult,
    BaseCaseInputs,
    CalibrationMode,
    Fraction,
    Money,
    Rate,
    RunConfig,
    SweepResult,
    TariffRates,
    TariffScenario,
    TariffsimError,
    TouCalibration,
    bill_base_case,
    calibrate_tou,
    canonical_scenarios,
    compute_bill,
    default_factor_grid,
    equity_delta,
    peak_hours,
    redistribution_multiplier,
    revenue_identity_residual,
    run_sweep,
    solve_pinned,
    solve_scenario,
)

__all__ = [name for name in dir() if not name.startswith("_")]
