from __future__ import annotations

import logging
import math
from typing import List, Literal, Optional

from pydantic import BaseModel

from photodistill.errors import InvalidInputError
from photodistill.extraction.correlators import (
    QUANTITIES,
    CorrelatorSet,
    error_values,
    visibility_in_range,
)
from photodistill.extraction.uncertainty import PropagatedErrors, propagate_uncertainty

logger = logging.getLogger(__name__)

CI_FACTOR = 1.96

DENOMINATOR_NOTE = (
    "output errors normalised by sqrt(V0 + g_A); the alternative sqrt(V0 + g_A/2) "
    "is not consistent with the standard-error expressions"
)

LABELS = {
    "v0": "V0",
    "v1": "V1",
    "eps_multi": "eps_multi",
    "eps_multi_out": "eps'_multi",
    "eps_tot": "eps_tot",
    "eps_tot_out": "eps'_tot",
    "eps_indist": "eps_indist",
    "eps_indist_out": "eps'_indist",
}


class Estimate(BaseModel):
    value: float
    se: float
    ci_low: float
    ci_high: float

    @classmethod
    def of(cls, value: float, se: float) -> "Estimate":
        return cls(value=value, se=se, ci_low=value - CI_FACTOR * se, ci_high=value + CI_FACTOR * se)


class ErrorBudget(BaseModel):
    model: Literal["obb", "sbb"] = "obb"
    v0: Estimate
    v1: Estimate
    eps_multi: Estimate
    eps_multi_out: Estimate
    eps_tot: Estimate
    eps_tot_out: Estimate
    eps_indist: Estimate
    eps_indist_out: Estimate
    warnings: List[str] = []


class BudgetRow(BaseModel):
    quantity: str
    value: float
    se: float
    ci_half_width: float


class SbbErrors(BaseModel):
    eps_indist: float
    eps_indist_out: float


class ZetaSensitivity(BaseModel):
    zeta_star: float
    minimum: float
    estimate: float


def extract_errors(cs: CorrelatorSet, printed_total_se: bool = False,
                   errors: Optional[PropagatedErrors] = None) -> ErrorBudget:
    """Error budget (orthogonal-bad-bit reading) from a set of correlators."""
    values = error_values(cs.g_a, cs.g_b, cs.g_c, cs.g_d, cs.r1, cs.r2)
    errors = errors or propagate_uncertainty(cs, printed_total_se=printed_total_se)
    warnings = [DENOMINATOR_NOTE]
    for name in ("v0", "v1"):
        if not visibility_in_range(values[name]):
            warnings.append(f"{LABELS[name]} = {values[name]:.4f} lies outside [0, 1]; kept unclamped")
    if printed_total_se:
        warnings.append("SE(eps_tot) uses the published expression, twice the linear-propagation value")
    fields = {name: Estimate.of(float(values[name]), getattr(errors, name)) for name in QUANTITIES}
    return ErrorBudget(model="obb", warnings=warnings, **fields)


def budget_with_ci(budget: ErrorBudget) -> list[BudgetRow]:
    """Rows of quantity, value, SE and 95% CI half-width."""
    rows = []
    for name in QUANTITIES:
        est: Estimate = getattr(budget, name)
        rows.append(BudgetRow(quantity=LABELS[name], value=est.value, se=est.se, ci_half_width=CI_FACTOR * est.se))
    return rows


def sbb_input_error(eps_obb: float) -> float:
    """Shared-error-state value with the same single-photon purity as ``eps_obb``."""
    purity = (1.0 - eps_obb) ** 2
    disc = 2.0 * purity - 1.0
    if disc < 0.0:
        raise InvalidInputError(f"purity {purity:.4f} below 1/2 has no shared-error-state reading")
    return (1.0 - math.sqrt(disc)) / 2.0


def extract_errors_sbb(budget: ErrorBudget) -> SbbErrors:
    """Reinterpret an orthogonal-bad-bit budget under the shared-error-state model.

    The input error keeps the measured purity; the output error keeps the
    measured overlap between distilled and reference photon.
    """
    e_in = budget.eps_indist.value
    e_out = budget.eps_indist_out.value
    eps = sbb_input_error(e_in)
    if abs(1.0 - 2.0 * eps) < 1e-12:
        raise InvalidInputError("shared-error-state output error is undefined at eps = 1/2")
    overlap = (1.0 - e_in) * (1.0 - e_out)
    return SbbErrors(eps_indist=eps, eps_indist_out=((1.0 - eps) - overlap) / (1.0 - 2.0 * eps))


def weighted_multi_error(zeta: float, eps_multi: float, eps_multi_out: float) -> float:
    return zeta * eps_multi / 2.0 + eps_multi_out / (2.0 * zeta)


def zeta_sensitivity(eps_multi: float, eps_multi_out: float) -> ZetaSensitivity:
    """Worst case of the intensity-weighted multiphoton error over the intensity ratio."""
    if eps_multi <= 0.0 or eps_multi_out <= 0.0:
        raise InvalidInputError("zeta sensitivity needs both multiphoton errors > 0")
    return ZetaSensitivity(
        zeta_star=math.sqrt(eps_multi_out / eps_multi),
        minimum=math.sqrt(eps_multi * eps_multi_out),
        estimate=weighted_multi_error(1.0, eps_multi, eps_multi_out),
    )
