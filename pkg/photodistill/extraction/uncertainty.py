"""Standard errors of the extracted quantities.

Reflectivity uncertainties are neglected; the correlator errors dominate.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from pydantic import BaseModel

from photodistill.extraction.correlators import CorrelatorSet, error_values

logger = logging.getLogger(__name__)


class PropagatedErrors(BaseModel):
    v0: float
    v1: float
    eps_multi: float
    eps_multi_out: float
    eps_tot: float
    eps_tot_out: float
    eps_indist: float
    eps_indist_out: float


def propagate_uncertainty(cs: CorrelatorSet, printed_total_se: bool = False) -> PropagatedErrors:
    """Linear propagation with closed-form partial derivatives.

    ``printed_total_se`` reproduces the published SE of eps_tot, which is twice
    the linear-propagation value.
    """
    k1 = 2.0 * cs.r1 * (1.0 - cs.r1)
    k2 = 2.0 * cs.r2 * (1.0 - cs.r2)
    v = error_values(cs.g_a, cs.g_b, cs.g_c, cs.g_d, cs.r1, cs.r2)
    s = math.sqrt(v["v0"] + cs.g_a)
    q_in = 1.0 - cs.g_a / 2.0
    q_out = 1.0 - cs.g_c / 2.0
    num = v["v1"] + cs.g_a / 2.0 + cs.g_c / 2.0

    def combine(*terms: float) -> float:
        return math.sqrt(math.fsum(t * t for t in terms))

    if printed_total_se:
        se_tot = combine(cs.se_a, cs.se_b / k1) / s
    else:
        se_tot = combine(cs.se_a, cs.se_b / k1) / (2.0 * s)

    se_indist = combine(
        (1.0 / (2.0 * s * q_in) + s / (2.0 * q_in ** 2)) * cs.se_a,
        cs.se_b / (2.0 * s * q_in * k1),
    )
    se_tot_out = combine(
        (1.0 / (2.0 * s) - num / (2.0 * s ** 3)) * cs.se_a,
        num / (2.0 * s ** 3 * k1) * cs.se_b,
        cs.se_c / (2.0 * s),
        cs.se_d / (s * k2),
    )
    se_indist_out = combine(
        (1.0 / (2.0 * q_out * s) - num / (2.0 * q_out * s ** 3)) * cs.se_a,
        num / (2.0 * q_out * s ** 3 * k1) * cs.se_b,
        (1.0 / (2.0 * q_out * s) + num / (2.0 * q_out ** 2 * s)) * cs.se_c,
        cs.se_d / (k2 * q_out * s),
    )
    return PropagatedErrors(
        v0=cs.se_b / k1,
        v1=cs.se_d / k2,
        eps_multi=cs.se_a / 2.0,
        eps_multi_out=cs.se_c / 2.0,
        eps_tot=se_tot,
        eps_tot_out=se_tot_out,
        eps_indist=se_indist,
        eps_indist_out=se_indist_out,
    )


def numerical_uncertainty(cs: CorrelatorSet, step: float = 1e-6) -> PropagatedErrors:
    """Same propagation with a central-difference Jacobian."""
    means = cs.means()
    jac = np.zeros((len(PropagatedErrors.model_fields), 4))
    for j in range(4):
        hi = means.copy()
        lo = means.copy()
        hi[j] += step
        lo[j] -= step
        f_hi = error_values(*hi, cs.r1, cs.r2)
        f_lo = error_values(*lo, cs.r1, cs.r2)
        for i, name in enumerate(PropagatedErrors.model_fields):
            jac[i, j] = (f_hi[name] - f_lo[name]) / (2.0 * step)
    se = np.sqrt((jac * cs.errors()) ** 2 @ np.ones(4))
    return PropagatedErrors(**dict(zip(PropagatedErrors.model_fields, se.tolist())))


def monte_carlo_uncertainty(cs: CorrelatorSet, draws: int = 100_000, seed: int = 0) -> PropagatedErrors:
    """Spread of the extracted quantities under Gaussian resampling of the correlators."""
    rng = np.random.default_rng(seed)
    samples = rng.normal(cs.means(), cs.errors(), size=(draws, 4))
    logger.debug("monte-carlo propagation with %d draws", draws)
    values = error_values(*samples.T, cs.r1, cs.r2)
    return PropagatedErrors(**{name: float(np.std(values[name], ddof=1)) for name in PropagatedErrors.model_fields})
