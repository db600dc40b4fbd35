"""
Preference-study statistics: chi-square goodness of fit against a uniform
preference over the five designs, and per-design standardized residuals.

The chi-square survival function is the regularized upper incomplete gamma
function Q(df/2, x/2), evaluated by series for x < a + 1 and by continued
fraction otherwise.
"""

import math
import sys
from typing import Dict, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from commentator.errors import StudyDomainError

DESIGN_COUNT = 5
SIGNIFICANT_RESIDUAL = 2.0

_EPS = 1.0e-15
_TINY = sys.float_info.min / sys.float_info.epsilon
_MAX_ITERATIONS = 500


class PreferenceCounts(BaseModel):
    """Votes per design (1..5) from n respondents."""

    model_config = ConfigDict(frozen=True)

    counts: Tuple[int, int, int, int, int]
    n: int = Field(ge=0)

    @model_validator(mode="after")
    def check_total(self) -> "PreferenceCounts":
        if any(c < 0 for c in self.counts):
            raise ValueError(f"counts must be non-negative, got {self.counts}")
        if sum(self.counts) != self.n:
            raise ValueError(f"counts sum to {sum(self.counts)}, expected n={self.n}")
        return self

    @classmethod
    def of(cls, counts: List[int], n: Optional[int] = None) -> "PreferenceCounts":
        return cls(counts=tuple(counts), n=sum(counts) if n is None else n)


class ChiSquareResult(NamedTuple):
    chi2: float
    df: int
    p: float


def _lower_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITERATIONS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_continued_fraction(a: float, x: float) -> float:
    # Modified Lentz evaluation.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITERATIONS + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def regularized_gamma_p(a: float, x: float) -> float:
    """Lower regularized incomplete gamma P(a, x)."""
    if a <= 0:
        raise StudyDomainError(f"a must be positive, got {a}")
    if x < 0:
        raise StudyDomainError(f"x must be non-negative, got {x}")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return _lower_series(a, x)
    return 1.0 - _upper_continued_fraction(a, x)


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0:
        raise StudyDomainError(f"a must be positive, got {a}")
    if x < 0:
        raise StudyDomainError(f"x must be non-negative, got {x}")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_series(a, x)
    return _upper_continued_fraction(a, x)


def chi_square_sf(x: float, df: int) -> float:
    """P(X >= x) for a chi-square variable with df degrees of freedom."""
    if df <= 0:
        raise StudyDomainError(f"df must be positive, got {df}")
    return min(1.0, max(0.0, regularized_gamma_q(df / 2.0, x / 2.0)))


def _expected(c: PreferenceCounts) -> float:
    if c.n == 0:
        raise StudyDomainError("no respondents (n = 0)")
    return c.n / DESIGN_COUNT


def chi_square_gof(c: PreferenceCounts) -> ChiSquareResult:
    """Goodness of fit of the vote counts against uniform preference."""
    e = _expected(c)
    chi2 = sum((o - e) ** 2 / e for o in c.counts)
    df = DESIGN_COUNT - 1
    return ChiSquareResult(chi2=chi2, df=df, p=chi_square_sf(chi2, df))


def standardized_residuals(c: PreferenceCounts) -> List[float]:
    e = _expected(c)
    return [(o - e) / math.sqrt(e) for o in c.counts]


class HypothesisVerdict(NamedTuple):
    name: str
    statement: str
    holds: bool


def evaluate_hypotheses(
    best: PreferenceCounts,
    worst: PreferenceCounts,
    threshold: float = SIGNIFICANT_RESIDUAL,
) -> List[HypothesisVerdict]:
    """
    Check the five study hypotheses from best/worst residuals.

    A design is significantly chosen when its residual exceeds threshold.
    "X beats Y" holds when X is significantly chosen as best while Y's best
    residual stays within the threshold.
    """
    r_best = standardized_residuals(best)
    r_worst = standardized_residuals(worst)

    def significant_best(design: int) -> bool:
        return r_best[design - 1] > threshold

    def beats(x: int, y: int) -> bool:
        return significant_best(x) and abs(r_best[y - 1]) <= threshold

    return [
        HypothesisVerdict("H1", "baseline (Design 1) is the least preferable", r_worst[0] > threshold),
        HypothesisVerdict("H2", "increasing loudness (Design 2) is preferred", significant_best(2)),
        HypothesisVerdict("H3", "increasing pitch (Design 4) is preferred", significant_best(4)),
        HypothesisVerdict("H4", "Design 2 is better than Design 3", beats(2, 3)),
        HypothesisVerdict("H5", "Design 4 is better than Design 5", beats(4, 5)),
    ]


def summarize(c: PreferenceCounts) -> Dict[str, object]:
    result = chi_square_gof(c)
    return {
        "chi2": result.chi2,
        "df": result.df,
        "p": result.p,
        "residuals": standardized_residuals(c),
    }
