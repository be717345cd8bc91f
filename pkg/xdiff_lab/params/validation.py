# xdiff_lab/params/validation.py
from xdiff_lab.exceptions import AdmissibilityError
from xdiff_lab.params.models import (
    ConditionCode,
    DerivedScales,
    ModelParams,
    ScalingParams,
    ValidationReport,
    Violation,
)


def validate_model(p: ModelParams) -> ValidationReport:
    """Check the exponent, sign and shape conditions on the model parameters.

    Violations are collected, never raised.
    """
    violations: list[Violation] = []

    if p.n < 1 or p.d < 1:
        violations.append(
            Violation(code=ConditionCode.POSITIVE, message="n and d must be >= 1")
        )
    if len(p.sigma) != p.n or len(p.a) != p.n or any(len(r) != p.n for r in p.a):
        violations.append(
            Violation(
                code=ConditionCode.SHAPE,
                message=f"sigma must have length n={p.n} and a must be {p.n}x{p.n}",
            )
        )
    if not 0.5 < p.alpha < 1.0:
        violations.append(
            Violation(
                code=ConditionCode.ALPHA_RANGE,
                message=f"1/2 < alpha < 1 fails (alpha={p.alpha})",
            )
        )
    if not 0.0 < p.beta < 1.0:
        violations.append(
            Violation(
                code=ConditionCode.BETA_RANGE,
                message=f"0 < beta < 1 fails (beta={p.beta})",
            )
        )
    if not p.beta + 1.0 < 2.0 * p.alpha:
        violations.append(
            Violation(
                code=ConditionCode.SELF_DIFFUSION,
                message=(
                    f"beta+1 < 2alpha fails ({p.beta + 1.0:.6g} >= {2.0 * p.alpha:.6g})"
                ),
            )
        )
    if p.d == 1 and not (p.alpha - p.beta < 0.5 or p.alpha < 0.75):
        violations.append(
            Violation(
                code=ConditionCode.D1_EXPONENTS,
                message=(
                    "d=1 requires alpha-beta < 1/2 or alpha < 3/4 "
                    f"(alpha-beta={p.alpha - p.beta:.6g})"
                ),
            )
        )
    if any(s <= 0.0 for s in p.sigma):
        violations.append(
            Violation(
                code=ConditionCode.SIGMA_POSITIVE,
                message=f"all sigma_i > 0 fails (sigma={p.sigma})",
            )
        )

    return ValidationReport(ok=not violations, violations=violations)


def kappa_interval(s: ScalingParams) -> tuple[tuple[float, float], float]:
    """Admissible open kappa interval and the upper bound for kappa_hat"""
    d = float(s.d)
    lower = s.delta * (1.0 + s.rho) * d
    upper = d / (d + 3.0)
    return (lower, upper), s.delta * d / (d + 4.0)


def validate_scaling(s: ScalingParams) -> ValidationReport:
    """Check the moderate scaling conditions on (delta, rho, kappa, kappa_hat)"""
    violations: list[Violation] = []

    if s.N < 1 or s.d < 1 or s.rho <= 0.0:
        violations.append(
            Violation(
                code=ConditionCode.POSITIVE,
                message=f"N >= 1, d >= 1 and rho > 0 required (N={s.N}, rho={s.rho})",
            )
        )
    if not 0.0 < s.delta < 1.0:
        violations.append(
            Violation(
                code=ConditionCode.DELTA_RANGE,
                message=f"0 < delta < 1 fails (delta={s.delta})",
            )
        )

    (lower, upper), kappa_hat_bound = kappa_interval(s)
    nonempty = lower < upper

    if not 0.0 < s.kappa_hat < kappa_hat_bound:
        violations.append(
            Violation(
                code=ConditionCode.KAPPA_HAT_BOUND,
                message=(
                    f"kappa_hat < delta d/(d+4) fails "
                    f"({s.kappa_hat:.6g} >= {kappa_hat_bound:.6g})"
                    if s.kappa_hat > 0.0
                    else f"kappa_hat > 0 fails (kappa_hat={s.kappa_hat})"
                ),
            )
        )
    if not nonempty:
        violations.append(
            Violation(
                code=ConditionCode.KAPPA_INTERVAL_EMPTY,
                message=(
                    f"kappa-interval empty ({lower:.6g} >= {upper:.6g})"
                ),
            )
        )
    else:
        if not s.kappa > lower:
            violations.append(
                Violation(
                    code=ConditionCode.KAPPA_LOWER,
                    message=(
                        f"delta(1+rho)d < kappa fails ({s.kappa:.6g} <= {lower:.6g})"
                    ),
                )
            )
        if not s.kappa < upper:
            violations.append(
                Violation(
                    code=ConditionCode.KAPPA_UPPER,
                    message=f"kappa < d/(d+3) fails ({s.kappa:.6g} >= {upper:.6g})",
                )
            )
    if not s.kappa > s.kappa_hat:
        violations.append(
            Violation(
                code=ConditionCode.KAPPA_ORDER,
                message=f"kappa > kappa_hat fails ({s.kappa:.6g} <= {s.kappa_hat:.6g})",
            )
        )

    return ValidationReport(
        ok=not violations, violations=violations, kappa_interval_nonempty=nonempty
    )


def require_admissible(report: ValidationReport, what: str = "parameters") -> None:
    if not report.ok:
        raise AdmissibilityError(f"Inadmissible {what}", report=report)


def derived_scales(s: ScalingParams) -> DerivedScales:
    """kappa_N = N^(kappa/d), kappa_hat_N = N^(kappa_hat/d), delta_N = N^-delta"""
    require_admissible(validate_scaling(s), "scaling parameters")
    N = float(s.N)
    return DerivedScales(
        kappa_N=N ** (s.kappa / s.d),
        kappa_hat_N=N ** (s.kappa_hat / s.d),
        delta_N=N ** (-s.delta),
    )


def moderate_variance_exponent(s: ScalingParams, beta: float) -> float:
    """Heuristic log-log slope bound -(1 - kappa(d+2beta)/d) of the force variance"""
    return -(1.0 - s.kappa * (s.d + 2.0 * beta) / s.d)
