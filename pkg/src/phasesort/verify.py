"""Seeded invariant battery behind the ``verify`` command.

Each property draws its own deterministic substream, checks a batch of
random instances, and reports pass/fail with a count. Properties that only
make sense for injective keys are reported as skipped when the certificate
fails, instead of failing vacuously.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lipschitz
from .encoders import alpha, beta, beta_tilde, dist_hat_H, dist_hat_V, hadamard_split
from .errors import PhasesortError
from .frame_keys import (
    Key,
    analysis,
    has_complement_property,
    is_full_spark,
    is_phase_retrievable,
    is_universal_key,
)
from .inversion import invert_beta, invert_beta_tilde, omega

SKIPPED = "skipped (not injective)"


@dataclass(frozen=True)
class PropertyResult:
    name: str
    status: str  # "pass" | "fail" | SKIPPED
    count: int
    detail: str = ""


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def exact_half_identities(u: float, v: float) -> bool:
    """Check max/min = (u + v +- |u - v|) / 2 in error-free arithmetic.

    Both doubles are scaled to integers over a common power-of-two
    denominator; the identities are then exact integer statements. Direct
    float evaluation would round the intermediate sums and fail spuriously.
    """
    pu, qu = float(u).as_integer_ratio()
    pv, qv = float(v).as_integer_ratio()
    q = max(qu, qv)
    iu = pu * (q // qu)
    iv = pv * (q // qv)
    s = iu + iv
    spread = abs(iu - iv)
    return 2 * max(iu, iv) == s + spread and 2 * min(iu, iv) == s - spread


def minmax_identity_failures(u: np.ndarray, v: np.ndarray) -> int:
    """Count pairs violating any of the five min/max/abs lattice identities.

    The sum, difference, and folded-magnitude identities are bit-exact in
    float arithmetic and are checked directly; the two halved forms are
    checked in exact arithmetic.
    """
    mx, mn = np.maximum(u, v), np.minimum(u, v)
    ok = np.abs(u - v) == mx - mn
    ok &= (u + v) == (mx + mn)
    ok &= np.abs(np.abs(u) - np.abs(v)) == np.minimum(np.abs(u - v), np.abs(u + v))
    failures = int(ok.size - np.count_nonzero(ok))
    for uu, vv in zip(u.ravel(), v.ravel()):
        if not exact_half_identities(uu, vv):
            failures += 1
    return failures


def _rel_close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b))) <= tol * max(
        1.0, float(np.linalg.norm(np.asarray(b)))
    )


def run_battery(key: Key, samples: int, seed: int) -> list[PropertyResult]:
    """Run every invariant against one key; deterministic given (key, samples, seed)."""
    d = key.d
    results: list[PropertyResult] = []
    injective = is_phase_retrievable(key).verdict

    # lattice identities on random pairs
    rng = _rng(seed, 0)
    u = rng.standard_normal(samples)
    v = rng.standard_normal(samples)
    bad = minmax_identity_failures(u, v)
    results.append(
        PropertyResult(
            "minmax-identities",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    # sorted embedding against magnitude/analysis split
    rng = _rng(seed, 1)
    bad = 0
    for _ in range(samples):
        cfg = rng.standard_normal((2, d))
        diff, total = hadamard_split(beta(key, cfg))
        if not _rel_close(diff, alpha(key, cfg[0] - cfg[1]), 1e-12):
            bad += 1
        elif not _rel_close(total, analysis(key, cfg[0] + cfg[1]), 1e-12):
            bad += 1
    results.append(
        PropertyResult(
            "hadamard-split-identity",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    # encoder invariances, bitwise
    rng = _rng(seed, 2)
    bad = 0
    for _ in range(samples):
        x = rng.standard_normal(d)
        if not np.array_equal(alpha(key, x), alpha(key, -x)):
            bad += 1
    results.append(
        PropertyResult(
            "alpha-sign-invariance",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    rng = _rng(seed, 3)
    bad = 0
    for _ in range(samples):
        n = int(rng.integers(1, 5))
        cfg = rng.standard_normal((n, d))
        perm = rng.permutation(n)
        if not np.array_equal(beta(key, cfg).matrix, beta(key, cfg[perm]).matrix):
            bad += 1
    results.append(
        PropertyResult(
            "beta-permutation-invariance",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    # split of the squared magnitude gap along the comparison set
    rng = _rng(seed, 4)
    bad = 0
    a = key.matrix
    for _ in range(samples):
        x = rng.standard_normal(d)
        y = rng.standard_normal(d)
        lhs = float(np.sum((alpha(key, x) - alpha(key, y)) ** 2))
        cd = a.T @ (x - y)
        cs = a.T @ (x + y)
        in_s = np.abs(cd) <= np.abs(cs)
        rhs = float(np.sum(cd[in_s] ** 2) + np.sum(cs[~in_s] ** 2))
        if abs(lhs - rhs) > 1e-12 * max(1.0, abs(rhs)):
            bad += 1
    results.append(
        PropertyResult(
            "auxiliary-set-decomposition",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    # sign-quotient distance equals stacked permutation-quotient distance / sqrt(2)
    rng = _rng(seed, 5)
    bad = 0
    for _ in range(samples):
        x = rng.standard_normal(d)
        y = rng.standard_normal(d)
        stacked = dist_hat_V(np.vstack([x, -x]), np.vstack([y, -y]))[0]
        if abs(dist_hat_H(x, y) - stacked / np.sqrt(2.0)) > 1e-12 * max(1.0, stacked):
            bad += 1
    results.append(
        PropertyResult(
            "quotient-metric-stack",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    # certificate cross-agreements
    problems: list[str] = []
    pr = is_phase_retrievable(key)
    uk = is_universal_key(key)
    if pr.verdict != uk.verdict:
        problems.append("phase-retrievable != universal-key")
    if key.D == 2 * key.d - 1 and is_full_spark(key).verdict != uk.verdict:
        problems.append("full-spark != universal-key at D = 2d-1")
    if key.D < 2 * key.d - 1 and uk.verdict:
        problems.append("universal despite D < 2d-1")
    a0, _ = lipschitz.lower_constant(key)
    a0_positive = a0 > key.tol.rank_tol_factor * max(key.d, key.D) * max(
        1.0, lipschitz.upper_constant(key)
    )
    if a0_positive != has_complement_property(key).verdict:
        problems.append("A0 positivity disagrees with complement property")
    results.append(
        PropertyResult(
            "certificate-agreement",
            "pass" if not problems else "fail",
            4,
            "; ".join(problems),
        )
    )

    # decoders and the sandwich need an injective key
    if not injective:
        for name in (
            "roundtrip-alpha",
            "roundtrip-beta",
            "roundtrip-beta-tilde",
            "lipschitz-sandwich",
            "achievement",
        ):
            results.append(PropertyResult(name, SKIPPED, 0))
        return results

    rng = _rng(seed, 6)
    bad = 0
    for _ in range(samples):
        x = rng.standard_normal(d)
        rec = omega(key, alpha(key, x)).x
        if dist_hat_H(rec, x) > 1e-8 * max(1.0, float(np.linalg.norm(x))):
            bad += 1
    results.append(
        PropertyResult(
            "roundtrip-alpha",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    rng = _rng(seed, 7)
    bad = 0
    for _ in range(samples):
        cfg = rng.standard_normal((2, d))
        rec = invert_beta(key, beta(key, cfg).matrix)
        if dist_hat_V(rec, cfg)[0] > 1e-8 * max(1.0, float(np.linalg.norm(cfg))):
            bad += 1
    results.append(
        PropertyResult(
            "roundtrip-beta",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    rng = _rng(seed, 8)
    bad = 0
    for _ in range(samples):
        cfg = rng.standard_normal((2, d))
        rec = invert_beta_tilde(key, beta_tilde(key, cfg))
        if dist_hat_V(rec, cfg)[0] > 1e-8 * max(1.0, float(np.linalg.norm(cfg))):
            bad += 1
    results.append(
        PropertyResult(
            "roundtrip-beta-tilde",
            "pass" if bad == 0 else "fail",
            samples,
            "" if bad == 0 else f"{bad} violations",
        )
    )

    try:
        lipschitz.ratio_scan(key, samples, seed, include_witnesses=True)
        results.append(PropertyResult("lipschitz-sandwich", "pass", samples))
    except PhasesortError as exc:
        results.append(PropertyResult("lipschitz-sandwich", "fail", samples, str(exc)))

    try:
        report = lipschitz.build_report(key)
        lipschitz.check_achievement(key, report)
        results.append(PropertyResult("achievement", "pass", 4))
    except PhasesortError as exc:
        results.append(PropertyResult("achievement", "fail", 4, str(exc)))

    return results
