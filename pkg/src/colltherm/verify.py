"""Built-in oracle suite behind ``colltherm verify``.

Every check here recomputes its expected value from scratch — hand-rolled
matrix entries, closed-form states and SLDs, Gibbs weights — rather than
calling back into the code under test, so a bug in the library cannot hide
by agreeing with itself.  Groups:

* ``appendix``   — entrywise reproduction of the hand-derived collision
                   channel, rotation superoperator, composed two-collision
                   channels, and Kraus operators.
* ``kraus``      — completeness and complete positivity of the collision
                   channel over random parameters.
* ``fixedpoint`` — the rethermalization channel fixes the Gibbs state,
                   is the identity at t = 0, and contracts toward Gibbs.
* ``closedform`` — single-ancilla final state and SLDs against the
                   closed-form expressions.
* ``theorem1``   — randomized equivalence of the derivative-proportionality
                   singularity criterion with the determinant criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    BathSpec,
    CollisionSpec,
    RotationSpec,
    collision_superoperator,
    collision_unitary,
    kraus_from_collision,
    rotation_superoperator,
    thermal_state,
    thermalization_channel,
)
from .estimation import (
    ParamDerivatives,
    det_singular_threshold,
    qfim,
    singularity_test,
)
from .linalg import choi_matrix, devectorize, vectorize
from .protocols import ProtocolConfig

__all__ = ["CheckResult", "GROUPS", "run_group", "run_all"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    residual: float
    detail: str = ""


# ---------------------------------------------------------------------------
# independent expected values (recomputed, not imported)
# ---------------------------------------------------------------------------

def _gibbs_weights(omega: float, T: float) -> tuple[float, float]:
    # |0> is the excited level (+omega/2), so its weight is the smaller one
    z = math.exp(-omega / (2 * T)) + math.exp(omega / (2 * T))
    return math.exp(-omega / (2 * T)) / z, math.exp(omega / (2 * T)) / z


def _expected_collision_channel(gt: float, lam0: float) -> np.ndarray:
    """Hand-derived 4x4 collision channel on the ancilla (row-major vec)."""
    c, s = math.cos(gt), math.sin(gt)
    lam1 = 1.0 - lam0
    return np.array(
        [
            [lam0 + lam1 * c * c, 0, 0, lam0 * s * s],
            [0, c, 0, 0],
            [0, 0, c, 0],
            [lam1 * s * s, 0, 0, lam1 + lam0 * c * c],
        ],
        dtype=complex,
    )


_EXPECTED_ROT_PI4 = 0.5 * np.array(
    [
        [1, 1j, -1j, 1],
        [1j, 1, 1, -1j],
        [-1j, 1, 1, 1j],
        [1, -1j, 1j, 1],
    ],
    dtype=complex,
)


def _expected_two_collisions_plain(gt: float, p: float, q: float) -> np.ndarray:
    """Two collisions, no rotation, equal angles.

    Block form [[1-u,0,0,v],[0,c^2,0,0],[0,0,c^2,0],[u,0,0,1-v]] with
    u = sin^2(gt) [(1-q) + (1-p) cos^2(gt)] and
    v = sin^2(gt) [q + p cos^2(gt)]: the second bath's weight q enters
    undressed and the first bath's p arrives attenuated by the second
    collision, as the composition order demands.  (A full swap at both
    stages leaves the ancilla carrying the *second* bath's populations.)
    """
    c2, s2 = math.cos(gt) ** 2, math.sin(gt) ** 2
    u = s2 * ((1 - q) + (1 - p) * c2)
    v = s2 * (q + p * c2)
    return np.array(
        [
            [1 - u, 0, 0, v],
            [0, c2, 0, 0],
            [0, 0, c2, 0],
            [u, 0, 0, 1 - v],
        ],
        dtype=complex,
    )


def _mu(q: float, g2: float) -> float:
    return q * math.sin(g2) ** 2 + math.cos(g2) ** 2 / 2.0


def _chi(p: float, g1: float, g2: float) -> float:
    return 0.5 * (1.0 - 2.0 * p * math.sin(g1) ** 2) * math.cos(g2)


def _expected_two_collisions_rot(g: float, p: float, q: float) -> np.ndarray:
    """Collision - pi/4 x-rotation - collision, equal angles g."""
    mu, zeta = _mu(q, g), math.cos(g) ** 2
    chi_p, chi_1mp = _chi(p, g, g), _chi(1 - p, g, g)
    cg = math.cos(g)
    return np.array(
        [
            [mu, 0.5j * zeta * cg, -0.5j * zeta * cg, mu],
            [1j * chi_1mp, 0.5 * zeta, 0.5 * zeta, -1j * chi_p],
            [-1j * chi_1mp, 0.5 * zeta, 0.5 * zeta, 1j * chi_p],
            [1 - mu, -0.5j * zeta * cg, 0.5j * zeta * cg, 1 - mu],
        ],
        dtype=complex,
    )


def _dlam0_dT(omega: float, T: float) -> float:
    lam0, lam1 = _gibbs_weights(omega, T)
    return (omega / T**2) * lam0 * lam1


def _expected_final_state(g1: float, g2: float, p: float, q: float) -> np.ndarray:
    mu, chi = _mu(q, g2), _chi(p, g1, g2)
    return np.array([[mu, -1j * chi], [1j * chi, 1 - mu]], dtype=complex)


def _expected_slds(g1: float, g2: float, T1: float, T2: float, omega: float = 1.0):
    """Closed-form SLD pair for the rotated single-ancilla family."""
    p, _ = _gibbs_weights(omega, T1)
    q, _ = _gibbs_weights(omega, T2)
    mu, chi = _mu(q, g2), _chi(p, g1, g2)
    det = mu * (1 - mu) - chi * chi
    root = math.sqrt(1.0 - 4.0 * det)
    alpha = (0.5 * (1 + root), 0.5 * (1 - root))
    beta = tuple((a - mu) / chi for a in alpha)
    kets = [
        np.array([1.0, 1j * b], dtype=complex) / math.sqrt(1 + b * b) for b in beta
    ]
    proj = [np.outer(k, k.conj()) for k in kets]
    cross = np.outer(kets[0], kets[1].conj()) + np.outer(kets[1], kets[0].conj())
    denom = math.sqrt((1 + beta[0] ** 2) * (1 + beta[1] ** 2))

    chi_dot = -math.sin(g1) ** 2 * math.cos(g2) * _dlam0_dT(omega, T1)
    mu_dot = math.sin(g2) ** 2 * _dlam0_dT(omega, T2)

    l1 = chi_dot * (
        sum(2 * beta[k] / (alpha[k] * (1 + beta[k] ** 2)) * proj[k] for k in (0, 1))
        + 2 * (beta[0] + beta[1]) / denom * cross
    )
    l2 = mu_dot * (
        sum((1 - beta[k] ** 2) / (alpha[k] * (1 + beta[k] ** 2)) * proj[k] for k in (0, 1))
        + 2 * (1 - beta[0] * beta[1]) / denom * cross
    )
    return l1, l2


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------

def _check(name: str, residual: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(residual <= tol), float(residual), detail)


def _group_appendix(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    out = []

    res = 0.0
    for _ in range(max(trials, 20)):
        gt = rng.uniform(0.0, math.pi)
        T = rng.uniform(0.5, 4.0)
        lam0, _ = _gibbs_weights(1.0, T)
        got = collision_superoperator(CollisionSpec.from_angle(gt), BathSpec(T))
        res = max(res, float(np.max(np.abs(got - _expected_collision_channel(gt, lam0)))))
    out.append(_check("collision-channel-entrywise", res, 1e-12))

    got = rotation_superoperator(RotationSpec(math.pi / 4, "x"), 2)
    out.append(
        _check("rotation-superoperator-pi4", float(np.max(np.abs(got - _EXPECTED_ROT_PI4))), 1e-12)
    )

    res = 0.0
    for _ in range(max(trials, 20)):
        gt = rng.uniform(0.0, math.pi)
        T1, T2 = rng.uniform(0.5, 4.0, size=2)
        p, _ = _gibbs_weights(1.0, T1)
        q, _ = _gibbs_weights(1.0, T2)
        spec = CollisionSpec.from_angle(gt)
        e1 = collision_superoperator(spec, BathSpec(T1))
        e2 = collision_superoperator(spec, BathSpec(T2))
        res = max(res, float(np.max(np.abs(e2 @ e1 - _expected_two_collisions_plain(gt, p, q)))))
    out.append(_check("two-collision-composition-plain", res, 1e-12))

    res = 0.0
    rot = rotation_superoperator(RotationSpec(math.pi / 4, "x"), 2)
    for _ in range(max(trials, 20)):
        g = rng.uniform(0.0, math.pi)
        T1, T2 = rng.uniform(0.5, 4.0, size=2)
        p, _ = _gibbs_weights(1.0, T1)
        q, _ = _gibbs_weights(1.0, T2)
        spec = CollisionSpec.from_angle(g)
        e1 = collision_superoperator(spec, BathSpec(T1))
        e2 = collision_superoperator(spec, BathSpec(T2))
        res = max(res, float(np.max(np.abs(e2 @ rot @ e1 - _expected_two_collisions_rot(g, p, q)))))
    out.append(_check("two-collision-composition-rotated", res, 1e-12))

    # Kraus blocks: K_00, K_01, K_11 entrywise; K_10 only up to a global
    # phase (a phase on one Kraus operator never changes the channel).
    res, res_phase = 0.0, 0.0
    for _ in range(max(trials, 20)):
        gt = rng.uniform(0.0, math.pi)
        T = rng.uniform(0.5, 4.0)
        lam0, lam1 = _gibbs_weights(1.0, T)
        c, s = math.cos(gt), math.sin(gt)
        u = collision_unitary(CollisionSpec.from_angle(gt))
        ks = kraus_from_collision(u, thermal_state(1.0, T)).operators
        k00 = math.sqrt(lam0) * np.diag([1.0, c])
        k01 = -1j * s * math.sqrt(lam1) * np.array([[0, 0], [1, 0]])
        k10 = s * math.sqrt(lam0) * np.array([[0, 1], [0, 0]])
        k11 = math.sqrt(lam1) * np.diag([c, 1.0])
        for got, want in ((ks[0], k00), (ks[1], k01), (ks[3], k11)):
            res = max(res, float(np.max(np.abs(got - want))))
        res_phase = max(res_phase, float(np.max(np.abs(np.abs(ks[2]) - np.abs(k10)))))
    out.append(_check("kraus-blocks-entrywise", res, 1e-12))
    out.append(_check("kraus-block-10-up-to-phase", res_phase, 1e-12))
    return out


def _group_kraus(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    out = []
    res_comp, res_choi, res_tp = 0.0, 0.0, 0.0
    for _ in range(max(trials, 20)):
        gt = rng.uniform(0.0, math.pi)
        T = rng.uniform(0.5, 4.0)
        dim = int(rng.integers(2, 4))
        u = collision_unitary(CollisionSpec.from_angle(gt), dim)
        ks = kraus_from_collision(u, thermal_state(1.0, T))
        res_comp = max(res_comp, ks.completeness_defect())
        sop = ks.superoperator()
        lo = float(np.linalg.eigvalsh(choi_matrix(sop, dim))[0])
        res_choi = max(res_choi, max(0.0, -lo))
        # trace preservation on a random state
        x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = x @ x.conj().T
        rho /= rho.trace()
        res_tp = max(res_tp, abs(devectorize(sop @ vectorize(rho), dim).trace() - 1.0))
    out.append(_check("kraus-completeness", res_comp, 1e-10))
    out.append(_check("choi-positive", res_choi, 1e-10))
    out.append(_check("trace-preservation", res_tp, 1e-10))
    return out


def _group_fixedpoint(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    out = []
    res_fix, res_id, res_conv = 0.0, 0.0, 0.0
    for _ in range(max(trials, 20)):
        T = rng.uniform(0.5, 4.0)
        gamma_t = rng.uniform(0.05, 2.0)
        bath = BathSpec(T, therm_time=gamma_t)
        lam0, lam1 = _gibbs_weights(1.0, T)
        gibbs = np.diag([lam0, lam1]).astype(complex)
        ch = thermalization_channel(bath)
        res_fix = max(res_fix, float(np.max(np.abs(ch @ vectorize(gibbs) - vectorize(gibbs)))))

        res_id = max(
            res_id,
            float(np.max(np.abs(thermalization_channel(BathSpec(T, therm_time=0.0)) - np.eye(4)))),
        )

        x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = x @ x.conj().T
        rho /= rho.trace()
        long = thermalization_channel(BathSpec(T, therm_time=50.0))
        res_conv = max(
            res_conv, float(np.max(np.abs(devectorize(long @ vectorize(rho), 2) - gibbs)))
        )
    out.append(_check("gibbs-fixed-point", res_fix, 1e-10))
    out.append(_check("identity-at-zero-time", res_id, 1e-12))
    out.append(_check("long-time-convergence", res_conv, 1e-8))
    return out


def _two_bath_config(g1, g2, T1, T2, rotation_enabled=True) -> ProtocolConfig:
    return ProtocolConfig(
        baths=(BathSpec(T1), BathSpec(T2)),
        collision_angles=(g1, g2),
        rotation=RotationSpec(math.pi / 4, "x"),
        rotation_enabled=rotation_enabled,
    )


def _group_closedform(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    from .protocols import single_run  # local import to avoid cycle at module load

    out = []
    res_plain, res_rot, res_sld = 0.0, 0.0, 0.0
    for _ in range(max(trials, 20)):
        g1 = rng.uniform(0.1 * math.pi, 0.9 * math.pi)
        g2 = rng.uniform(0.1 * math.pi, 0.9 * math.pi)
        while abs(g2 - math.pi / 2) < 0.05 * math.pi:
            g2 = rng.uniform(0.1 * math.pi, 0.9 * math.pi)
        T1 = rng.uniform(0.5, 4.0)
        T2 = rng.uniform(0.5, 4.0)
        while abs(T1 - T2) < 0.2:
            T2 = rng.uniform(0.5, 4.0)
        p, _ = _gibbs_weights(1.0, T1)
        q, _ = _gibbs_weights(1.0, T2)

        state, _rep = single_run(_two_bath_config(g1, g2, T1, T2, rotation_enabled=False))
        s1s, c2s = math.sin(g1) ** 2, math.cos(g2) ** 2
        v = q * math.sin(g2) ** 2 + p * s1s * c2s
        res_plain = max(res_plain, float(np.max(np.abs(state.mat - np.diag([v, 1 - v])))))

        state, rep = single_run(_two_bath_config(g1, g2, T1, T2))
        res_rot = max(
            res_rot, float(np.max(np.abs(state.mat - _expected_final_state(g1, g2, p, q))))
        )
        l1, l2 = _expected_slds(g1, g2, T1, T2)
        res_sld = max(res_sld, float(np.max(np.abs(rep.qfim.slds[0] - l1))))
        res_sld = max(res_sld, float(np.max(np.abs(rep.qfim.slds[1] - l2))))
    out.append(_check("final-state-no-rotation", res_plain, 1e-10))
    out.append(_check("final-state-rotated", res_rot, 1e-10))
    out.append(_check("sld-closed-forms", res_sld, 1e-8))
    return out


def _random_family(rng: np.random.Generator):
    """Random full-rank qubit state with two random traceless derivatives;
    proportional (including one vanishing) derivatives half the time."""
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    qmat, _ = np.linalg.qr(x)
    w = rng.uniform(0.05, 0.45)
    rho = qmat @ np.diag([w, 1 - w]).astype(complex) @ qmat.conj().T

    def rand_deriv():
        a = rng.normal(size=3)
        a /= np.linalg.norm(a)
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, -1j], [1j, 0]])
        sz = np.diag([1.0, -1.0]).astype(complex)
        return a[0] * sx + a[1] * sy + a[2] * sz

    d1 = rand_deriv()
    mode = rng.uniform()
    if mode < 0.45:
        d2 = float(rng.normal()) * d1
        expect = True
    elif mode < 0.5:
        d2 = np.zeros((2, 2), dtype=complex)
        expect = True
    else:
        d2 = rand_deriv()
        expect = False
    return ParamDerivatives(rho, (d1, d2)), expect


def _group_theorem1(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    n = max(trials, 100)
    disagrees = 0
    worst = ""
    for i in range(n):
        pd, expect = _random_family(rng)
        prop, _c = singularity_test(pd)
        f = qfim(pd)
        by_det = f.det <= det_singular_threshold(f.matrix)
        if prop != by_det or prop != expect:
            disagrees += 1
            if not worst:
                worst = (
                    f"trial {i}: proportional={prop}, det={f.det:.3e}, constructed={expect}"
                )
    frac = disagrees / n
    return [
        CheckResult(
            "proportionality-equals-determinant",
            disagrees == 0,
            frac,
            worst or f"{n} families, full agreement",
        )
    ]


GROUPS = {
    "appendix": _group_appendix,
    "kraus": _group_kraus,
    "fixedpoint": _group_fixedpoint,
    "closedform": _group_closedform,
    "theorem1": _group_theorem1,
}


def run_group(name: str, seed: int = 1234, trials: int = 200) -> list[CheckResult]:
    try:
        fn = GROUPS[name]
    except KeyError:
        raise ValueError(f"unknown verify group {name!r}; choose from {sorted(GROUPS)}") from None
    return fn(np.random.default_rng(seed), trials)


def run_all(seed: int = 1234, trials: int = 200) -> dict[str, list[CheckResult]]:
    return {name: run_group(name, seed, trials) for name in GROUPS}
