"""Protocol evaluators: collision streams composed into estimation reports.

Four experiment families share one physical loop.  A stream of identically
prepared ancillas passes, one at a time, through every probe in order; a
local rotation follows each collision except (by default) the last; each
probe partially rethermalizes toward its bath between consecutive ancillas.
At the end the ancillas are measured, and the temperature vector of the
baths is what the measurement estimates.

* :func:`single_run` — one ancilla, channel composition on the ancilla alone
  (the probes are fresh and thermal, so their effect is exactly the reduced
  collision channel).
* :func:`multi_ancilla_uncorrelated` — sequential stream tracking single-
  system marginals; the n-ancilla state is the tensor product of the
  recorded marginals and the QFIM is the sum of per-ancilla QFIMs.
* :func:`multi_ancilla_correlated` — full joint simulation of probes and
  ancillas, probes traced out only at the end; keeps the ancilla-ancilla
  correlations the product-of-marginals mode discards.
* :func:`three_bath_qutrit` — three probes with a qutrit ancilla stream
  (marginal-product mode); a qubit ancilla is allowed as a diagnostic.

All temperature derivatives go through finite differences on the full
evaluator, so the probe initial states and the rethermalization channel are
differentiated together.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import operators
from .channels import (
    BathSpec,
    CollisionSpec,
    RotationSpec,
    collision_superoperator,
    collision_unitary,
    rotation_superoperator,
    thermal_state,
    thermalization_channel,
)
from .estimation import (
    EstimationReport,
    ParamDerivatives,
    Qfim,
    build_report,
    finite_diff_derivatives,
    qfim,
    thermal_fim,
)
from .linalg import (
    DensityMatrix,
    apply_superop_local,
    apply_unitary_local,
    devectorize,
    kron_all,
    trace_out,
    vectorize,
)

__all__ = [
    "SIM_DIM_CAP",
    "ProtocolConfig",
    "SweepGrid",
    "SWEEP_AXES",
    "single_run",
    "multi_ancilla_uncorrelated",
    "multi_ancilla_correlated",
    "three_bath_qutrit",
    "sweep",
    "scenario_for",
    "evaluate",
]

SIM_DIM_CAP = 2**8  # joint-simulation Hilbert-space cap (2 probes x 6 qubit ancillas)


@dataclass(frozen=True)
class ProtocolConfig:
    """Full specification of one protocol run.

    ``collision_angles`` are the products g*tau in radians, one per bath
    stage.  ``rotation`` is applied to the ancilla after every collision
    except the last; ``apply_rotation_after_last`` adds the trailing one
    (which cannot change any QFIM — it is a fixed unitary — but resolves an
    ambiguity in how the composed channel is written down).
    """

    baths: tuple[BathSpec, ...]
    collision_angles: tuple[float, ...]
    ancilla_dim: int = 2
    n_ancillas: int = 1
    ancilla_init: int | None = None
    rotation: RotationSpec = field(default_factory=lambda: RotationSpec(math.pi / 4))
    rotation_enabled: bool = True
    correlated: bool = False
    apply_rotation_after_last: bool = False

    def __post_init__(self):
        object.__setattr__(self, "baths", tuple(self.baths))
        object.__setattr__(
            self, "collision_angles", tuple(float(g) for g in self.collision_angles)
        )
        n_baths = len(self.baths)
        if n_baths not in (2, 3):
            raise ValueError(f"baths: need 2 or 3 stages, got {n_baths}")
        if self.ancilla_dim not in (2, 3):
            raise ValueError(f"ancilla_dim: must be 2 or 3, got {self.ancilla_dim}")
        if len(self.collision_angles) != n_baths:
            raise ValueError(
                f"collision_angles: need one per bath ({n_baths}), got "
                f"{len(self.collision_angles)}"
            )
        if self.n_ancillas < 1:
            raise ValueError(f"n_ancillas: must be >= 1, got {self.n_ancillas}")
        if self.ancilla_init is None:
            object.__setattr__(self, "ancilla_init", self.ancilla_dim - 1)
        if not 0 <= self.ancilla_init < self.ancilla_dim:
            raise ValueError(
                f"ancilla_init: index {self.ancilla_init} out of range for "
                f"dimension {self.ancilla_dim}"
            )

    @property
    def n_baths(self) -> int:
        return len(self.baths)

    @property
    def temperatures(self) -> tuple[float, ...]:
        return tuple(b.temperature for b in self.baths)

    def joint_dim(self) -> int:
        return 2**self.n_baths * self.ancilla_dim**self.n_ancillas

    def at_temperatures(self, temps) -> "ProtocolConfig":
        baths = tuple(b.at_temperature(float(t)) for b, t in zip(self.baths, temps))
        return replace(self, baths=baths)

    def _rotation_stages(self) -> tuple[bool, ...]:
        """Which collision stages are followed by the ancilla rotation."""
        if not self.rotation_enabled:
            return (False,) * self.n_baths
        last = self.n_baths - 1
        return tuple(i < last or self.apply_rotation_after_last for i in range(self.n_baths))


def _commutator_norm(slds: tuple[np.ndarray, ...]) -> float:
    """Largest Frobenius norm of [L_i, L_j] over SLD pairs."""
    best = 0.0
    for i in range(len(slds)):
        for j in range(i + 1, len(slds)):
            c = slds[i] @ slds[j] - slds[j] @ slds[i]
            best = max(best, float(np.linalg.norm(c)))
    return best


# ---------------------------------------------------------------------------
# single ancilla: reduced-channel composition
# ---------------------------------------------------------------------------

def single_run(config: ProtocolConfig) -> tuple[DensityMatrix, EstimationReport]:
    """One ancilla through all probes; returns (final state, report).

    With a single ancilla every probe is still in equilibrium when the
    collision happens, so the ancilla evolves by the composition of the
    reduced collision channels (with rotations interleaved).  This is the
    route the closed forms describe; the stream simulators must agree with
    it at n = 1.
    """
    if config.n_ancillas != 1:
        raise ValueError(f"single_run requires n_ancillas = 1, got {config.n_ancillas}")
    d = config.ancilla_dim
    rho0 = operators.basis_state(d, config.ancilla_init)
    stages = config._rotation_stages()
    rot = rotation_superoperator(config.rotation, d) if config.rotation_enabled else None

    def state_fn(temps):
        v = vectorize(rho0)
        for i, (bath, ang) in enumerate(zip(config.baths, config.collision_angles)):
            e = collision_superoperator(
                CollisionSpec.from_angle(ang), bath.at_temperature(float(temps[i])), d
            )
            v = e @ v
            if stages[i]:
                v = rot @ v
        return devectorize(v, d)

    temps = np.array(config.temperatures)
    pd = finite_diff_derivatives(state_fn, temps)
    qf = qfim(pd)
    report = build_report(qf, thermal_fim(config.baths), _commutator_norm(qf.slds))
    final = DensityMatrix(state_fn(temps), (d,))
    return final, report


# ---------------------------------------------------------------------------
# ancilla streams
# ---------------------------------------------------------------------------

def _stream_marginals(config: ProtocolConfig) -> list[np.ndarray]:
    """Marginal final state of each ancilla in the sequential stream.

    Probe marginals persist across ancillas and pick up the partial
    rethermalization channel after each collision (except after the last
    ancilla, where it can no longer influence anything measured).
    """
    d = config.ancilla_dim
    n = config.n_ancillas
    probes = [thermal_state(b.omega, b.temperature).mat for b in config.baths]
    therm = [thermalization_channel(b) for b in config.baths]
    colls = [
        collision_unitary(CollisionSpec.from_angle(g), d) for g in config.collision_angles
    ]
    stages = config._rotation_stages()
    u_rot = config.rotation.unitary(d) if config.rotation_enabled else None
    anc0 = operators.basis_state(d, config.ancilla_init)

    out = []
    for k in range(n):
        a = anc0
        for i in range(config.n_baths):
            u = colls[i]
            joint = u @ np.kron(probes[i], a) @ u.conj().T
            a = trace_out(joint, (2, d), keep=(1,))
            if stages[i]:
                a = u_rot @ a @ u_rot.conj().T
            if k < n - 1:
                p = trace_out(joint, (2, d), keep=(0,))
                probes[i] = devectorize(therm[i] @ vectorize(p), 2)
        out.append(a)
    return out


def multi_ancilla_uncorrelated(config: ProtocolConfig) -> EstimationReport:
    """Stream report with ancilla-ancilla correlations discarded.

    The joint state is taken to be the tensor product of the recorded
    marginals, so the QFIM is additive: F = sum_k F(rho_k).  All n marginals
    come out of one stream pass, and the finite-difference evaluations are
    shared across ancillas through a per-temperature cache.
    """
    if config.correlated:
        raise ValueError("config.correlated is set; use multi_ancilla_correlated")
    temps = np.array(config.temperatures)
    cache: dict[tuple[float, ...], list[np.ndarray]] = {}

    def marginals(tvec) -> list[np.ndarray]:
        key = tuple(float(t) for t in tvec)
        if key not in cache:
            cache[key] = _stream_marginals(config.at_temperatures(key))
        return cache[key]

    total = np.zeros((config.n_baths, config.n_baths))
    comm = 0.0
    support = 1
    for k in range(config.n_ancillas):
        pd = finite_diff_derivatives(lambda t, k=k: marginals(t)[k], temps)
        qf_k = qfim(pd)
        total += qf_k.matrix
        comm = max(comm, _commutator_norm(qf_k.slds))
        support *= qf_k.support_dim
    qf = Qfim(total, slds=(), support_dim=support)
    return build_report(qf, thermal_fim(config.baths), comm)


def multi_ancilla_correlated(config: ProtocolConfig) -> EstimationReport:
    """Full joint simulation; QFIM on the complete n-ancilla state.

    Probes and ancillas evolve as one closed register (with the
    rethermalization channel acting locally on probes), and the probes are
    traced out only at the very end, so whatever correlations the shared
    probes establish between ancillas survive into the measured state.
    """
    jd = config.joint_dim()
    if jd > SIM_DIM_CAP:
        raise ValueError(
            f"joint dimension {jd} = 2^{config.n_baths} * "
            f"{config.ancilla_dim}^{config.n_ancillas} exceeds the cap {SIM_DIM_CAP}"
        )
    nb, d, n = config.n_baths, config.ancilla_dim, config.n_ancillas
    dims = (2,) * nb + (d,) * n
    colls = [
        collision_unitary(CollisionSpec.from_angle(g), d) for g in config.collision_angles
    ]
    stages = config._rotation_stages()
    u_rot = config.rotation.unitary(d) if config.rotation_enabled else None
    anc0 = operators.basis_state(d, config.ancilla_init)

    def joint_fn(tvec):
        baths = [b.at_temperature(float(t)) for b, t in zip(config.baths, tvec)]
        therm = [thermalization_channel(b) for b in baths]
        state = kron_all(*[thermal_state(b.omega, b.temperature).mat for b in baths],
                         *[anc0] * n)
        for k in range(n):
            for i in range(nb):
                state = apply_unitary_local(state, dims, colls[i], (i, nb + k))
                if stages[i]:
                    state = apply_unitary_local(state, dims, u_rot, (nb + k,))
                if k < n - 1:
                    state = apply_superop_local(state, dims, therm[i], i)
        return trace_out(state, dims, keep=range(nb, nb + n))

    temps = np.array(config.temperatures)
    pd = finite_diff_derivatives(joint_fn, temps)
    qf = qfim(pd)
    return build_report(qf, thermal_fim(config.baths), _commutator_norm(qf.slds))


def three_bath_qutrit(config: ProtocolConfig) -> EstimationReport:
    """Three-temperature stream report (marginal-product mode).

    Expects qutrit ancillas; a qubit ancilla is accepted as the diagnostic
    that shows why a two-level carrier cannot jointly resolve three
    temperatures well.
    """
    if config.n_baths != 3:
        raise ValueError(f"three_bath_qutrit requires 3 baths, got {config.n_baths}")
    if config.correlated:
        raise ValueError("three_bath_qutrit runs in uncorrelated stream mode")
    return multi_ancilla_uncorrelated(config)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def _set_angle(config: ProtocolConfig, stage: int, value: float) -> ProtocolConfig:
    if stage >= config.n_baths:
        raise ValueError(f"axis refers to bath stage {stage + 1}, config has {config.n_baths}")
    angles = list(config.collision_angles)
    angles[stage] = value * math.pi
    return replace(config, collision_angles=tuple(angles))


def _set_theta(config: ProtocolConfig, value: float) -> ProtocolConfig:
    return replace(config, rotation=replace(config.rotation, theta=value * math.pi))


def _set_gamma_t(config: ProtocolConfig, value: float) -> ProtocolConfig:
    baths = tuple(replace(b, therm_time=value / b.gamma) for b in config.baths)
    return replace(config, baths=baths)


def _set_n_ancillas(config: ProtocolConfig, value: float) -> ProtocolConfig:
    n = int(round(value))
    if abs(value - n) > 1e-9:
        raise ValueError(f"n_ancillas axis needs whole numbers, got {value}")
    return replace(config, n_ancillas=n)


SWEEP_AXES = {
    "g_t1_over_pi": lambda c, v: _set_angle(c, 0, v),
    "g_t2_over_pi": lambda c, v: _set_angle(c, 1, v),
    "g_t3_over_pi": lambda c, v: _set_angle(c, 2, v),
    "theta_over_pi": _set_theta,
    "gamma_t": _set_gamma_t,
    "n_ancillas": _set_n_ancillas,
}


@dataclass(frozen=True)
class SweepGrid:
    """One swept axis over a fixed base configuration."""

    axis_name: str
    values: tuple[float, ...]
    fixed: ProtocolConfig

    def __post_init__(self):
        if self.axis_name not in SWEEP_AXES:
            raise ValueError(
                f"unknown sweep axis {self.axis_name!r}; "
                f"choose from {sorted(SWEEP_AXES)}"
            )
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep values must be strictly increasing")

    def at(self, value: float) -> ProtocolConfig:
        return SWEEP_AXES[self.axis_name](self.fixed, value)


_SCENARIOS = {
    "single": lambda c: single_run(c)[1],
    "uncorrelated": multi_ancilla_uncorrelated,
    "correlated": multi_ancilla_correlated,
    "qutrit": three_bath_qutrit,
}


def scenario_for(config: ProtocolConfig) -> str:
    """Default evaluator for a config: qutrit-style for three baths, the
    joint simulation when correlations are requested, the reduced-channel
    route for a lone ancilla, the marginal stream otherwise."""
    if config.n_baths == 3:
        return "qutrit"
    if config.correlated:
        return "correlated"
    if config.n_ancillas == 1:
        return "single"
    return "uncorrelated"


def evaluate(config: ProtocolConfig, scenario: str | None = None) -> EstimationReport:
    name = scenario or scenario_for(config)
    try:
        fn = _SCENARIOS[name]
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; choose from {sorted(_SCENARIOS)}"
        ) from None
    return fn(config)


def sweep(grid: SweepGrid, scenario: str, threads: int = 1) -> list[dict]:
    """Evaluate the scenario at every grid value; one row dict per value.

    Rows are independent (pure functions of the config), so they map over a
    thread pool; results keep the input order.  A failing point records its
    error message in-row and the sweep continues.
    """
    if scenario not in _SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {sorted(_SCENARIOS)}")

    def one(value: float) -> dict:
        row = {
            "axis_value": value,
            "eta_joint": float("nan"),
            "eta_acc": float("nan"),
            "det_qfim": float("nan"),
            "trace_qfim": float("nan"),
            "singular": None,
            "error": None,
        }
        try:
            rep = evaluate(grid.at(value), scenario)
        except Exception as exc:  # recorded per-row, sweep continues
            row["error"] = f"{type(exc).__name__}: {exc}"
            return row
        row.update(
            eta_joint=rep.eta_joint,
            eta_acc=rep.eta_acc,
            det_qfim=rep.qfim.det,
            trace_qfim=rep.qfim.trace,
            singular=rep.singular,
        )
        return row

    if threads <= 1 or len(grid.values) <= 1:
        return [one(v) for v in grid.values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, grid.values))
