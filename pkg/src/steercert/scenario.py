"""Quantum scenarios: states, measurements and the assemblages they steer.

An assemblage is the family of subnormalized states left on Bob's side
after Alice measures setting x and reads outcome a.  This module builds
assemblages from density matrices paired with either POVMs or full Kraus
instruments, validates the physicality invariants (positivity,
normalization, marginal independence of x), and scans for contexts in
which Bob's conditional state answers some test with certainty.

Conventions fixed here and used everywhere else:
  - qubit measurement outcomes a in {0, 1} map to eigenvalue (-1)^a;
  - the Bell basis is ordered (Phi+, Phi-, Psi+, Psi-);
  - conditional states are not materialized when p(a|x) <= 1e-12.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InputError

TRACE_TOL = 1e-9
MARGINAL_TOL = 1e-9
COMPLETENESS_TOL = 1e-10
ZERO_PROB_TOL = 1e-12
CERTAINTY_EPS = 1e-9


def _as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"expected a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Povm:
    """A finite-outcome measurement: PSD effects summing to the identity."""

    label: str
    effects: tuple
    dim: int

    def __post_init__(self):
        effects = tuple(_as_matrix(e) for e in self.effects)
        object.__setattr__(self, "effects", effects)
        if not effects:
            raise InputError(f"POVM {self.label!r} has no effects")
        for k, e in enumerate(effects):
            if e.shape != (self.dim, self.dim):
                raise InputError(
                    f"POVM {self.label!r} effect {k} has shape {e.shape}, expected {(self.dim, self.dim)}"
                )
            linalg.require_hermitian(e, what=f"POVM {self.label!r} effect {k}")
            if not linalg.psd_check(e):
                raise InputError(f"POVM {self.label!r} effect {k} is not positive semidefinite")
        total = sum(effects)
        if np.max(np.abs(total - np.eye(self.dim))) > COMPLETENESS_TOL:
            raise InputError(f"POVM {self.label!r} effects do not sum to the identity")

    @property
    def num_outcomes(self) -> int:
        return len(self.effects)


@dataclass(frozen=True, eq=False)
class Instrument:
    """A measurement given by Kraus operators, grouped by outcome.

    kraus_sets[a] lists the operators pooled into outcome a; jointly they
    must satisfy the completeness relation sum K^dag K = identity.
    """

    label: str
    kraus_sets: tuple
    dim: int

    def __post_init__(self):
        sets = tuple(tuple(_as_matrix(k) for k in ks) for ks in self.kraus_sets)
        object.__setattr__(self, "kraus_sets", sets)
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for a, ks in enumerate(sets):
            for k in ks:
                if k.shape[1] != self.dim:
                    raise InputError(
                        f"instrument {self.label!r} outcome {a}: operator acts on dim {k.shape[1]}, expected {self.dim}"
                    )
                total += linalg.dag(k) @ k
        if np.max(np.abs(total - np.eye(self.dim))) > COMPLETENESS_TOL:
            raise InputError(f"instrument {self.label!r} Kraus operators are not complete")

    @property
    def num_outcomes(self) -> int:
        return len(self.kraus_sets)

    def effects(self) -> tuple:
        """The induced POVM effects M_a = sum_mu K^dag K."""
        out = []
        for ks in self.kraus_sets:
            m = np.zeros((self.dim, self.dim), dtype=complex)
            for k in ks:
                m += linalg.dag(k) @ k
            out.append(m)
        return tuple(out)


@dataclass(frozen=True, eq=False)
class Assemblage:
    """Subnormalized Bob states sigma[(x, a)] conditioned on Alice's (x, a).

    Physicality requires each block PSD, unit total trace per setting,
    and a setting-independent marginal sum_a sigma[(x, a)].
    """

    settings: int
    outcomes: int
    dim_b: int
    sigma: dict

    def __post_init__(self):
        blocks = {}
        for x in range(self.settings):
            for a in range(self.outcomes):
                if (x, a) not in self.sigma:
                    raise InputError(f"assemblage is missing block (x={x}, a={a})")
                blocks[(x, a)] = _as_matrix(self.sigma[(x, a)])
        object.__setattr__(self, "sigma", blocks)
        for (x, a), s in blocks.items():
            if s.shape != (self.dim_b, self.dim_b):
                raise InputError(f"block (x={x}, a={a}) has shape {s.shape}")
            linalg.require_hermitian(s, what=f"assemblage block (x={x}, a={a})")
            if not linalg.psd_check(s):
                raise InputError(f"assemblage block (x={x}, a={a}) is not positive semidefinite")
        for x in range(self.settings):
            total = sum(blocks[(x, a)].trace().real for a in range(self.outcomes))
            if abs(total - 1.0) > TRACE_TOL:
                raise InputError(f"setting x={x} has total probability {total}, expected 1")
        report = check_no_signalling(self, tol=MARGINAL_TOL)
        if not report.passed:
            raise InputError(
                f"marginals depend on the setting (max deviation {report.max_deviation:.3e})"
            )

    def block(self, x: int, a: int) -> np.ndarray:
        return self.sigma[(x, a)]

    def prob(self, x: int, a: int) -> float:
        return float(self.sigma[(x, a)].trace().real)

    def conditional_state(self, x: int, a: int) -> np.ndarray | None:
        """Normalized Bob state for context (x, a); None when p(a|x) ~ 0."""
        p = self.prob(x, a)
        if p <= ZERO_PROB_TOL:
            return None
        return self.sigma[(x, a)] / p

    def marginal(self, x: int = 0) -> np.ndarray:
        return sum(self.sigma[(x, a)] for a in range(self.outcomes))


@dataclass(frozen=True)
class NoSignallingReport:
    passed: bool
    max_deviation: float


@dataclass(frozen=True)
class PredictabilityRecord:
    """A context (x, a) whose conditional state answers test (y, b) with
    probability at least 1 - eps."""

    context: tuple
    test: tuple
    probability: float


def check_no_signalling(asm: Assemblage, tol: float = MARGINAL_TOL) -> NoSignallingReport:
    """Compare the outcome-summed marginal across all setting pairs."""
    marginals = [asm.marginal(x) for x in range(asm.settings)]
    dev = 0.0
    for x in range(1, asm.settings):
        dev = max(dev, float(np.max(np.abs(marginals[x] - marginals[0]))))
    return NoSignallingReport(passed=dev <= tol, max_deviation=dev)


def _require_state(rho_ab, dim_a: int, dim_b: int) -> np.ndarray:
    rho = _as_matrix(rho_ab)
    if rho.shape != (dim_a * dim_b, dim_a * dim_b):
        raise InputError(
            f"state has shape {rho.shape}, expected {(dim_a * dim_b, dim_a * dim_b)}"
        )
    linalg.require_hermitian(rho, what="shared state")
    if not linalg.psd_check(rho):
        raise InputError("shared state is not positive semidefinite")
    if abs(rho.trace().real - 1.0) > TRACE_TOL:
        raise InputError(f"shared state has trace {rho.trace().real}, expected 1")
    return rho


def assemblage_from_povms(rho_ab, alice: Sequence[Povm], dim_b: int | None = None) -> Assemblage:
    """sigma[(x, a)] = tr_A[(M_{a|x} (x) I) rho]."""
    if not alice:
        raise InputError("need at least one Alice measurement")
    dim_a = alice[0].dim
    if dim_b is None:
        dim_b = _as_matrix(rho_ab).shape[0] // dim_a
    rho = _require_state(rho_ab, dim_a, dim_b)
    outcomes = alice[0].num_outcomes
    eye_b = np.eye(dim_b)
    sigma = {}
    for x, povm in enumerate(alice):
        if povm.dim != dim_a:
            raise InputError(f"Alice measurement {x} acts on dim {povm.dim}, expected {dim_a}")
        if povm.num_outcomes != outcomes:
            raise InputError("all Alice measurements must share one outcome count")
        for a, effect in enumerate(povm.effects):
            sigma[(x, a)] = linalg.partial_trace_A(
                linalg.kron(effect, eye_b) @ rho, dim_a, dim_b
            )
    return Assemblage(settings=len(alice), outcomes=outcomes, dim_b=dim_b, sigma=sigma)


def assemblage_from_instrument(
    rho_ab, alice: Sequence[Instrument], dim_b: int | None = None
) -> Assemblage:
    """sigma[(x, a)] = sum_mu tr_A[(K (x) I) rho (K^dag (x) I)].

    Agrees with assemblage_from_povms on the induced effects: the update
    operators cancel under the partial trace over A.
    """
    if not alice:
        raise InputError("need at least one Alice instrument")
    dim_a = alice[0].dim
    if dim_b is None:
        dim_b = _as_matrix(rho_ab).shape[0] // dim_a
    rho = _require_state(rho_ab, dim_a, dim_b)
    outcomes = alice[0].num_outcomes
    eye_b = np.eye(dim_b)
    sigma = {}
    for x, inst in enumerate(alice):
        if inst.num_outcomes != outcomes:
            raise InputError("all Alice instruments must share one outcome count")
        for a, ks in enumerate(inst.kraus_sets):
            block = np.zeros((dim_b, dim_b), dtype=complex)
            for k in ks:
                big = linalg.kron(k, eye_b)
                block += linalg.partial_trace_A(big @ rho @ linalg.dag(big), dim_a, dim_b)
            sigma[(x, a)] = block
    return Assemblage(settings=len(alice), outcomes=outcomes, dim_b=dim_b, sigma=sigma)


def scan_predictability(
    asm: Assemblage, bob: Sequence[Povm], eps: float = CERTAINTY_EPS
) -> list:
    """All (context, test) pairs where Bob's conditional state is certain.

    Contexts with p(a|x) ~ 0 have no conditional state and are skipped.
    """
    records = []
    for x in range(asm.settings):
        for a in range(asm.outcomes):
            omega = asm.conditional_state(x, a)
            if omega is None:
                continue
            for y, povm in enumerate(bob):
                if povm.dim != asm.dim_b:
                    raise InputError(f"Bob measurement {y} acts on dim {povm.dim}, expected {asm.dim_b}")
                for b, effect in enumerate(povm.effects):
                    prob = float((effect @ omega).trace().real)
                    if prob >= 1.0 - eps:
                        records.append(
                            PredictabilityRecord(context=(x, a), test=(y, b), probability=prob)
                        )
    return records


# ---------------------------------------------------------------------------
# standard two-qubit states and measurements

def singlet() -> np.ndarray:
    """(|01> - |10>)/sqrt(2) as a density matrix."""
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1 / np.sqrt(2)
    psi[2] = -1 / np.sqrt(2)
    return np.outer(psi, psi.conj())


def bell_basis() -> tuple:
    """Orthonormal Bell vectors in the fixed order (Phi+, Phi-, Psi+, Psi-)."""
    s = 1 / np.sqrt(2)
    return (
        np.array([s, 0, 0, s], dtype=complex),
        np.array([s, 0, 0, -s], dtype=complex),
        np.array([0, s, s, 0], dtype=complex),
        np.array([0, s, -s, 0], dtype=complex),
    )


def werner_state(p: float) -> np.ndarray:
    """p * singlet + (1 - p) * maximally mixed."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"mixing weight must lie in [0, 1], got {p}")
    return p * singlet() + (1.0 - p) * np.eye(4) / 4.0


def pauli_povm(axis, label: str | None = None) -> Povm:
    """Projective qubit measurement along a Bloch axis.

    Outcome 0 is the +1 eigenspace, outcome 1 the -1 eigenspace, so that
    outcome a carries eigenvalue (-1)^a.
    """
    n = _axis_vector(axis)
    plus = linalg.bloch_state(n)
    minus = linalg.bloch_state(-n)
    name = label if label is not None else _axis_label(axis)
    return Povm(label=name, effects=(plus, minus), dim=2)


def noisy_pauli_povm(axis, eta: float, label: str | None = None) -> Povm:
    """Smeared projective measurement: effects eta * P_to + (1 - eta)/2 * I."""
    if not 0.0 <= eta <= 1.0:
        raise InputError(f"visibility must lie in [0, 1], got {eta}")
    base = pauli_povm(axis, label=label)
    smear = (1.0 - eta) / 2.0 * np.eye(2)
    effects = tuple(eta * e + smear for e in base.effects)
    return Povm(label=f"{base.label}(eta={eta})", effects=effects, dim=2)


def pauli_observable(axis) -> np.ndarray:
    """The traceless +-1 observable n . sigma for a Bloch axis."""
    n = _axis_vector(axis)
    return n[0] * linalg.SIGMA_X + n[1] * linalg.SIGMA_Y + n[2] * linalg.SIGMA_Z


def _axis_vector(axis) -> np.ndarray:
    if isinstance(axis, str):
        try:
            return {
                "x": np.array([1.0, 0.0, 0.0]),
                "y": np.array([0.0, 1.0, 0.0]),
                "z": np.array([0.0, 0.0, 1.0]),
            }[axis.lower()]
        except KeyError:
            raise InputError(f"unknown axis {axis!r}, expected 'x', 'y' or 'z'") from None
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise InputError(f"axis must be a 3-vector, got shape {n.shape}")
    norm = float(np.linalg.norm(n))
    if norm < 1e-12:
        raise InputError("axis vector has zero length")
    return n / norm


def _axis_label(axis) -> str:
    if isinstance(axis, str):
        return axis.lower()
    return "axis(" + ",".join(f"{v:.3g}" for v in np.asarray(axis, dtype=float)) + ")"


# ---------------------------------------------------------------------------
# scenario files: JSON with complex entries as [re, im] pairs

def matrix_to_json(m) -> list:
    arr = _as_matrix(m)
    return [[[float(v.real), float(v.imag)] for v in row] for row in arr]


def matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array(
            [[complex(entry[0], entry[1]) for entry in row] for row in rows], dtype=complex
        )
    except (TypeError, IndexError) as exc:
        raise InputError("matrix entries must be [re, im] pairs") from exc


def load_scenario(source) -> dict:
    """Read a scenario description into state and measurement objects.

    ``source`` is a path, a file object, or an already-parsed dict with
    fields {dimA, dimB, state, alice_povms, bob_povms?}.  Returns a dict
    with keys rho, alice, bob (bob may be an empty list), dims.
    """
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)

    try:
        dim_a = int(doc["dimA"])
        dim_b = int(doc["dimB"])
        state = doc["state"]
        alice_raw = doc["alice_povms"]
    except KeyError as exc:
        raise InputError(f"scenario is missing required field {exc.args[0]!r}") from None

    kind = state.get("kind")
    if kind == "werner":
        if (dim_a, dim_b) != (2, 2):
            raise InputError("werner scenarios are two-qubit")
        rho = werner_state(float(state["p"]))
    elif kind == "singlet":
        if (dim_a, dim_b) != (2, 2):
            raise InputError("singlet scenarios are two-qubit")
        rho = singlet()
    elif kind == "explicit":
        rho = matrix_from_json(state["matrix"])
    else:
        raise InputError(f"unknown state kind {kind!r}")

    def build(raw, who):
        povms = []
        for i, effect_rows in enumerate(raw):
            effects = tuple(matrix_from_json(e) for e in effect_rows)
            dim = dim_a if who == "alice" else dim_b
            povms.append(Povm(label=f"{who}[{i}]", effects=effects, dim=dim))
        return povms

    alice = build(alice_raw, "alice")
    bob = build(doc.get("bob_povms", []), "bob")
    return {"rho": rho, "alice": alice, "bob": bob, "dims": (dim_a, dim_b)}
