"""System descriptions and Hamiltonian builders for n-photon couplings.

A :class:`SystemSpec` declaratively describes one of three topologies:

* ``"single"``     — one qubit, one oscillator;
* ``"multiqubit"`` — several qubits sharing one oscillator;
* ``"multimode"``  — one qubit coupled to several oscillators, each through
  its own exchange order.

From a spec the builders assemble sparse Hamiltonians on the corresponding
:class:`.fockspace.HilbertLayout` (qubits first, then oscillators):

* :func:`build_nR` / :func:`build_nJC` — exact n-quantum exchange models,
  with the interaction ``g (a†^n + a^n)`` attached to ``sigma_x`` (both
  rotating and counter-rotating terms) or to ``sigma_+/sigma_-`` (rotating
  only, conserving ``N + n |e><e|``);
* :func:`build_full_nR` — position-power interaction ``g (a + a†)^n`` with
  an optional even-power stabilizer;
* :func:`build_dispersive` — the second-order effective model whose diagonal
  is *bit-identical* to :func:`.analytic.dispersive_level`;
* :func:`build_nDicke` / :func:`build_nTC` — the multiqubit exact models;
* :func:`build_multiqubit_dispersive` and :func:`two_qubit_block` — the
  effective multiqubit model and its closed-form fixed-photon-number block;
* :func:`build_multimode` / :func:`build_multimode_dispersive` — the
  multimode exact and effective models.

All frequencies are in units of the (first) oscillator frequency unless the
spec says otherwise.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .analytic import DispersiveParams, dispersive_level
from .combinatorics import c_coeff
from .errors import ConfigError, TruncationError
from .fockspace import (
    HilbertLayout,
    SparseOperator,
    destroy,
    embed,
    number,
    op_pow,
    pauli,
    qubit_oscillator_layout,
    zeros,
)

TOPOLOGIES = ("single", "multiqubit", "multimode")
STABILIZER_FORMS = ("number_power", "full_position_power")


# ---------------------------------------------------------------------------
# Declarative system description
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QubitSpec:
    """One qubit and (for single/multiqubit topologies) its coupling.

    Attributes:
        omega_q: Qubit frequency.
        n: Quanta exchanged per coupling event (ignored for multimode
            topologies, where couplings carry their own order).
        g: Coupling strength.
    """

    omega_q: float
    n: int = 1
    g: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega_q", float(self.omega_q))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "g", float(self.g))
        if self.n < 1:
            raise ConfigError("qubit coupling order n must be >= 1")
        if self.g < 0:
            raise ConfigError("qubit coupling strength g must be non-negative")


@dataclass(frozen=True)
class OscillatorSpec:
    """One bosonic mode.

    Attributes:
        omega: Mode frequency (positive; reduced units set the first mode
            to 1).
        trunc: Number of retained Fock levels (>= 2).
    """

    omega: float
    trunc: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "trunc", int(self.trunc))
        if self.omega <= 0:
            raise ConfigError("oscillator frequency must be positive")
        if self.trunc < 2:
            raise ConfigError("oscillator truncation must be >= 2")


@dataclass(frozen=True)
class CouplingSpec:
    """Qubit-oscillator coupling entry (multimode topologies only).

    Attributes:
        qubit: Index of the coupled qubit.
        oscillator: Index of the coupled oscillator.
        n: Exchange order for this mode.
        g: Coupling strength for this mode.
    """

    qubit: int
    oscillator: int
    n: int
    g: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubit", int(self.qubit))
        object.__setattr__(self, "oscillator", int(self.oscillator))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "g", float(self.g))
        if self.n < 1:
            raise ConfigError("coupling order n must be >= 1")
        if self.g < 0:
            raise ConfigError("coupling strength g must be non-negative")


@dataclass(frozen=True)
class StabilizerSpec:
    """Spectral stabilizer added to an exact model.

    Attributes:
        form: ``"number_power"`` adds ``eta * g * a†^m a^m`` (default
            ``m = floor(n/2) + 1``, the smallest power that dominates the
            interaction at large photon number); ``"full_position_power"``
            adds ``eta * g * (a + a†)^m`` and requires an explicit even
            ``m > n``.
        eta: Dimensionless stabilizer strength (>= 0).
        m: Power override (see ``form``).
    """

    form: str
    eta: float
    m: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "form", str(self.form))
        object.__setattr__(self, "eta", float(self.eta))
        if self.m is not None:
            object.__setattr__(self, "m", int(self.m))
        if self.form not in STABILIZER_FORMS:
            raise ConfigError(
                f"stabilizer form must be one of {STABILIZER_FORMS}, "
                f"got {self.form!r}"
            )
        if self.eta < 0:
            raise ConfigError("stabilizer strength eta must be non-negative")
        if self.m is not None and self.m < 1:
            raise ConfigError("stabilizer power m must be >= 1")

    def power(self, n: int) -> int:
        """Effective power ``m`` for interaction order ``n``."""
        if self.m is not None:
            return self.m
        if self.form == "number_power":
            return n // 2 + 1
        raise ConfigError(
            "full_position_power stabilizer requires an explicit even power m"
        )


@dataclass(frozen=True)
class SystemSpec:
    """Complete declarative description of a model instance."""

    topology: str
    qubits: tuple[QubitSpec, ...]
    oscillators: tuple[OscillatorSpec, ...]
    couplings: tuple[CouplingSpec, ...] = ()
    stabilizer: Optional[StabilizerSpec] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "oscillators", tuple(self.oscillators))
        object.__setattr__(self, "couplings", tuple(self.couplings))
        if self.topology not in TOPOLOGIES:
            raise ConfigError(
                f"topology must be one of {TOPOLOGIES}, got {self.topology!r}"
            )
        if not self.qubits:
            raise ConfigError("at least one qubit is required")
        if not self.oscillators:
            raise ConfigError("at least one oscillator is required")

        if self.topology == "single":
            if len(self.qubits) != 1 or len(self.oscillators) != 1:
                raise ConfigError(
                    "single topology requires exactly one qubit and one oscillator"
                )
        elif self.topology == "multiqubit":
            if len(self.oscillators) != 1:
                raise ConfigError(
                    "multiqubit topology requires exactly one shared oscillator"
                )
        else:  # multimode
            if len(self.qubits) != 1:
                raise ConfigError("multimode topology requires exactly one qubit")
            if not self.couplings:
                raise ConfigError(
                    "multimode topology requires explicit couplings"
                )

        if self.topology in ("single", "multiqubit"):
            if self.couplings:
                raise ConfigError(
                    "couplings are implied by the qubit entries for "
                    f"{self.topology!r} topologies; leave the list empty"
                )
        else:
            seen = set()
            for c in self.couplings:
                if not 0 <= c.qubit < len(self.qubits):
                    raise ConfigError(f"coupling references missing qubit {c.qubit}")
                if not 0 <= c.oscillator < len(self.oscillators):
                    raise ConfigError(
                        f"coupling references missing oscillator {c.oscillator}"
                    )
                if c.oscillator in seen:
                    raise ConfigError(
                        f"oscillator {c.oscillator} has more than one coupling"
                    )
                seen.add(c.oscillator)

        if self.stabilizer is not None:
            if not (
                self.topology == "single"
                or (self.topology == "multiqubit" and len(self.qubits) == 1)
            ):
                raise ConfigError(
                    "a stabilizer is supported only when a single qubit defines "
                    "the coupling scale (single topology, or multiqubit with "
                    "one qubit)"
                )
            n = self.qubits[0].n
            m = self.stabilizer.power(n)
            if self.stabilizer.form == "full_position_power":
                if m % 2 != 0 or m <= n:
                    raise ConfigError(
                        "full_position_power stabilizer requires an even power "
                        f"m > n (got m={m}, n={n})"
                    )

    # -- structural helpers ---------------------------------------------------

    def layout(self) -> HilbertLayout:
        """Hilbert layout with qubits first, then oscillators."""
        return qubit_oscillator_layout(
            len(self.qubits), [o.trunc for o in self.oscillators]
        )

    def common_n(self) -> int:
        """Shared exchange order of all qubits (multiqubit topologies).

        Raises:
            ConfigError: If the qubits do not share one order.
        """
        orders = {q.n for q in self.qubits}
        if len(orders) != 1:
            raise ConfigError(
                "this operation requires every qubit to share one exchange "
                f"order; found {sorted(orders)}"
            )
        return self.qubits[0].n

    def qubit_params(self, index: int = 0) -> DispersiveParams:
        """Dispersive parameters of qubit ``index`` against oscillator 0."""
        q = self.qubits[index]
        return DispersiveParams.from_frequencies(
            q.omega_q, q.n, q.g, self.oscillators[0].omega
        )

    def coupling_params(self, coupling: CouplingSpec) -> DispersiveParams:
        """Dispersive parameters of one multimode coupling entry."""
        q = self.qubits[coupling.qubit]
        osc = self.oscillators[coupling.oscillator]
        return DispersiveParams.from_frequencies(
            q.omega_q, coupling.n, coupling.g, osc.omega
        )

    # -- serialization ---------------------------------------------------------

    @classmethod
    def from_dict(cls, payload: dict) -> "SystemSpec":
        """Parse the JSON configuration schema.

        Schema::

            {
              "topology": "single" | "multiqubit" | "multimode",
              "qubits": [{"omega_q": float, "n": int, "g": float}, ...],
              "oscillators": [{"omega": float, "trunc": int}, ...],
              "couplings": [{"qubit": int, "oscillator": int,
                             "n": int, "g": float}, ...],   # multimode only
              "stabilizer": {"form": str, "eta": float, "m": int}  # optional
            }

        Raises:
            ConfigError: On unknown keys, missing fields, or wrong types.
        """

        def _get(d: dict, allowed: dict, what: str) -> dict:
            if not isinstance(d, dict):
                raise ConfigError(f"{what} entry must be an object, got {d!r}")
            unknown = set(d) - set(allowed)
            if unknown:
                raise ConfigError(f"unknown {what} keys: {sorted(unknown)}")
            out = {}
            for key, (required, conv) in allowed.items():
                if key in d:
                    try:
                        out[key] = conv(d[key])
                    except (TypeError, ValueError) as exc:
                        raise ConfigError(
                            f"bad value for {what} key {key!r}: {d[key]!r}"
                        ) from exc
                elif required:
                    raise ConfigError(f"missing required {what} key {key!r}")
            return out

        top = _get(
            payload,
            {
                "topology": (True, str),
                "qubits": (True, list),
                "oscillators": (True, list),
                "couplings": (False, list),
                "stabilizer": (False, dict),
            },
            "configuration",
        )
        qubits = tuple(
            QubitSpec(
                **_get(
                    q,
                    {
                        "omega_q": (True, float),
                        "n": (False, int),
                        "g": (False, float),
                    },
                    "qubit",
                )
            )
            for q in top["qubits"]
        )
        oscillators = []
        for o in top["oscillators"]:
            entry = _get(
                o, {"omega": (False, float), "trunc": (True, int)}, "oscillator"
            )
            entry.setdefault("omega", 1.0)
            oscillators.append(OscillatorSpec(**entry))
        oscillators = tuple(oscillators)
        couplings = tuple(
            CouplingSpec(
                **_get(
                    c,
                    {
                        "qubit": (True, int),
                        "oscillator": (True, int),
                        "n": (True, int),
                        "g": (True, float),
                    },
                    "coupling",
                )
            )
            for c in top.get("couplings", ())
        )
        stabilizer = None
        if "stabilizer" in top:
            stab = _get(
                top["stabilizer"],
                {"form": (True, str), "eta": (True, float), "m": (False, int)},
                "stabilizer",
            )
            stabilizer = StabilizerSpec(**stab)
        return cls(
            topology=top["topology"],
            qubits=qubits,
            oscillators=oscillators,
            couplings=couplings,
            stabilizer=stabilizer,
        )

    def to_dict(self) -> dict:
        """Plain-dict form that round-trips through :meth:`from_dict`."""
        out: dict = {
            "topology": self.topology,
            "qubits": [
                {"omega_q": q.omega_q, "n": q.n, "g": q.g} for q in self.qubits
            ],
            "oscillators": [
                {"omega": o.omega, "trunc": o.trunc} for o in self.oscillators
            ],
        }
        if self.couplings:
            out["couplings"] = [
                {
                    "qubit": c.qubit,
                    "oscillator": c.oscillator,
                    "n": c.n,
                    "g": c.g,
                }
                for c in self.couplings
            ]
        if self.stabilizer is not None:
            stab = {"form": self.stabilizer.form, "eta": self.stabilizer.eta}
            if self.stabilizer.m is not None:
                stab["m"] = self.stabilizer.m
            out["stabilizer"] = stab
        return out

    @classmethod
    def from_json(cls, text: str) -> "SystemSpec":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
        return cls.from_dict(payload)

    @classmethod
    def from_json_file(cls, path) -> "SystemSpec":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read configuration file {path}: {exc}") from exc
        return cls.from_json(text)


def with_swept(spec: SystemSpec, var: str, value: float) -> SystemSpec:
    """Copy of ``spec`` with one sweep variable replaced.

    Supported variables: ``"g"`` (every coupling strength), ``"g<i>"``
    (strength of qubit/coupling ``i``), ``"eta"`` (stabilizer strength).

    Raises:
        ConfigError: For an unknown variable or a missing target.
    """
    value = float(value)
    if var == "eta":
        if spec.stabilizer is None:
            raise ConfigError("sweep variable 'eta' requires a stabilizer")
        return dataclasses.replace(
            spec, stabilizer=dataclasses.replace(spec.stabilizer, eta=value)
        )
    if var == "g":
        qubits = tuple(dataclasses.replace(q, g=value) for q in spec.qubits)
        couplings = tuple(
            dataclasses.replace(c, g=value) for c in spec.couplings
        )
        return dataclasses.replace(spec, qubits=qubits, couplings=couplings)
    if var.startswith("g") and var[1:].isdigit():
        idx = int(var[1:])
        if spec.topology == "multimode":
            if not 0 <= idx < len(spec.couplings):
                raise ConfigError(f"sweep variable {var!r}: no coupling {idx}")
            couplings = list(spec.couplings)
            couplings[idx] = dataclasses.replace(couplings[idx], g=value)
            return dataclasses.replace(spec, couplings=tuple(couplings))
        if not 0 <= idx < len(spec.qubits):
            raise ConfigError(f"sweep variable {var!r}: no qubit {idx}")
        qubits = list(spec.qubits)
        qubits[idx] = dataclasses.replace(qubits[idx], g=value)
        return dataclasses.replace(spec, qubits=tuple(qubits))
    raise ConfigError(f"unknown sweep variable {var!r}")


# ---------------------------------------------------------------------------
# Builder helpers
# ---------------------------------------------------------------------------


def _require_topology(spec: SystemSpec, *allowed: str) -> None:
    if spec.topology not in allowed:
        raise ConfigError(
            f"this builder requires topology in {allowed}, "
            f"got {spec.topology!r}"
        )


def _check_order(n: int, trunc: int) -> None:
    if n >= trunc:
        raise TruncationError(
            f"exchange order n={n} must be strictly below the truncation "
            f"dimension {trunc}"
        )


def _poly_of_number(trunc: int, coeffs: Sequence[float]) -> SparseOperator:
    """Diagonal operator ``sum_k coeffs[k] N^k`` on one oscillator.

    Each diagonal entry is accumulated over exact integer powers of ``j``
    before float multiplication.
    """
    diag = np.zeros(trunc)
    for j in range(trunc):
        jk = 1
        acc = 0.0
        for c in coeffs:
            acc += float(c) * jk
            jk *= j
        diag[j] = acc
    layout = HilbertLayout((("oscillator", trunc),))
    return SparseOperator(layout, sp.diags(diag))


def _stabilizer_term(
    spec: SystemSpec, layout: HilbertLayout, osc_position: int
) -> SparseOperator:
    """Stabilizer contribution on the full layout (zero when unconfigured)."""
    if spec.stabilizer is None:
        return zeros(layout)
    stab = spec.stabilizer
    q = spec.qubits[0]
    trunc = spec.oscillators[0].trunc
    m = stab.power(q.n)
    a = destroy(trunc)
    if stab.form == "number_power":
        local = op_pow(a, m).dagger() @ op_pow(a, m)
    else:
        local = op_pow(a + a.dagger(), m)
    return stab.eta * q.g * embed(layout, [(osc_position, local)])


# ---------------------------------------------------------------------------
# Exact single-qubit models
# ---------------------------------------------------------------------------


def build_nR(spec: SystemSpec) -> SparseOperator:
    """n-quantum exchange model with counter-rotating terms retained.

    ``H = omega N + (omega_q / 2) sigma_z + g sigma_x (a†^n + a^n)``
    plus the configured stabilizer, on the layout ``(qubit, oscillator)``.

    Raises:
        ConfigError: For a non-single topology.
        TruncationError: If ``n >= trunc``.
    """
    _require_topology(spec, "single")
    q = spec.qubits[0]
    osc = spec.oscillators[0]
    _check_order(q.n, osc.trunc)
    layout = spec.layout()
    a = destroy(osc.trunc)
    an = op_pow(a, q.n)
    ladder = embed(layout, [(1, an.dagger() + an)])
    h = (
        osc.omega * embed(layout, [(1, number(osc.trunc))])
        + 0.5 * q.omega_q * embed(layout, [(0, pauli("z"))])
        + q.g * (embed(layout, [(0, pauli("x"))]) @ ladder)
    )
    return h + _stabilizer_term(spec, layout, 1)


def build_nJC(spec: SystemSpec) -> SparseOperator:
    """Rotating (number-conserving) n-quantum exchange model.

    ``H = omega N + (omega_q / 2) sigma_z + g (sigma_+ a^n + sigma_- a†^n)``
    plus the configured stabilizer.  Conserves
    ``N + n |e><e|`` (see :func:`charge_operator`), so the spectrum splits
    into an uncoupled ladder ``|g, j < n>`` plus two-level doublets.

    Raises:
        ConfigError: For a non-single topology.
        TruncationError: If ``n >= trunc``.
    """
    _require_topology(spec, "single")
    q = spec.qubits[0]
    osc = spec.oscillators[0]
    _check_order(q.n, osc.trunc)
    layout = spec.layout()
    an = op_pow(destroy(osc.trunc), q.n)
    flip = embed(layout, [(0, pauli("plus"))]) @ embed(layout, [(1, an)])
    h = (
        osc.omega * embed(layout, [(1, number(osc.trunc))])
        + 0.5 * q.omega_q * embed(layout, [(0, pauli("z"))])
        + q.g * (flip + flip.dagger())
    )
    return h + _stabilizer_term(spec, layout, 1)


def build_full_nR(spec: SystemSpec) -> SparseOperator:
    """Position-power interaction model, optionally stabilized.

    ``H = omega N + (omega_q / 2) sigma_z + g sigma_x (a + a†)^n
    [+ eta g (a + a†)^m]``.  The interaction contains every multiphoton
    process up to order ``n``; the optional stabilizer must use the
    ``full_position_power`` form (even ``m > n``), which restores a bounded-
    below continuum limit.

    Raises:
        ConfigError: For a non-single topology or a stabilizer of the wrong
            form.
        TruncationError: If ``n >= trunc``.
    """
    _require_topology(spec, "single")
    q = spec.qubits[0]
    osc = spec.oscillators[0]
    _check_order(q.n, osc.trunc)
    if spec.stabilizer is not None and spec.stabilizer.form != "full_position_power":
        raise ConfigError(
            "the position-power model supports only full_position_power "
            "stabilizers"
        )
    layout = spec.layout()
    a = destroy(osc.trunc)
    pos_n = op_pow(a + a.dagger(), q.n)
    h = (
        osc.omega * embed(layout, [(1, number(osc.trunc))])
        + 0.5 * q.omega_q * embed(layout, [(0, pauli("z"))])
        + q.g * (embed(layout, [(0, pauli("x"))]) @ embed(layout, [(1, pos_n)]))
    )
    return h + _stabilizer_term(spec, layout, 1)


def charge_operator(spec: SystemSpec) -> SparseOperator:
    """Conserved charge ``N + n sum_l |e><e|_l`` of the rotating models.

    Commutes exactly with :func:`build_nJC` (single topology) and
    :func:`build_nTC` (multiqubit topology with a shared order).
    """
    _require_topology(spec, "single", "multiqubit")
    n = spec.common_n()
    layout = spec.layout()
    osc_pos = len(spec.qubits)
    op = embed(layout, [(osc_pos, number(spec.oscillators[0].trunc))])
    excited = pauli("plus") @ pauli("minus")
    for l in range(len(spec.qubits)):
        op = op + float(n) * embed(layout, [(l, excited)])
    return op


# ---------------------------------------------------------------------------
# Single-qubit dispersive model
# ---------------------------------------------------------------------------


def build_dispersive(
    spec: SystemSpec,
    regime: str = "nonrwa",
    include_squeezing: bool = True,
) -> SparseOperator:
    """Second-order effective model of one n-photon coupled qubit.

    The diagonal entry of basis state ``|qubit, j>`` is computed by calling
    :func:`.analytic.dispersive_level` directly, so closed-form levels and
    this matrix agree *exactly* (bit-for-bit), not merely to rounding.  In
    the ``"nonrwa"`` regime with ``include_squeezing`` the off-diagonal
    two-step exchange term
    ``(chi + xi)/2 sigma_z (a†^(2n) + a^(2n))`` is added as well.

    Raises:
        ConfigError: For a non-single topology.
        TruncationError: If ``n >= trunc``.
        ResonanceError: If a required detuning denominator vanishes.
    """
    _require_topology(spec, "single")
    q = spec.qubits[0]
    osc = spec.oscillators[0]
    _check_order(q.n, osc.trunc)
    params = spec.qubit_params()
    layout = spec.layout()

    diag = np.zeros(2 * osc.trunc)
    for qubit_idx, qubit in enumerate(("e", "g")):
        for j in range(osc.trunc):
            diag[qubit_idx * osc.trunc + j] = dispersive_level(
                params, qubit, j, regime
            )
    h = SparseOperator(layout, sp.diags(diag))

    if regime == "nonrwa" and include_squeezing:
        a2n = op_pow(destroy(osc.trunc), 2 * q.n)
        term = embed(layout, [(0, pauli("z"))]) @ embed(
            layout, [(1, a2n.dagger() + a2n)]
        )
        h = h + (0.5 * (params.chi + params.xi)) * term
    return h


# ---------------------------------------------------------------------------
# Multiqubit models
# ---------------------------------------------------------------------------


def build_nDicke(spec: SystemSpec, rwa: bool = False) -> SparseOperator:
    """Several qubits sharing one oscillator through n-quantum exchanges.

    With ``rwa=False`` each qubit couples as ``g_l sigma_x^l (a†^n_l + a^n_l)``;
    with ``rwa=True`` as ``g_l (sigma_+^l a^n_l + sigma_-^l a†^n_l)``.  With a
    single qubit this reduces entrywise to :func:`build_nR` /
    :func:`build_nJC`.

    Raises:
        ConfigError: For a non-multiqubit topology.
        TruncationError: If any ``n_l >= trunc``.
    """
    _require_topology(spec, "multiqubit")
    osc = spec.oscillators[0]
    layout = spec.layout()
    osc_pos = len(spec.qubits)
    a = destroy(osc.trunc)
    h = osc.omega * embed(layout, [(osc_pos, number(osc.trunc))])
    for l, q in enumerate(spec.qubits):
        _check_order(q.n, osc.trunc)
        h = h + 0.5 * q.omega_q * embed(layout, [(l, pauli("z"))])
        an = op_pow(a, q.n)
        if rwa:
            flip = embed(layout, [(l, pauli("plus"))]) @ embed(
                layout, [(osc_pos, an)]
            )
            h = h + q.g * (flip + flip.dagger())
        else:
            h = h + q.g * (
                embed(layout, [(l, pauli("x"))])
                @ embed(layout, [(osc_pos, an.dagger() + an)])
            )
    if spec.stabilizer is not None:
        h = h + _stabilizer_term(spec, layout, osc_pos)
    return h


def build_nTC(spec: SystemSpec) -> SparseOperator:
    """Rotating multiqubit model (shortcut for ``build_nDicke(spec, rwa=True)``)."""
    return build_nDicke(spec, rwa=True)


def _cross_strengths(
    pl: DispersiveParams, pm: DispersiveParams, regime: str
) -> tuple[float, float]:
    """Exchange strengths ``(chi_x, xi_x)`` between two qubits."""
    chi_x = pl.g * pm.g * (1.0 / pl.delta + 1.0 / pm.delta)
    if regime == "nonrwa":
        xi_x = pl.g * pm.g * (1.0 / pl.sigma + 1.0 / pm.sigma)
    else:
        xi_x = 0.0
    return chi_x, xi_x


def build_multiqubit_dispersive(
    spec: SystemSpec,
    regime: str = "nonrwa",
    cross_k0: bool = True,
    include_squeezing: bool = True,
) -> SparseOperator:
    """Second-order effective model of several qubits sharing one oscillator.

    Contains, for each qubit ``l``, the single-qubit dispersive terms
    (qubit splitting, photon-number polynomial shifts, and — in the
    ``"nonrwa"`` regime — the squeezing-like off-diagonal term), plus for
    each pair ``l > m`` an oscillator-mediated exchange::

        rwa:    (chi_x / 2)          (s+_l s-_m + s-_l s+_m) P(N)
        nonrwa: ((chi_x - xi_x) / 2)  sigma_x^l sigma_x^m    P(N)

    with ``P(N) = sum_{k=k0}^{n-1} Cminus(n,k) N^k``, ``k0 = 0`` when
    ``cross_k0`` (keeping the photon-independent exchange) and 1 otherwise,
    and ``chi_x = g_l g_m (1/delta_l + 1/delta_m)`` (``xi_x`` likewise with
    sum frequencies).

    Requires every qubit to share the same exchange order ``n``; the
    exchange strength vanishes identically for ``delta_l = -delta_m``.

    Raises:
        ConfigError: For a non-multiqubit topology or mismatched orders.
        ResonanceError: If any detuning denominator vanishes.
    """
    _require_topology(spec, "multiqubit")
    n = spec.common_n()
    osc = spec.oscillators[0]
    _check_order(n, osc.trunc)
    layout = spec.layout()
    osc_pos = len(spec.qubits)
    params = [spec.qubit_params(l) for l in range(len(spec.qubits))]

    cplus = [c_coeff(n, k, "plus") for k in range(n + 1)]
    cminus_trim = [
        c_coeff(n, k, "minus") if 1 <= k <= n - 1 else 0 for k in range(n)
    ]
    p_plus = embed(layout, [(osc_pos, _poly_of_number(osc.trunc, cplus))])
    p_minus = embed(layout, [(osc_pos, _poly_of_number(osc.trunc, cminus_trim))])

    a2n = op_pow(destroy(osc.trunc), 2 * n)
    squeeze = embed(layout, [(osc_pos, a2n.dagger() + a2n)])

    h = osc.omega * embed(layout, [(osc_pos, number(osc.trunc))])
    for l, p in enumerate(params):
        chi = p.chi
        xi = p.xi if regime == "nonrwa" else 0.0
        sz = embed(layout, [(l, pauli("z"))])
        h = h + 0.5 * p.omega_q * sz
        h = h + (0.5 * (chi + xi)) * (sz @ p_plus)
        h = h + (0.5 * (chi - xi)) * p_minus
        if regime == "nonrwa" and include_squeezing:
            h = h + (0.5 * (chi + xi)) * (sz @ squeeze)

    k0 = 0 if cross_k0 else 1
    cross_coeffs = [
        c_coeff(n, k, "minus") if k >= k0 else 0 for k in range(max(n, 1))
    ]
    p_cross = embed(
        layout, [(osc_pos, _poly_of_number(osc.trunc, cross_coeffs))]
    )
    for l in range(len(params)):
        for m in range(l):
            chi_x, xi_x = _cross_strengths(params[l], params[m], regime)
            if regime == "rwa":
                flip = embed(layout, [(l, pauli("plus"))]) @ embed(
                    layout, [(m, pauli("minus"))]
                )
                pair = flip + flip.dagger()
                coef = 0.5 * chi_x
            else:
                pair = embed(layout, [(l, pauli("x"))]) @ embed(
                    layout, [(m, pauli("x"))]
                )
                coef = 0.5 * (chi_x - xi_x)
            h = h + coef * (pair @ p_cross)
    return h


def two_qubit_block(
    j: int,
    spec: SystemSpec,
    regime: str = "nonrwa",
    cross_k0: bool = True,
) -> np.ndarray:
    """Closed-form 4x4 block of the two-qubit effective model at photon number j.

    Basis ordering ``{|ee>, |eg>, |ge>, |gg>} (x) |j>``.  Because every term
    of :func:`build_multiqubit_dispersive` except the squeezing-like one
    conserves photon number (and the squeezing term moves ``2n`` quanta,
    having no elements inside a fixed-``j`` sector), the eigenvalues of this
    block coincide with those of the projected full model.

    Returns:
        Real symmetric ``(4, 4)`` array.

    Raises:
        ConfigError: Unless ``spec`` holds exactly two qubits of equal order.
        ResonanceError: If any detuning denominator vanishes.
    """
    _require_topology(spec, "multiqubit")
    if len(spec.qubits) != 2:
        raise ConfigError("two_qubit_block requires exactly two qubits")
    j = int(j)
    if j < 0:
        raise ValueError("photon number j must be non-negative")
    n = spec.common_n()
    p1 = spec.qubit_params(0)
    p2 = spec.qubit_params(1)
    omega_o = spec.oscillators[0].omega

    chi1 = p1.chi
    chi2 = p2.chi
    xi1 = p1.xi if regime == "nonrwa" else 0.0
    xi2 = p2.xi if regime == "nonrwa" else 0.0
    chi_x, xi_x = _cross_strengths(p1, p2, regime)

    jk = 1
    p_plus = 0
    p_minus = 0
    p_cross = 0
    k0 = 0 if cross_k0 else 1
    for k in range(n + 1):
        p_plus += c_coeff(n, k, "plus") * jk
        if 1 <= k <= n - 1:
            p_minus += c_coeff(n, k, "minus") * jk
        if k0 <= k <= n - 1:
            p_cross += c_coeff(n, k, "minus") * jk
        jk *= j

    sig = p1.omega_q + p2.omega_q
    del_q = p1.omega_q - p2.omega_q
    ups_plus = ((chi1 + xi1) + (chi2 + xi2)) * p_plus
    ups_minus = ((chi1 + xi1) - (chi2 + xi2)) * p_plus
    mu = 2.0 * j * omega_o + (chi1 + chi2 - xi1 - xi2) * p_minus
    exch = (chi_x - xi_x) * p_cross

    block = np.zeros((4, 4))
    block[0, 0] = sig + ups_plus + mu
    block[1, 1] = del_q + ups_minus + mu
    block[2, 2] = -del_q - ups_minus + mu
    block[3, 3] = -sig - ups_plus + mu
    block[1, 2] = block[2, 1] = exch
    if regime == "nonrwa":
        block[0, 3] = block[3, 0] = exch
    return 0.5 * block


# ---------------------------------------------------------------------------
# Multimode models
# ---------------------------------------------------------------------------


def _multimode_prelude(spec: SystemSpec):
    _require_topology(spec, "multimode")
    layout = spec.layout()
    q = spec.qubits[0]
    for c in spec.couplings:
        _check_order(c.n, spec.oscillators[c.oscillator].trunc)
    return layout, q


def build_multimode(spec: SystemSpec, variant: str = "mmr") -> SparseOperator:
    """Exact model of one qubit exchanging quanta with several oscillators.

    ``variant="mmr"`` keeps counter-rotating terms
    (``g_k sigma_x (a_k†^n_k + a_k^n_k)`` per coupled mode);
    ``variant="mmjc"`` keeps only rotating terms
    (``g_k (sigma_+ a_k^n_k + sigma_- a_k†^n_k)``).

    Raises:
        ConfigError: For a non-multimode topology or unknown variant.
        TruncationError: If any ``n_k >= trunc_k``.
    """
    if variant not in ("mmr", "mmjc"):
        raise ConfigError(f"variant must be 'mmr' or 'mmjc', got {variant!r}")
    layout, q = _multimode_prelude(spec)
    h = 0.5 * q.omega_q * embed(layout, [(0, pauli("z"))])
    for k, osc in enumerate(spec.oscillators):
        h = h + osc.omega * embed(layout, [(1 + k, number(osc.trunc))])
    for c in spec.couplings:
        osc = spec.oscillators[c.oscillator]
        an = op_pow(destroy(osc.trunc), c.n)
        pos = 1 + c.oscillator
        if variant == "mmr":
            h = h + c.g * (
                embed(layout, [(0, pauli("x"))])
                @ embed(layout, [(pos, an.dagger() + an)])
            )
        else:
            flip = embed(layout, [(0, pauli("plus"))]) @ embed(layout, [(pos, an)])
            h = h + c.g * (flip + flip.dagger())
    return h


def build_multimode_dispersive(
    spec: SystemSpec,
    regime: str = "nonrwa",
    include_squeezing: bool = True,
) -> SparseOperator:
    """Second-order effective model of one qubit coupled to several modes.

    Per coupled mode ``k`` the single-mode dispersive terms appear (with
    strengths ``chi_k = g_k^2 / delta_k``, ``xi_k = g_k^2 / sigma_k``,
    ``delta_k = omega_q - n_k omega_k``); each coupled pair ``k < l``
    acquires a qubit-state-conditioned beam-splitter-like exchange::

        rwa:    (chi_x / 2)        sigma_z (a_k†^n_k a_l^n_l + h.c.)
        nonrwa: ((chi_x + xi_x)/2) sigma_z (a_k^n_k + a_k†^n_k)
                                           (a_l^n_l + a_l†^n_l)

    with ``chi_x = g_k g_l (1/delta_k + 1/delta_l)`` and ``xi_x`` likewise
    with sum frequencies.

    Raises:
        ConfigError: For a non-multimode topology.
        ResonanceError: If any detuning denominator vanishes.
    """
    if regime not in ("rwa", "nonrwa"):
        raise ValueError(f"regime must be 'rwa' or 'nonrwa', got {regime!r}")
    layout, q = _multimode_prelude(spec)
    sz = embed(layout, [(0, pauli("z"))])
    h = 0.5 * q.omega_q * sz
    for k, osc in enumerate(spec.oscillators):
        h = h + osc.omega * embed(layout, [(1 + k, number(osc.trunc))])

    params = {c.oscillator: spec.coupling_params(c) for c in spec.couplings}
    for c in spec.couplings:
        osc = spec.oscillators[c.oscillator]
        pos = 1 + c.oscillator
        p = params[c.oscillator]
        chi = p.chi
        xi = p.xi if regime == "nonrwa" else 0.0
        cplus = [c_coeff(c.n, k, "plus") for k in range(c.n + 1)]
        cminus_trim = [
            c_coeff(c.n, k, "minus") if 1 <= k <= c.n - 1 else 0
            for k in range(c.n)
        ]
        h = h + (0.5 * (chi + xi)) * (
            sz @ embed(layout, [(pos, _poly_of_number(osc.trunc, cplus))])
        )
        h = h + (0.5 * (chi - xi)) * embed(
            layout, [(pos, _poly_of_number(osc.trunc, cminus_trim))]
        )
        if regime == "nonrwa" and include_squeezing:
            a2n = op_pow(destroy(osc.trunc), 2 * c.n)
            h = h + (0.5 * (chi + xi)) * (
                sz @ embed(layout, [(pos, a2n.dagger() + a2n)])
            )

    couplings = sorted(spec.couplings, key=lambda c: c.oscillator)
    for i in range(len(couplings)):
        for jdx in range(i):
            ck = couplings[jdx]
            cl = couplings[i]
            pk = params[ck.oscillator]
            pl = params[cl.oscillator]
            chi_x = ck.g * cl.g * (1.0 / pk.delta + 1.0 / pl.delta)
            ak = op_pow(destroy(spec.oscillators[ck.oscillator].trunc), ck.n)
            al = op_pow(destroy(spec.oscillators[cl.oscillator].trunc), cl.n)
            pos_k = 1 + ck.oscillator
            pos_l = 1 + cl.oscillator
            if regime == "rwa":
                hop = embed(layout, [(pos_k, ak.dagger())]) @ embed(
                    layout, [(pos_l, al)]
                )
                h = h + (0.5 * chi_x) * (sz @ (hop + hop.dagger()))
            else:
                xi_x = ck.g * cl.g * (1.0 / pk.sigma + 1.0 / pl.sigma)
                both = embed(layout, [(pos_k, ak.dagger() + ak)]) @ embed(
                    layout, [(pos_l, al.dagger() + al)]
                )
                h = h + (0.5 * (chi_x + xi_x)) * (sz @ both)
    return h
