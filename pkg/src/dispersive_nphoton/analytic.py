"""Closed-form spectra and effective parameters for n-photon couplings.

This module is pure scalar arithmetic on top of :mod:`.combinatorics`; it
never builds matrices.  The matrix builders in :mod:`.models` call directly
into these functions for their diagonal entries, so closed-form levels and
numerically assembled dispersive Hamiltonians agree bit-for-bit.

Physical setup and reduced units
--------------------------------
A qubit of frequency ``omega_q`` exchanges ``n`` oscillator quanta at a time
with an oscillator of frequency ``omega_o`` (all frequencies in units of
``omega_o = 1`` unless stated otherwise).  The two fundamental frequency
mismatches are::

    delta = omega_q - n * omega_o      (rotating / co-rotating detuning)
    sigma = omega_q + n * omega_o      (counter-rotating sum frequency)

Second-order perturbation theory in the coupling ``g`` produces dispersive
shift strengths ``chi = g**2 / delta`` and ``xi = g**2 / sigma``, and the
level structure is polynomial in the photon number with exact integer
coefficient rows ``C+`` and ``C-`` (see :func:`.combinatorics.c_coeff`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .combinatorics import c_coeff, stirling2
from .errors import ResonanceError

REGIMES = ("rwa", "nonrwa")
MOMENT_CONVENTIONS = ("coherent_exact", "amplitude_literal")


@lru_cache(maxsize=None)
def _cplus_row(n: int) -> tuple[int, ...]:
    return tuple(c_coeff(n, k, "plus") for k in range(n + 1))


@lru_cache(maxsize=None)
def _cminus_row(n: int) -> tuple[int, ...]:
    return tuple(c_coeff(n, k, "minus") for k in range(n + 1))


def _check_regime(regime: str) -> str:
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    return regime


# ---------------------------------------------------------------------------
# Parameter bundle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DispersiveParams:
    """Scalar parameters of one qubit/oscillator n-photon coupling.

    Attributes:
        n: Number of quanta exchanged per coupling event (``n >= 1``).
        g: Coupling strength (``g >= 0``).
        delta: Detuning ``omega_q - n * omega_o``.
        sigma: Sum frequency ``omega_q + n * omega_o``.
    """

    n: int
    g: float
    delta: float
    sigma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "sigma", float(self.sigma))
        if self.n < 1:
            raise ValueError("coupling order n must be >= 1")
        if self.g < 0:
            raise ValueError("coupling strength g must be non-negative")
        if self.sigma <= self.delta:
            raise ValueError(
                "sigma must exceed delta (oscillator frequency must be positive)"
            )

    @classmethod
    def from_frequencies(
        cls, omega_q: float, n: int, g: float, omega_o: float = 1.0
    ) -> "DispersiveParams":
        """Build from bare frequencies instead of detunings."""
        omega_q = float(omega_q)
        omega_o = float(omega_o)
        if omega_o <= 0:
            raise ValueError("oscillator frequency must be positive")
        n = int(n)
        return cls(
            n=n,
            g=g,
            delta=omega_q - n * omega_o,
            sigma=omega_q + n * omega_o,
        )

    # -- derived frequencies -------------------------------------------------

    @property
    def omega_o(self) -> float:
        """Oscillator frequency recovered from (delta, sigma)."""
        return (self.sigma - self.delta) / (2 * self.n)

    @property
    def omega_q(self) -> float:
        """Qubit frequency recovered from (delta, sigma)."""
        return (self.sigma + self.delta) / 2

    # -- perturbative strengths ----------------------------------------------

    @property
    def chi(self) -> float:
        """Dispersive shift strength ``g**2 / delta``.

        Raises:
            ResonanceError: If ``delta == 0`` (resonant, no dispersive limit).
        """
        if self.delta == 0.0:
            raise ResonanceError(
                "detuning delta vanishes; dispersive quantities are undefined"
            )
        return self.g**2 / self.delta

    @property
    def xi(self) -> float:
        """Counter-rotating shift strength ``g**2 / sigma``.

        Raises:
            ResonanceError: If ``sigma == 0``.
        """
        if self.sigma == 0.0:
            raise ResonanceError(
                "sum frequency sigma vanishes; counter-rotating shift undefined"
            )
        return self.g**2 / self.sigma

    @property
    def lam(self) -> float:
        """Small parameter ``g / delta`` of the rotating expansion."""
        if self.delta == 0.0:
            raise ResonanceError(
                "detuning delta vanishes; expansion parameter undefined"
            )
        return self.g / self.delta

    @property
    def lam_bar(self) -> float:
        """Small parameter ``g / sigma`` of the counter-rotating expansion."""
        if self.sigma == 0.0:
            raise ResonanceError(
                "sum frequency sigma vanishes; expansion parameter undefined"
            )
        return self.g / self.sigma

    @property
    def zeta(self) -> float:
        """Squeezing-like strength ``g * lam_bar / (2 n omega_o)``."""
        return self.g * self.lam_bar / (2 * self.n * self.omega_o)

    # -- validity ------------------------------------------------------------

    def require_dispersive(self, regime: str) -> None:
        """Check the perturbative expansion underlying a tagged output.

        Args:
            regime: ``"rwa"`` (rotating terms only) or ``"nonrwa"``
                (rotating and counter-rotating terms).

        Raises:
            ResonanceError: If a required denominator vanishes or the
                corresponding expansion parameter has modulus >= 1.
        """
        _check_regime(regime)
        if abs(self.lam) >= 1.0:
            raise ResonanceError(
                f"|g/delta| = {abs(self.lam):.3g} >= 1; dispersive expansion invalid"
            )
        if regime == "nonrwa" and abs(self.lam_bar) >= 1.0:
            raise ResonanceError(
                f"|g/sigma| = {abs(self.lam_bar):.3g} >= 1; "
                "counter-rotating expansion invalid"
            )


# ---------------------------------------------------------------------------
# Level formulas
# ---------------------------------------------------------------------------


def dispersive_level(
    params: DispersiveParams, qubit: str, j: int, regime: str = "nonrwa"
) -> float:
    """Second-order dispersive energy of the level labelled ``|qubit, j>``.

    The level is polynomial in the photon number ``j``::

        E(qubit, j) = omega_o j
                      + (chi - xi)/2 * sum_{k=1}^{n-1} Cminus(n,k) j^k
                      +- [ (chi + xi)/2 * sum_{k=0}^{n} Cplus(n,k) j^k
                           + omega_q / 2 ]

    with ``+`` for ``qubit = "e"`` and ``-`` for ``"g"``; in the ``"rwa"``
    regime ``xi`` is set to zero.  The photon-number polynomials are
    accumulated in exact integer arithmetic before the single float multiply,
    so the value is reproducible bit-for-bit.

    Args:
        params: Coupling parameters.
        qubit: ``"e"`` or ``"g"``.
        j: Photon number (``j >= 0``).
        regime: ``"rwa"`` or ``"nonrwa"``.

    Raises:
        ResonanceError: If a required denominator vanishes.
    """
    _check_regime(regime)
    if qubit not in ("e", "g"):
        raise ValueError(f"qubit must be 'e' or 'g', got {qubit!r}")
    j = int(j)
    if j < 0:
        raise ValueError("photon number j must be non-negative")

    n = params.n
    chi = params.chi
    xi = params.xi if regime == "nonrwa" else 0.0

    cplus = _cplus_row(n)
    cminus = _cminus_row(n)

    p_plus = 0
    p_minus = 0
    jk = 1  # exact integer j**k
    for k in range(n + 1):
        p_plus += cplus[k] * jk
        if 1 <= k <= n - 1:
            p_minus += cminus[k] * jk
        jk *= j

    sign = 1.0 if qubit == "e" else -1.0
    return (
        params.omega_o * j
        + 0.5 * (chi - xi) * p_minus
        + sign * (0.5 * (chi + xi) * p_plus + 0.5 * params.omega_q)
    )


def njc_doublet(params: DispersiveParams, l: int) -> tuple[float, float]:
    """Exact excited-manifold doublet of the rotating n-photon model.

    For every ``l >= 0`` the rotating (number-conserving) model couples only
    ``|e, l>`` and ``|g, l + n>``; the resulting two eigenvalues are::

        E+-(l) = (l + n/2) omega_o
                 +- sqrt( g**2 (l+n)!/l!  +  delta**2 / 4 )

    The factorial ratio is accumulated multiplicatively to avoid overflow.

    Args:
        params: Coupling parameters.
        l: Lower Fock index of the doublet (``l >= 0``).

    Returns:
        ``(E_plus, E_minus)`` with ``E_plus >= E_minus``.
    """
    l = int(l)
    if l < 0:
        raise ValueError("doublet index l must be non-negative")
    n = params.n
    ratio = 1.0
    for i in range(1, n + 1):
        ratio *= l + i
    center = (l + 0.5 * n) * params.omega_o
    root = math.sqrt(params.g**2 * ratio + 0.25 * params.delta**2)
    return center + root, center - root


def critical_photon_number(n: int, g: float, delta: float) -> float:
    """Photon number at which the dispersive expansion breaks down.

    For ``n = 1`` this is the familiar ``delta**2 / (4 g**2)``; for
    ``n >= 2`` the leading scaling is ``(|delta| / g)**(2 / n)``.

    Args:
        n: Coupling order (``n >= 1``).
        g: Coupling strength (``g >= 0``; ``g = 0`` returns ``inf``).
        delta: Detuning.
    """
    n = int(n)
    if n < 1:
        raise ValueError("coupling order n must be >= 1")
    g = float(g)
    if g < 0:
        raise ValueError("coupling strength g must be non-negative")
    if g == 0.0:
        return math.inf
    if n == 1:
        return (delta / (2.0 * g)) ** 2
    return (abs(delta) / g) ** (2.0 / n)


# ---------------------------------------------------------------------------
# Coherent-state averages
# ---------------------------------------------------------------------------


def _check_moment_convention(moment_convention: str) -> str:
    if moment_convention not in MOMENT_CONVENTIONS:
        raise ValueError(
            f"moment_convention must be one of {MOMENT_CONVENTIONS}, "
            f"got {moment_convention!r}"
        )
    return moment_convention


def _number_moment(k: int, alpha_abs: float, moment_convention: str) -> float:
    """Coherent-state expectation ``<N^k>`` at amplitude ``|alpha|``.

    ``coherent_exact`` uses the exact normally ordered moments
    ``<a†^l a^l> = |alpha|**(2 l)``; ``amplitude_literal`` substitutes
    ``|alpha|**l`` instead (a convention sometimes used for quick estimates,
    kept selectable for comparison).
    """
    total = 0.0
    for l in range(k + 1):
        if moment_convention == "coherent_exact":
            m = alpha_abs ** (2 * l)
        else:
            m = alpha_abs**l
        total += stirling2(k, l) * m
    return total


def dressed_qubit_frequency(
    params: DispersiveParams,
    alpha_abs: float,
    moment_convention: str = "coherent_exact",
    regime: str = "rwa",
) -> float:
    """Qubit frequency dressed by a coherent oscillator population.

    Averages the qubit-conditional level splitting over a coherent state of
    amplitude ``|alpha|``::

        omega_bar = omega_q + shift * sum_{k=0}^{n} Cplus(n,k) <N^k>

    where ``shift = chi`` in the ``"rwa"`` regime and ``chi + xi`` otherwise.
    At ``alpha = 0`` this reduces to the vacuum-dressed ``omega_q + shift n!``.

    Args:
        params: Coupling parameters.
        alpha_abs: Coherent amplitude modulus (``>= 0``).
        moment_convention: ``"coherent_exact"`` (default) or
            ``"amplitude_literal"``; see :func:`_number_moment`.
        regime: ``"rwa"`` or ``"nonrwa"``.

    Raises:
        ResonanceError: Outside the dispersive regime (see
            :meth:`DispersiveParams.require_dispersive`).
    """
    _check_moment_convention(moment_convention)
    _check_regime(regime)
    alpha_abs = float(alpha_abs)
    if alpha_abs < 0:
        raise ValueError("alpha_abs must be non-negative")
    params.require_dispersive(regime)
    shift = params.chi + (params.xi if regime == "nonrwa" else 0.0)
    cplus = _cplus_row(params.n)
    acc = 0.0
    for k in range(params.n + 1):
        acc += cplus[k] * _number_moment(k, alpha_abs, moment_convention)
    return params.omega_q + shift * acc


def effective_two_qubit_params(
    spec,
    alpha_abs: float,
    moment_convention: str = "coherent_exact",
    cross_k0: bool = True,
) -> tuple[float, float, float]:
    """Effective flip-flop model parameters for two dispersively coupled qubits.

    Two qubits sharing one oscillator prepared near a coherent state of
    amplitude ``|alpha|`` behave as two dressed qubits exchanging excitations
    at an effective rate.  Returns ``(omega_bar_1, omega_bar_2, g_bar)``
    where each ``omega_bar_l`` is :func:`dressed_qubit_frequency` of qubit
    ``l`` and::

        g_bar = chi_x * sum_{k=k0}^{n-1} Cminus(n,k) <N^k>,
        chi_x = g1 g2 (1/delta_1 + 1/delta_2)

    with ``k0 = 0`` when ``cross_k0`` is true (constant exchange term kept)
    and ``k0 = 1`` otherwise.

    Args:
        spec: A two-qubit system description with attributes ``qubits``
            (each exposing ``omega_q``, ``n``, ``g``) and ``oscillators``
            (the first exposing ``omega``); duck-typed so any compatible
            object works.
        alpha_abs: Coherent amplitude modulus.
        moment_convention: Moment convention (see
            :func:`dressed_qubit_frequency`).
        cross_k0: Keep the photon-independent exchange contribution.

    Raises:
        ValueError: If the description does not contain exactly two qubits
            and one oscillator, or the qubit orders differ.
        ResonanceError: If a detuning vanishes or an expansion parameter is
            not small.
    """
    _check_moment_convention(moment_convention)
    qubits = list(spec.qubits)
    oscillators = list(spec.oscillators)
    if len(qubits) != 2 or len(oscillators) != 1:
        raise ValueError(
            "effective_two_qubit_params requires exactly two qubits sharing "
            "one oscillator"
        )
    omega_o = float(oscillators[0].omega)
    p1 = DispersiveParams.from_frequencies(
        qubits[0].omega_q, qubits[0].n, qubits[0].g, omega_o
    )
    p2 = DispersiveParams.from_frequencies(
        qubits[1].omega_q, qubits[1].n, qubits[1].g, omega_o
    )
    if p1.n != p2.n:
        raise ValueError("both qubits must share the same coupling order n")
    p1.require_dispersive("rwa")
    p2.require_dispersive("rwa")

    n = p1.n
    alpha_abs = float(alpha_abs)
    if alpha_abs < 0:
        raise ValueError("alpha_abs must be non-negative")

    w1 = dressed_qubit_frequency(p1, alpha_abs, moment_convention)
    w2 = dressed_qubit_frequency(p2, alpha_abs, moment_convention)

    chi_x = p1.g * p2.g * (1.0 / p1.delta + 1.0 / p2.delta)
    cminus = _cminus_row(n)
    k0 = 0 if cross_k0 else 1
    acc = 0.0
    for k in range(k0, n):
        acc += cminus[k] * _number_moment(k, alpha_abs, moment_convention)
    return w1, w2, chi_x * acc
