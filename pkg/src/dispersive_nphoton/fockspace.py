"""Sparse operator toolkit on truncated qubit/oscillator Hilbert spaces.

This module provides the numerical substrate for everything else in the
package: a declarative description of a composite Hilbert space
(:class:`HilbertLayout`), an immutable canonical sparse operator wrapper
(:class:`SparseOperator`), single-subsystem ladder/Pauli constructors, and
the tensor-product machinery (:func:`kron`, :func:`embed`, :func:`op_pow`)
used to place operators inside a composite space.

Conventions
-----------
* Oscillators are truncated to ``dim`` Fock levels ``|0>, ..., |dim-1>``;
  the annihilation operator acts as ``<j-1| a |j> = sqrt(j)``.
* Qubits are two-dimensional with basis index ``0 = |e>`` (excited) and
  ``1 = |g>`` (ground), so ``pauli("z") = diag(+1, -1)`` and
  ``pauli("plus") = |e><g|``.
* Composite basis indices are row-major over the subsystem tuple, with the
  first subsystem varying slowest.  Callers conventionally order qubits
  before oscillators.
* Canonical storage is CSR with sorted indices, summed duplicates, and
  exact zeros purged; buffers are frozen after canonicalization.  The
  ``hermitian`` flag certifies *exact* conjugate symmetry of the stored
  entries (no tolerance), because downstream eigensolvers rely on it.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError

QUBIT = "qubit"
OSCILLATOR = "oscillator"
_KINDS = (QUBIT, OSCILLATOR)

#: Hard cap on composite dimensions, guarding index overflow long before
#: any allocation is attempted.
MAX_TOTAL_DIM = 2**40


# ---------------------------------------------------------------------------
# Hilbert space layout
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered description of a composite Hilbert space.

    Attributes:
        subsystems: Tuple of ``(kind, dim)`` pairs, where ``kind`` is
            ``"qubit"`` (``dim`` must be 2) or ``"oscillator"``
            (``dim >= 2`` Fock levels retained).
    """

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        subs = tuple((str(kind), int(dim)) for kind, dim in self.subsystems)
        if not subs:
            raise ValueError("layout must contain at least one subsystem")
        for kind, dim in subs:
            if kind not in _KINDS:
                raise ValueError(f"unknown subsystem kind {kind!r}")
            if kind == QUBIT and dim != 2:
                raise ValueError("qubit subsystems must have dimension 2")
            if kind == OSCILLATOR and dim < 2:
                raise ValueError("oscillator truncation dimension must be >= 2")
        total = math.prod(dim for _, dim in subs)
        if total > MAX_TOTAL_DIM:
            raise CapacityError(
                f"composite dimension {total} exceeds the supported maximum "
                f"{MAX_TOTAL_DIM}"
            )
        object.__setattr__(self, "subsystems", subs)

    # -- structural queries -------------------------------------------------

    @property
    def dims(self) -> tuple[int, ...]:
        """Per-subsystem dimensions, in layout order."""
        return tuple(dim for _, dim in self.subsystems)

    @property
    def total_dim(self) -> int:
        """Dimension of the composite space."""
        return math.prod(self.dims)

    @property
    def n_subsystems(self) -> int:
        return len(self.subsystems)

    @property
    def qubit_indices(self) -> tuple[int, ...]:
        """Positions of qubit subsystems within the layout."""
        return tuple(i for i, (k, _) in enumerate(self.subsystems) if k == QUBIT)

    @property
    def oscillator_indices(self) -> tuple[int, ...]:
        """Positions of oscillator subsystems within the layout."""
        return tuple(
            i for i, (k, _) in enumerate(self.subsystems) if k == OSCILLATOR
        )

    # -- index arithmetic ---------------------------------------------------

    def basis_index(self, occupations: Sequence[int]) -> int:
        """Row-major composite index of a product basis state.

        Args:
            occupations: One basis index per subsystem, in layout order
                (for qubits ``0 = |e>``, ``1 = |g>``).

        Returns:
            Integer index into the composite basis.
        """
        if len(occupations) != self.n_subsystems:
            raise ValueError(
                f"expected {self.n_subsystems} occupation numbers, "
                f"got {len(occupations)}"
            )
        index = 0
        for occ, (kind, dim) in zip(occupations, self.subsystems):
            occ = int(occ)
            if not 0 <= occ < dim:
                raise ValueError(
                    f"occupation {occ} out of range for {kind} of dimension {dim}"
                )
            index = index * dim + occ
        return index

    def basis_occupations(self, index: int) -> tuple[int, ...]:
        """Inverse of :meth:`basis_index`."""
        index = int(index)
        if not 0 <= index < self.total_dim:
            raise ValueError(f"basis index {index} out of range")
        occs = []
        for _, dim in reversed(self.subsystems):
            occs.append(index % dim)
            index //= dim
        return tuple(reversed(occs))

    def label_of(self, index: int) -> tuple[str, tuple[int, ...]]:
        """Human-readable label ``(qubit_config, fock_tuple)`` of a basis state.

        The qubit configuration string lists one character per qubit in
        layout order (``"e"`` or ``"g"``); the Fock tuple lists oscillator
        occupations in layout order.
        """
        occs = self.basis_occupations(index)
        config = "".join(
            "e" if occs[i] == 0 else "g" for i in self.qubit_indices
        )
        fock = tuple(occs[i] for i in self.oscillator_indices)
        return config, fock

    def occupation_vectors(self) -> np.ndarray:
        """Array of shape ``(total_dim, n_subsystems)`` of basis occupations."""
        grids = np.indices(self.dims).reshape(self.n_subsystems, -1)
        return grids.T

    def oscillator_number_diagonal(self) -> np.ndarray:
        """Diagonal of the total oscillator number operator, as a float array."""
        occs = self.occupation_vectors()
        osc = self.oscillator_indices
        if not osc:
            return np.zeros(self.total_dim)
        return occs[:, list(osc)].sum(axis=1).astype(float)


def qubit_oscillator_layout(n_qubits: int, truncs: Sequence[int]) -> HilbertLayout:
    """Standard layout with ``n_qubits`` qubits followed by oscillators.

    Args:
        n_qubits: Number of qubit subsystems (placed first).
        truncs: Truncation dimension of each oscillator, in order.
    """
    subs = tuple((QUBIT, 2) for _ in range(int(n_qubits))) + tuple(
        (OSCILLATOR, int(t)) for t in truncs
    )
    return HilbertLayout(subs)


# ---------------------------------------------------------------------------
# Sparse operator wrapper
# ---------------------------------------------------------------------------


def _canonicalize(matrix) -> sp.csr_matrix:
    """Return a canonical immutable CSR copy of ``matrix``.

    Canonical form: CSR, complex128, duplicate entries summed, exact zeros
    purged, column indices sorted, buffers frozen.  Only *exact* zeros are
    removed; no tolerance-based dropping ever happens here.
    """
    mat = sp.csr_matrix(matrix, dtype=np.complex128, copy=True)
    mat.sum_duplicates()
    mat.eliminate_zeros()
    mat.sort_indices()
    mat.data.setflags(write=False)
    mat.indices.setflags(write=False)
    mat.indptr.setflags(write=False)
    return mat


def _is_exactly_hermitian(mat: sp.csr_matrix) -> bool:
    """Exact (tolerance-free) conjugate-symmetry test."""
    if mat.shape[0] != mat.shape[1]:
        return False
    diff = mat != mat.conj().T.tocsr()
    return diff.nnz == 0


@dataclass(eq=False)
class SparseOperator:
    """Immutable canonical sparse operator on a :class:`HilbertLayout`.

    Attributes:
        layout: The composite space the operator acts on.
        entries: Canonical CSR matrix of shape ``(total_dim, total_dim)``.
        hermitian: True iff the stored entries are *exactly* conjugate
            symmetric (certified at construction, never assumed).
    """

    layout: HilbertLayout
    entries: sp.csr_matrix
    hermitian: bool = field(init=False)

    def __post_init__(self) -> None:
        mat = _canonicalize(self.entries)
        dim = self.layout.total_dim
        if mat.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {mat.shape} does not match layout dimension {dim}"
            )
        self.entries = mat
        self.hermitian = _is_exactly_hermitian(mat)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_dense(cls, layout: HilbertLayout, array) -> "SparseOperator":
        """Wrap a dense array (exact zeros are purged in canonical storage)."""
        return cls(layout, sp.csr_matrix(np.asarray(array, dtype=np.complex128)))

    # -- basic queries ------------------------------------------------------

    @property
    def total_dim(self) -> int:
        return self.layout.total_dim

    @property
    def nnz(self) -> int:
        """Number of stored (structurally nonzero) entries."""
        return self.entries.nnz

    def toarray(self) -> np.ndarray:
        """Dense copy of the operator."""
        return self.entries.toarray()

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal()

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Matrix-vector product ``A @ v``."""
        v = np.asarray(vector)
        if v.shape != (self.total_dim,):
            raise ValueError(
                f"vector of shape {v.shape} does not match dimension "
                f"{self.total_dim}"
            )
        return self.entries @ v

    def one_norm(self) -> float:
        """Induced 1-norm (maximum absolute column sum)."""
        if self.nnz == 0:
            return 0.0
        return float(abs(self.entries).sum(axis=0).max())

    # -- algebra ------------------------------------------------------------

    def _require_same_layout(self, other: "SparseOperator") -> None:
        if self.layout != other.layout:
            raise ValueError("operators act on different layouts")

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        if not isinstance(other, SparseOperator):
            return NotImplemented
        self._require_same_layout(other)
        return SparseOperator(self.layout, self.entries + other.entries)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        if not isinstance(other, SparseOperator):
            return NotImplemented
        self._require_same_layout(other)
        return SparseOperator(self.layout, self.entries - other.entries)

    def __mul__(self, scalar) -> "SparseOperator":
        if not isinstance(scalar, numbers.Number):
            return NotImplemented
        return SparseOperator(self.layout, self.entries * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "SparseOperator":
        if not isinstance(scalar, numbers.Number):
            return NotImplemented
        return SparseOperator(self.layout, self.entries / scalar)

    def __neg__(self) -> "SparseOperator":
        return SparseOperator(self.layout, -self.entries)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        if not isinstance(other, SparseOperator):
            return NotImplemented
        self._require_same_layout(other)
        return SparseOperator(self.layout, self.entries @ other.entries)

    def dagger(self) -> "SparseOperator":
        """Hermitian adjoint."""
        return SparseOperator(self.layout, self.entries.conj().T.tocsr())

    def commutator(self, other: "SparseOperator") -> "SparseOperator":
        """``[self, other] = self @ other - other @ self``."""
        self._require_same_layout(other)
        return SparseOperator(
            self.layout, self.entries @ other.entries - other.entries @ self.entries
        )

    def max_abs(self) -> float:
        """Largest absolute entry (0 for an empty operator)."""
        if self.nnz == 0:
            return 0.0
        return float(np.abs(self.entries.data).max())


# ---------------------------------------------------------------------------
# Single-subsystem constructors
# ---------------------------------------------------------------------------


def _oscillator_layout(dim: int) -> HilbertLayout:
    return HilbertLayout(((OSCILLATOR, int(dim)),))


def _qubit_layout() -> HilbertLayout:
    return HilbertLayout(((QUBIT, 2),))


def destroy(dim: int) -> SparseOperator:
    """Truncated annihilation operator with ``<j-1| a |j> = sqrt(j)``.

    Args:
        dim: Number of retained Fock levels (must be at least 2).
    """
    dim = int(dim)
    if dim < 2:
        raise ValueError("oscillator truncation dimension must be >= 2")
    data = np.sqrt(np.arange(1, dim, dtype=float))
    return SparseOperator(_oscillator_layout(dim), sp.diags(data, 1))


def create(dim: int) -> SparseOperator:
    """Truncated creation operator (adjoint of :func:`destroy`)."""
    return destroy(dim).dagger()


def number(dim: int) -> SparseOperator:
    """Number operator ``diag(0, 1, ..., dim-1)``."""
    dim = int(dim)
    if dim < 2:
        raise ValueError("oscillator truncation dimension must be >= 2")
    return SparseOperator(
        _oscillator_layout(dim), sp.diags(np.arange(dim, dtype=float))
    )


def identity(dim: int, kind: str = OSCILLATOR) -> SparseOperator:
    """Identity operator on a single subsystem of the given kind."""
    layout = HilbertLayout(((kind, int(dim)),))
    return SparseOperator(layout, sp.identity(int(dim), format="csr"))


def position(dim: int) -> SparseOperator:
    """Dimensionless position-like operator ``a + a^dagger``."""
    return destroy(dim) + create(dim)


_PAULI_MATRICES = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
    "plus": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128),
    "minus": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128),
}


def pauli(which: str) -> SparseOperator:
    """Qubit operator in the ``(|e>, |g>)`` basis.

    ``"z" = diag(+1, -1)`` (excited state has eigenvalue +1),
    ``"plus" = |e><g|`` raises ``|g>`` to ``|e>``, and ``"minus"`` is its
    adjoint; ``"x"``/``"y"`` are the standard flip operators.

    Args:
        which: One of ``"x"``, ``"y"``, ``"z"``, ``"plus"``, ``"minus"``.
    """
    try:
        mat = _PAULI_MATRICES[which]
    except KeyError:
        raise ValueError(
            f"unknown qubit operator {which!r}; expected one of "
            f"{sorted(_PAULI_MATRICES)}"
        ) from None
    return SparseOperator.from_dense(_qubit_layout(), mat)


def zeros(layout: HilbertLayout) -> SparseOperator:
    """Zero operator on a layout (useful as a sum accumulator)."""
    dim = layout.total_dim
    return SparseOperator(layout, sp.csr_matrix((dim, dim), dtype=np.complex128))


# ---------------------------------------------------------------------------
# Composite-space machinery
# ---------------------------------------------------------------------------


def kron(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    """Tensor product; ``a``'s subsystems precede ``b``'s in the result."""
    total = a.layout.total_dim * b.layout.total_dim
    if total > MAX_TOTAL_DIM:
        raise CapacityError(
            f"tensor product dimension {total} exceeds the supported maximum "
            f"{MAX_TOTAL_DIM}"
        )
    layout = HilbertLayout(a.layout.subsystems + b.layout.subsystems)
    return SparseOperator(layout, sp.kron(a.entries, b.entries, format="csr"))


def op_pow(a: SparseOperator, exponent: int) -> SparseOperator:
    """Non-negative integer operator power; ``exponent = 0`` gives identity.

    A power of an exactly Hermitian operator is Hermitian in exact
    arithmetic, but chained floating-point products associate the triple
    products of the two triangles differently (an ulp-level mismatch from
    the third power on), so such a result is re-symmetrized to keep the
    Hermiticity certificate.
    """
    exponent = int(exponent)
    if exponent < 0:
        raise ValueError("operator power requires a non-negative exponent")
    if exponent == 0:
        return SparseOperator(
            a.layout, sp.identity(a.total_dim, format="csr")
        )
    result = a
    for _ in range(exponent - 1):
        result = result @ a
    if a.hermitian and not result.hermitian:
        result = 0.5 * (result + result.dagger())
    return result


def embed(
    layout: HilbertLayout,
    factors: Iterable[tuple[int, SparseOperator]],
) -> SparseOperator:
    """Tensor single-subsystem operators into a composite layout.

    Args:
        layout: Target composite layout.
        factors: Pairs ``(subsystem_index, operator)``; every unmentioned
            subsystem receives an identity factor.  An empty iterable yields
            the identity on the full layout.

    Raises:
        ValueError: On a duplicated subsystem index, an index out of range,
            a multi-subsystem factor, or a factor whose kind/dimension does
            not match the layout slot.
        CapacityError: If the layout dimension exceeds the supported maximum.
    """
    factor_map: dict[int, SparseOperator] = {}
    for index, op in factors:
        index = int(index)
        if not 0 <= index < layout.n_subsystems:
            raise ValueError(f"subsystem index {index} out of range")
        if index in factor_map:
            raise ValueError(f"subsystem index {index} appears more than once")
        if not isinstance(op, SparseOperator):
            raise ValueError("embed factors must be SparseOperator instances")
        if op.layout.n_subsystems != 1:
            raise ValueError("embed factors must act on a single subsystem")
        if op.layout.subsystems[0] != layout.subsystems[index]:
            raise ValueError(
                f"factor {op.layout.subsystems[0]} does not match layout slot "
                f"{layout.subsystems[index]} at index {index}"
            )
        factor_map[index] = op

    if layout.total_dim > MAX_TOTAL_DIM:
        raise CapacityError(
            f"composite dimension {layout.total_dim} exceeds the supported "
            f"maximum {MAX_TOTAL_DIM}"
        )

    acc = sp.identity(1, format="csr", dtype=np.complex128)
    for i, (_, dim) in enumerate(layout.subsystems):
        if i in factor_map:
            block = factor_map[i].entries
        else:
            block = sp.identity(dim, format="csr", dtype=np.complex128)
        acc = sp.kron(acc, block, format="csr")
    return SparseOperator(layout, acc)


def guard_band_mask(
    layout: HilbertLayout, order: int, band: int = 2
) -> np.ndarray:
    """Boolean mask of basis states unaffected by truncation edge artifacts.

    A basis state passes the mask iff every oscillator occupation ``j``
    satisfies ``j < dim - order * band``.  Operator identities that move up
    to ``order`` quanta per application (applied up to ``band`` times) are
    exact on the masked block of a truncated matrix.

    Args:
        layout: Composite layout.
        order: Number of quanta moved per operator application.
        band: Number of nested applications to protect against (default 2).
    """
    order = int(order)
    band = int(band)
    if order < 0 or band < 0:
        raise ValueError("order and band must be non-negative")
    occs = layout.occupation_vectors()
    mask = np.ones(layout.total_dim, dtype=bool)
    for i in layout.oscillator_indices:
        dim = layout.dims[i]
        mask &= occs[:, i] < dim - order * band
    return mask
