"""Integer coefficient tables behind the n-photon commutator algebra.

The commutator of an n-photon raising/lowering pair equals a degree-n
polynomial in the photon-number operator attached to the qubit inversion,
plus a degree-(n-1) polynomial on the identity.  Both polynomials have
integer coefficients.  This demo prints the tables and then verifies one
identity entrywise on a truncated space.
"""

import numpy as np

import dispersive_nphoton as dn


def print_tables(n_max=6):
    print("qubit-inversion polynomial coefficients (k = 0..n):")
    for n in range(1, n_max + 1):
        row = [dn.c_coeff(n, k, "plus") for k in range(n + 1)]
        print(f"  n={n}: {row}")
    print("identity polynomial coefficients (k = 0..n-1):")
    for n in range(1, n_max + 1):
        row = [dn.c_coeff(n, k, "minus") for k in range(n)]
        print(f"  n={n}: {row}")


def verify_identity(n=2, trunc=16):
    lay = dn.qubit_oscillator_layout(1, (trunc,))
    a_n = dn.op_pow(dn.destroy(trunc), n)
    sm, sp, sz = dn.pauli("minus"), dn.pauli("plus"), dn.pauli("z")
    ladder_up = dn.embed(lay, [(0, sm), (1, a_n.dagger())]) + dn.embed(
        lay, [(0, sp), (1, a_n)]
    )
    ladder_down = dn.embed(lay, [(0, sm), (1, a_n.dagger())]) - dn.embed(
        lay, [(0, sp), (1, a_n)]
    )
    powers = [dn.op_pow(dn.number(trunc), k) for k in range(n + 1)]
    poly_plus = sum(
        (float(dn.c_coeff(n, k, "plus")) * powers[k] for k in range(n + 1)),
        start=0.0 * powers[0],
    )
    poly_minus = sum(
        (float(dn.c_coeff(n, k, "minus")) * powers[k] for k in range(n)),
        start=0.0 * powers[0],
    )
    rhs = dn.embed(lay, [(0, sz)]) @ dn.embed(lay, [(1, poly_plus)]) + dn.embed(
        lay, [(1, poly_minus)]
    )
    lhs = ladder_up.commutator(ladder_down)
    mask = dn.guard_band_mask(lay, n, 2)
    diff = np.abs((lhs - rhs).toarray()[np.ix_(mask, mask)]).max()
    print(f"commutator identity at n={n}, trunc={trunc}: "
          f"max entrywise deviation {diff:.3e} on the guard-banded block")


def main():
    print_tables()
    verify_identity()


if __name__ == "__main__":
    main()
