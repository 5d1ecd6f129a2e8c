"""Pair partitions, block decompositions, and vacuum statistics.

The block decomposition groups pairs into connected components of the
crossing relation: pairs (k1, l1) and (k2, l2) with k1 < k2 are linked when
k1 < k2 < l1 < l2, and components are closures under chains of crossings.
Nested but non-crossing pairs such as {(1,4),(2,3)} therefore fall into
separate blocks.  This convention is pinned by computing vacuum pairing
values on the ballot space directly: the operator computation gives
t({(1,4),(2,3)}) = 1 and t({(1,3),(2,4)}) = q, which forces exponents 0 and
1, i.e. two blocks for nesting and one for crossing.
"""

from itertools import product
from math import factorial, sqrt

import numpy as np

from .fock import FockSpace, OrbitCanonicalizer, inner_product
from .operators import (
    annihilator,
    apply_annihilator_sparse,
    apply_creator_sparse,
    basis_color_vector,
    creator,
    sparse_inner,
)
from .weights import OrientedSetWeight, ProductWeight, Weight


def pair_partitions(r):
    """All (2r-1)!! pair partitions of {1..2r}, pairs and lists sorted."""
    def rec(points):
        if not points:
            return [()]
        first = points[0]
        out = []
        for i in range(1, len(points)):
            partner = points[i]
            rest = points[1:i] + points[i + 1:]
            for tail in rec(rest):
                out.append(((first, partner),) + tail)
        return out

    return rec(tuple(range(1, 2 * r + 1)))


def crossing(p1, p2):
    a, b = sorted((p1, p2))
    return a[0] < b[0] < a[1] < b[1]


def blocks(partition):
    """Connected components of the crossing relation, each sorted."""
    pairs = list(partition)
    parent = list(range(len(pairs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if crossing(pairs[i], pairs[j]):
                parent[find(i)] = find(j)
    groups = {}
    for i, p in enumerate(pairs):
        groups.setdefault(find(i), []).append(p)
    return sorted(tuple(sorted(g)) for g in groups.values())


def t_ballot_closed_form(partition, q):
    """q to the power (number of pairs - number of blocks)."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    exponent = len(partition) - len(blocks(partition))
    return float(q) ** exponent


def canonical_word(partition):
    """The ladder word of a pair partition: position k holds an annihilation
    letter at the opener of its pair and a creation letter at the closer,
    one fresh color per pair; the rightmost letter acts first."""
    pairs = sorted(partition)
    letters = {}
    for color, (k, l) in enumerate(pairs):
        letters[k] = ("annihilate", color)
        letters[l] = ("create", color)
    return [letters[pos] for pos in sorted(letters)]


def fock_t(weight, partition, state=None, canon=None, num_colors=None, reserved_colors=0):
    """Vacuum pairing value: expectation of the canonical word of the
    partition in the vacuum (or a supplied unit state, given as a sparse
    mapping from orbit keys to amplitudes)."""
    r = len(partition)
    if num_colors is None:
        num_colors = r + reserved_colors if r else 1 + reserved_colors
    if canon is None:
        canon = OrbitCanonicalizer(weight.species, num_colors)
    if state is None:
        level0 = weight.species.structures(0)
        if len(level0) != 1:
            raise ValueError(
                f"species {weight.species.tag} has {len(level0)} structures at level 0; pass an explicit state"
            )
        state = {(0, level0[0], ()): 1.0 + 0.0j}
    vec = dict(state)
    for kind, color in reversed(canonical_word(partition)):
        if kind == "create":
            vec = apply_creator_sparse(canon, weight, color, vec)
        else:
            vec = apply_annihilator_sparse(canon, weight, color, vec)
        if not vec:
            return 0.0 + 0.0j
    return sparse_inner(state, vec)


def tree_surrogate_state(weight, reserved_color):
    """Unit state on the one-point structure of a species without level-0
    structures (tree-type factor spaces), colored with a reserved color."""
    level1 = weight.species.structures(1)
    if len(level1) != 1:
        raise ValueError(f"species {weight.species.tag} has {len(level1)} structures at level 1")
    return {(1, level1[0], (reserved_color,)): 1.0 + 0.0j}


def pairing_table(weight, r_max, state=None, reserved_colors=0):
    """fock_t for every partition with up to r_max pairs."""
    num_colors = max(1, r_max) + reserved_colors
    canon = OrbitCanonicalizer(weight.species, num_colors)
    rows = []
    for r in range(1, r_max + 1):
        for part in pair_partitions(r):
            val = fock_t(weight, part, state=state, canon=canon, num_colors=num_colors)
            rows.append((part, complex(val)))
    return rows


def check_cartesian_multiplicativity(wleft, wright, r_max, tol=1e-9, surrogate=False):
    """Verify that vacuum pairing values of a cartesian product space factor
    into the product of the factor values, for all partitions with at most
    r_max pairs.  With surrogate=True the one-point states of tree-type
    factors replace the missing vacua."""
    from .weights import CartesianWeight

    wprod = CartesianWeight(wleft, wright)
    num_colors = r_max + (1 if surrogate else 0)
    reserved = num_colors - 1
    if surrogate:
        state_l = tree_surrogate_state(wleft, reserved)
        state_r = tree_surrogate_state(wright, reserved)
        state_p = tree_surrogate_state(wprod, reserved)
    else:
        state_l = state_r = state_p = None
    canon_l = OrbitCanonicalizer(wleft.species, num_colors)
    canon_r = OrbitCanonicalizer(wright.species, num_colors)
    canon_p = OrbitCanonicalizer(wprod.species, num_colors)
    worst = 0.0
    rows = []
    for r in range(1, r_max + 1):
        for part in pair_partitions(r):
            tl = fock_t(wleft, part, state=state_l, canon=canon_l, num_colors=num_colors)
            tr = fock_t(wright, part, state=state_r, canon=canon_r, num_colors=num_colors)
            tp = fock_t(wprod, part, state=state_p, canon=canon_p, num_colors=num_colors)
            dev = abs(tp - tl * tr)
            worst = max(worst, dev)
            rows.append((part, complex(tp), complex(tl * tr)))
    return {"max_deviation": worst, "passed": worst <= tol, "rows": rows}


def moments(weight, order, num_colors=2, color=0, max_level=None, state=None):
    """Moment table of the field operator for one basis color: entries
    <vac, (a + a*)^k vac> for k = 0..order."""
    need = (order + 1) // 2 + 1
    if max_level is None:
        max_level = need
    if max_level < need:
        raise ValueError(f"truncation level {max_level} too small for order {order} (need >= {need})")
    space = FockSpace(weight.species, num_colors, max_level)
    h = basis_color_vector(space, color)
    field = creator(space, weight, h, check=False).mat + annihilator(space, weight, h).mat
    vac = space.vacuum() if state is None else state
    vals = []
    vec = vac.copy()
    vals.append(inner_product(vac, vec).real)
    for _ in range(order):
        vec = field @ vec
        vals.append(inner_product(vac, vec).real)
    return vals


def hankel_min_eigenvalue(moment_table, size=4):
    """Smallest eigenvalue of the Hankel matrix [m_(i+j)] for i, j < size."""
    need = 2 * (size - 1) + 1
    if len(moment_table) < need:
        raise ValueError(f"need moments up to order {need - 1}")
    h = np.array([[moment_table[i + j] for j in range(size)] for i in range(size)])
    return float(np.linalg.eigvalsh(h).min())


def green_setup(p):
    """Species, weight and vacuum state of the order-p product of oriented
    sets with the antisymmetric vacuum and equal 1/sqrt(p) coupling."""
    if p < 1:
        raise ValueError("order must be >= 1")
    if p > 3:
        raise ValueError("orders above 3 exceed desk scale")
    weight = OrientedSetWeight()
    for k in range(2, p + 1):
        weight = ProductWeight(OrientedSetWeight(), weight, lam=(k - 1) / k)
    return weight


def _level0_signs(structure):
    """Signs of the oriented level-0 components of a nested product payload."""
    if structure == "+":
        return [1]
    if structure == "-":
        return [-1]
    _, f, g = structure
    return _level0_signs(f) + _level0_signs(g)


def green_moments(p, order, num_colors=2, color=0):
    """Moment table of the parastatistics field of order p."""
    weight = green_setup(p)
    need = (order + 1) // 2 + 1
    space = FockSpace(weight.species, num_colors, need)
    state = space.zero()
    scale = 2.0 ** (-p / 2.0)
    if p == 1:
        for i, b in enumerate(space.basis[0]):
            state[i] = scale * (1 if b.structure == "+" else -1)
    else:
        for i, b in enumerate(space.basis[0]):
            signs = _level0_signs(b.structure)
            amp = 1
            for s in signs:
                amp *= s
            state[i] = scale * amp
    return moments(weight, order, num_colors=num_colors, color=color, max_level=need, state=state)
