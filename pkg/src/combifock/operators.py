"""Ladder operators as level-block matrices on the orthonormal orbit basis.

Normalization bookkeeping, all in one place
-------------------------------------------
Everything below works in the orthonormal basis e = delta / sqrt(norm_sq),
where delta is the indicator of an orbit [s, c] and norm_sq the order of the
colored stabilizer.  In these coordinates the inner product is the plain
sesquilinear sum, so adjoints are conjugate transposes.  The factor (n+1) in
the raw creation formula and the 1/n! of the level inner products cancel into
this convention; the cancellation is not re-derived per operator but verified
through the adjointness checks built into `creator`.

Three independent assembly routes are used:

  * `annihilator` evaluates the raw annihilation formula on the symmetrized
    indicator functions and reads the result off at orbit representatives.
  * `creator` moves orbits combinatorially along weight successors
    (amplitude conj(w(f, g)) toward the grown orbit).
  * `creator_symmetrized` evaluates the symmetrized creation formula, a sum
    over transpositions of the top point.

`creator` asserts agreement of its route with the conjugate transpose of
`annihilator` and with `creator_symmetrized` to 1e-12.
"""

from collections import defaultdict
from math import sqrt

import numpy as np

from .perms import transposition
from .weights import EpsWeight


class OperatorMatrix:
    """A matrix on a truncated space plus the grading data needed to know on
    which levels an expression is free of truncation artifacts.

    net_shift: levels added by the operator (+1 creation, -1 annihilation).
    max_rise: maximal intermediate level excess over the input level; an
    expression with max_rise d is only trusted on levels <= max_level - d.
    """

    def __init__(self, space, mat, net_shift=0, max_rise=0):
        self.space = space
        self.mat = mat
        self.net_shift = net_shift
        self.max_rise = max_rise

    def adjoint(self):
        return OperatorMatrix(
            self.space,
            self.mat.conj().T,
            net_shift=-self.net_shift,
            max_rise=max(0, self.max_rise - self.net_shift),
        )

    def __matmul__(self, other):
        if other.space is not self.space:
            raise ValueError("operators live on different spaces")
        return OperatorMatrix(
            self.space,
            self.mat @ other.mat,
            net_shift=self.net_shift + other.net_shift,
            max_rise=max(other.max_rise, other.net_shift + self.max_rise),
        )

    def __add__(self, other):
        if other.space is not self.space:
            raise ValueError("operators live on different spaces")
        if other.net_shift != self.net_shift:
            raise ValueError("cannot add operators of different level shifts")
        return OperatorMatrix(
            self.space,
            self.mat + other.mat,
            net_shift=self.net_shift,
            max_rise=max(self.max_rise, other.max_rise),
        )

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        return OperatorMatrix(self.space, scalar * self.mat, self.net_shift, self.max_rise)

    def apply(self, vec):
        return self.mat @ vec

    def safe_max_level(self):
        return self.space.max_level - self.max_rise


def prefix_dim(space, level):
    """Dimension of the sum of levels 0..level."""
    return space.offsets[level] + space.level_dim(level)


def deviation_on_safe_levels(a, b):
    """Max absolute entry difference of two level-preserving expressions,
    restricted to source levels at most max_level - max_rise."""
    if a.net_shift != 0 or b.net_shift != 0:
        raise ValueError("safe-level comparison expects level-preserving expressions")
    level = min(a.safe_max_level(), b.safe_max_level())
    if level < 0:
        raise ValueError("expression depth exceeds the truncation level")
    d = prefix_dim(a.space, level)
    return float(np.max(np.abs(a.mat[:d, :d] - b.mat[:d, :d]))), level


def annihilator(space, w, h):
    """Annihilation matrix from the raw formula on symmetrized indicators."""
    _check_species(space, w)
    h = np.asarray(h, dtype=complex)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for m in range(1, space.max_level + 1):
        for si, b in enumerate(space.basis[m]):
            col = space.offsets[m] + si
            psi = defaultdict(complex)
            for g, c in space.members(m, si):
                hj = h[c[m - 1]].conjugate()
                if hj == 0:
                    continue
                d = c[: m - 1]
                for f, v in w.predecessors(m - 1, g):
                    psi[(f, d)] += v * hj
            nu_s = b.norm_sq
            for (f, d), val in psi.items():
                row = space._index.get((m - 1, f, d))
                if row is None:
                    continue  # not an orbit representative
                nu_t = space.basis[m - 1][row - space.offsets[m - 1]].norm_sq
                mat[row, col] += val * sqrt(nu_s / nu_t)
    return OperatorMatrix(space, mat, net_shift=-1, max_rise=0)


def _creator_moves(space, w, h):
    h = np.asarray(h, dtype=complex)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for n in range(space.max_level):
        for si, b in enumerate(space.basis[n]):
            col = space.offsets[n] + si
            nu_s = b.norm_sq
            for g, v in w.successors(n, b.structure):
                cv = complex(v).conjugate()
                for j in range(space.num_colors):
                    if h[j] == 0:
                        continue
                    row = space.index(n + 1, g, b.coloring + (j,))
                    nu_t = space.basis[n + 1][row - space.offsets[n + 1]].norm_sq
                    mat[row, col] += cv * h[j] * sqrt(nu_t / nu_s)
    return mat


def creator_symmetrized(space, w, h):
    """Creation matrix from the symmetrized formula (sum over transpositions
    of the added point)."""
    _check_species(space, w)
    h = np.asarray(h, dtype=complex)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for m in range(1, space.max_level + 1):
        n = m - 1
        for ti, tb in enumerate(space.basis[m]):
            row = space.offsets[m] + ti
            nu_t = tb.norm_sq
            for k in range(m):
                tau = transposition(m, n, k)
                ft = space.species.transport(m, tb.structure, tau)
                e = tuple(tb.coloring[tau[i]] for i in range(m))
                hj = h[e[n]]
                if hj == 0:
                    continue
                d = e[:n]
                for g, v in w.predecessors(n, ft):
                    # the symmetrized indicator of an orbit is constant on it,
                    # so (g, d) contributes to the column of its whole orbit
                    col = space.index(n, g, d)
                    nu_s = space.basis[n][col - space.offsets[n]].norm_sq
                    mat[row, col] += complex(v).conjugate() * hj * sqrt(nu_s / nu_t)
    return OperatorMatrix(space, mat, net_shift=1, max_rise=1)


def creator(space, w, h, check=True, tol=1e-12):
    """Creation matrix; by construction also validated as the adjoint of the
    annihilator and against the symmetrized formula."""
    _check_species(space, w)
    mat = _creator_moves(space, w, h)
    if check:
        adj = annihilator(space, w, h).mat.conj().T
        dev_adj = float(np.max(np.abs(mat - adj))) if mat.size else 0.0
        sym = creator_symmetrized(space, w, h).mat
        dev_sym = float(np.max(np.abs(mat - sym))) if mat.size else 0.0
        if dev_adj > tol or dev_sym > tol:
            raise AssertionError(
                f"creation routes disagree: adjoint dev {dev_adj:.3e}, symmetrized dev {dev_sym:.3e}"
            )
    return OperatorMatrix(space, mat, net_shift=1, max_rise=1)


def _check_species(space, w):
    if space.species.tag != w.species.tag:
        raise ValueError(f"space is over {space.species.tag}, weight over {w.species.tag}")


def identity_operator(space):
    return OperatorMatrix(space, np.eye(space.dim, dtype=complex))


def number_operator(space):
    diag = np.zeros(space.dim)
    for n in range(space.max_level + 1):
        diag[space.level_slice(n)] = n
    return OperatorMatrix(space, np.diag(diag).astype(complex))


def poly_of_number(space, coeffs):
    """P(N) for a polynomial with coefficients in ascending order."""
    diag = np.zeros(space.dim, dtype=complex)
    for n in range(space.max_level + 1):
        val = sum(c * n**k for k, c in enumerate(coeffs))
        diag[space.level_slice(n)] = val
    return OperatorMatrix(space, np.diag(diag))


def second_quantization(space, color_matrix):
    """Level-preserving operator acting as the color matrix on each slot."""
    amat = np.asarray(color_matrix, dtype=complex)
    if amat.shape != (space.num_colors, space.num_colors):
        raise ValueError(f"color matrix must be {space.num_colors}x{space.num_colors}")
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for n in range(space.max_level + 1):
        for si, b in enumerate(space.basis[n]):
            col = space.offsets[n] + si
            nu_s = b.norm_sq
            for k in range(n):
                for beta in range(space.num_colors):
                    coeff = amat[beta, b.coloring[k]]
                    if coeff == 0:
                        continue
                    c2 = b.coloring[:k] + (beta,) + b.coloring[k + 1:]
                    row = space.index(n, b.structure, c2)
                    nu_t = space.basis[n][row - space.offsets[n]].norm_sq
                    mat[row, col] += coeff * sqrt(nu_t / nu_s)
    return OperatorMatrix(space, mat)


def switch_operator(space):
    """Orientation switch on oriented sets: swaps the two orbits of every
    coloring class."""
    if space.species.tag != "Epm":
        raise ValueError("the switch operator only exists over the oriented-set species")
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for n in range(space.max_level + 1):
        for si, b in enumerate(space.basis[n]):
            col = space.offsets[n] + si
            flipped = "-" if b.structure == "+" else "+"
            row = space.index(n, flipped, b.coloring)
            mat[row, col] = 1.0
    return OperatorMatrix(space, mat)


def _kernel_lower_row(w, n, k, f):
    """All f2 with a nonzero lower contraction against f, with values."""
    tau = transposition(n, n - 1, k)
    tf = w.species.transport(n, f, tau)
    row = defaultdict(complex)
    for g, v1 in w.predecessors(n - 1, tf):
        cv1 = complex(v1).conjugate()
        for f2t, v2 in w.successors(n - 1, g):
            row[w.species.transport(n, f2t, tau)] += cv1 * v2
    return row


def _kernel_upper_row(w, n, k, f):
    """All f2 with a nonzero upper contraction against f, with values."""
    tau = transposition(n + 1, n, k)
    row = defaultdict(complex)
    for g, v1 in w.successors(n, f):
        tg = w.species.transport(n + 1, g, tau)
        for f2, v2 in w.predecessors(n, tg):
            row[f2] += v1 * complex(v2).conjugate()
    return row


def create_annihilate_kernel(space, w, h1, h2):
    """Matrix of a*(h1) a(h2) assembled from the lower contraction kernel."""
    _check_species(space, w)
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for n in range(space.max_level + 1):
        for ti, tb in enumerate(space.basis[n]):
            row = space.offsets[n] + ti
            nu_t = tb.norm_sq
            d = tb.coloring
            for k in range(n):
                hk = h1[d[k]]
                if hk == 0:
                    continue
                krow = _kernel_lower_row(w, n, k, tb.structure)
                for f2, kv in krow.items():
                    if kv == 0:
                        continue
                    for j in range(space.num_colors):
                        hj = h2[j].conjugate()
                        if hj == 0:
                            continue
                        c2 = d[:k] + (j,) + d[k + 1:]
                        col = space.index(n, f2, c2)
                        nu_s = space.basis[n][col - space.offsets[n]].norm_sq
                        mat[row, col] += kv * hk * hj * sqrt(nu_s / nu_t)
    return OperatorMatrix(space, mat, net_shift=0, max_rise=0)


def annihilate_create_kernel(space, w, h1, h2):
    """Matrix of a(h1) a*(h2) assembled from the upper contraction kernel;
    exact on every level because the contraction reaches above the cap."""
    _check_species(space, w)
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    inp = complex(np.vdot(h1, h2))
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for n in range(space.max_level + 1):
        for ti, tb in enumerate(space.basis[n]):
            row = space.offsets[n] + ti
            nu_t = tb.norm_sq
            d = tb.coloring
            for k in range(n):
                hk = h2[d[k]]
                if hk == 0:
                    continue
                krow = _kernel_upper_row(w, n, k, tb.structure)
                for f2, kv in krow.items():
                    if kv == 0:
                        continue
                    for j in range(space.num_colors):
                        hj = h1[j].conjugate()
                        if hj == 0:
                            continue
                        c2 = d[:k] + (j,) + d[k + 1:]
                        col = space.index(n, f2, c2)
                        nu_s = space.basis[n][col - space.offsets[n]].norm_sq
                        mat[row, col] += kv * hk * hj * sqrt(nu_s / nu_t)
            if inp != 0:
                krow = _kernel_upper_row(w, n, n, tb.structure)
                for f2, kv in krow.items():
                    if kv == 0:
                        continue
                    col = space.index(n, f2, d)
                    nu_s = space.basis[n][col - space.offsets[n]].norm_sq
                    mat[row, col] += inp * kv * sqrt(nu_s / nu_t)
    return OperatorMatrix(space, mat, net_shift=0, max_rise=0)


def basis_color_vector(space, j):
    h = np.zeros(space.num_colors, dtype=complex)
    h[j] = 1.0
    return h


def monomial_apply(space, w, word, check_reduction=True, tol=1e-10):
    """Apply a word of ladder operators (leftmost acts last) to the vacuum.

    word: sequence of (kind, color) with kind in {"create", "annihilate"}.
    When the word starts with an annihilation letter and a fresh color is
    available, the color-pairing reduction of the leading letter is also
    evaluated and both vectors are required to agree.
    """
    vac = space.vacuum()
    result = _apply_word(space, w, word, vac)
    if check_reduction and word and word[0][0] == "annihilate":
        used = {color for _, color in word}
        fresh = next((j for j in range(space.num_colors) if j not in used), None)
        if fresh is not None:
            i = word[0][1]
            rest = list(word[1:])
            total = space.zero()
            for k, (kind, color) in enumerate(rest):
                if kind == "create" and color == i:
                    mod = (
                        [("annihilate", fresh)]
                        + rest[:k]
                        + [("create", fresh)]
                        + rest[k + 1:]
                    )
                    total = total + _apply_word(space, w, mod, vac)
            dev = float(np.max(np.abs(result - total)))
            if dev > tol:
                raise AssertionError(f"color-pairing reduction disagrees with direct evaluation: {dev:.3e}")
    return result


def _apply_word(space, w, word, vec):
    cache = {}
    for kind, color in reversed(list(word)):
        key = (kind, color)
        if key not in cache:
            h = basis_color_vector(space, color)
            if kind == "create":
                cache[key] = creator(space, w, h, check=False)
            elif kind == "annihilate":
                cache[key] = annihilator(space, w, h)
            else:
                raise ValueError(f"unknown operator kind {kind!r}")
        vec = cache[key].apply(vec)
    return vec


def apply_creator_sparse(canon, w, j, vec):
    """Creation by a basis color on a sparse vector over canonical orbit keys
    (level, structure, coloring), orthonormal coordinates."""
    out = defaultdict(complex)
    for (n, s, c), amp in vec.items():
        _, _, _, nu_s = canon.canon(n, s, c)
        for g, v in w.successors(n, s):
            rs, rc, _, nu_t = canon.canon(n + 1, g, c + (j,))
            out[(n + 1, rs, rc)] += amp * complex(v).conjugate() * sqrt(nu_t / nu_s)
    return {k: v for k, v in out.items() if v != 0}


def apply_annihilator_sparse(canon, w, j, vec):
    """Annihilation by a basis color on a sparse vector over canonical orbit
    keys, orthonormal coordinates."""
    from .fock import _orbit_members

    out = defaultdict(complex)
    for (m, s, c), amp in vec.items():
        if m == 0:
            continue
        _, _, _, nu_s = canon.canon(m, s, c)
        psi = defaultdict(complex)
        for g, cm in _orbit_members(canon.species, m, s, c):
            if cm[m - 1] != j:
                continue
            d = cm[: m - 1]
            for f, v in w.predecessors(m - 1, g):
                psi[(f, d)] += v
        for (f, d), val in psi.items():
            rs, rc, _, nu_t = canon.canon(m - 1, f, d)
            if (rs, rc) != (f, d):
                continue  # only representatives carry the coefficient
            out[(m - 1, f, d)] += amp * val * sqrt(nu_s / nu_t)
    return {k: v for k, v in out.items() if v != 0}


def sparse_inner(u, v):
    total = 0.0 + 0.0j
    for key, amp in u.items():
        other = v.get(key)
        if other is not None:
            total += complex(amp).conjugate() * other
    return total
