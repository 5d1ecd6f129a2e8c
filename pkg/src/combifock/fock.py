"""Truncated symmetric Hilbert spaces on the orbit basis.

The basis at level n consists of orbits [s, c] of colored structures under
the diagonal action of S(n).  The delta vector of an orbit has squared norm
equal to the order of its colored stabilizer; internally everything is
expressed in the orthonormal basis e = delta / sqrt(norm_sq), which makes
adjoints plain conjugate transposes.  Unnormalized delta amplitudes are
available through accessors.
"""

from dataclasses import dataclass
from itertools import product
from math import factorial

import numpy as np

from .perms import act_coloring, adjacent_transpositions


@dataclass(frozen=True)
class OrbitBasisElement:
    level: int
    structure: tuple
    coloring: tuple
    orbit_size: int
    norm_sq: int

    def key(self):
        return (self.structure, self.coloring)


class OrbitCanonicalizer:
    """Canonical representative and stabilizer data of colored orbits,
    computed on demand and cached.  Levels are not capped."""

    def __init__(self, species, num_colors):
        self.species = species
        self.num_colors = num_colors
        self._cache = {}

    def canon(self, n, s, c):
        """Return (rep_structure, rep_coloring, orbit_size, norm_sq)."""
        key = (n, s, c)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        members = _orbit_members(self.species, n, s, c)
        rep = min(members)
        size = len(members)
        norm_sq = factorial(n) // size
        data = (rep[0], rep[1], size, norm_sq)
        for m in members:
            self._cache[(n, m[0], m[1])] = data
        return data


def _orbit_members(species, n, s, c):
    gens = adjacent_transpositions(n)
    start = (s, c)
    seen = {start}
    queue = [start]
    while queue:
        cur_s, cur_c = queue.pop()
        for g in gens:
            nxt = (species.transport(n, cur_s, g), act_coloring(g, cur_c))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


class FockSpace:
    """Orbit basis of J-colored structures for all levels up to max_level."""

    def __init__(self, species, num_colors, max_level):
        if num_colors < 1:
            raise ValueError("need at least one color")
        self.species = species
        self.num_colors = num_colors
        self.max_level = max_level
        self.basis = []
        self._members = []
        self._index = {}
        for n in range(max_level + 1):
            elems, members = self._build_level(n)
            self.basis.append(elems)
            self._members.append(members)
        self.offsets = []
        total = 0
        for n in range(max_level + 1):
            self.offsets.append(total)
            total += len(self.basis[n])
        self.dim = total
        for n, elems in enumerate(self.basis):
            for i, b in enumerate(elems):
                self._index[(n, b.structure, b.coloring)] = self.offsets[n] + i
        # canonicalization cache for non-representative lookups; kept separate
        # so that _index stays a representatives-only table
        self._canon_cache = {}

    def _build_level(self, n):
        colorings = list(product(range(self.num_colors), repeat=n))
        seen = set()
        elems = []
        members_by_rep = []
        for s in self.species.structures(n):
            for c in colorings:
                if (s, c) in seen:
                    continue
                members = _orbit_members(self.species, n, s, c)
                seen |= members
                rep = min(members)
                size = len(members)
                norm_sq = factorial(n) // size
                elems.append((rep, size, norm_sq, members))
        elems.sort(key=lambda item: item[0])
        out = []
        out_members = []
        for rep, size, norm_sq, members in elems:
            out.append(
                OrbitBasisElement(
                    level=n,
                    structure=rep[0],
                    coloring=rep[1],
                    orbit_size=size,
                    norm_sq=norm_sq,
                )
            )
            out_members.append(sorted(members))
        return out, out_members

    def level_dim(self, n):
        return len(self.basis[n])

    def level_slice(self, n):
        return slice(self.offsets[n], self.offsets[n] + len(self.basis[n]))

    def members(self, n, i):
        """All (structure, coloring) pairs of the i-th orbit at level n."""
        return self._members[n][i]

    def index(self, n, s, c):
        """Global basis index of the orbit containing (s, c)."""
        hit = self._index.get((n, s, c))
        if hit is not None:
            return hit
        hit = self._canon_cache.get((n, s, c))
        if hit is not None:
            return hit
        members = _orbit_members(self.species, n, s, c)
        rep = min(members)
        idx = self._index[(n, rep[0], rep[1])]
        for m in members:
            self._canon_cache[(n, m[0], m[1])] = idx
        return idx

    def zero(self):
        return np.zeros(self.dim, dtype=complex)

    def vacuum(self):
        """Unit vector on the unique level-0 orbit."""
        n0 = len(self.basis[0])
        if n0 == 0:
            raise ValueError(f"species {self.species.tag} has no structure at level 0, hence no vacuum")
        if n0 > 1:
            raise ValueError(f"species {self.species.tag} has {n0} level-0 orbits; the vacuum is not unique")
        v = self.zero()
        v[0] = 1.0
        return v

    def basis_vector(self, n, i):
        v = self.zero()
        v[self.offsets[n] + i] = 1.0
        return v

    def delta_amplitude(self, v, n, i):
        """Coefficient of v on the unnormalized delta vector of orbit (n, i)."""
        b = self.basis[n][i]
        return v[self.offsets[n] + i] / np.sqrt(b.norm_sq)

    def delta_norm_sq(self, n, i):
        return self.basis[n][i].norm_sq

    def records(self):
        """One dict per orbit, for dumps."""
        out = []
        for n, elems in enumerate(self.basis):
            for i, b in enumerate(elems):
                out.append(
                    {
                        "level": n,
                        "index": self.offsets[n] + i,
                        "representative_encoding": repr(b.structure),
                        "coloring": list(b.coloring),
                        "orbit_size": b.orbit_size,
                        "norm_sq": b.norm_sq,
                    }
                )
        return out


def inner_product(v, w):
    """Standard sesquilinear inner product, conjugate-linear in the first slot."""
    return complex(np.vdot(v, w))
