"""Species of structures on the canonical sets {0..n-1}.

A species knows how to enumerate its structures at every level n and how to
transport a structure along a permutation.  Structures are plain hashable
payloads with a canonical, totally ordered encoding per species:

    E     ()                               one structure per level
    Eplus ()                               like E but nothing at level 0
    Epm   "+" / "-"                        odd permutations swap the signs
    L     tuple of elements in order       linear orders
    C     tuple of images                  cyclic permutations, C[0] = {}
    X     ()                               single structure at level 1 only
    A     tuple of images                  rooted trees: iterating the parent
                                           map from any vertex reaches one
                                           common fixed point (the root)
    D     sorted tuple of (u, v) edges     simple digraphs: at most one edge
                                           between any two vertices, no loops
    Bal   tuple of blocks                  ordered set partitions (ballots)
    eps   int                              a distinguished element

Composite species (sum, product, cartesian product, derivative, composition,
free product) encode their parts recursively; subsets and partition blocks are
always relabelled order-preservingly onto {0..k-1}, so a point added as the
largest element stays the last canonical index in every sub-structure.
"""

from dataclasses import dataclass
from itertools import permutations, product
from math import factorial

from .perms import (
    act_coloring,
    adjacent_transpositions,
    compose,
    extend_fixing_last,
    identity,
    sign,
    transposition,
)


def induced_perm(sigma, subset):
    """Permutation on canonical indices of `subset` induced by sigma.

    subset is a sorted tuple; the result pi satisfies: the element sigma(subset[a])
    sits at sorted position pi[a] inside sigma(subset).
    """
    imgs = [sigma[x] for x in subset]
    order = sorted(range(len(imgs)), key=imgs.__getitem__)
    rank = [0] * len(imgs)
    for pos, a in enumerate(order):
        rank[a] = pos
    return tuple(rank)


def subsets(n):
    """All subsets of {0..n-1} as sorted tuples."""
    out = [()]
    for x in range(n):
        out += [s + (x,) for s in out]
    return out


def set_partitions(n):
    """Partitions of {0..n-1} into blocks ordered by minimal element."""
    parts = [()]
    for x in range(n):
        nxt = []
        for p in parts:
            for i in range(len(p)):
                nxt.append(p[:i] + (p[i] + (x,),) + p[i + 1:])
            nxt.append(p + ((x,),))
        parts = nxt
    return parts


def ordered_set_partitions(n):
    """Ordered partitions of {0..n-1} into nonempty blocks (ballots)."""
    if n == 0:
        return [()]
    universe = tuple(range(n))

    def rec(rest):
        if not rest:
            return [()]
        out = []
        for block in subsets(len(rest)):
            if not block:
                continue
            chosen = tuple(rest[i] for i in block)
            left = tuple(x for x in rest if x not in chosen)
            out += [(chosen,) + tail for tail in rec(left)]
        return out

    return rec(universe)


class Species:
    """Base class: enumeration plus transport of structures."""

    tag = "?"

    def __init__(self):
        self._cache = {}

    def structures(self, n):
        if n not in self._cache:
            found = sorted(set(self._enumerate(n)))
            self._cache[n] = tuple(found)
        return self._cache[n]

    def count(self, n):
        return len(self.structures(n))

    def transport(self, n, s, sigma):
        if len(sigma) != n:
            raise ValueError(f"level mismatch: structure at level {n}, permutation on {len(sigma)} points")
        return self._transport(n, s, sigma)

    def _enumerate(self, n):
        raise NotImplementedError

    def _transport(self, n, s, sigma):
        raise NotImplementedError

    def __repr__(self):
        return self.tag


class SetSpecies(Species):
    tag = "E"

    def _enumerate(self, n):
        return [()]

    def _transport(self, n, s, sigma):
        return s


class NonemptySetSpecies(Species):
    tag = "Eplus"

    def _enumerate(self, n):
        return [()] if n >= 1 else []

    def _transport(self, n, s, sigma):
        return s


class OrientedSetSpecies(Species):
    tag = "Epm"

    def _enumerate(self, n):
        return ["+", "-"]

    def _transport(self, n, s, sigma):
        if sign(sigma) == 1:
            return s
        return "-" if s == "+" else "+"


class LinearOrderSpecies(Species):
    tag = "L"

    def _enumerate(self, n):
        return list(permutations(range(n)))

    def _transport(self, n, s, sigma):
        return tuple(sigma[x] for x in s)


class CycleSpecies(Species):
    tag = "C"

    def _enumerate(self, n):
        # pi with no fixed power below n; empty at n=0, the identity at n=1
        if n == 0:
            return []
        if n == 1:
            return [(0,)]
        out = []
        for rest in permutations(range(1, n)):
            cyc = (0,) + rest
            images = [0] * n
            for i in range(n):
                images[cyc[i]] = cyc[(i + 1) % n]
            out.append(tuple(images))
        return out

    def _transport(self, n, s, sigma):
        out = [0] * n
        for i in range(n):
            out[sigma[i]] = sigma[s[i]]
        return tuple(out)


class SingletonSpecies(Species):
    tag = "X"

    def _enumerate(self, n):
        return [()] if n == 1 else []

    def _transport(self, n, s, sigma):
        return s


class RootedTreeSpecies(Species):
    tag = "A"

    def _enumerate(self, n):
        if n == 0:
            return []
        out = []
        for f in product(range(n), repeat=n):
            if self._is_tree(n, f):
                out.append(f)
        return out

    @staticmethod
    def _is_tree(n, f):
        # every vertex reaches the same fixed point after n iterations
        root = None
        for u in range(n):
            v = u
            for _ in range(n):
                v = f[v]
            if f[v] != v:
                return False
            if root is None:
                root = v
            elif v != root:
                return False
        return True

    def _transport(self, n, s, sigma):
        out = [0] * n
        for i in range(n):
            out[sigma[i]] = sigma[s[i]]
        return tuple(out)


def tree_root(f):
    v = 0
    for _ in range(len(f)):
        v = f[v]
    return v


def reroot_at_new_point(f):
    """Tree on n+1 points obtained from f by making the added point n the root."""
    n = len(f)
    r = tree_root(f)
    out = list(f) + [n]
    out[r] = n
    return tuple(out)


class DigraphSpecies(Species):
    tag = "D"

    def _enumerate(self, n):
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        out = []
        for states in product((0, 1, 2), repeat=len(pairs)):
            edges = []
            for (u, v), st in zip(pairs, states):
                if st == 1:
                    edges.append((u, v))
                elif st == 2:
                    edges.append((v, u))
            out.append(tuple(sorted(edges)))
        return out

    def _transport(self, n, s, sigma):
        return tuple(sorted((sigma[u], sigma[v]) for u, v in s))


class BallotSpecies(Species):
    tag = "Bal"

    def _enumerate(self, n):
        return ordered_set_partitions(n)

    def _transport(self, n, s, sigma):
        return tuple(tuple(sorted(sigma[x] for x in block)) for block in s)


class ElementSpecies(Species):
    tag = "eps"

    def _enumerate(self, n):
        return list(range(n))

    def _transport(self, n, s, sigma):
        return sigma[s]


class SumSpecies(Species):
    def __init__(self, left, right):
        super().__init__()
        self.left = left
        self.right = right
        self.tag = f"({left.tag}+{right.tag})"

    def _enumerate(self, n):
        return [(0, s) for s in self.left.structures(n)] + [(1, s) for s in self.right.structures(n)]

    def _transport(self, n, s, sigma):
        side, payload = s
        child = self.left if side == 0 else self.right
        return (side, child._transport(n, payload, sigma))


class ProductSpecies(Species):
    """Partitional product: a structure is a split of the set plus one
    structure of each factor on the parts (first part as a sorted tuple,
    payloads on the order-preserving relabelling of the parts)."""

    def __init__(self, left, right):
        super().__init__()
        self.left = left
        self.right = right
        self.tag = f"({left.tag}*{right.tag})"

    def _enumerate(self, n):
        out = []
        full = tuple(range(n))
        for s1 in subsets(n):
            s2 = tuple(x for x in full if x not in s1)
            lefts = self.left.structures(len(s1))
            rights = self.right.structures(len(s2))
            for f in lefts:
                for g in rights:
                    out.append((s1, f, g))
        return out

    def _transport(self, n, s, sigma):
        s1, f, g = s
        s2 = tuple(x for x in range(n) if x not in s1)
        new_s1 = tuple(sorted(sigma[x] for x in s1))
        f2 = self.left._transport(len(s1), f, induced_perm(sigma, s1))
        g2 = self.right._transport(len(s2), g, induced_perm(sigma, s2))
        return (new_s1, f2, g2)


class CartesianSpecies(Species):
    def __init__(self, left, right):
        super().__init__()
        self.left = left
        self.right = right
        self.tag = f"({left.tag}&{right.tag})"

    def _enumerate(self, n):
        return [(f, g) for f in self.left.structures(n) for g in self.right.structures(n)]

    def _transport(self, n, s, sigma):
        f, g = s
        return (self.left._transport(n, f, sigma), self.right._transport(n, g, sigma))


class DerivativeSpecies(Species):
    """Structures of the base species on one extra point, encoded as index n;
    transport extends the permutation by fixing that point."""

    def __init__(self, base):
        super().__init__()
        self.base = base
        self.tag = f"{base.tag}'"

    def _enumerate(self, n):
        return list(self.base.structures(n + 1))

    def _transport(self, n, s, sigma):
        return self.base._transport(n + 1, s, extend_fixing_last(sigma))


class ComposeSpecies(Species):
    """Assemblies: a partition into blocks (ordered by minimum), an outer
    structure on the block indices and one inner structure per block."""

    def __init__(self, outer, inner):
        super().__init__()
        if inner.count(0) != 0:
            raise ValueError(f"composition requires the inner species to have no structure on the empty set; {inner.tag} has {inner.count(0)}")
        self.outer = outer
        self.inner = inner
        self.tag = f"({outer.tag} o {inner.tag})"

    def _enumerate(self, n):
        out = []
        for blocks in set_partitions(n):
            k = len(blocks)
            inner_choices = [self.inner.structures(len(b)) for b in blocks]
            if any(not ch for ch in inner_choices):
                continue
            for f in self.outer.structures(k):
                for gs in product(*inner_choices):
                    out.append((blocks, f, tuple(gs)))
        return out

    def _transport(self, n, s, sigma):
        blocks, f, gs = s
        k = len(blocks)
        imgs = [tuple(sorted(sigma[x] for x in b)) for b in blocks]
        order = sorted(range(k), key=lambda i: imgs[i][0] if imgs[i] else -1)
        rho = [0] * k
        for pos, i in enumerate(order):
            rho[i] = pos
        new_blocks = tuple(imgs[i] for i in order)
        new_f = self.outer._transport(k, f, tuple(rho))
        moved = [None] * k
        for i, b in enumerate(blocks):
            moved[rho[i]] = self.inner._transport(len(b), gs[i], induced_perm(sigma, b))
        return (new_blocks, new_f, tuple(moved))


class FreeProductSpecies(Species):
    """Alternating sequences of nonempty structures drawn from the factors:
    a ballot whose blocks carry structures, consecutive blocks from distinct
    factors.  Each factor must have exactly one structure on the empty set."""

    def __init__(self, factors):
        super().__init__()
        factors = tuple(factors)
        if len(factors) < 1:
            raise ValueError("free product needs at least one factor")
        for sp in factors:
            if sp.count(0) != 1:
                raise ValueError(f"free product factors need exactly one structure at level 0; {sp.tag} has {sp.count(0)}")
        self.factors = factors
        self.tag = "free(" + ",".join(sp.tag for sp in factors) + ")"

    def _enumerate(self, n):
        if n == 0:
            return [()]
        out = []
        for blocks in ordered_set_partitions(n):
            p = len(blocks)
            for alphas in product(range(len(self.factors)), repeat=p):
                if any(alphas[i] == alphas[i + 1] for i in range(p - 1)):
                    continue
                choices = [self.factors[alphas[i]].structures(len(blocks[i])) for i in range(p)]
                if any(not ch for ch in choices):
                    continue
                for ss in product(*choices):
                    out.append(tuple((alphas[i], blocks[i], ss[i]) for i in range(p)))
        return out

    def _transport(self, n, s, sigma):
        parts = []
        for alpha, block, payload in s:
            new_block = tuple(sorted(sigma[x] for x in block))
            moved = self.factors[alpha]._transport(len(block), payload, induced_perm(sigma, block))
            parts.append((alpha, new_block, moved))
        return tuple(parts)


E = SetSpecies()
EPLUS = NonemptySetSpecies()
EPM = OrientedSetSpecies()
L = LinearOrderSpecies()
C = CycleSpecies()
X = SingletonSpecies()
A = RootedTreeSpecies()
D = DigraphSpecies()
BAL = BallotSpecies()
EPS = ElementSpecies()

ATOMS = {sp.tag: sp for sp in (E, EPLUS, EPM, L, C, X, A, D, BAL, EPS)}


@dataclass(frozen=True)
class OrbitInfo:
    representative: tuple
    orbit_size: int
    stabilizer_order: int


def structure_orbit(species, n, s):
    """Orbit of a structure under S(n), via breadth-first search."""
    gens = adjacent_transpositions(n)
    seen = {s}
    queue = [s]
    while queue:
        cur = queue.pop()
        for g in gens:
            nxt = species.transport(n, cur, g)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return sorted(seen)


def stabilizer_order(species, n, s):
    """Number of permutations fixing the structure, by direct count."""
    return sum(1 for p in permutations(range(n)) if species.transport(n, s, p) == s)


def colored_orbit(species, n, s, c):
    """Orbit data of a colored structure (s, c) under the diagonal action.

    The representative is the encoding-minimal pair in the orbit; the
    stabilizer order counts permutations fixing structure and coloring
    simultaneously (directly, not via the orbit size).
    """
    if len(c) != n:
        raise ValueError("coloring length must equal the level")
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
    rep = min(seen)
    stab = sum(
        1
        for p in permutations(range(n))
        if species.transport(n, s, p) == s and act_coloring(p, c) == c
    )
    return OrbitInfo(representative=rep, orbit_size=len(seen), stabilizer_order=stab)


def colored_orbit_members(species, n, s, c):
    """All pairs in the orbit of (s, c), as a set."""
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
