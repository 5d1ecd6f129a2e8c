"""Weights: permutation-invariant kernels between consecutive levels.

A weight w on a species F assigns a complex amplitude w(f, g) to every pair
f in F[n], g in F[n+1]; it is invariant when both arguments are transported
along sigma (extended to fix the added point, which is always the largest
canonical index).  Weights drive the ladder operators: w(f, g) says with
which amplitude removal of the added point may take g to f.

Every weight also enumerates its nonzero transitions in both directions:

    successors(n, f)   -> [(g, w(f, g))]   over g in F[n+1]
    predecessors(n, g) -> [(f, w(f, g))]   over f in F[n]

These lists are what make operator assembly sparse; they must agree with
evaluate, which the test suite checks by brute force over whole levels.
"""

import math

from . import species as sp
from .perms import transposition
from .species import reroot_at_new_point, tree_root


class Weight:
    species = None
    bound = 1.0
    name = "?"

    def value(self, n, f, g):
        raise NotImplementedError

    def successors(self, n, f):
        raise NotImplementedError

    def predecessors(self, n, g):
        raise NotImplementedError

    def __repr__(self):
        return self.name


class SetWeight(Weight):
    """Value 1 on the unique pair of set structures."""

    def __init__(self, species=None, name="E"):
        self.species = species if species is not None else sp.E
        self.name = name
        self.bound = 1.0

    def value(self, n, f, g):
        return 1.0

    def successors(self, n, f):
        return [(g, 1.0) for g in self.species.structures(n + 1)]

    def predecessors(self, n, g):
        return [(f, 1.0) for f in self.species.structures(n)]


class LinearOrderWeight(Weight):
    """Nonzero only when the order grows by placing the added point last."""

    name = "L"

    def __init__(self):
        self.species = sp.L
        self.bound = 1.0

    def value(self, n, f, g):
        return 1.0 if g == f + (n,) else 0.0

    def successors(self, n, f):
        return [(f + (n,), 1.0)]

    def predecessors(self, n, g):
        if g[-1] == n:
            return [(g[:-1], 1.0)]
        return []


class OrientedSetWeight(Weight):
    """Diagonal in the orientation; off-diagonal transitions are forbidden."""

    name = "Epm"

    def __init__(self):
        self.species = sp.EPM
        self.bound = 1.0

    def value(self, n, f, g):
        return 1.0 if f == g else 0.0

    def successors(self, n, f):
        return [(f, 1.0)]

    def predecessors(self, n, g):
        return [(g, 1.0)]


def _is_leaf_extension(n, f, g):
    # g restricted to {0..n-1} equals f and the added point has no children
    if g[:n] != f or g[n] == n:
        return False
    return all(g[u] != n for u in range(n))


class TreeWeight(Weight):
    """Value 1 when the larger tree is the smaller one with a leaf attached
    at the added point."""

    name = "tree"

    def __init__(self):
        self.species = sp.A
        self.bound = 1.0

    def value(self, n, f, g):
        return 1.0 if _is_leaf_extension(n, f, g) else 0.0

    def successors(self, n, f):
        return [(f + (v,), 1.0) for v in range(n)]

    def predecessors(self, n, g):
        if _is_leaf_extension(n, g[:n], g):
            return [(g[:n], 1.0)]
        return []


class TreeRerootWeight(Weight):
    """Leaf attachment plus, with amplitude sqrt(c), re-rooting the tree at
    the added point."""

    def __init__(self, c):
        if c < 0:
            raise ValueError("re-rooting constant must be >= 0")
        self.species = sp.A
        self.c = float(c)
        self.bound = max(1.0, math.sqrt(self.c))
        self.name = f"tree_c:{c:g}"

    def value(self, n, f, g):
        v = 1.0 if _is_leaf_extension(n, f, g) else 0.0
        if self.c and g == reroot_at_new_point(f):
            v += math.sqrt(self.c)
        return v

    def successors(self, n, f):
        out = [(f + (v,), 1.0) for v in range(n)]
        if self.c:
            out.append((reroot_at_new_point(f), math.sqrt(self.c)))
        return out

    def predecessors(self, n, g):
        out = []
        if _is_leaf_extension(n, g[:n], g):
            out.append((g[:n], 1.0))
        if self.c and g[n] == n:
            children = [u for u in range(n) if g[u] == n]
            if len(children) == 1:
                r = children[0]
                f = g[:r] + (r,) + g[r + 1:n]
                out.append((f, math.sqrt(self.c)))
        return out


class DigraphWeight(Weight):
    """The added vertex may shoot edges at any subset of the old vertices;
    a subset of size k carries amplitude sqrt(q^(n-k) (1-q)^k)."""

    def __init__(self, q):
        if not 0.0 <= q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        self.species = sp.D
        self.q = float(q)
        self.bound = 1.0
        self.name = f"digraph:{q:g}"

    def _amp(self, n, k):
        return math.sqrt(self.q ** (n - k) * (1.0 - self.q) ** k)

    def value(self, n, f, g):
        star = [e for e in g if n in e]
        if any(e[1] == n for e in star):
            return 0.0
        base = tuple(e for e in g if n not in e)
        if base != f:
            return 0.0
        return self._amp(n, len(star))

    def successors(self, n, f):
        out = []
        for targets in sp.subsets(n):
            amp = self._amp(n, len(targets))
            if amp == 0.0:
                continue
            g = tuple(sorted(f + tuple((n, v) for v in targets)))
            out.append((g, amp))
        return out

    def predecessors(self, n, g):
        star = [e for e in g if n in e]
        if any(e[1] == n for e in star):
            return []
        amp = self._amp(n, len(star))
        if amp == 0.0:
            return []
        return [(tuple(e for e in g if n not in e), amp)]


class BallotWeight(Weight):
    """Ballot growth: sqrt(q) for joining the last block, sqrt(1-q) for
    opening a new last block; the step out of the empty sequence has
    amplitude 1."""

    def __init__(self, q):
        if not 0.0 <= q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        self.species = sp.BAL
        self.q = float(q)
        self.bound = 1.0
        self.name = f"ballot:{q:g}"

    def value(self, n, f, g):
        if n == 0:
            return 1.0 if g == ((0,),) else 0.0
        if g == f[:-1] + (f[-1] + (n,),):
            return math.sqrt(self.q)
        if g == f + ((n,),):
            return math.sqrt(1.0 - self.q)
        return 0.0

    def successors(self, n, f):
        if n == 0:
            return [(((0,),), 1.0)]
        out = []
        sq = math.sqrt(self.q)
        if sq:
            out.append((f[:-1] + (f[-1] + (n,),), sq))
        s1q = math.sqrt(1.0 - self.q)
        if s1q:
            out.append((f + ((n,),), s1q))
        return out

    def predecessors(self, n, g):
        if n == 0:
            return [((), 1.0)] if g == ((0,),) else []
        last = g[-1]
        if n not in last:
            return []
        if last == (n,):
            amp = math.sqrt(1.0 - self.q)
            return [(g[:-1], amp)] if amp else []
        amp = math.sqrt(self.q)
        if not amp:
            return []
        return [(g[:-1] + (tuple(x for x in last if x != n),), amp)]


class ScaledWeight(Weight):
    def __init__(self, base, factor):
        self.base = base
        self.factor = complex(factor)
        self.species = base.species
        self.bound = abs(self.factor) * base.bound
        self.name = f"scale:{factor:g}({base.name})" if isinstance(factor, float) else f"scale({base.name})"

    def value(self, n, f, g):
        return self.factor * self.base.value(n, f, g)

    def successors(self, n, f):
        return [(g, self.factor * v) for g, v in self.base.successors(n, f)]

    def predecessors(self, n, g):
        return [(f, self.factor * v) for f, v in self.base.predecessors(n, g)]


class SumWeight(Weight):
    """Componentwise weight on a sum species; cross transitions vanish."""

    def __init__(self, wleft, wright):
        self.wleft = wleft
        self.wright = wright
        self.species = sp.SumSpecies(wleft.species, wright.species)
        self.bound = max(wleft.bound, wright.bound)
        self.name = f"sum({wleft.name},{wright.name})"

    def value(self, n, f, g):
        if f[0] != g[0]:
            return 0.0
        w = self.wleft if f[0] == 0 else self.wright
        return w.value(n, f[1], g[1])

    def successors(self, n, f):
        w = self.wleft if f[0] == 0 else self.wright
        return [((f[0], g), v) for g, v in w.successors(n, f[1])]

    def predecessors(self, n, g):
        w = self.wleft if g[0] == 0 else self.wright
        return [((g[0], f), v) for f, v in w.predecessors(n, g[1])]


class ProductWeight(Weight):
    """Weight on a product species: the added point joins the second factor
    with amplitude sqrt(lam) (times that factor's weight) or the first with
    sqrt(1-lam)."""

    def __init__(self, wleft, wright, lam):
        if not 0.0 <= lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        self.wleft = wleft
        self.wright = wright
        self.lam = float(lam)
        self.species = sp.ProductSpecies(wleft.species, wright.species)
        self.bound = max(math.sqrt(lam) * wright.bound, math.sqrt(1 - lam) * wleft.bound)
        self.name = f"product:{lam:g}({wleft.name},{wright.name})"

    def value(self, n, s, s2):
        s1, f, g = s
        t1, f2, g2 = s2
        if t1 == s1:
            if f2 != f:
                return 0.0
            m = n - len(s1)
            return math.sqrt(self.lam) * self.wright.value(m, g, g2)
        if t1 == s1 + (n,):
            if g2 != g:
                return 0.0
            return math.sqrt(1.0 - self.lam) * self.wleft.value(len(s1), f, f2)
        return 0.0

    def successors(self, n, s):
        s1, f, g = s
        out = []
        c_left = math.sqrt(1.0 - self.lam)
        if c_left:
            for f2, v in self.wleft.successors(len(s1), f):
                out.append(((s1 + (n,), f2, g), c_left * v))
        c_right = math.sqrt(self.lam)
        if c_right:
            for g2, v in self.wright.successors(n - len(s1), g):
                out.append(((s1, f, g2), c_right * v))
        return out

    def predecessors(self, n, s2):
        t1, f2, g2 = s2
        out = []
        if t1 and t1[-1] == n:
            s1 = t1[:-1]
            c = math.sqrt(1.0 - self.lam)
            if c:
                for f, v in self.wleft.predecessors(len(s1), f2):
                    out.append(((s1, f, g2), c * v))
        else:
            c = math.sqrt(self.lam)
            if c:
                for g, v in self.wright.predecessors(n - len(t1), g2):
                    out.append(((t1, f2, g), c * v))
        return out


class CartesianWeight(Weight):
    """Both components grow by the same added point; amplitudes multiply."""

    def __init__(self, wleft, wright):
        self.wleft = wleft
        self.wright = wright
        self.species = sp.CartesianSpecies(wleft.species, wright.species)
        self.bound = wleft.bound * wright.bound
        self.name = f"cartesian({wleft.name},{wright.name})"

    def value(self, n, s, s2):
        return self.wleft.value(n, s[0], s2[0]) * self.wright.value(n, s[1], s2[1])

    def successors(self, n, s):
        out = []
        for f2, vf in self.wleft.successors(n, s[0]):
            for g2, vg in self.wright.successors(n, s[1]):
                v = vf * vg
                if v != 0.0:
                    out.append(((f2, g2), v))
        return out

    def predecessors(self, n, s2):
        out = []
        for f, vf in self.wleft.predecessors(n, s2[0]):
            for g, vg in self.wright.predecessors(n, s2[1]):
                v = vf * vg
                if v != 0.0:
                    out.append(((f, g), v))
        return out


class PairTreeWeight(Weight):
    """On ordered pairs of trees: simultaneous leaf attachment, plus
    simultaneous re-rooting at the added point with amplitude sqrt(c)."""

    def __init__(self, c):
        if c < 0:
            raise ValueError("re-rooting constant must be >= 0")
        self.c = float(c)
        self.species = sp.CartesianSpecies(sp.A, sp.A)
        self.bound = max(1.0, math.sqrt(self.c))
        self.name = f"pairtree_c:{c:g}"

    def value(self, n, s, s2):
        f, g = s
        f2, g2 = s2
        v = 1.0 if _is_leaf_extension(n, f, f2) and _is_leaf_extension(n, g, g2) else 0.0
        if self.c and f2 == reroot_at_new_point(f) and g2 == reroot_at_new_point(g):
            v += math.sqrt(self.c)
        return v

    def successors(self, n, s):
        f, g = s
        out = [((f + (u,), g + (v,)), 1.0) for u in range(n) for v in range(n)]
        if self.c:
            out.append(((reroot_at_new_point(f), reroot_at_new_point(g)), math.sqrt(self.c)))
        return out

    def predecessors(self, n, s2):
        f2, g2 = s2
        out = []
        if _is_leaf_extension(n, f2[:n], f2) and _is_leaf_extension(n, g2[:n], g2):
            out.append(((f2[:n], g2[:n]), 1.0))
        if self.c and f2[n] == n and g2[n] == n:
            cf = [u for u in range(n) if f2[u] == n]
            cg = [u for u in range(n) if g2[u] == n]
            if len(cf) == 1 and len(cg) == 1:
                rf, rg = cf[0], cg[0]
                f = f2[:rf] + (rf,) + f2[rf + 1:n]
                g = g2[:rg] + (rg,) + g2[rg + 1:n]
                out.append(((f, g), math.sqrt(self.c)))
        return out


class EpsWeight:
    """Kernel on pairs (structure, distinguished index) at one level; used to
    select where a composite structure may grow."""

    species = None
    name = "?"
    bound = 1.0

    def value(self, n, f, index):
        raise NotImplementedError

    def __repr__(self):
        return self.name


class LastElementWeight(EpsWeight):
    """On linear orders: selects the last position."""

    name = "Leps"

    def __init__(self):
        self.species = sp.L

    def value(self, n, f, index):
        return 1.0 if n > 0 and f[n - 1] == index else 0.0


class ConstantElementWeight(EpsWeight):
    """On sets: every position is selected with amplitude 1."""

    name = "Eeps"

    def __init__(self, species=None):
        self.species = species if species is not None else sp.E

    def value(self, n, f, index):
        return 1.0


class ComposeWeight(Weight):
    """Weight on assemblies built from an outer weight, an inner weight and
    an outer selection kernel: either a fresh singleton block is appended
    (outer weight; the inner structure on it is the unique one-point inner
    structure) or the added point joins a selected existing block (selection
    kernel times inner weight)."""

    def __init__(self, wouter, winner, wselect):
        if not isinstance(wselect, EpsWeight):
            raise TypeError("third component must be a selection kernel on (structure, index) pairs")
        if winner.species.count(0) != 0:
            raise ValueError("inner species must have no structure on the empty set")
        if winner.species.count(1) != 1:
            raise ValueError("inner species must have exactly one structure on a point")
        self.wouter = wouter
        self.winner = winner
        self.wselect = wselect
        self.species = sp.ComposeSpecies(wouter.species, winner.species)
        self._one = winner.species.structures(1)[0]
        self.bound = max(wouter.bound, wselect.bound * winner.bound)
        self.name = f"compose({wouter.name},{winner.name},{wselect.name})"

    def value(self, n, s, s2):
        blocks, f, gs = s
        blocks2, f2, gs2 = s2
        k = len(blocks)
        if len(blocks2) == k + 1:
            if blocks2 == blocks + ((n,),) and gs2[:k] == gs:
                return self.wouter.value(k, f, f2)
            return 0.0
        if len(blocks2) == k:
            if f2 != f:
                return 0.0
            grown = None
            for p in range(k):
                if blocks2[p] == blocks[p]:
                    if gs2[p] != gs[p]:
                        return 0.0
                elif blocks2[p] == blocks[p] + (n,):
                    if grown is not None:
                        return 0.0
                    grown = p
                else:
                    return 0.0
            if grown is None:
                return 0.0
            e = self.wselect.value(k, f, grown)
            if e == 0.0:
                return 0.0
            return e * self.winner.value(len(blocks[grown]), gs[grown], gs2[grown])
        return 0.0

    def successors(self, n, s):
        blocks, f, gs = s
        k = len(blocks)
        out = []
        for f2, v in self.wouter.successors(k, f):
            out.append(((blocks + ((n,),), f2, gs + (self._one,)), v))
        for p in range(k):
            e = self.wselect.value(k, f, p)
            if e == 0.0:
                continue
            for g2, v in self.winner.successors(len(blocks[p]), gs[p]):
                blocks2 = blocks[:p] + (blocks[p] + (n,),) + blocks[p + 1:]
                gs2 = gs[:p] + (g2,) + gs[p + 1:]
                out.append(((blocks2, f, gs2), e * v))
        return out

    def predecessors(self, n, s2):
        blocks2, f2, gs2 = s2
        k2 = len(blocks2)
        out = []
        p = next(i for i, b in enumerate(blocks2) if n in b)
        if blocks2[p] == (n,):
            # singleton blocks holding the largest point are always last
            for f, v in self.wouter.predecessors(k2 - 1, f2):
                out.append(((blocks2[:-1], f, gs2[:-1]), v))
        else:
            e = self.wselect.value(k2, f2, p)
            if e != 0.0:
                shrunk = tuple(x for x in blocks2[p] if x != n)
                for g, v in self.winner.predecessors(len(shrunk), gs2[p]):
                    blocks = blocks2[:p] + (shrunk,) + blocks2[p + 1:]
                    gs = gs2[:p] + (g,) + gs2[p + 1:]
                    out.append(((blocks, f2, gs), e * v))
        return out


class FreeProductWeight(Weight):
    """Weight on a free product: either the last component grows by the added
    point (that factor's weight) or a fresh one-point component of a different
    factor is appended (that factor's weight out of its empty structure)."""

    def __init__(self, wfactors):
        wfactors = tuple(wfactors)
        self.wfactors = wfactors
        self.species = sp.FreeProductSpecies([w.species for w in wfactors])
        self._vac = [w.species.structures(0)[0] for w in wfactors]
        self.bound = max(w.bound for w in wfactors)
        self.name = "free(" + ",".join(w.name for w in wfactors) + ")"

    def value(self, n, s, s2):
        p, p2 = len(s), len(s2)
        if p2 == p and p >= 1:
            if s2[:-1] != s[:-1]:
                return 0.0
            alpha, block, payload = s[-1]
            alpha2, block2, payload2 = s2[-1]
            if alpha2 != alpha or block2 != block + (n,):
                return 0.0
            return self.wfactors[alpha].value(len(block), payload, payload2)
        if p2 == p + 1:
            if s2[:p] != s:
                return 0.0
            alpha2, block2, payload2 = s2[-1]
            if block2 != (n,):
                return 0.0
            return self.wfactors[alpha2].value(0, self._vac[alpha2], payload2)
        return 0.0

    def successors(self, n, s):
        out = []
        if s:
            alpha, block, payload = s[-1]
            for payload2, v in self.wfactors[alpha].successors(len(block), payload):
                out.append((s[:-1] + ((alpha, block + (n,), payload2),), v))
            banned = alpha
        else:
            banned = None
        for alpha2, w in enumerate(self.wfactors):
            if alpha2 == banned:
                continue
            for payload2, v in w.successors(0, self._vac[alpha2]):
                out.append((s + ((alpha2, (n,), payload2),), v))
        return out

    def predecessors(self, n, s2):
        alpha, block, payload = s2[-1]
        out = []
        if block == (n,):
            f = s2[:-1]
            v = self.wfactors[alpha].value(0, self._vac[alpha], payload)
            if v != 0.0:
                out.append((f, v))
        elif n in block:
            shrunk = tuple(x for x in block if x != n)
            for pl, v in self.wfactors[alpha].predecessors(len(shrunk), payload):
                out.append((s2[:-1] + ((alpha, shrunk, pl),), v))
        return out


def kernel_lower(w, n, k, f, fp):
    """Contraction against lower neighbours: sum over g one level down of
    conj(w(g, tau f)) w(g, tau fp) with tau the transposition of n-1 and k."""
    if not 0 <= k <= n - 1:
        raise ValueError(f"k={k} out of range for level {n}")
    tau = transposition(n, n - 1, k)
    tf = w.species.transport(n, f, tau)
    tfp = w.species.transport(n, fp, tau)
    lookup = {g: v for g, v in w.predecessors(n - 1, tf)}
    total = 0.0 + 0.0j
    for g, v2 in w.predecessors(n - 1, tfp):
        v1 = lookup.get(g)
        if v1 is not None:
            total += complex(v1).conjugate() * v2
    return total


def kernel_upper(w, n, k, f, fp):
    """Contraction against upper neighbours: sum over g one level up of
    w(f, g) conj(w(fp, tau g)) with tau the transposition of n and k."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range for level {n}")
    tau = transposition(n + 1, n, k)
    total = 0.0 + 0.0j
    for g, v in w.successors(n, f):
        tg = w.species.transport(n + 1, g, tau)
        total += v * complex(w.value(n, fp, tg)).conjugate()
    return total


class WeightSyntaxError(ValueError):
    pass


def _parse_weight(text, i):
    j = i
    while j < len(text) and (text[j].isalnum() or text[j] == "_"):
        j += 1
    if j == i:
        raise WeightSyntaxError(f"expected a weight name at position {i} in {text!r}")
    name = text[i:j]
    params = []
    while j < len(text) and text[j] == ":":
        j += 1
        k = j
        while k < len(text) and (text[k].isdigit() or text[k] in ".-+eE"):
            k += 1
        try:
            params.append(float(text[j:k]))
        except ValueError:
            raise WeightSyntaxError(f"bad numeric parameter in {text!r} at position {j}")
        j = k
    args = []
    if j < len(text) and text[j] == "(":
        j += 1
        while True:
            arg, j = _parse_weight(text, j)
            args.append(arg)
            if j >= len(text):
                raise WeightSyntaxError(f"unclosed '(' in {text!r}")
            if text[j] == ",":
                j += 1
                continue
            if text[j] == ")":
                j += 1
                break
            raise WeightSyntaxError(f"expected ',' or ')' at position {j} in {text!r}")
    return _make_weight(name, params, args, text), j


def _need(params, n, name):
    if len(params) != n:
        raise WeightSyntaxError(f"{name} takes {n} numeric parameter(s)")
    return params


def _make_weight(name, params, args, text):
    def no_args():
        if args:
            raise WeightSyntaxError(f"{name} takes no weight arguments")

    if name == "E":
        no_args()
        return SetWeight()
    if name == "Eplus":
        no_args()
        return SetWeight(species=sp.EPLUS, name="Eplus")
    if name == "L":
        no_args()
        return LinearOrderWeight()
    if name == "Epm":
        no_args()
        return OrientedSetWeight()
    if name == "tree":
        no_args()
        return TreeWeight()
    if name == "tree_c":
        no_args()
        return TreeRerootWeight(_need(params, 1, name)[0])
    if name == "digraph":
        no_args()
        return DigraphWeight(_need(params, 1, name)[0])
    if name == "ballot":
        no_args()
        return BallotWeight(_need(params, 1, name)[0])
    if name == "pairtree_c":
        no_args()
        return PairTreeWeight(_need(params, 1, name)[0])
    if name == "Leps":
        no_args()
        return LastElementWeight()
    if name == "Eeps":
        no_args()
        return ConstantElementWeight()
    if name == "scale":
        if len(args) != 1:
            raise WeightSyntaxError("scale takes one weight argument")
        return ScaledWeight(args[0], _need(params, 1, name)[0])
    if name == "sum":
        if len(args) != 2:
            raise WeightSyntaxError("sum takes two weight arguments")
        return SumWeight(*args)
    if name == "cartesian":
        if len(args) != 2:
            raise WeightSyntaxError("cartesian takes two weight arguments")
        return CartesianWeight(*args)
    if name == "product":
        if len(args) != 2:
            raise WeightSyntaxError("product takes two weight arguments")
        return ProductWeight(args[0], args[1], _need(params, 1, name)[0])
    if name == "compose":
        if len(args) != 3:
            raise WeightSyntaxError("compose takes three arguments (outer, inner, selection)")
        return ComposeWeight(*args)
    if name == "free":
        if len(args) < 1:
            raise WeightSyntaxError("free takes at least one weight argument")
        return FreeProductWeight(args)
    raise WeightSyntaxError(f"unknown weight {name!r} in {text!r}")


def weight_from_name(text):
    """Parse a catalog string such as 'tree_c:2.5' or 'cartesian(E,L)'."""
    w, j = _parse_weight(text.strip(), 0)
    if j != len(text.strip()):
        raise WeightSyntaxError(f"trailing input at position {j} in {text!r}")
    if isinstance(w, EpsWeight):
        raise WeightSyntaxError("selection kernels are only valid inside compose(...)")
    return w
