"""Operator identities checked as matrix equalities on truncation-safe levels.

Every check assembles its operators twice: once as matrix products of ladder
operators and once through the contraction-kernel expansions of the mixed
products a*a and aa*.  Both routes must match each other and the claimed
right-hand side.  An expression whose evaluation rises d levels above its
input is compared only on source levels up to max_level - d, which keeps
clipped creation amplitudes at the top of the truncated space from
fabricating violations.
"""

from dataclasses import dataclass, field

import numpy as np

from .fock import FockSpace
from .operators import (
    OperatorMatrix,
    annihilate_create_kernel,
    annihilator,
    create_annihilate_kernel,
    creator,
    identity_operator,
    number_operator,
    poly_of_number,
    prefix_dim,
    second_quantization,
    switch_operator,
)
from .weights import (
    BallotWeight,
    CartesianWeight,
    DigraphWeight,
    LinearOrderWeight,
    OrientedSetWeight,
    PairTreeWeight,
    SetWeight,
    TreeRerootWeight,
    TreeWeight,
)


@dataclass
class IdentityReport:
    name: str
    parameters: dict
    num_colors: int
    max_level: int
    safe_levels: list
    max_deviation: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "parameters": self.parameters,
            "num_colors": self.num_colors,
            "max_level": self.max_level,
            "safe_levels": self.safe_levels,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


def standard_h_pairs(num_colors):
    """Equal, orthogonal and generic complex pairs of color vectors."""
    e0 = np.zeros(num_colors, dtype=complex)
    e0[0] = 1.0
    e1 = np.zeros(num_colors, dtype=complex)
    e1[min(1, num_colors - 1)] = 1.0
    rng = np.random.default_rng(7)
    g1 = rng.normal(size=num_colors) + 1j * rng.normal(size=num_colors)
    g2 = rng.normal(size=num_colors) + 1j * rng.normal(size=num_colors)
    return [("equal", e0, e0), ("orthogonal", e0, e1), ("generic", g1, g2)]


def compare(lhs, rhs):
    """Max absolute entry deviation on truncation-safe source levels."""
    if lhs.net_shift != rhs.net_shift:
        raise ValueError("cannot compare expressions of different level shifts")
    level = min(lhs.safe_max_level(), rhs.safe_max_level())
    if level < 0:
        raise ValueError("expression depth exceeds the truncation level")
    d = prefix_dim(lhs.space, level)
    dev = float(np.max(np.abs(lhs.mat[:, :d] - rhs.mat[:, :d]))) if d else 0.0
    return dev, level


def _commutator_pieces(space, w, h1, h2):
    """Matrix-route and kernel-route versions of a(h1)a*(h2) and a*(h2)a(h1)."""
    a1 = annihilator(space, w, h1)
    c2 = creator(space, w, h2, check=False)
    aa = a1 @ c2
    ca = c2 @ a1
    aa_k = annihilate_create_kernel(space, w, h1, h2)
    ca_k = create_annihilate_kernel(space, w, h2, h1)
    return aa, ca, aa_k, ca_k


def _sweep(space, w, rhs_of, tol, g_op=None):
    """Run the h-pair sweep for identities a a* - (g) a* a = rhs."""
    worst = 0.0
    detail = {}
    safe = None
    for label, h1, h2 in standard_h_pairs(space.num_colors):
        aa, ca, aa_k, ca_k = _commutator_pieces(space, w, h1, h2)
        rhs = rhs_of(h1, h2)
        if g_op is None:
            lhs_m = aa - ca
            lhs_k = aa_k - ca_k
        else:
            lhs_m = aa - g_op @ ca
            lhs_k = aa_k - g_op @ ca_k
        d1, safe = compare(lhs_m, rhs)
        d2, _ = compare(lhs_k, rhs)
        d3, _ = compare(lhs_m, lhs_k)
        detail[label] = {"matrix_route": d1, "kernel_route": d2, "route_gap": d3}
        worst = max(worst, d1, d2, d3)
    return worst, safe, detail


def check_ccr(max_level=5, num_colors=2, tol=1e-10):
    """Canonical commutation relations on the set species."""
    w = SetWeight()
    space = FockSpace(w.species, num_colors, max_level)
    one = identity_operator(space)

    def rhs(h1, h2):
        return complex(np.vdot(h1, h2)) * one

    dev, safe, detail = _sweep(space, w, rhs, tol)
    return IdentityReport(
        "ccr", {}, num_colors, max_level, list(range(safe + 1)), dev, tol, dev <= tol, detail
    )


def check_full_fock(max_level=5, num_colors=2, tol=1e-10):
    """a a* = <h1,h2> 1 on linear orders."""
    w = LinearOrderWeight()
    space = FockSpace(w.species, num_colors, max_level)
    one = identity_operator(space)
    worst = 0.0
    detail = {}
    safe = None
    for label, h1, h2 in standard_h_pairs(num_colors):
        aa = annihilator(space, w, h1) @ creator(space, w, h2, check=False)
        aa_k = annihilate_create_kernel(space, w, h1, h2)
        rhs = complex(np.vdot(h1, h2)) * one
        d1, safe = compare(aa, rhs)
        d2, _ = compare(aa_k, rhs)
        d3, _ = compare(aa, aa_k)
        detail[label] = {"matrix_route": d1, "kernel_route": d2, "route_gap": d3}
        worst = max(worst, d1, d2, d3)
    return IdentityReport(
        "full_fock", {}, num_colors, max_level, list(range(safe + 1)), worst, tol, worst <= tol, detail
    )


def _orientation_pairs(space, n):
    """Index pairs (i, j) at level n with j the orientation flip of i; i == j
    for self-paired orbits (repeated colors joined by an odd permutation)."""
    out = []
    off = space.offsets[n]
    for i, b in enumerate(space.basis[n]):
        flipped = "-" if b.structure == "+" else "+"
        j = space.index(n, flipped, b.coloring) - off
        if j >= i:
            out.append((i, j))
    return out


def check_gcomm(max_level=5, num_colors=2, tol=1e-10):
    """Orientation-switch commutation relations on oriented sets, plus the
    commutator form on the switch-even and anticommutator form on the
    switch-odd combinations."""
    w = OrientedSetWeight()
    space = FockSpace(w.species, num_colors, max_level)
    one = identity_operator(space)
    g_op = switch_operator(space)

    def rhs(h1, h2):
        return complex(np.vdot(h1, h2)) * one

    dev, safe, detail = _sweep(space, w, rhs, tol, g_op=g_op)

    worst_sub = 0.0
    for label, h1, h2 in standard_h_pairs(num_colors):
        a1 = annihilator(space, w, h1)
        c2 = creator(space, w, h2, check=False)
        comm = (a1 @ c2 - c2 @ a1).mat
        anti = (a1 @ c2 + c2 @ a1).mat
        ip = complex(np.vdot(h1, h2))
        for n in range(safe + 1):
            sl = space.level_slice(n)
            comm_n = comm[sl, sl]
            anti_n = anti[sl, sl]
            pairs = _orientation_pairs(space, n)
            dim = space.level_dim(n)
            sym_cols = []
            anti_cols = []
            for i, j in pairs:
                col = np.zeros(dim, dtype=complex)
                if i == j:
                    col[i] = 1.0
                    sym_cols.append(col)
                else:
                    col[i] = col[j] = 1.0 / np.sqrt(2)
                    sym_cols.append(col)
                    acol = np.zeros(dim, dtype=complex)
                    acol[i] = 1.0 / np.sqrt(2)
                    acol[j] = -1.0 / np.sqrt(2)
                    anti_cols.append(acol)
            if sym_cols:
                vs = np.column_stack(sym_cols)
                worst_sub = max(
                    worst_sub,
                    float(np.max(np.abs(vs.conj().T @ comm_n @ vs - ip * np.eye(vs.shape[1])))),
                )
            if anti_cols:
                va = np.column_stack(anti_cols)
                worst_sub = max(
                    worst_sub,
                    float(np.max(np.abs(va.conj().T @ anti_n @ va - ip * np.eye(va.shape[1])))),
                )
    detail["restricted_forms"] = worst_sub
    dev = max(dev, worst_sub)
    return IdentityReport(
        "gcomm", {}, num_colors, max_level, list(range(safe + 1)), dev, tol, dev <= tol, detail
    )


def check_tree(c=None, max_level=4, num_colors=2, tol=1e-10):
    """[a, a*] = <h1,h2> N on rooted trees, or <h1,h2> (N + c) with the
    re-rooting modification."""
    w = TreeWeight() if c is None else TreeRerootWeight(c)
    space = FockSpace(w.species, num_colors, max_level)
    n_op = number_operator(space)

    def rhs(h1, h2):
        ip = complex(np.vdot(h1, h2))
        if c:
            return ip * n_op + (ip * float(c)) * identity_operator(space)
        return ip * n_op

    dev, safe, detail = _sweep(space, w, rhs, tol)
    params = {} if c is None else {"c": float(c)}
    return IdentityReport(
        "tree", params, num_colors, max_level, list(range(safe + 1)), dev, tol, dev <= tol, detail
    )


def check_digraph(q, max_level=4, num_colors=2, tol=1e-10, kernel_levels=3, kernel_samples=200):
    """a a* - q a* a = <h1,h2> 1 on simple digraphs, plus the direct kernel
    identity upper = q * lower for all admissible slots (exhaustive up to
    kernel_levels, seeded sample above)."""
    from .weights import kernel_lower, kernel_upper

    w = DigraphWeight(q)
    space = FockSpace(w.species, num_colors, max_level)
    one = identity_operator(space)
    worst = 0.0
    detail = {}
    safe = None
    for label, h1, h2 in standard_h_pairs(num_colors):
        aa, ca, aa_k, ca_k = _commutator_pieces(space, w, h1, h2)
        rhs = complex(np.vdot(h1, h2)) * one
        lhs_m = aa - q * ca
        lhs_k = aa_k - q * ca_k
        d1, safe = compare(lhs_m, rhs)
        d2, _ = compare(lhs_k, rhs)
        d3, _ = compare(lhs_m, lhs_k)
        detail[label] = {"matrix_route": d1, "kernel_route": d2, "route_gap": d3}
        worst = max(worst, d1, d2, d3)

    kdev = 0.0
    rng = np.random.default_rng(11)
    for n in range(1, max_level + 1):
        structs = w.species.structures(n)
        if n <= kernel_levels:
            pairs = [(f, fp) for f in structs for fp in structs]
        else:
            pairs = [
                (structs[rng.integers(len(structs))], structs[rng.integers(len(structs))])
                for _ in range(kernel_samples)
            ]
        for f, fp in pairs:
            for k in range(n):
                up = kernel_upper(w, n, k, f, fp)
                low = kernel_lower(w, n, k, f, fp)
                kdev = max(kdev, abs(up - q * low))
    detail["kernel_identity"] = kdev
    worst = max(worst, kdev)
    return IdentityReport(
        "digraph", {"q": float(q)}, num_colors, max_level, list(range(safe + 1)), worst, tol, worst <= tol, detail
    )


def factor_polynomial(coeffs, imag_tol=1e-8):
    """Split a monic polynomial (ascending coefficients) into linear factors
    x + c and quadratic factors x^2 + c with c >= 0; reject anything else."""
    arr = np.asarray(coeffs, dtype=float)
    while arr.size and abs(arr[-1]) == 0.0:
        arr = arr[:-1]
    if arr.size == 0:
        raise ValueError("empty polynomial")
    if arr.size == 1:
        if abs(arr[0] - 1.0) <= imag_tol:
            return []
        raise ValueError("constant polynomials other than 1 are not realizable here")
    if abs(arr[-1] - 1.0) > imag_tol:
        raise ValueError("polynomial must be monic")
    roots = list(np.roots(arr[::-1]))
    factors = []
    used = [False] * len(roots)
    for i, z in enumerate(roots):
        if used[i]:
            continue
        if abs(z.imag) <= imag_tol:
            c = -z.real
            if c < -imag_tol:
                raise ValueError(f"linear factor x + c with negative c = {c:.3g}")
            factors.append(("lin", max(0.0, c)))
            used[i] = True
            continue
        partner = None
        for j in range(i + 1, len(roots)):
            if not used[j] and abs(roots[j] - z.conjugate()) <= 1e-6:
                partner = j
                break
        if partner is None:
            raise ValueError("complex root without a conjugate partner")
        if abs(z.real) > imag_tol:
            raise ValueError("quadratic factor with a linear term is outside the realizable form")
        factors.append(("quad", float((z * roots[partner]).real)))
        used[i] = used[partner] = True
    return factors


def polynomial_space(coeffs, num_colors=2, max_level=None):
    """Factor space realizing [a, a*] = <h1,h2> P(N): cartesian product of
    re-rooting tree factors (x + c) and pair-tree factors (x^2 + c)."""
    factors = factor_polynomial(coeffs)
    if not factors:
        w = SetWeight()
        level = max_level if max_level is not None else 5
        return w, FockSpace(w.species, num_colors, level)
    ws = [TreeRerootWeight(c) if kind == "lin" else PairTreeWeight(c) for kind, c in factors]
    w = ws[0]
    for nxt in ws[1:]:
        w = CartesianWeight(w, nxt)
    if max_level is None:
        weight_count = sum(1 if kind == "lin" else 2 for kind, _ in factors)
        max_level = 4 if weight_count == 1 else 3
    return w, FockSpace(w.species, num_colors, max_level)


def check_polynomial(coeffs, num_colors=2, max_level=None, tol=1e-9):
    """[a, a*] = <h1,h2> P(N) on the constructed factor space."""
    w, space = polynomial_space(coeffs, num_colors, max_level)
    pn = poly_of_number(space, coeffs)

    def rhs(h1, h2):
        return complex(np.vdot(h1, h2)) * pn

    dev, safe, detail = _sweep(space, w, rhs, tol)
    return IdentityReport(
        "polynomial",
        {"coeffs": [float(c) for c in coeffs]},
        num_colors,
        space.max_level,
        list(range(safe + 1)),
        dev,
        tol,
        dev <= tol,
        detail,
    )


def check_second_quantization(max_level=4, num_colors=2, tol=1e-10, seed=23):
    """[a(h), dG(A)] = a(A* h) and [dG(A), dG(B)] = dG([A, B]) for seeded
    random color matrices, on the set and ballot spaces."""
    rng = np.random.default_rng(seed)
    amat = rng.normal(size=(num_colors, num_colors)) + 1j * rng.normal(size=(num_colors, num_colors))
    bmat = rng.normal(size=(num_colors, num_colors)) + 1j * rng.normal(size=(num_colors, num_colors))
    worst = 0.0
    detail = {}
    for w in (SetWeight(), BallotWeight(0.3)):
        space = FockSpace(w.species, num_colors, max_level)
        dga = second_quantization(space, amat)
        dgb = second_quantization(space, bmat)
        d1, _ = compare(dga @ dgb - dgb @ dga, second_quantization(space, amat @ bmat - bmat @ amat))
        _, h1, _ = standard_h_pairs(num_colors)[2]
        a_h = annihilator(space, w, h1)
        lhs = a_h @ dga - dga @ a_h
        rhs = annihilator(space, w, amat.conj().T @ h1)
        level = min(lhs.safe_max_level(), rhs.safe_max_level())
        dcut = prefix_dim(space, level)
        d2 = float(np.max(np.abs(lhs.mat[:, :dcut] - rhs.mat[:, :dcut])))
        detail[w.name] = {"second_quantization_bracket": d1, "ladder_bracket": d2}
        worst = max(worst, d1, d2)
    return IdentityReport(
        "second_quantization",
        {"seed": seed},
        num_colors,
        max_level,
        list(range(max_level + 1)),
        worst,
        tol,
        worst <= tol,
        detail,
    )


CHECKS = {
    "ccr": check_ccr,
    "full_fock": check_full_fock,
    "gcomm": check_gcomm,
    "tree": check_tree,
    "digraph": check_digraph,
    "polynomial": check_polynomial,
    "second_quantization": check_second_quantization,
}


def run_check(name, q=None, c=None, poly=None, levels=None, colors=None, tol=None):
    """Dispatch a named identity check with CLI-style parameters."""
    if name not in CHECKS:
        raise ValueError(f"unknown check {name!r}; available: {sorted(CHECKS)}")
    kwargs = {}
    if levels is not None:
        kwargs["max_level"] = levels
    if colors is not None:
        kwargs["num_colors"] = colors
    if tol is not None:
        kwargs["tol"] = tol
    if name == "tree":
        kwargs["c"] = c
    elif name == "digraph":
        if q is None:
            raise ValueError("the digraph check needs --q")
        kwargs["q"] = q
    elif name == "polynomial":
        if not poly:
            raise ValueError("the polynomial check needs --poly c0,c1,...")
        return check_polynomial(poly, **kwargs)
    return CHECKS[name](**kwargs)
