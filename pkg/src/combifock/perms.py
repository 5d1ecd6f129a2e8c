"""Permutations of {0..n-1} as tuples of images.

A permutation sigma is stored as a tuple with sigma[i] = sigma(i).
Colorings are tuples c with c[i] = color of point i; the group acts on
colorings by c -> c o sigma^{-1}.
"""

from itertools import permutations


def identity(n):
    return tuple(range(n))


def compose(sigma, tau):
    """(sigma o tau)(i) = sigma(tau(i))."""
    return tuple(sigma[tau[i]] for i in range(len(tau)))


def inverse(sigma):
    inv = [0] * len(sigma)
    for i, j in enumerate(sigma):
        inv[j] = i
    return tuple(inv)


def transposition(n, i, j):
    """The transposition of i and j inside S(n)."""
    images = list(range(n))
    images[i], images[j] = images[j], images[i]
    return tuple(images)


def extend_fixing_last(sigma):
    """Extension of sigma in S(n) to S(n+1) fixing the added point n."""
    return sigma + (len(sigma),)


def sign(sigma):
    """Parity of a permutation: +1 even, -1 odd."""
    n = len(sigma)
    seen = [False] * n
    s = 1
    for i in range(n):
        if seen[i]:
            continue
        j = sigma[i]
        length = 1
        seen[i] = True
        while j != i:
            seen[j] = True
            j = sigma[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def all_perms(n):
    """All of S(n) in lexicographic order."""
    return permutations(range(n))


def adjacent_transpositions(n):
    """Generators (i, i+1) of S(n); empty for n < 2."""
    return [transposition(n, i, i + 1) for i in range(n - 1)]


def act_coloring(sigma, c):
    """c -> c o sigma^{-1}: point sigma(i) receives the color of point i."""
    out = [0] * len(c)
    for i, col in enumerate(c):
        out[sigma[i]] = col
    return tuple(out)


def is_permutation(sigma):
    return sorted(sigma) == list(range(len(sigma)))
