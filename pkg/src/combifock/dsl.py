"""Expression language for composite species.

Grammar (tightest first):
    postfix '      derivative
    ^k             iterated product (k a positive integer)
    o              composition (right operand must have nothing at level 0)
    &              cartesian product
    *              product
    +              sum
plus parentheses, the function form free(e1,e2,...), and named atoms.
All binary operators associate to the left.
"""

from dataclasses import dataclass
from functools import reduce

from . import species as sp


@dataclass(frozen=True)
class Atom:
    tag: str


@dataclass(frozen=True)
class Sum:
    left: object
    right: object


@dataclass(frozen=True)
class Product:
    left: object
    right: object


@dataclass(frozen=True)
class Cartesian:
    left: object
    right: object


@dataclass(frozen=True)
class Compose:
    left: object
    right: object


@dataclass(frozen=True)
class Derivative:
    base: object


@dataclass(frozen=True)
class FreeProduct:
    operands: tuple


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


class SpeciesSyntaxError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_RESERVED = {"o", "free"}


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+*&'()^,":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == "o":
                tokens.append(("o", word, i))
            elif word == "free":
                tokens.append(("free", word, i))
            else:
                tokens.append(("name", word, i))
            i = j
            continue
        raise SpeciesSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.advance()
        if tok[0] != kind:
            raise SpeciesSyntaxError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self):
        expr = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            raise SpeciesSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return expr

    def sum(self):
        node = self.product()
        while self.peek()[0] == "+":
            self.advance()
            node = Sum(node, self.product())
        return node

    def product(self):
        node = self.cartesian()
        while self.peek()[0] == "*":
            self.advance()
            node = Product(node, self.cartesian())
        return node

    def cartesian(self):
        node = self.composition()
        while self.peek()[0] == "&":
            self.advance()
            node = Cartesian(node, self.composition())
        return node

    def composition(self):
        node = self.power()
        while self.peek()[0] == "o":
            self.advance()
            node = Compose(node, self.power())
        return node

    def power(self):
        node = self.postfix()
        while self.peek()[0] == "^":
            self.advance()
            tok = self.expect("int")
            if tok[1] < 1:
                raise SpeciesSyntaxError("power exponent must be >= 1", tok[2])
            node = Power(node, tok[1])
        return node

    def postfix(self):
        node = self.atom()
        while self.peek()[0] == "'":
            self.advance()
            node = Derivative(node)
        return node

    def atom(self):
        tok = self.advance()
        if tok[0] == "name":
            return Atom(tok[1])
        if tok[0] == "free":
            self.expect("(")
            operands = [self.sum()]
            while self.peek()[0] == ",":
                self.advance()
                operands.append(self.sum())
            self.expect(")")
            return FreeProduct(tuple(operands))
        if tok[0] == "(":
            node = self.sum()
            self.expect(")")
            return node
        raise SpeciesSyntaxError(f"unexpected token {tok[1]!r}", tok[2])


def parse(text):
    """Parse an expression string into an AST."""
    return _Parser(_tokenize(text)).parse()


_LEVEL = {Sum: 0, Product: 1, Cartesian: 2, Compose: 3, Power: 4, Derivative: 5}
_OPCHAR = {Sum: "+", Product: "*", Cartesian: "&", Compose: " o "}


def to_string(expr):
    """Render an AST back to a string that parses to the same AST."""

    def render(node, parent_level, is_right):
        if isinstance(node, Atom):
            return node.tag
        if isinstance(node, FreeProduct):
            return "free(" + ",".join(render(op, 0, False) for op in node.operands) + ")"
        if isinstance(node, Derivative):
            return render(node.base, _LEVEL[Derivative], False) + "'"
        if isinstance(node, Power):
            text = render(node.base, _LEVEL[Power], False) + f"^{node.exponent}"
            level = _LEVEL[Power]
        else:
            kind = type(node)
            level = _LEVEL[kind]
            text = (
                render(node.left, level, False)
                + _OPCHAR[kind]
                + render(node.right, level, True)
            )
        if level < parent_level or (level == parent_level and is_right):
            return "(" + text + ")"
        return text

    return render(expr, 0, False)


def default_registry():
    """Atom tag -> species for the built-in species."""
    return dict(sp.ATOMS)


def build(expr, registry=None):
    """Turn an AST into a concrete species."""
    reg = registry if registry is not None else default_registry()
    memo = {}

    def rec(node):
        if node in memo:
            return memo[node]
        if isinstance(node, Atom):
            if node.tag not in reg:
                raise ValueError(f"unknown species atom {node.tag!r}")
            result = reg[node.tag]
        elif isinstance(node, Sum):
            result = sp.SumSpecies(rec(node.left), rec(node.right))
        elif isinstance(node, Product):
            result = sp.ProductSpecies(rec(node.left), rec(node.right))
        elif isinstance(node, Cartesian):
            result = sp.CartesianSpecies(rec(node.left), rec(node.right))
        elif isinstance(node, Compose):
            result = sp.ComposeSpecies(rec(node.left), rec(node.right))
        elif isinstance(node, Derivative):
            result = sp.DerivativeSpecies(rec(node.base))
        elif isinstance(node, Power):
            result = reduce(sp.ProductSpecies, [rec(node.base)] * node.exponent)
        elif isinstance(node, FreeProduct):
            result = sp.FreeProductSpecies([rec(op) for op in node.operands])
        else:
            raise TypeError(f"not a species expression: {node!r}")
        memo[node] = result
        return result

    return rec(expr)


def species_from_string(text, registry=None):
    return build(parse(text), registry)
