"""Permutations and finite permutation groups used as vertex and edge labels."""

from __future__ import annotations

import re

ORDER_CAP = 10080

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


class Permutation:
    """Bijection of {0, ..., n-1} stored as its tuple of images.

    Composition is function composition: (p * q) sends x to p(q(x)).
    Text form is 1-based disjoint cycle notation; the identity prints "()".
    """

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images!r}")
        self.images = images

    @property
    def degree(self):
        return len(self.images)

    @classmethod
    def identity(cls, degree):
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, cycles, degree):
        """Build from 1-based cycles, e.g. [(1, 2), (3, 4)]. Cycles must be disjoint."""
        images = list(range(degree))
        seen = set()
        for cycle in cycles:
            cycle = tuple(cycle)
            for point in cycle:
                if not 1 <= point <= degree:
                    raise ValueError(f"point {point} out of range 1..{degree}")
                if point in seen:
                    raise ValueError(f"point {point} appears twice in {cycles!r}")
                seen.add(point)
            for src, dst in zip(cycle, cycle[1:] + cycle[:1]):
                images[src - 1] = dst - 1
        return cls(images)

    @classmethod
    def parse(cls, text, degree):
        """Parse 1-based cycle notation: "(1 2)(3 4)", "(12)(34)" or "()".

        Points inside a cycle may be separated by spaces or commas; with no
        separator every character is read as a single digit.
        """
        text = text.strip()
        matches = list(_CYCLE_RE.finditer(text))
        if not matches or "".join(m.group(0) for m in matches) != text:
            raise ValueError(f"bad cycle notation: {text!r}")
        cycles = []
        for m in matches:
            body = m.group(1).strip()
            if not body:
                continue
            if any(sep in body for sep in " ,"):
                tokens = [t for t in re.split(r"[\s,]+", body) if t]
            else:
                tokens = list(body)
            if not all(t.isdigit() for t in tokens):
                raise ValueError(f"bad cycle notation: {text!r}")
            cycles.append(tuple(int(t) for t in tokens))
        return cls.from_cycles(cycles, degree)

    def to_cycles(self):
        """Disjoint cycles (1-based), fixed points dropped, each cycle starting
        at its minimum, cycles sorted by that minimum."""
        cycles = []
        seen = set()
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cycle = [start]
            seen.add(start)
            point = self.images[start]
            while point != start:
                cycle.append(point)
                seen.add(point)
                point = self.images[point]
            cycles.append(tuple(p + 1 for p in cycle))
        return cycles

    def __str__(self):
        cycles = self.to_cycles()
        if not cycles:
            return "()"
        if self.degree <= 9:
            return "".join("(" + "".join(str(p) for p in c) + ")" for c in cycles)
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)

    def __repr__(self):
        return f"Permutation.parse({str(self)!r}, {self.degree})"

    def apply(self, point):
        """Image of a 0-based point."""
        return self.images[point]

    def __mul__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Permutation(self.images[x] for x in other.images)

    def inverse(self):
        inv = [0] * self.degree
        for src, dst in enumerate(self.images):
            inv[dst] = src
        return Permutation(inv)

    def conjugate_by(self, h):
        """h * self * h^-1."""
        return h * self * h.inverse()

    def is_identity(self):
        return all(i == x for i, x in enumerate(self.images))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __lt__(self, other):
        if not isinstance(other, Permutation) or other.degree != self.degree:
            return NotImplemented
        return self.images < other.images

    def __le__(self, other):
        if not isinstance(other, Permutation) or other.degree != self.degree:
            return NotImplemented
        return self.images <= other.images


class PermGroup:
    """Subgroup of the symmetric group on {1..n}, given by generators.

    Elements are enumerated lazily and cached; enumeration past `order_cap`
    raises instead of hanging on an accidentally huge group.
    """

    __slots__ = ("degree", "generators", "order_cap", "_elements", "_sorted", "_hash")

    def __init__(self, degree, generators=(), order_cap=ORDER_CAP):
        degree = int(degree)
        if degree < 1:
            raise ValueError("degree must be >= 1")
        self.degree = degree
        gens = []
        for g in generators:
            if not isinstance(g, Permutation):
                raise TypeError(f"generator is not a Permutation: {g!r}")
            if g.degree != degree:
                raise ValueError(f"generator degree {g.degree} != {degree}")
            if not g.is_identity() and g not in gens:
                gens.append(g)
        self.generators = tuple(sorted(gens, key=lambda p: p.images))
        self.order_cap = order_cap
        self._elements = None
        self._sorted = None
        self._hash = None

    @classmethod
    def trivial(cls, degree):
        return cls(degree, ())

    @classmethod
    def symmetric(cls, degree):
        if degree == 1:
            return cls(degree, ())
        swap = Permutation.from_cycles([(1, 2)], degree)
        cyc = Permutation.from_cycles([tuple(range(1, degree + 1))], degree)
        return cls(degree, (swap, cyc))

    def elements(self):
        if self._elements is None:
            ident = Permutation.identity(self.degree)
            seen = {ident}
            frontier = [ident]
            while frontier:
                fresh = []
                for p in frontier:
                    for g in self.generators:
                        q = g * p
                        if q not in seen:
                            if len(seen) >= self.order_cap:
                                raise ValueError(
                                    f"group order exceeds cap {self.order_cap}"
                                )
                            seen.add(q)
                            fresh.append(q)
                frontier = fresh
            self._elements = frozenset(seen)
        return self._elements

    def sorted_elements(self):
        if self._sorted is None:
            self._sorted = tuple(sorted(self.elements(), key=lambda p: p.images))
        return self._sorted

    def order(self):
        return len(self.elements())

    def is_trivial(self):
        return not self.generators

    def __contains__(self, perm):
        if not isinstance(perm, Permutation) or perm.degree != self.degree:
            return False
        if perm.is_identity():
            return True
        return perm in self.elements()

    def __le__(self, other):
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.degree == other.degree and all(g in other for g in self.generators)

    def __eq__(self, other):
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.degree == other.degree and self <= other and other <= self

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.degree, self.elements()))
        return self._hash

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators) or "()"
        return f"<PermGroup deg={self.degree} gens=[{gens}]>"

    def join(self, other):
        """Subgroup generated by both groups."""
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return PermGroup(
            self.degree,
            self.generators + other.generators,
            min(self.order_cap, other.order_cap),
        )

    def adjoin(self, *perms):
        """Subgroup generated by this group and extra elements."""
        return PermGroup(self.degree, self.generators + tuple(perms), self.order_cap)

    def conjugate(self, h):
        """h * self * h^-1."""
        h_inv = h.inverse()
        return PermGroup(
            self.degree, tuple(h * g * h_inv for g in self.generators), self.order_cap
        )

    def index_in(self, over):
        if not self <= over:
            raise ValueError("not a subgroup")
        return over.order() // self.order()

    def coset_rep(self, g):
        """Minimum element of the left coset g * self."""
        if g.degree != self.degree:
            raise ValueError("degree mismatch")
        return min((g * e for e in self.elements()), key=lambda p: p.images)

    def coset_reps_in(self, over):
        """Sorted minimal representatives of the left cosets g * self inside over."""
        if not self <= over:
            raise ValueError("not a subgroup")
        reps = {self.coset_rep(g) for g in over.elements()}
        return tuple(sorted(reps, key=lambda p: p.images))

    def same_left_coset(self, a, b):
        """Whether a * self == b * self."""
        return a.inverse() * b in self
