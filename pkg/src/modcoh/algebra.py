"""Exact graded-commutative polynomial kernel.

The free algebra over Q on even generators (which commute with everything)
and odd generators (which anticommute pairwise and square to zero).
Coefficients are arbitrary-precision rationals; elements are kept in a
unique canonical form so equality is plain comparison of term maps.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

__all__ = [
    "AlgebraError",
    "GradedElement",
    "a_gen",
    "b_gen",
    "f_gen",
    "delta_gen",
    "bhat_gen",
    "fhat_gen",
    "v_gen",
    "w_gen",
    "aux_odd",
    "degree_of",
    "is_odd_gen",
    "name_of",
    "key_from_name",
    "xi",
    "element_to_json",
    "element_from_json",
]


class AlgebraError(ValueError):
    """Raised on invalid kernel operations (parity/degree violations etc.)."""


# ---------------------------------------------------------------------------
# Generators.
#
# A generator is a small int tuple (family, part, r, s).  Tuple order is the
# canonical generator order used for monomial normalisation and for stable
# serialisation.  part == 0 means the base ring; part >= 1 indexes the factor
# of a stratum algebra.
# ---------------------------------------------------------------------------

FAM_A = 0       # even, degree 2r
FAM_B = 1       # odd,  degree 2r-1
FAM_F = 2       # even, degree 2r-2
FAM_DELTA = 3   # even, degree 2 (formal Chern roots)
FAM_BHAT = 4    # odd,  degree 2r-1 (basis-change partner of b_r^s)
FAM_FHAT = 5    # even, degree 2r-2 (basis-change partner of f_r)
FAM_V = 6       # odd,  degree 1 (restriction image of b_1^s)
FAM_W = 7       # odd,  degree 1 (difference b_1^{p,s} - b_1^{P,s})
FAM_AUX = 8     # odd,  degree 1 (anonymous exterior generator, tests only)

_ODD_FAMS = frozenset({FAM_B, FAM_BHAT, FAM_V, FAM_W, FAM_AUX})

GenKey = tuple[int, int, int, int]


def a_gen(r: int, part: int = 0) -> GenKey:
    return (FAM_A, part, r, 0)


def b_gen(r: int, s: int, part: int = 0) -> GenKey:
    return (FAM_B, part, r, s)


def f_gen(r: int, part: int = 0) -> GenKey:
    return (FAM_F, part, r, 0)


def delta_gen(k: int, part: int = 0) -> GenKey:
    return (FAM_DELTA, part, k, 0)


def bhat_gen(r: int, s: int) -> GenKey:
    return (FAM_BHAT, 0, r, s)


def fhat_gen(r: int) -> GenKey:
    return (FAM_FHAT, 0, r, 0)


def v_gen(s: int) -> GenKey:
    return (FAM_V, 0, 0, s)


def w_gen(part: int, s: int) -> GenKey:
    return (FAM_W, part, 0, s)


def aux_odd(tag: int) -> GenKey:
    return (FAM_AUX, 0, tag, 0)


def degree_of(key: GenKey) -> int:
    fam, _part, r, _s = key
    if fam == FAM_A:
        return 2 * r
    if fam in (FAM_B, FAM_BHAT):
        return 2 * r - 1
    if fam in (FAM_F, FAM_FHAT):
        return 2 * r - 2
    if fam == FAM_DELTA:
        return 2
    if fam in (FAM_V, FAM_W, FAM_AUX):
        return 1
    raise AlgebraError(f"unknown generator family in {key!r}")


def is_odd_gen(key: GenKey) -> bool:
    return key[0] in _ODD_FAMS


def name_of(key: GenKey) -> str:
    fam, part, r, s = key
    sup = f"^{{p={part}}}" if part else ""
    if fam == FAM_A:
        return f"a{sup}_{r}"
    if fam == FAM_B:
        return f"b{sup}_{r}^{s}"
    if fam == FAM_F:
        return f"f{sup}_{r}"
    if fam == FAM_DELTA:
        return f"delta{sup}_{r}"
    if fam == FAM_BHAT:
        return f"bhat_{r}^{s}"
    if fam == FAM_FHAT:
        return f"fhat_{r}"
    if fam == FAM_V:
        return f"v_{s}"
    if fam == FAM_W:
        return f"w{sup}_{s}"
    if fam == FAM_AUX:
        return f"u_{r}"
    raise AlgebraError(f"unknown generator family in {key!r}")


def key_from_name(name: str) -> GenKey:
    """Inverse of :func:`name_of` (used when reading serialized elements)."""
    part = 0
    head, _, rest = name.partition("_")
    if "^{p=" in head:
        head, _, p = head.partition("^{p=")
        part = int(p.rstrip("}"))
    if head == "a":
        return a_gen(int(rest), part)
    if head == "b":
        r, _, s = rest.partition("^")
        return b_gen(int(r), int(s), part)
    if head == "f":
        return f_gen(int(rest), part)
    if head == "delta":
        return delta_gen(int(rest), part)
    if head == "bhat":
        r, _, s = rest.partition("^")
        return bhat_gen(int(r), int(s))
    if head == "fhat":
        return fhat_gen(int(rest))
    if head == "v":
        return v_gen(int(rest))
    if head == "w":
        return w_gen(part, int(rest))
    if head == "u":
        return aux_odd(int(rest))
    raise AlgebraError(f"cannot parse generator name {name!r}")


# ---------------------------------------------------------------------------
# Monomials.
#
# A monomial is a pair (even, odd): `even` is a tuple of (key, exponent)
# sorted by key, `odd` a strictly increasing tuple of odd keys.  The sign of
# sorting the odd part is normalised into the coefficient at construction.
# ---------------------------------------------------------------------------

Monomial = tuple[tuple[tuple[GenKey, int], ...], tuple[GenKey, ...]]

_ONE_MONO: Monomial = ((), ())


def _mono_degree(mono: Monomial) -> int:
    even, odd = mono
    return sum(degree_of(k) * e for k, e in even) + sum(degree_of(k) for k in odd)


def _merge_even(e1, e2):
    if not e1:
        return e2
    if not e2:
        return e1
    out = []
    i = j = 0
    n1, n2 = len(e1), len(e2)
    while i < n1 and j < n2:
        k1, x1 = e1[i]
        k2, x2 = e2[j]
        if k1 == k2:
            out.append((k1, x1 + x2))
            i += 1
            j += 1
        elif k1 < k2:
            out.append(e1[i])
            i += 1
        else:
            out.append(e2[j])
            j += 1
    out.extend(e1[i:])
    out.extend(e2[j:])
    return tuple(out)


def _merge_odd(o1, o2):
    """Merge two sorted odd tuples; return (merged, sign) or None if a
    generator repeats (the term is annihilated)."""
    if not o1:
        return o2, 1
    if not o2:
        return o1, 1
    out = []
    i = j = 0
    n1, n2 = len(o1), len(o2)
    inversions = 0
    while i < n1 and j < n2:
        k1 = o1[i]
        k2 = o2[j]
        if k1 == k2:
            return None
        if k1 < k2:
            out.append(k1)
            i += 1
        else:
            out.append(k2)
            j += 1
            inversions += n1 - i
    out.extend(o1[i:])
    out.extend(o2[j:])
    return tuple(out), (-1 if inversions & 1 else 1)


def _sort_odd(keys: Iterable[GenKey]):
    """Sort odd keys, returning (tuple, sign) or None on a repeat."""
    ks = list(keys)
    sign = 1
    # insertion sort with inversion parity; lists here are short
    for i in range(1, len(ks)):
        j = i
        while j > 0 and ks[j - 1] > ks[j]:
            ks[j - 1], ks[j] = ks[j], ks[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(ks)):
        if ks[i - 1] == ks[i]:
            return None
    return tuple(ks), sign


class GradedElement:
    """An element of the free graded-commutative algebra over Q.

    Immutable by convention: no public method mutates ``terms``.  Zero is the
    empty term map; equal elements have identical term maps.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms: dict[Monomial, Fraction] = dict(terms) if terms else {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "GradedElement":
        return cls()

    @classmethod
    def const(cls, q) -> "GradedElement":
        q = Fraction(q)
        return cls({_ONE_MONO: q}) if q else cls()

    @classmethod
    def gen(cls, key: GenKey) -> "GradedElement":
        if is_odd_gen(key):
            return cls({((), (key,)): Fraction(1)})
        return cls({(((key, 1),), ()): Fraction(1)})

    @classmethod
    def monomial(cls, even=(), odd=(), coeff=1) -> "GradedElement":
        coeff = Fraction(coeff)
        if not coeff:
            return cls()
        ev = tuple(sorted((k, e) for k, e in even if e))
        srt = _sort_odd(odd)
        if srt is None:
            return cls()
        od, sign = srt
        return cls({(ev, od): coeff * sign})

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def scalar_part(self) -> Fraction:
        return self.terms.get(_ONE_MONO, Fraction(0))

    def degrees(self) -> set[int]:
        return {_mono_degree(m) for m in self.terms}

    def degree(self) -> int:
        """Top degree (0 for the zero element)."""
        return max(self.degrees(), default=0)

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def is_homogeneous_of(self, k: int) -> bool:
        return all(_mono_degree(m) == k for m in self.terms)

    def generators(self) -> set[GenKey]:
        out: set[GenKey] = set()
        for even, odd in self.terms:
            out.update(k for k, _ in even)
            out.update(odd)
        return out

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, GradedElement):
            other = GradedElement.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return GradedElement(out)

    __radd__ = __add__

    def __neg__(self):
        return GradedElement({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GradedElement):
            other = GradedElement.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return GradedElement.const(other) + (-self)

    def scale(self, q) -> "GradedElement":
        q = Fraction(q)
        if not q:
            return GradedElement()
        return GradedElement({m: c * q for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, GradedElement):
            return self.scale(other)
        return self.mul(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(Fraction(1, 1) / Fraction(other))

    def mul(self, other: "GradedElement", cap: int | None = None) -> "GradedElement":
        """Product, optionally dropping all terms of degree > ``cap``."""
        if not self.terms or not other.terms:
            return GradedElement()
        out: dict[Monomial, Fraction] = {}
        left = list(self.terms.items())
        right = list(other.terms.items())
        if cap is not None:
            ldeg = [(_mono_degree(m), m, c) for m, c in left]
            rdeg = [(_mono_degree(m), m, c) for m, c in right]
            ldeg.sort(key=lambda t: t[0])
            rdeg.sort(key=lambda t: t[0])
        else:
            ldeg = [(0, m, c) for m, c in left]
            rdeg = [(0, m, c) for m, c in right]
        for d1, (ev1, od1), c1 in ldeg:
            for d2, (ev2, od2), c2 in rdeg:
                if cap is not None and d1 + d2 > cap:
                    break
                merged = _merge_odd(od1, od2)
                if merged is None:
                    continue
                od, sign = merged
                mono = (_merge_even(ev1, ev2), od)
                c = c1 * c2 * sign
                s = out.get(mono)
                if s is None:
                    out[mono] = c
                else:
                    s = s + c
                    if s:
                        out[mono] = s
                    else:
                        del out[mono]
        return GradedElement(out)

    def __pow__(self, e: int):
        if e < 0:
            raise AlgebraError("negative powers are not defined in the kernel")
        result = GradedElement.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, GradedElement):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == GradedElement.const(other)
        return NotImplemented

    __hash__ = None  # mutable container inside; not hashable

    # -- graded structure ---------------------------------------------------

    def grade_component(self, k: int) -> "GradedElement":
        """The degree-``k`` homogeneous part."""
        return GradedElement(
            {m: c for m, c in self.terms.items() if _mono_degree(m) == k}
        )

    def truncate_degree(self, cap: int) -> "GradedElement":
        return GradedElement(
            {m: c for m, c in self.terms.items() if _mono_degree(m) <= cap}
        )

    def odd_coefficient(self, keys: list[GenKey]) -> "GradedElement":
        """Coefficient of the product of the listed odd generators.

        Signs follow the Koszul rule for moving each listed generator, in the
        listed order, to the front of the remaining exterior factors.  The
        result contains none of the listed generators.
        """
        for k in keys:
            if not is_odd_gen(k):
                raise AlgebraError(f"{name_of(k)} is not an odd generator")
        want = set(keys)
        if len(want) != len(keys):
            raise AlgebraError("repeated generator in odd_coefficient")
        out: dict[Monomial, Fraction] = {}
        for (even, odd), c in self.terms.items():
            if not want.issubset(odd):
                continue
            rest = list(odd)
            sign = 1
            for k in keys:
                i = rest.index(k)
                if i & 1:
                    sign = -sign
                del rest[i]
            mono = (even, tuple(rest))
            coeff = c * sign
            s = out.get(mono)
            if s is None:
                out[mono] = coeff
            else:
                s = s + coeff
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return GradedElement(out)

    def substitute(
        self,
        assignment: Mapping[GenKey, "GradedElement"],
        cap: int | None = None,
    ) -> "GradedElement":
        """Apply the algebra homomorphism extending ``assignment``.

        Generators absent from the assignment map to themselves.  Every image
        must be homogeneous of the generator's degree and parity; a violation
        is rejected naming the offending generator.
        """
        for key, img in assignment.items():
            d = degree_of(key)
            if not img.is_homogeneous_of(d):
                raise AlgebraError(
                    f"substitution image of {name_of(key)} is not homogeneous "
                    f"of degree {d}"
                )
        power_cache: dict[tuple[GenKey, int], GradedElement] = {}

        def img_power(key: GenKey, e: int) -> GradedElement:
            got = power_cache.get((key, e))
            if got is None:
                base = assignment[key]
                got = base
                for _ in range(e - 1):
                    got = got.mul(base, cap)
                power_cache[(key, e)] = got
            return got

        total = GradedElement()
        for (even, odd), c in self.terms.items():
            untouched_even = []
            acc = GradedElement.const(c)
            for k, e in even:
                if k in assignment:
                    acc = acc.mul(img_power(k, e), cap)
                    if not acc:
                        break
                else:
                    untouched_even.append((k, e))
            if not acc:
                continue
            # odd factors must be multiplied in stored order to keep signs
            ok = True
            for k in odd:
                factor = assignment.get(k)
                if factor is None:
                    factor = GradedElement.gen(k)
                acc = acc.mul(factor, cap)
                if not acc:
                    ok = False
                    break
            if not ok:
                continue
            if untouched_even:
                acc = acc.mul(
                    GradedElement({(tuple(untouched_even), ()): Fraction(1)}), cap
                )
            total = total + acc
        return total

    def derivative(self, key: GenKey) -> "GradedElement":
        """Formal partial derivative with respect to an even generator."""
        if is_odd_gen(key):
            raise AlgebraError("derivative only defined for even generators")
        out: dict[Monomial, Fraction] = {}
        for (even, odd), c in self.terms.items():
            for i, (k, e) in enumerate(even):
                if k != key:
                    continue
                if e == 1:
                    new_even = even[:i] + even[i + 1 :]
                else:
                    new_even = even[:i] + ((k, e - 1),) + even[i + 1 :]
                mono = (new_even, odd)
                coeff = c * e
                s = out.get(mono)
                if s is None:
                    out[mono] = coeff
                else:
                    s = s + coeff
                    if s:
                        out[mono] = s
                    else:
                        del out[mono]
                break
        return GradedElement(out)

    # -- presentation --------------------------------------------------------

    def sorted_terms(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda t: t[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (even, odd), c in self.sorted_terms():
            factors = [
                name_of(k) + (f"^{e}" if e > 1 else "") for k, e in even
            ] + [name_of(k) for k in odd]
            body = "*".join(factors) if factors else "1"
            if c == 1 and factors:
                bits.append(body)
            elif c == -1 and factors:
                bits.append(f"-{body}")
            else:
                bits.append(f"{c}*{body}" if factors else f"{c}")
        out = bits[0]
        for b in bits[1:]:
            out += f" - {b[1:]}" if b.startswith("-") else f" + {b}"
        return out


def xi(i: int, j: int, g: int, p: int = 0, q: int | None = None) -> GradedElement:
    """The exterior quadratic sum_{s=1..g} b_i^s b_j^{s+g} (with optional
    stratum parts p, q for the two factors)."""
    if q is None:
        q = p
    total = GradedElement()
    for s in range(1, g + 1):
        total = total + GradedElement.gen(b_gen(i, s, p)) * GradedElement.gen(
            b_gen(j, s + g, q)
        )
    return total


# ---------------------------------------------------------------------------
# Canonical JSON serialisation.
# ---------------------------------------------------------------------------

def element_to_json(x: GradedElement) -> list[dict]:
    out = []
    for (even, odd), c in x.sorted_terms():
        out.append(
            {
                "coeff": f"{c.numerator}/{c.denominator}"
                if c.denominator != 1
                else f"{c.numerator}",
                "even": [[name_of(k), e] for k, e in even],
                "odd": [name_of(k) for k in odd],
            }
        )
    return out


def element_from_json(data: list[dict]) -> GradedElement:
    total = GradedElement()
    for term in data:
        even = tuple((key_from_name(n), e) for n, e in term["even"])
        odd = tuple(key_from_name(n) for n in term["odd"])
        total = total + GradedElement({(even, odd): Fraction(term["coeff"])})
    return total
