"""Truncated power/Laurent series in one formal variable t.

Coefficients live in any ring with GradedElement-style arithmetic (the base
kernel or the splitting algebra).  Every series records the window [lo, hi]
of powers on which its coefficients are exactly known, together with two
flags saying whether everything below lo / above hi is exactly zero.  All
arithmetic computes the largest window on which the result is exact;
extraction outside the window is an error, never a silent zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .algebra import GradedElement

__all__ = ["SeriesError", "TruncatedSeries"]


class SeriesError(ValueError):
    """Raised on window violations and malformed series operations."""


def _is_zero(x) -> bool:
    return x.is_zero() if hasattr(x, "is_zero") else not x


class TruncatedSeries:
    """A finite window of powers of t with ring-element coefficients.

    ``below_exact`` asserts that all powers below ``lo`` vanish (a genuine
    power series); ``above_exact`` that all powers above ``hi`` vanish (a
    polynomial, or a series expanded at t = infinity).  ``grading``, when
    set, is a pair (slope, offset) promising that the coefficient of t^k is
    homogeneous of degree slope*2k + offset; a plain Chern series carries
    (+1, 0).
    """

    __slots__ = ("lo", "hi", "coeffs", "below_exact", "above_exact", "grading", "zero")

    def __init__(
        self,
        lo: int,
        hi: int,
        coeffs: dict,
        below_exact: bool = True,
        above_exact: bool = False,
        grading: tuple[int, int] | None = None,
        zero=None,
    ):
        if lo > hi:
            raise SeriesError(f"empty series window [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.coeffs = {k: v for k, v in coeffs.items() if lo <= k <= hi and not _is_zero(v)}
        self.below_exact = below_exact
        self.above_exact = above_exact
        self.grading = grading
        self.zero = zero if zero is not None else GradedElement.zero()
        if grading is not None:
            slope, offset = grading
            for k, v in self.coeffs.items():
                if not v.is_homogeneous_of(slope * 2 * k + offset):
                    raise SeriesError(
                        f"coefficient of t^{k} violates the recorded grading"
                    )

    # -- constructors --------------------------------------------------------

    @classmethod
    def one(cls, hi: int, zero=None, grading=(1, 0)) -> "TruncatedSeries":
        z = zero if zero is not None else GradedElement.zero()
        one = GradedElement.const(1) if isinstance(z, GradedElement) else z + 1
        return cls(0, hi, {0: one}, True, False, grading, z)

    @classmethod
    def from_coeff(cls, x, power: int, hi: int, zero=None) -> "TruncatedSeries":
        """The monomial series x * t^power, exact everywhere, windowed to hi."""
        return cls(min(0, power), hi, {power: x}, True, True, None, zero)

    @classmethod
    def polynomial(cls, coeffs: dict, zero=None, grading=None) -> "TruncatedSeries":
        lo = min(min(coeffs, default=0), 0)
        hi = max(max(coeffs, default=0), 0)
        return cls(lo, hi, coeffs, True, True, grading, zero)

    # -- window bookkeeping ---------------------------------------------------

    @property
    def sup_lo(self):
        """Provable lower bound of the support (None means unbounded)."""
        return self.lo if self.below_exact else None

    @property
    def sup_hi(self):
        return self.hi if self.above_exact else None

    def coeff(self, k: int):
        """The coefficient of t^k; k must lie in the guaranteed window."""
        if k < self.lo and not self.below_exact:
            raise SeriesError(f"t^{k} is below the valid window [{self.lo},{self.hi}]")
        if k > self.hi and not self.above_exact:
            raise SeriesError(f"t^{k} is above the valid window [{self.lo},{self.hi}]")
        return self.coeffs.get(k, self.zero)

    def support(self):
        return sorted(k for k, v in self.coeffs.items() if not _is_zero(v))

    def is_zero_on_window(self) -> bool:
        return not self.coeffs

    def window_truncate(self, lo=None, hi=None) -> "TruncatedSeries":
        lo = self.lo if lo is None else max(lo, self.lo if not self.below_exact else lo)
        hi = self.hi if hi is None else min(hi, self.hi if not self.above_exact else hi)
        if lo < self.lo and not self.below_exact:
            raise SeriesError("cannot widen window below known coefficients")
        if hi > self.hi and not self.above_exact:
            raise SeriesError("cannot widen window above known coefficients")
        return TruncatedSeries(
            lo,
            hi,
            {k: v for k, v in self.coeffs.items() if lo <= k <= hi},
            self.below_exact and lo <= self.lo,
            self.above_exact and hi >= self.hi,
            self.grading,
            self.zero,
        )

    def map_coeffs(self, fn: Callable, grading=None, zero=None) -> "TruncatedSeries":
        return TruncatedSeries(
            self.lo,
            self.hi,
            {k: fn(v) for k, v in self.coeffs.items()},
            self.below_exact,
            self.above_exact,
            grading,
            zero if zero is not None else self.zero,
        )

    # -- additive structure ----------------------------------------------------

    def __neg__(self):
        return TruncatedSeries(
            self.lo,
            self.hi,
            {k: -v for k, v in self.coeffs.items()},
            self.below_exact,
            self.above_exact,
            self.grading,
            self.zero,
        )

    def _add_window(self, other):
        lo_candidates = []
        if not self.below_exact:
            lo_candidates.append(self.lo)
        if not other.below_exact:
            lo_candidates.append(other.lo)
        lo = max(lo_candidates) if lo_candidates else min(self.lo, other.lo)
        hi_candidates = []
        if not self.above_exact:
            hi_candidates.append(self.hi)
        if not other.above_exact:
            hi_candidates.append(other.hi)
        hi = min(hi_candidates) if hi_candidates else max(self.hi, other.hi)
        return lo, hi, self.below_exact and other.below_exact, self.above_exact and other.above_exact

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError("series can only be added to series")
        lo, hi, be, ae = self._add_window(other)
        if lo > hi:
            raise SeriesError("sum has an empty exact window")
        out = {}
        for k in range(lo, hi + 1):
            v = self.coeffs.get(k, None)
            w = other.coeffs.get(k, None)
            if v is None and w is None:
                continue
            s = w if v is None else (v if w is None else v + w)
            if not _is_zero(s):
                out[k] = s
        grading = self.grading if self.grading == other.grading else None
        return TruncatedSeries(lo, hi, out, be, ae, grading, self.zero)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q) -> "TruncatedSeries":
        q = Fraction(q)
        return self.map_coeffs(lambda v: v.scale(q), self.grading)

    def coeff_mul(self, x, cap=None) -> "TruncatedSeries":
        """Multiply every coefficient by a fixed ring element."""
        out = {k: v.mul(x, cap) if hasattr(v, "mul") else v * x for k, v in self.coeffs.items()}
        return TruncatedSeries(
            self.lo, self.hi, out, self.below_exact, self.above_exact, None, self.zero
        )

    # -- multiplicative structure -----------------------------------------------

    def _mul_window(self, other):
        lo_bounds = []
        hi_bounds = []
        if self.below_exact and other.below_exact:
            lo_bounds.append(self.lo + other.lo)
        else:
            if not self.below_exact:
                if other.sup_hi is None:
                    raise SeriesError("product window is empty (unbounded tails)")
                lo_bounds.append(self.lo + other.sup_hi)
            if not other.below_exact:
                if self.sup_hi is None:
                    raise SeriesError("product window is empty (unbounded tails)")
                lo_bounds.append(other.lo + self.sup_hi)
            if self.below_exact:
                lo_bounds.append(self.lo + other.lo)
            if other.below_exact:
                lo_bounds.append(other.lo + self.lo)
        if self.above_exact and other.above_exact:
            hi_bounds.append(self.hi + other.hi)
        else:
            if not self.above_exact:
                if other.sup_lo is None:
                    raise SeriesError("product window is empty (unbounded tails)")
                hi_bounds.append(self.hi + other.sup_lo)
            if not other.above_exact:
                if self.sup_lo is None:
                    raise SeriesError("product window is empty (unbounded tails)")
                hi_bounds.append(other.hi + self.sup_lo)
        lo = max(lo_bounds)
        hi = min(hi_bounds)
        be = self.below_exact and other.below_exact
        ae = self.above_exact and other.above_exact
        return lo, hi, be, ae

    def __mul__(self, other, cap: int | None = None):
        if not isinstance(other, TruncatedSeries):
            raise TypeError("use scale()/coeff_mul() for non-series factors")
        lo, hi, be, ae = self._mul_window(other)
        if lo > hi:
            raise SeriesError("product has an empty exact window")
        out: dict = {}
        for i, v in self.coeffs.items():
            for j, w in other.coeffs.items():
                k = i + j
                if k < lo or k > hi:
                    continue
                p = v.mul(w, cap) if hasattr(v, "mul") else v * w
                if _is_zero(p):
                    continue
                s = out.get(k)
                out[k] = p if s is None else s + p
        if self.grading and other.grading and self.grading[0] == other.grading[0]:
            grading = (self.grading[0], self.grading[1] + other.grading[1])
        else:
            grading = None
        return TruncatedSeries(lo, hi, out, be, ae, grading, self.zero)

    def mul(self, other, cap=None):
        return self.__mul__(other, cap)

    def shift_power(self, m: int) -> "TruncatedSeries":
        """Multiply by t^m."""
        grading = None
        if self.grading:
            grading = (self.grading[0], self.grading[1] - self.grading[0] * 2 * m)
        return TruncatedSeries(
            self.lo + m,
            self.hi + m,
            {k + m: v for k, v in self.coeffs.items()},
            self.below_exact,
            self.above_exact,
            grading,
            self.zero,
        )

    def reverse(self) -> "TruncatedSeries":
        """Substitute t -> 1/t (swaps the two window ends)."""
        grading = None
        if self.grading:
            grading = (-self.grading[0], self.grading[1])
        return TruncatedSeries(
            -self.hi,
            -self.lo,
            {-k: v for k, v in self.coeffs.items()},
            self.above_exact,
            self.below_exact,
            grading,
            self.zero,
        )

    def inverse(self, cap: int | None = None) -> "TruncatedSeries":
        """Invert a series whose lowest supported coefficient is a nonzero
        rational multiple of 1 (requires below_exact)."""
        if not self.below_exact:
            raise SeriesError("inverse needs a series with known bottom end")
        supp = self.support()
        if not supp:
            raise SeriesError("cannot invert zero")
        m = supp[0]
        c0 = self.coeffs[m]
        q = c0.scalar_part() if hasattr(c0, "scalar_part") else Fraction(c0)
        if _is_zero(c0) or not c0.is_homogeneous_of(0) or q == 0:
            raise SeriesError("inverse needs an invertible scalar leading coefficient")
        # x = c0 t^m (1 + u); compute (1+u)^{-1} by geometric series
        norm = self.shift_power(-m).scale(Fraction(1, 1) / q)
        hi = norm.hi
        one = TruncatedSeries.one(hi, self.zero, None)
        u = norm - one
        acc = TruncatedSeries.one(hi, self.zero, None)
        term = TruncatedSeries.one(hi, self.zero, None)
        order = 1
        while order <= hi and not term.is_zero_on_window():
            term = (-term * u).window_truncate(0, hi)
            acc = acc + term
            order = min(term.support(), default=hi + 1)
        out = acc.scale(Fraction(1, 1) / q).shift_power(-m)
        if cap is not None:
            out = out.window_truncate(hi=cap)
        if self.grading:
            out.grading = (self.grading[0], -self.grading[1])
        return out

    def __pow__(self, e: int):
        if e >= 0:
            result = None
            base = self
            k = e
            if k == 0:
                return TruncatedSeries.one(self.hi, self.zero, None)
            while k:
                if k & 1:
                    result = base if result is None else result * base
                k >>= 1
                if k:
                    base = base * base
            return result
        return self.inverse() ** (-e)

    # -- calculus ----------------------------------------------------------------

    def derivative(self) -> "TruncatedSeries":
        out = {}
        for k, v in self.coeffs.items():
            if k != 0:
                out[k - 1] = v.scale(k)
        grading = None
        if self.grading:
            grading = (self.grading[0], self.grading[1] + self.grading[0] * 2)
        return TruncatedSeries(
            self.lo - 1,
            self.hi - 1,
            out,
            self.below_exact,
            self.above_exact,
            grading,
            self.zero,
        )

    def integrate(self) -> "TruncatedSeries":
        """Termwise antiderivative with zero constant term.

        The coefficient of t^-1 must be exactly zero; a nonzero residue is
        rejected with the offending coefficient reported.
        """
        if self.lo > -1 and not self.below_exact:
            raise SeriesError("window does not reach t^-1; residue unknown")
        res = self.coeffs.get(-1)
        if res is not None and not _is_zero(res):
            raise SeriesError(f"nonzero residue at t^-1: {res!r}")
        out = {}
        for k, v in self.coeffs.items():
            if k == -1:
                continue
            out[k + 1] = v.scale(Fraction(1, k + 1))
        grading = None
        if self.grading:
            grading = (self.grading[0], self.grading[1] - self.grading[0] * 2)
        return TruncatedSeries(
            self.lo + 1,
            self.hi + 1,
            out,
            self.below_exact,
            self.above_exact,
            grading,
            self.zero,
        )

    def exp(self, nilpotency_bound: int = 64) -> "TruncatedSeries":
        """exp of a series whose t^0 coefficient is zero or nilpotent.

        The nilpotency order of the constant term is discovered by direct
        powering; exceeding ``nilpotency_bound`` is an error.
        """
        c0 = self.coeffs.get(0)
        positive = TruncatedSeries(
            self.lo,
            self.hi,
            {k: v for k, v in self.coeffs.items() if k != 0},
            self.below_exact,
            self.above_exact,
            None,
            self.zero,
        )
        if min(positive.support(), default=1) < 1:
            raise SeriesError("exp needs a series supported in positive powers "
                              "apart from a nilpotent constant term")
        hi = self.hi
        acc = TruncatedSeries.one(hi, self.zero, None)
        term = TruncatedSeries.one(hi, self.zero, None)
        m = 1
        while not term.is_zero_on_window():
            term = (term * positive).window_truncate(0, hi).scale(Fraction(1, m))
            if term.is_zero_on_window():
                break
            acc = acc + term
            if min(term.support()) >= hi + 1 - 0:
                pass
            m += 1
            if m > hi + nilpotency_bound:
                break
        if c0 is not None and not _is_zero(c0):
            const = GradedElement.const(1) if isinstance(self.zero, GradedElement) else self.zero + 1
            p = c0
            k = 1
            while not _is_zero(p):
                const = const + p.scale(Fraction(1, 1))
                k += 1
                if k > nilpotency_bound:
                    raise SeriesError("constant term of exp argument is not "
                                      f"nilpotent within bound {nilpotency_bound}")
                p = p.mul(c0).scale(Fraction(1, k)) if hasattr(p, "mul") else p * c0
            acc = acc.coeff_mul(const)
        out = TruncatedSeries(acc.lo, acc.hi, acc.coeffs, True, False, None, self.zero)
        return out

    def log(self) -> "TruncatedSeries":
        """log of a series with constant coefficient exactly 1."""
        c0 = self.coeffs.get(0)
        if c0 is None or not c0.is_homogeneous_of(0) or c0.scalar_part() != 1 or \
                len(c0.terms if hasattr(c0, "terms") else [1]) != 1:
            raise SeriesError("log needs constant coefficient exactly 1")
        hi = self.hi
        one = TruncatedSeries.one(hi, self.zero, None)
        u = self.window_truncate(0, hi) - one
        acc = TruncatedSeries(0, hi, {}, True, False, None, self.zero)
        term = one
        m = 1
        while True:
            term = (term * u).window_truncate(0, hi)
            if term.is_zero_on_window():
                break
            acc = acc + term.scale(Fraction((-1) ** (m + 1), m))
            if min(term.support()) > hi:
                break
            m += 1
            if m > hi + 2:
                break
        return acc

    def shift_variable(self, c, cap_terms: int | None = None) -> "TruncatedSeries":
        """Substitute t -> t - c for a degree-2 even ring element c.

        Requires above_exact (expansion around t = infinity, or a polynomial);
        each output coefficient is a finite sum.
        """
        if not self.above_exact:
            raise SeriesError("variable shift needs an exact top end")
        if not c.is_homogeneous_of(2):
            raise SeriesError("shift element must be homogeneous of degree 2")
        lo, hi = self.lo, self.hi
        out: dict = {}
        # (t - c)^k = sum_m binom(k, m) t^{k-m} (-c)^m, exact per coefficient
        for k, v in self.coeffs.items():
            binom = Fraction(1)
            cpow = None
            m = 0
            while True:
                j = k - m
                if j < lo:
                    break
                contrib = v if m == 0 else v.mul(cpow).scale(binom)
                if not _is_zero(contrib):
                    s = out.get(j)
                    out[j] = contrib if s is None else s + contrib
                m += 1
                binom = binom * Fraction(k - m + 1, m)
                if binom == 0 and k >= 0 and m > k:
                    break
                nc = (-c) if cpow is None else cpow.mul(-c)
                if _is_zero(nc):
                    break
                cpow = nc
        below = self.below_exact and self.lo >= 0 and lo >= 0
        return TruncatedSeries(lo, hi, out, below, True, None, self.zero)

    def pow_graded(self, exponent, hi: int | None = None) -> "TruncatedSeries":
        """(series)^W for a degree-0 ring element W, where the series has
        constant coefficient exactly 1.

        Expands sum_m binom(W, m) u^m with u = series - 1; binom(W, m) is the
        usual falling-factorial polynomial in W, so the result is exact on
        the window whatever the structure of W.
        """
        if not exponent.is_homogeneous_of(0):
            raise SeriesError("graded exponent must have degree 0")
        hi = self.hi if hi is None else hi
        c0 = self.coeffs.get(0)
        if c0 is None or c0.scalar_part() != 1 or not c0.is_homogeneous_of(0) or \
                len(c0.terms if hasattr(c0, "terms") else [1]) != 1:
            raise SeriesError("graded power needs constant coefficient exactly 1")
        one = TruncatedSeries.one(hi, self.zero, None)
        u = self.window_truncate(0, hi) - one
        if min(u.support(), default=1) < 1:
            raise SeriesError("graded power needs u = series - 1 in positive powers")
        acc = one
        upow = one
        binom = None  # W (W-1) ... (W-m+1) / m!
        m = 0
        while True:
            upow = (upow * u).window_truncate(0, hi)
            if upow.is_zero_on_window():
                break
            m += 1
            if binom is None:
                binom = exponent
            else:
                binom = binom.mul(exponent - (m - 1)).scale(Fraction(1, m))
            acc = acc + upow.coeff_mul(binom)
            if min(upow.support()) >= hi:
                break
        return acc

    # -- comparison helpers --------------------------------------------------------

    def same_on_common_window(self, other: "TruncatedSeries") -> bool:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise SeriesError("no common window to compare")
        for k in range(lo, hi + 1):
            v = self.coeffs.get(k)
            w = other.coeffs.get(k)
            if v is None and w is None:
                continue
            if v is None or w is None:
                if not _is_zero(w if v is None else v):
                    return False
                continue
            d = v - w
            if not _is_zero(d):
                return False
        return True

    def __repr__(self):
        flags = f"{'[' if self.below_exact else '('}{self.lo},{self.hi}{']' if self.above_exact else ')'}"
        return f"TruncatedSeries{flags}({len(self.coeffs)} terms)"
