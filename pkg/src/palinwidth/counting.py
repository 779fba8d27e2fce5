"""Segment statistics feeding the quasi-homomorphism and its lower-bound certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple


@dataclass(frozen=True)
class SegmentCounts:
    """Counts of positively and negatively oriented segments by length class k.

    ``plus[k]`` and ``minus[k]`` hold p_k and m_k; d_k = p_k - m_k and
    r_k = |d_k| mod 2 are derived.  Both maps are finitely supported.
    """

    plus: Dict[int, int] = field(default_factory=dict)
    minus: Dict[int, int] = field(default_factory=dict)

    def p(self, k: int) -> int:
        return self.plus.get(k, 0)

    def m(self, k: int) -> int:
        return self.minus.get(k, 0)

    def d(self, k: int) -> int:
        return self.p(k) - self.m(k)

    def r(self, k: int) -> int:
        return abs(self.d(k)) % 2

    def support(self):
        return sorted(set(self.plus) | set(self.minus))

    @property
    def delta(self) -> int:
        return sum(self.r(k) for k in self.support())

    @property
    def weighted_total(self) -> int:
        """Sum of k * (p_k + m_k); equals the signature length for run counts."""
        return sum(k * (self.p(k) + self.m(k)) for k in self.support())


def run_counts(signature: Sequence[int]) -> SegmentCounts:
    """Decompose a +-1 sequence into maximal constant-sign runs of exact length k."""
    plus: Dict[int, int] = {}
    minus: Dict[int, int] = {}
    i = 0
    n = len(signature)
    while i < n:
        j = i
        while j < n and signature[j] == signature[i]:
            j += 1
        k = j - i
        if signature[i] == 1:
            plus[k] = plus.get(k, 0) + 1
        else:
            minus[k] = minus.get(k, 0) + 1
        i = j
    return SegmentCounts(plus, minus)


HNN_INEQUALITY = "delta <= 7k-6"
AMALGAM_INEQUALITY = "delta <= 12k-9"


@dataclass(frozen=True)
class LowerBoundCertificate:
    """Certified lower bound on the number of group-palindrome factors.

    Any expression of the element as a product of k group-palindromes has
    k >= bound; the bound also applies to word-palindromic length since every
    word-palindrome is a group-palindrome.
    """

    delta: int
    bound: int
    inequality: str

    def as_dict(self):
        return {"delta": self.delta, "bound": self.bound, "inequality": self.inequality}


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def hnn_lower_bound(delta: int, trivial: bool) -> LowerBoundCertificate:
    bound = 0 if trivial else max(1, _ceil_div(delta + 6, 7))
    return LowerBoundCertificate(delta, bound, HNN_INEQUALITY)


def amalgam_lower_bound(delta: int, trivial: bool) -> LowerBoundCertificate:
    bound = 0 if trivial else max(1, _ceil_div(delta + 9, 12))
    return LowerBoundCertificate(delta, bound, AMALGAM_INEQUALITY)


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of a randomized or exhaustive property suite."""

    name: str
    trials: int
    violations: int
    max_defect: Tuple[int, ...] = ()
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def as_dict(self):
        out = {"name": self.name, "trials": self.trials, "violations": self.violations,
               "ok": self.ok}
        if self.max_defect:
            out["max_defect"] = self.max_defect[0]
        if self.detail:
            out["detail"] = self.detail
        return out
