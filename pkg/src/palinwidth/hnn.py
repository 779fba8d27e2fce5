"""Words in an HNN extension: Britton reduction, signatures, the quasi-homomorphism.

A word is an alternating sequence g0 t^e1 g1 ... t^en gn with base-group letters
g_i (identity permitted) and stable-letter exponents e_i = +-1.  Reduction
eliminates pinches t^-1 g t (g in A) and t g t^-1 (g in B) through the
associated isomorphism; the surviving exponent sequence is an invariant of the
group element and drives all segment statistics.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .counting import (LowerBoundCertificate, PropertyReport, SegmentCounts,
                       hnn_lower_bound, run_counts)
from .errors import DomainError, InvariantFailure, UsageError
from .groups import Group, Iso, Subgroup


@dataclass(frozen=True)
class HnnPresentation:
    """G* = < base, t | t^-1 a t = phi(a), a in A > with phi: A -> B."""

    base: Group
    A: Subgroup
    B: Subgroup
    phi: Iso
    stable: str = "t"

    def __post_init__(self):
        if self.A.group is not self.base or self.B.group is not self.base:
            raise UsageError("associated subgroups must live in the base group")
        if self.phi.source is not self.A or self.phi.target is not self.B:
            raise UsageError("phi must map A onto B")
        if self.A.is_proper() is False or self.B.is_proper() is False:
            raise UsageError("associated subgroups must be proper")
        if self.stable in self.base.generators:
            raise UsageError("stable letter name collides with a base generator")


@dataclass(frozen=True)
class HnnWord:
    """Alternating word; ``letters`` has one more entry than ``exponents``."""

    letters: Tuple
    exponents: Tuple[int, ...]

    def __post_init__(self):
        if len(self.letters) != len(self.exponents) + 1:
            raise UsageError("need exactly one base letter more than stable letters")
        if any(e not in (1, -1) for e in self.exponents):
            raise UsageError("stable-letter exponents must be +1 or -1")

    @property
    def n_stable(self) -> int:
        return len(self.exponents)


def identity_word(pres: HnnPresentation) -> HnnWord:
    return HnnWord((pres.base.identity,), ())


def base_word(pres: HnnPresentation, g) -> HnnWord:
    return HnnWord((pres.base.check_ref(g),), ())


def make_word(pres: HnnPresentation, letters, exponents) -> HnnWord:
    letters = tuple(pres.base.check_ref(g) for g in letters)
    return HnnWord(letters, tuple(exponents))


def concat(w1: HnnWord, w2: HnnWord, pres: HnnPresentation) -> HnnWord:
    mid = pres.base.multiply(w1.letters[-1], w2.letters[0])
    return HnnWord(w1.letters[:-1] + (mid,) + w2.letters[1:],
                   w1.exponents + w2.exponents)


def inverse(w: HnnWord, pres: HnnPresentation) -> HnnWord:
    inv = pres.base.invert
    return HnnWord(tuple(inv(g) for g in reversed(w.letters)),
                   tuple(-e for e in reversed(w.exponents)))


def _reduce_raw(letters: List, exps: List[int], pres: HnnPresentation):
    """One left-to-right stack pass; cascading pinches collapse at the stack top."""
    mul = pres.base.multiply
    in_a = pres.A.contains
    in_b = pres.B.contains
    fwd = pres.phi.forward
    bwd = pres.phi.backward
    out_g = [letters[0]]
    out_e: List[int] = []
    for i, e in enumerate(exps):
        g = letters[i + 1]
        if out_e and out_e[-1] == -e:
            x = out_g[-1]
            if e == 1:
                if in_a(x):
                    out_e.pop()
                    out_g.pop()
                    out_g[-1] = mul(mul(out_g[-1], fwd(x)), g)
                    continue
            elif in_b(x):
                out_e.pop()
                out_g.pop()
                out_g[-1] = mul(mul(out_g[-1], bwd(x)), g)
                continue
        out_e.append(e)
        out_g.append(g)
    return out_g, out_e


def britton_reduce(w: HnnWord, pres: HnnPresentation) -> HnnWord:
    """Reduced word for the same element; its exponent sequence is the signature."""
    if not w.exponents:
        return w
    gs, es = _reduce_raw(list(w.letters), list(w.exponents), pres)
    return HnnWord(tuple(gs), tuple(es))


def is_reduced(w: HnnWord, pres: HnnPresentation) -> bool:
    for i in range(len(w.exponents) - 1):
        if w.exponents[i] == -1 and w.exponents[i + 1] == 1 and pres.A.contains(w.letters[i + 1]):
            return False
        if w.exponents[i] == 1 and w.exponents[i + 1] == -1 and pres.B.contains(w.letters[i + 1]):
            return False
    return True


def is_trivial(w: HnnWord, pres: HnnPresentation) -> bool:
    r = britton_reduce(w, pres)
    return not r.exponents and pres.base.is_identity(r.letters[0])


def word_equal(w1: HnnWord, w2: HnnWord, pres: HnnPresentation) -> bool:
    return is_trivial(concat(w1, inverse(w2, pres), pres), pres)


def signature(w: HnnWord, pres: HnnPresentation) -> Tuple[int, ...]:
    return britton_reduce(w, pres).exponents


def _inverse_signature(sig: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(-e for e in reversed(sig))


def signature_r_product(w1: HnnWord, w2: HnnWord, pres: HnnPresentation):
    """Cancellation depth r and the product signature, with consistency checks."""
    s1 = signature(w1, pres)
    s2 = signature(w2, pres)
    s12 = signature(concat(w1, w2, pres), pres)
    twice_r = len(s1) + len(s2) - len(s12)
    if twice_r < 0 or twice_r % 2:
        raise InvariantFailure("product signature has impossible length")
    r = twice_r // 2
    if s1[:len(s1) - r] + s2[r:] != s12:
        raise InvariantFailure("product signature is not an r-product of the factors")
    if s1[len(s1) - r:] != _inverse_signature(s2[:r]):
        raise InvariantFailure("cancelled signature blocks are not mutually inverse")
    return r, s12


def segment_counts(sig: Tuple[int, ...]) -> SegmentCounts:
    """p_k / m_k counts of maximal constant-sign runs of exact length k."""
    return run_counts(sig)


def delta(w: HnnWord, pres: HnnPresentation) -> int:
    """Sum of the run-count parities r_k over the reduced word's signature."""
    return run_counts(signature(w, pres)).delta


def reverse_word(w: HnnWord) -> HnnWord:
    """Letters in reverse order, each letter unchanged."""
    return HnnWord(tuple(reversed(w.letters)), tuple(reversed(w.exponents)))


def is_group_palindrome(w: HnnWord, pres: HnnPresentation) -> bool:
    return word_equal(w, reverse_word(w), pres)


@dataclass(frozen=True)
class SymmetricForm:
    """Palindrome rewritten with mirrored halves around a corrected middle letter.

    ``word`` equals the input element and has a palindromic exponent sequence;
    ``correction`` is the element x of A u B absorbed into the middle letter
    (identity when no stable letters are present).
    """

    word: HnnWord
    correction: object
    middle: object


def symmetrize_palindrome(w: HnnWord, pres: HnnPresentation) -> SymmetricForm:
    if not is_group_palindrome(w, pres):
        raise DomainError("not a group palindrome")
    red = britton_reduce(w, pres)
    n = red.n_stable
    base = pres.base
    if n == 0:
        return SymmetricForm(red, base.identity, red.letters[0])
    k = n // 2
    one = base.identity
    # suffix = t^(e_k) g_{k-1} ... g_1 t^(e_1) g_0, the mirror image of the prefix
    suffix = HnnWord((one,) + tuple(reversed(red.letters[:k])),
                     tuple(reversed(red.exponents[:k])))
    if n % 2 == 0:
        head = HnnWord(red.letters[:k] + (one,), red.exponents[:k])
    else:
        # the middle block is  g_k t^(e_{k+1}) middle  between the mirrored halves
        head = HnnWord(red.letters[:k + 1] + (one,), red.exponents[:k + 1])
    solved = britton_reduce(
        concat(concat(inverse(head, pres), red, pres), inverse(suffix, pres), pres), pres)
    if solved.n_stable != 0:
        raise InvariantFailure("palindrome middle did not reduce to a base letter")
    middle = solved.letters[0]
    x = base.multiply(middle, base.invert(red.letters[k]))
    if not (pres.A.contains(x) or pres.B.contains(x)):
        raise InvariantFailure("middle correction fell outside both associated subgroups")
    sym = concat(concat(head, base_word(pres, middle), pres), suffix, pres)
    return SymmetricForm(sym, x, middle)


def pal_lower_bound(w: HnnWord, pres: HnnPresentation) -> LowerBoundCertificate:
    return hnn_lower_bound(delta(w, pres), is_trivial(w, pres))


def witness(n: int, pres: HnnPresentation, filler) -> HnnWord:
    """Word number n of the unbounded-delta family, spelled with one filler letter.

    The signature concatenates, for j = 1..n, three runs of length j with signs
    s_j, -s_j, s_j where s_j alternates starting positive; with the filler
    outside A and B every pinch is blocked, so the word is reduced and its
    delta is exactly n.
    """
    if n < 1:
        raise UsageError(f"witness index must be >= 1, got {n}")
    filler = pres.base.check_ref(filler)
    if pres.A.contains(filler) or pres.B.contains(filler):
        raise DomainError("filler letter must lie outside both associated subgroups")
    exps: List[int] = []
    for j in range(1, n + 1):
        s = 1 if j % 2 else -1
        exps.extend([s] * j)
        exps.extend([-s] * j)
        exps.extend([s] * j)
    letters = tuple([filler] * (len(exps) + 1))
    return HnnWord(letters, tuple(exps))


# --- word grammar -----------------------------------------------------------

def parse_word(text: str, pres: HnnPresentation) -> HnnWord:
    """Tokens separated by whitespace or '*': t, t^k, gen, gen^k; '' is the identity."""
    base = pres.base
    letters = [base.identity]
    exps: List[int] = []
    for token in text.replace("*", " ").split():
        name, exp = token, 1
        if "^" in token:
            name, _, raw = token.partition("^")
            try:
                exp = int(raw)
            except ValueError:
                raise UsageError(f"bad exponent in token {token!r}")
        if name == pres.stable:
            sign = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                exps.append(sign)
                letters.append(base.identity)
        else:
            letters[-1] = base.multiply(letters[-1], base.element_from_power(name, exp))
    return HnnWord(tuple(letters), tuple(exps))


def serialize_word(w: HnnWord, pres: HnnPresentation) -> str:
    """Deterministic inverse of the grammar; stable runs over identity letters collapse."""
    base = pres.base
    parts: List[str] = []
    run = 0

    def flush():
        nonlocal run
        if run:
            parts.append(pres.stable if run == 1 else f"{pres.stable}^{run}")
            run = 0

    g0 = base.format_element(w.letters[0])
    if g0:
        parts.append(g0)
    for e, g in zip(w.exponents, w.letters[1:]):
        if run and (e > 0) != (run > 0):
            flush()
        run += e
        letter = base.format_element(g)
        if letter:
            flush()
            parts.append(letter)
    flush()
    return " ".join(parts)


# --- randomized property suites ---------------------------------------------

def random_word(pres: HnnPresentation, rng: random.Random, max_stable: int,
                value_bound: int = 3) -> HnnWord:
    n = rng.randint(0, max_stable)
    letters = tuple(pres.base.sample(rng, value_bound) for _ in range(n + 1))
    exps = tuple(rng.choice((1, -1)) for _ in range(n))
    return HnnWord(letters, exps)


def _random_subgroup_element(sub: Subgroup, pres: HnnPresentation, rng: random.Random):
    from .groups import IndexSubgroup
    elems = sub.elements()
    if elems is not None:
        return rng.choice(elems)
    if isinstance(sub, IndexSubgroup):
        return sub.modulus * rng.randint(-3, 3)
    raise UsageError("cannot sample from this subgroup")


def insert_random_pinches(w: HnnWord, pres: HnnPresentation, rng: random.Random,
                          count: int) -> HnnWord:
    """Respell the word by splicing in pinches t^-1 a t (a in A) or t b t^-1 (b in B)."""
    letters = list(w.letters)
    exps = list(w.exponents)
    for _ in range(count):
        pos = rng.randint(0, len(exps))
        if rng.random() < 0.5:
            a = _random_subgroup_element(pres.A, pres, rng)
            letters.insert(pos + 1, a)
            exps.insert(pos, 1)
            exps.insert(pos, -1)
        else:
            b = _random_subgroup_element(pres.B, pres, rng)
            letters.insert(pos + 1, b)
            exps.insert(pos, -1)
            exps.insert(pos, 1)
    return HnnWord(tuple(letters), tuple(exps))


def verify_quasimorphism(pres: HnnPresentation, trials: int = 10_000,
                         max_len: int = 40, seed: int = 0,
                         pool_size: int = 2048) -> PropertyReport:
    """Check delta(g h) <= delta(g) + delta(h) + 6 over seeded random pairs."""
    rng = random.Random(seed)
    pool = [random_word(pres, rng, max_len) for _ in range(pool_size)]
    deltas = [delta(w, pres) for w in pool]
    violations = 0
    max_defect = None
    for _ in range(trials):
        i = rng.randrange(pool_size)
        j = rng.randrange(pool_size)
        d = delta(concat(pool[i], pool[j], pres), pres) - deltas[i] - deltas[j]
        if max_defect is None or d > max_defect:
            max_defect = d
        if d > 6:
            violations += 1
    return PropertyReport("hnn-quasimorphism", trials, violations,
                          (max_defect if max_defect is not None else 0,))


def verify_signature_welldefined(pres: HnnPresentation, trials: int = 10_000,
                                 max_len: int = 12, seed: int = 0) -> PropertyReport:
    """Signatures are unchanged by random pinch-inserted respellings."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        w = random_word(pres, rng, max_len)
        respelt = insert_random_pinches(w, pres, rng, rng.randint(1, 5))
        if signature(w, pres) != signature(respelt, pres):
            violations += 1
    return PropertyReport("hnn-signature-welldefined", trials, violations)


def verify_inverse_antisymmetry(pres: HnnPresentation, trials: int = 10_000,
                                max_len: int = 25, seed: int = 0) -> PropertyReport:
    """d_k(g) + d_k(g^-1) = 0 for every k."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        w = random_word(pres, rng, max_len)
        c = run_counts(signature(w, pres))
        ci = run_counts(signature(inverse(w, pres), pres))
        for k in set(c.support()) | set(ci.support()):
            if c.d(k) + ci.d(k) != 0:
                violations += 1
                break
    return PropertyReport("hnn-inverse-antisymmetry", trials, violations)
