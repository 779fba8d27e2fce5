"""Words in a free product with amalgamation: reduction, a-segments, palindromes.

A word is a sequence of syllables (factor tag, element).  Reduction merges
adjacent same-factor syllables, transports interior subgroup syllables across
the identification, and deletes identities; the surviving syllable count is an
invariant of the group element.  Segment statistics are taken on the special
form relative to a distinguished element a whose double cosets C a C and
C a^-1 C are distinct.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .counting import (LowerBoundCertificate, PropertyReport, SegmentCounts,
                       amalgam_lower_bound)
from .errors import (DomainError, InvariantFailure, UnsupportedCaseError,
                     UsageError)
from .groups import Group, Iso, Subgroup, double_coset_factor, double_cosets_distinct

TAG_A = "A"
TAG_B = "B"


@dataclass(frozen=True)
class Marked:
    """Distinguished element for segment counting, with its double-coset case flag."""

    tag: str
    element: object
    case1: Optional[bool]


@dataclass(frozen=True)
class AmalgamWord:
    """Sequence of (tag, element) syllables; () is the identity."""

    syllables: Tuple[Tuple[str, object], ...]

    def __len__(self):
        return len(self.syllables)


@dataclass(frozen=True)
class AmalgamPresentation:
    """A *_C B with the two copies of C identified by ``identify``."""

    factor_a: Group
    factor_b: Group
    c_in_a: Subgroup
    c_in_b: Subgroup
    identify: Iso
    marked: Optional[Marked] = None

    def __post_init__(self):
        if self.c_in_a.group is not self.factor_a or self.c_in_b.group is not self.factor_b:
            raise UsageError("subgroup copies must live in their factors")
        if self.identify.source is not self.c_in_a or self.identify.target is not self.c_in_b:
            raise UsageError("identify must map the A-copy of C onto the B-copy")
        if self.c_in_a.is_proper() is False or self.c_in_b.is_proper() is False:
            raise UsageError("the amalgamated subgroup must be proper in both factors")
        if self.marked is not None:
            factor, c_sub = self.side(self.marked.tag)
            if c_sub.contains(self.marked.element):
                raise UsageError("the distinguished element must lie outside C")

    def side(self, tag: str) -> Tuple[Group, Subgroup]:
        if tag == TAG_A:
            return self.factor_a, self.c_in_a
        if tag == TAG_B:
            return self.factor_b, self.c_in_b
        raise UsageError(f"factor tag must be 'A' or 'B', got {tag!r}")

    def factor(self, tag: str) -> Group:
        return self.side(tag)[0]

    def c_sub(self, tag: str) -> Subgroup:
        return self.side(tag)[1]

    def transport(self, c, from_tag: str, to_tag: str):
        """Move an element of C between the two factor copies."""
        if from_tag == to_tag:
            return c
        return self.identify.forward(c) if from_tag == TAG_A else self.identify.backward(c)

    def require_case1(self) -> Marked:
        if self.marked is None:
            raise UsageError("presentation has no distinguished element for segment counting")
        if self.marked.case1 is None:
            raise UnsupportedCaseError(
                "cannot decide whether the double cosets of the distinguished element "
                "and its inverse are distinct for this presentation")
        if not self.marked.case1:
            raise UnsupportedCaseError(
                "the double cosets of the distinguished element and its inverse "
                "coincide; segment counting is undefined for this configuration")
        return self.marked


def mark_element(pres_args_tag: str, element, factor: Group, c_sub: Subgroup) -> Marked:
    """Build the distinguished-element record, computing the case flag if decidable."""
    element = factor.check_ref(element)
    flag = double_cosets_distinct(factor, c_sub, element)
    return Marked(pres_args_tag, element, flag)


def identity_word() -> AmalgamWord:
    return AmalgamWord(())


def make_word(pres: AmalgamPresentation, syllables) -> AmalgamWord:
    checked = []
    for tag, elem in syllables:
        factor, _ = pres.side(tag)
        checked.append((tag, factor.check_ref(elem)))
    return AmalgamWord(tuple(checked))


def concat(w1: AmalgamWord, w2: AmalgamWord, pres: AmalgamPresentation) -> AmalgamWord:
    return AmalgamWord(w1.syllables + w2.syllables)


def inverse(w: AmalgamWord, pres: AmalgamPresentation) -> AmalgamWord:
    out = []
    for tag, elem in reversed(w.syllables):
        out.append((tag, pres.factor(tag).invert(elem)))
    return AmalgamWord(tuple(out))


def normal_reduce(w: AmalgamWord, pres: AmalgamPresentation) -> AmalgamWord:
    """Alternating form with no interior C-syllables; empty exactly for the identity.

    Single stack pass: same-factor neighbours merge, identities vanish, and a
    C-valued syllable is transported into the syllable pushed after it (the
    trailing one, if any, into its left neighbour).  Below the stack top every
    entry is already non-C and alternating, so the pass is amortized linear.
    """
    fa, fb = pres.factor_a, pres.factor_b
    ca, cb = pres.c_in_a, pres.c_in_b
    out: List[Tuple[str, object]] = []
    for tag, v in w.syllables:
        factor = fa if tag == TAG_A else fb
        while True:
            if factor.is_identity(v):
                break
            if not out:
                out.append((tag, v))
                break
            ptag, pv = out[-1]
            if ptag == tag:
                out.pop()
                v = factor.multiply(pv, v)
                continue
            if (ca if ptag == TAG_A else cb).contains(pv):
                out.pop()
                v = factor.multiply(pres.transport(pv, ptag, tag), v)
                continue
            out.append((tag, v))
            break
    if len(out) > 1:
        tag, v = out[-1]
        if (ca if tag == TAG_A else cb).contains(v):
            out.pop()
            ptag, pv = out.pop()
            pfactor = fa if ptag == TAG_A else fb
            # pv is outside C, so the merge is neither trivial nor in C
            out.append((ptag, pfactor.multiply(pv, pres.transport(v, tag, ptag))))
    return AmalgamWord(tuple(out))


def is_reduced(w: AmalgamWord, pres: AmalgamPresentation) -> bool:
    n = len(w.syllables)
    for (t1, _), (t2, _) in zip(w.syllables, w.syllables[1:]):
        if t1 == t2:
            return False
    for tag, elem in w.syllables:
        if n > 1 and pres.c_sub(tag).contains(elem):
            return False
        if n > 1 and pres.factor(tag).is_identity(elem):
            return False
    return True


def syllable_length(w: AmalgamWord, pres: AmalgamPresentation) -> int:
    return len(normal_reduce(w, pres))


def is_trivial(w: AmalgamWord, pres: AmalgamPresentation) -> bool:
    return len(normal_reduce(w, pres)) == 0


def word_equal(w1: AmalgamWord, w2: AmalgamWord, pres: AmalgamPresentation) -> bool:
    return is_trivial(concat(w1, inverse(w2, pres), pres), pres)


def reverse_word(w: AmalgamWord) -> AmalgamWord:
    """Syllable order reversed, syllables unchanged."""
    return AmalgamWord(tuple(reversed(w.syllables)))


def is_group_palindrome(w: AmalgamWord, pres: AmalgamPresentation) -> bool:
    return word_equal(w, reverse_word(w), pres)


# --- special form and segment counting --------------------------------------

@dataclass(frozen=True)
class SpecialFormWord:
    """Word in which double-coset syllables appear as standalone a^(+-1) letters."""

    syllables: Tuple[Tuple[str, object], ...]
    tag: str
    letter: object


def special_form(w: AmalgamWord, pres: AmalgamPresentation,
                 a: Optional[object] = None, tag: Optional[str] = None) -> SpecialFormWord:
    """Rewrite so every syllable in C a C u C a^-1 C becomes a literal a^(+-1).

    The C-parts are absorbed into the neighbouring syllables; at the first and
    last syllable the outer C-part stays in place as its own syllable.
    """
    marked = pres.require_case1() if a is None else None
    if a is None:
        a, tag = marked.element, marked.tag
    else:
        tag = tag or (pres.marked.tag if pres.marked else TAG_A)
        factor, c_sub = pres.side(tag)
        a = factor.check_ref(a)
        if c_sub.contains(a):
            raise DomainError("the distinguished element must lie outside C")
        if double_cosets_distinct(factor, c_sub, a) is not True:
            raise UnsupportedCaseError(
                "the double cosets of the distinguished element and its inverse "
                "coincide (or cannot be separated); segment counting is undefined")
    factor, c_sub = pres.side(tag)
    a_inv = factor.invert(a)
    abelian = factor.is_abelian
    contains = c_sub.contains
    multiply = factor.multiply
    sylls = list(normal_reduce(w, pres).syllables)
    out: List[Tuple[str, object]] = []
    n = len(sylls)
    for i in range(n):
        stag, elem = sylls[i]
        if stag != tag:
            out.append((stag, elem))
            continue
        if abelian:
            # canonical factorization: u' = identity, u = x * a^-eps
            u = multiply(elem, a_inv)
            if contains(u):
                split = (u, 1, factor.identity)
            else:
                u = multiply(elem, a)
                split = (u, -1, factor.identity) if contains(u) else None
        else:
            split = double_coset_factor(factor, c_sub, a, elem)
        if split is None:
            out.append((stag, elem))
            continue
        u, eps, u2 = split
        if not factor.is_identity(u):
            if i == 0 or not out:
                out.append((tag, u))
            else:
                ptag, pelem = out[-1]
                moved = pres.transport(u, tag, ptag)
                out[-1] = (ptag, pres.factor(ptag).multiply(pelem, moved))
        out.append((tag, a if eps == 1 else a_inv))
        if not factor.is_identity(u2):
            # canonical factorization keeps u2 trivial except in nonabelian factors
            if i == n - 1:
                out.append((tag, u2))
            else:
                ntag, nelem = sylls[i + 1]
                moved = pres.transport(u2, tag, ntag)
                sylls[i + 1] = (ntag, pres.factor(ntag).multiply(moved, nelem))
    return SpecialFormWord(tuple(out), tag, a)


def count_a_segments(sw: SpecialFormWord, pres: AmalgamPresentation) -> SegmentCounts:
    """p_k counts consecutive standalone a-letters with 2k-1 syllables between;
    m_k does the same for a^-1."""
    factor = pres.factor(sw.tag)
    a = sw.letter
    a_inv = factor.invert(a)
    plus: dict = {}
    minus: dict = {}
    for target, counts in ((a, plus), (a_inv, minus)):
        positions = [i for i, (stag, elem) in enumerate(sw.syllables)
                     if stag == sw.tag and elem == target]
        for prev, nxt in zip(positions, positions[1:]):
            gap = nxt - prev - 1
            if gap % 2 == 0:
                raise InvariantFailure(
                    "even gap between consecutive distinguished letters; "
                    "the special form is not alternating")
            k = (gap + 1) // 2
            counts[k] = counts.get(k, 0) + 1
    return SegmentCounts(plus, minus)


def delta(w: AmalgamWord, pres: AmalgamPresentation,
          a: Optional[object] = None, tag: Optional[str] = None) -> int:
    """Sum of segment parities r_k on the special form of the reduced word."""
    sw = special_form(w, pres, a, tag)
    return count_a_segments(sw, pres).delta


def pal_lower_bound(w: AmalgamWord, pres: AmalgamPresentation,
                    a: Optional[object] = None, tag: Optional[str] = None) -> LowerBoundCertificate:
    return amalgam_lower_bound(delta(w, pres, a, tag), is_trivial(w, pres))


# --- palindrome normal form --------------------------------------------------

@dataclass(frozen=True)
class SymmetricForm:
    """Palindrome as mirrored halves around a C-corrected middle syllable."""

    word: AmalgamWord
    correction: object  # element of C (in the middle syllable's factor copy)
    middle: Tuple[str, object]


def symmetrize_palindrome(w: AmalgamWord, pres: AmalgamPresentation) -> SymmetricForm:
    if not is_group_palindrome(w, pres):
        raise DomainError("not a group palindrome")
    red = normal_reduce(w, pres)
    n = len(red.syllables)
    if n == 0:
        return SymmetricForm(red, pres.factor_a.identity, (TAG_A, pres.factor_a.identity))
    if n == 1:
        tag, elem = red.syllables[0]
        return SymmetricForm(red, pres.factor(tag).identity, (tag, elem))
    if n % 2 == 0:
        # even-length palindromes cannot exist: the reverse of an alternating
        # word of even length stays reduced against the original
        raise InvariantFailure("even-length reduced word passed the palindrome test")
    k = n // 2
    half = AmalgamWord(red.syllables[:k])
    mirror = reverse_word(half)
    solved = normal_reduce(
        concat(concat(inverse(half, pres), red, pres), inverse(mirror, pres), pres), pres)
    if len(solved.syllables) != 1:
        raise InvariantFailure("palindrome middle did not reduce to one syllable")
    mtag, melem = solved.syllables[0]
    ctag, celem = red.syllables[k]
    if mtag != ctag:
        if not pres.c_sub(mtag).contains(melem):
            raise InvariantFailure("palindrome middle changed factors")
        melem = pres.transport(melem, mtag, ctag)
        mtag = ctag
    factor = pres.factor(ctag)
    correction = factor.multiply(factor.invert(celem), melem)
    if not pres.c_sub(ctag).contains(correction):
        raise InvariantFailure("middle correction fell outside the amalgamated subgroup")
    sym = AmalgamWord(half.syllables + ((mtag, melem),) + mirror.syllables)
    return SymmetricForm(sym, correction, (mtag, melem))


# --- witness family -----------------------------------------------------------

def witness(n: int, pres: AmalgamPresentation,
            a: Optional[object] = None, b: Optional[object] = None) -> AmalgamWord:
    """b a (b a^-1)^1 b a (b a^-1)^2 ... (b a^-1)^n b a, reduced as written."""
    if n < 1:
        raise UsageError(f"witness index must be >= 1, got {n}")
    if a is None:
        marked = pres.require_case1()
        if marked.tag != TAG_A:
            raise UsageError("default witness spelling expects the marked element in factor A")
        a = marked.element
    a = pres.factor_a.check_ref(a)
    b = pres.factor_b.check_ref(b if b is not None else pres.factor_b.generator(
        pres.factor_b.generators[0]))
    if pres.c_in_a.contains(a):
        raise DomainError("witness letter a must lie outside C")
    if pres.c_in_b.contains(b):
        raise DomainError("witness letter b must lie outside C")
    a_inv = pres.factor_a.invert(a)
    sylls: List[Tuple[str, object]] = [(TAG_B, b), (TAG_A, a)]
    for j in range(1, n + 1):
        sylls.extend([(TAG_B, b), (TAG_A, a_inv)] * j)
        sylls.extend([(TAG_B, b), (TAG_A, a)])
    return AmalgamWord(tuple(sylls))


def witness_delta_formula(n: int) -> int:
    """Closed form for delta on the witness family."""
    r1 = (n * (n - 1) // 2) % 2
    r2 = n % 2
    return r1 + r2 + (n - 1)


# --- index-two machinery ------------------------------------------------------

@dataclass(frozen=True)
class CosetReps:
    """Right coset representatives for C in each factor; identity represents C."""

    rep_a: object
    rep_b: object

    def rep(self, tag: str):
        return self.rep_a if tag == TAG_A else self.rep_b


def _check_index_two(pres: AmalgamPresentation) -> None:
    for tag in (TAG_A, TAG_B):
        factor, c_sub = pres.side(tag)
        order = factor.order
        celems = c_sub.elements()
        if order is not None and celems is not None:
            if order != 2 * len(celems):
                raise UnsupportedCaseError("factor does not contain C with index two")
        elif tag == TAG_A and _integer_index(factor, c_sub) != 2:
            raise UnsupportedCaseError("factor does not contain C with index two")
        elif tag == TAG_B and _integer_index(factor, c_sub) != 2:
            raise UnsupportedCaseError("factor does not contain C with index two")


def _integer_index(factor: Group, c_sub) -> Optional[int]:
    from .groups import IndexSubgroup
    if isinstance(c_sub, IndexSubgroup):
        return c_sub.modulus
    return None


def default_coset_reps(pres: AmalgamPresentation) -> CosetReps:
    """Deterministic nontrivial representatives (smallest element outside C)."""
    _check_index_two(pres)
    reps = []
    for tag in (TAG_A, TAG_B):
        factor, c_sub = pres.side(tag)
        if factor.order is not None:
            candidates = [g for g in factor.elements() if not c_sub.contains(g)]
            reps.append(min(candidates))
        else:
            reps.append(1)  # integer factor with C = 2Z
    return CosetReps(reps[0], reps[1])


def c_normal_form(w: AmalgamWord, pres: AmalgamPresentation,
                  reps: Optional[CosetReps] = None):
    """Unique factorization x0 * t1 * ... * tn with x0 in C and alternating reps.

    The C-part of each syllable is conjugated leftward through the earlier
    representatives; C is normal in both factors at index two, so conjugates
    stay in C.  Returns (x0 as an element of the A-copy of C, [(tag, rep), ...]).
    """
    _check_index_two(pres)
    if reps is None:
        reps = default_coset_reps(pres)
    red = normal_reduce(w, pres)
    factor_a = pres.factor_a
    x0 = factor_a.identity  # accumulated C-part, kept in the A-copy
    tail: List[Tuple[str, object]] = []
    for tag, elem in red.syllables:
        factor, c_sub = pres.side(tag)
        if c_sub.contains(elem):
            # only possible for a single-syllable word
            c, rep = elem, None
        else:
            rep = reps.rep(tag)
            c = factor.multiply(elem, factor.invert(rep))
            if not c_sub.contains(c):
                raise UnsupportedCaseError("representative does not split this coset")
        # move c left through the accumulated representatives
        ctag = tag
        for rtag, r in reversed(tail):
            c = pres.transport(c, ctag, rtag)
            rfactor = pres.factor(rtag)
            c = rfactor.multiply(rfactor.multiply(r, c), rfactor.invert(r))
            if not pres.c_sub(rtag).contains(c):
                raise InvariantFailure("conjugated C-part left the subgroup")
            ctag = rtag
        c = pres.transport(c, ctag, TAG_A)
        x0 = factor_a.multiply(x0, c)
        if rep is not None:
            tail.append((tag, rep))
    return x0, tail


def index_two_decompose(w: AmalgamWord, pres: AmalgamPresentation,
                        reps: Optional[CosetReps] = None) -> List[AmalgamWord]:
    """At most three group-palindromes whose product equals the word."""
    x0, tail = c_normal_form(w, pres, reps)
    pieces: List[AmalgamWord] = []
    if not pres.factor_a.is_identity(x0):
        pieces.append(AmalgamWord(((TAG_A, x0),)))
    n = len(tail)
    if n:
        if n % 2 == 1:
            # odd alternating run of two letters is a literal palindrome
            pieces.append(AmalgamWord(tuple(tail)))
        else:
            pieces.append(AmalgamWord(tuple(tail[:-1])))
            pieces.append(AmalgamWord((tail[-1],)))
    if not pieces:
        pieces.append(identity_word())
    return pieces


# --- word grammar -------------------------------------------------------------

def _generator_owner(pres: AmalgamPresentation, name: str) -> Optional[str]:
    in_a = name in pres.factor_a.generators
    in_b = name in pres.factor_b.generators
    if in_a and in_b:
        return None
    if in_a:
        return TAG_A
    if in_b:
        return TAG_B
    raise UsageError(f"unknown generator {name!r}")


def parse_word(text: str, pres: AmalgamPresentation) -> AmalgamWord:
    """Syllables 'F:gen^k' or bare 'gen^k' when names are unique across factors."""
    sylls: List[Tuple[str, object]] = []
    for token in text.replace("*", " ").split():
        tag = None
        body = token
        if ":" in token:
            prefix, _, body = token.partition(":")
            if prefix not in (TAG_A, TAG_B):
                raise UsageError(f"factor prefix must be A or B, got {prefix!r}")
            tag = prefix
        name, exp = body, 1
        if "^" in body:
            name, _, raw = body.partition("^")
            try:
                exp = int(raw)
            except ValueError:
                raise UsageError(f"bad exponent in token {token!r}")
        if tag is None:
            tag = _generator_owner(pres, name)
            if tag is None:
                raise UsageError(
                    f"generator {name!r} appears in both factors; use a factor prefix")
        factor = pres.factor(tag)
        elem = factor.element_from_power(name, exp)
        if sylls and sylls[-1][0] == tag:
            sylls[-1] = (tag, factor.multiply(sylls[-1][1], elem))
        else:
            sylls.append((tag, elem))
    return AmalgamWord(tuple(s for s in sylls))


def _names_unique(pres: AmalgamPresentation) -> bool:
    return not (set(pres.factor_a.generators) & set(pres.factor_b.generators))


def serialize_word(w: AmalgamWord, pres: AmalgamPresentation) -> str:
    bare = _names_unique(pres)
    parts: List[str] = []
    for tag, elem in w.syllables:
        factor = pres.factor(tag)
        body = factor.format_element(elem)
        if not body:
            continue
        for token in body.split():
            parts.append(token if bare else f"{tag}:{token}")
    return " ".join(parts)


# --- randomized property suites -----------------------------------------------

def random_word(pres: AmalgamPresentation, rng: random.Random, max_syllables: int,
                value_bound: int = 3) -> AmalgamWord:
    n = rng.randint(0, max_syllables)
    tag = rng.choice((TAG_A, TAG_B))
    sylls = []
    for _ in range(n):
        factor = pres.factor(tag)
        sylls.append((tag, factor.sample(rng, value_bound)))
        tag = TAG_B if tag == TAG_A else TAG_A
    return AmalgamWord(tuple(sylls))


def verify_quasimorphism(pres: AmalgamPresentation, trials: int = 10_000,
                         max_len: int = 40, seed: int = 0,
                         pool_size: int = 2048) -> PropertyReport:
    """Check delta(g h) <= delta(g) + delta(h) + 9 over seeded random pairs."""
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
        if d > 9:
            violations += 1
    return PropertyReport("amalgam-quasimorphism", trials, violations,
                          (max_defect if max_defect is not None else 0,))


def _sample_c_element(pres: AmalgamPresentation, tag: str, rng: random.Random):
    c_sub = pres.c_sub(tag)
    elems = c_sub.elements()
    if elems is not None:
        return rng.choice(elems)
    from .groups import IndexSubgroup
    if isinstance(c_sub, IndexSubgroup):
        return c_sub.modulus * rng.randint(-3, 3)
    return None


def verify_length_welldefined(pres: AmalgamPresentation, trials: int = 5_000,
                              max_len: int = 12, seed: int = 0) -> PropertyReport:
    """Syllable length is unchanged under respelling by c * identify(c)^-1 insertions."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        w = random_word(pres, rng, max_len)
        target = syllable_length(w, pres)
        sylls = list(w.syllables)
        for _ in range(rng.randint(1, 4)):
            tag = rng.choice((TAG_A, TAG_B))
            c = _sample_c_element(pres, tag, rng)
            if c is None:
                continue
            other = TAG_B if tag == TAG_A else TAG_A
            cinv = pres.factor(tag).invert(c)
            pos = rng.randint(0, len(sylls))
            # c followed by its transported inverse spells the identity
            sylls.insert(pos, (other, pres.transport(cinv, tag, other)))
            sylls.insert(pos, (tag, c))
        respelt = AmalgamWord(tuple(sylls))
        if syllable_length(respelt, pres) != target:
            violations += 1
    return PropertyReport("amalgam-length-welldefined", trials, violations)


def verify_inverse_antisymmetry(pres: AmalgamPresentation, trials: int = 10_000,
                                max_len: int = 25, seed: int = 0) -> PropertyReport:
    """d_k(g) + d_k(g^-1) = 0 for every k."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        w = random_word(pres, rng, max_len)
        c = count_a_segments(special_form(w, pres), pres)
        ci = count_a_segments(special_form(inverse(w, pres), pres), pres)
        for k in set(c.support()) | set(ci.support()):
            if c.d(k) + ci.d(k) != 0:
                violations += 1
                break
    return PropertyReport("amalgam-inverse-antisymmetry", trials, violations)
