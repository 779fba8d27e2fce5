"""Built-in presentations and JSON presentation files."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from . import amalgam
from .amalgam import TAG_A, TAG_B, AmalgamPresentation, Marked
from .errors import UsageError
from .groups import (CyclicGroup, ElementListSubgroup, IndexPairIso,
                     IndexSubgroup, IntegerGroup, TableIso, TrivialIso,
                     TrivialSubgroup, group_from_json, iso_from_json,
                     subgroup_from_json)
from .hnn import HnnPresentation

Presentation = Union[HnnPresentation, AmalgamPresentation]


def baumslag_solitar(m: int, n: int) -> HnnPresentation:
    """BS(m, n) = < a, t | t^-1 a^m t = a^n > as an HNN extension of Z."""
    if m < 2 or n < 2:
        raise UsageError(
            "bs:M,N needs M, N >= 2 so that both associated subgroups are proper")
    base = IntegerGroup("a")
    sub_a = IndexSubgroup(base, m)
    sub_b = IndexSubgroup(base, n)
    return HnnPresentation(base, sub_a, sub_b, IndexPairIso(sub_a, sub_b))


def free_product_zz() -> AmalgamPresentation:
    """Z * Z with trivial amalgamation; the distinguished element is a."""
    fa = IntegerGroup("a")
    fb = IntegerGroup("b")
    ca = TrivialSubgroup(fa)
    cb = TrivialSubgroup(fb)
    pres = AmalgamPresentation(fa, fb, ca, cb, TrivialIso(ca, cb),
                               amalgam.mark_element(TAG_A, 1, fa, ca))
    return pres


def amalgam_z3z() -> AmalgamPresentation:
    """< a, b | a^3 = b^3 >: two copies of Z glued along 3Z."""
    fa = IntegerGroup("a")
    fb = IntegerGroup("b")
    ca = IndexSubgroup(fa, 3)
    cb = IndexSubgroup(fb, 3)
    pres = AmalgamPresentation(fa, fb, ca, cb, IndexPairIso(ca, cb),
                               amalgam.mark_element(TAG_A, 1, fa, ca))
    return pres


def amalgam_z4_z2_z4() -> AmalgamPresentation:
    """Z4 *_{Z2} Z4 (x^2 = y^2): the index-two case; no case-1 element exists."""
    fa = CyclicGroup(4, "x")
    fb = CyclicGroup(4, "y")
    ca = ElementListSubgroup(fa, [0, 2])
    cb = ElementListSubgroup(fb, [0, 2])
    identify = TableIso(ca, cb, [(0, 0), (2, 2)])
    pres = AmalgamPresentation(fa, fb, ca, cb, identify,
                               amalgam.mark_element(TAG_A, 1, fa, ca))
    return pres


def presentation_from_name(name: str) -> Presentation:
    """Resolve a built-in name: bs:M,N | zz | z3z | z4z2z4."""
    if name == "zz":
        return free_product_zz()
    if name == "z3z":
        return amalgam_z3z()
    if name == "z4z2z4":
        return amalgam_z4_z2_z4()
    if name.startswith("bs:"):
        try:
            m, n = (int(part) for part in name[3:].split(","))
        except ValueError:
            raise UsageError(f"bad Baumslag-Solitar spec {name!r}; expected bs:M,N")
        return baumslag_solitar(m, n)
    raise UsageError(f"unknown presentation {name!r}")


def presentation_from_json(obj) -> Presentation:
    """HNN files carry a "base" key; amalgam files carry "factorA"/"factorB"."""
    if not isinstance(obj, dict):
        raise UsageError("presentation file must hold a JSON object")
    if "base" in obj:
        base = group_from_json(obj["base"])
        sub_a = subgroup_from_json(base, obj["A"])
        sub_b = subgroup_from_json(base, obj["B"])
        phi = iso_from_json(sub_a, sub_b, obj["phi"])
        return HnnPresentation(base, sub_a, sub_b, phi, obj.get("stable", "t"))
    if "factorA" in obj:
        fa = group_from_json(obj["factorA"])
        fb = group_from_json(obj["factorB"])
        ca = subgroup_from_json(fa, obj["C_in_A"])
        cb = subgroup_from_json(fb, obj["C_in_B"])
        identify = iso_from_json(ca, cb, obj["identify"])
        marked = None
        if "a" in obj:
            tag = obj["a"].get("factor", TAG_A)
            factor, c_sub = (fa, ca) if tag == TAG_A else (fb, cb)
            elem = factor.parse_literal(obj["a"]["element"])
            marked = amalgam.mark_element(tag, elem, factor, c_sub)
        return AmalgamPresentation(fa, fb, ca, cb, identify, marked)
    raise UsageError("presentation file needs either a 'base' or 'factorA' key")


def load_presentation(source: str) -> Presentation:
    """Built-in name, or a path to a JSON presentation file."""
    path = Path(source)
    if source.endswith(".json") or path.is_file():
        try:
            obj = json.loads(path.read_text())
        except OSError as exc:
            raise UsageError(f"cannot read presentation file {source!r}: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad JSON in presentation file {source!r}: {exc}")
        return presentation_from_json(obj)
    return presentation_from_name(source)
