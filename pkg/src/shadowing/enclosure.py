"""Canonical finite unions of arcs, segments and boxes.

An ``EnclosureSet`` represents a closed subset of a space as a sorted tuple
of pairwise disjoint fragments:

* circle: arcs ``(start, length)`` with start in [0,1), length in [0,1];
  the full circle is the single canonical fragment ``(0, 1)``;
* interval: segments ``(lo, hi)`` with 0 <= lo <= hi <= 1;
* annulus: boxes ``(rlo, rhi, astart, alength)``, a radial segment crossed
  with an angular arc.

Fragments carry whatever numeric type the caller feeds in; exact pipelines
use Fractions, padded float pipelines use floats through identical code.

The ``variant`` tag tracks certification direction: ``exact`` sets equal
the abstract set they stand for, ``outer`` sets contain it, ``inner`` sets
are contained in it. Normalization that must merge fragments to respect
the fragment cap degrades ``exact`` to ``outer`` and is reported to the
caller as a resource error carrying the merged superset.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EnclosureCapError, UsageError
from .spaces import Space

DEFAULT_FRAGMENT_CAP = 4096

_FULL_ARC = (0, 1)


def _combine_variant(a: str, b: str) -> str:
    if a == b:
        return a
    pair = {a, b}
    if pair == {"exact", "outer"}:
        return "outer"
    if pair == {"exact", "inner"}:
        return "inner"
    raise UsageError(f"cannot combine {a} and {b} enclosures")


# -- circle arcs ---------------------------------------------------------

def _intersect_arcs(a, b):
    s1, l1 = a
    s2, l2 = b
    if l1 >= 1:
        return [b]
    if l2 >= 1:
        return [a]
    t = (s2 - s1) % 1
    out = []
    for base in (t, t - 1):
        lo = max(base, 0)
        hi = min(base + l2, l1)
        if lo <= hi:
            out.append(((s1 + lo) % 1, hi - lo))
    return out


def _normalize_arcs(arcs):
    kept = []
    for s, l in arcs:
        if l < 0:
            continue
        if l >= 1:
            return [_FULL_ARC]
        kept.append((s % 1, l))
    if not kept:
        return []
    kept.sort()
    merged = [kept[0]]
    for s, l in kept[1:]:
        ps, pl = merged[-1]
        if s <= ps + pl:
            merged[-1] = (ps, max(pl, s + l - ps))
        else:
            merged.append((s, l))
    # fold the trailing arc onto leading ones across the wrap
    while len(merged) >= 2:
        ps, pl = merged[-1]
        fs, fl = merged[0]
        if ps + pl < 1 + fs:
            break
        new_len = max(pl, 1 + fs + fl - ps)
        if new_len >= 1:
            return [_FULL_ARC]
        merged = merged[1:]
        merged[-1] = (ps, new_len)
    if len(merged) == 1 and merged[0][1] >= 1:
        return [_FULL_ARC]
    return merged


def _arc_gap(a, b):
    """Gap from the end of arc a to the start of arc b, going forward."""
    return (b[0] - (a[0] + a[1])) % 1


def _cap_arcs(arcs, cap):
    arcs = list(arcs)
    degraded = False
    while len(arcs) > cap:
        gaps = [(_arc_gap(arcs[i], arcs[(i + 1) % len(arcs)]), i)
                for i in range(len(arcs))]
        _, i = min(gaps)
        j = (i + 1) % len(arcs)
        s, l = arcs[i]
        hull_len = min((arcs[j][0] - s) % 1 + arcs[j][1], 1)
        arcs[i] = (s, hull_len)
        del arcs[j]
        arcs = _normalize_arcs(arcs)
        degraded = True
    return arcs, degraded


def _arc_contains(arc, x):
    s, l = arc
    return (x - s) % 1 <= l


# -- interval segments ---------------------------------------------------

def _intersect_segs(a, b):
    lo = max(a[0], b[0])
    hi = min(a[1], b[1])
    return [(lo, hi)] if lo <= hi else []


def _normalize_segs(segs):
    kept = sorted((lo, hi) for lo, hi in segs if lo <= hi)
    if not kept:
        return []
    merged = [kept[0]]
    for lo, hi in kept[1:]:
        plo, phi = merged[-1]
        if lo <= phi:
            merged[-1] = (plo, max(phi, hi))
        else:
            merged.append((lo, hi))
    return merged


def _cap_segs(segs, cap):
    segs = list(segs)
    degraded = False
    while len(segs) > cap:
        gaps = [(segs[i + 1][0] - segs[i][1], i) for i in range(len(segs) - 1)]
        _, i = min(gaps)
        segs[i] = (segs[i][0], segs[i + 1][1])
        del segs[i + 1]
        degraded = True
    return segs, degraded


# -- annulus boxes -------------------------------------------------------

def _intersect_boxes(a, b):
    rlo = max(a[0], b[0])
    rhi = min(a[1], b[1])
    if rlo > rhi:
        return []
    return [(rlo, rhi, s, l)
            for s, l in _intersect_arcs((a[2], a[3]), (b[2], b[3]))]


def _boxes_overlap(a, b):
    if min(a[1], b[1]) - max(a[0], b[0]) <= 0:
        return False
    pieces = _intersect_arcs((a[2], a[3]), (b[2], b[3]))
    return any(l > 0 for _, l in pieces)


def _normalize_boxes(boxes):
    kept = []
    for rlo, rhi, s, l in boxes:
        if rlo > rhi or l < 0:
            continue
        if l >= 1:
            s, l = _FULL_ARC
        kept.append((rlo, rhi, s % 1, l))
    changed = True
    while changed:
        changed = False
        out = []
        for box in sorted(kept):
            merged_in = False
            for i, other in enumerate(out):
                if box[:2] == other[:2]:
                    joined = _normalize_arcs([(box[2], box[3]),
                                              (other[2], other[3])])
                    if len(joined) == 1:
                        out[i] = (box[0], box[1], joined[0][0], joined[0][1])
                        merged_in = changed = True
                        break
                if (box[2], box[3]) == (other[2], other[3]) \
                        and box[0] <= other[1] and other[0] <= box[1]:
                    out[i] = (min(box[0], other[0]), max(box[1], other[1]),
                              other[2], other[3])
                    merged_in = changed = True
                    break
            if not merged_in:
                out.append(box)
        kept = out
    # remaining overlaps cannot be represented as a disjoint box union;
    # widen to an angular hull, which is sound for outer enclosures
    degraded = False
    result = []
    for box in sorted(kept):
        clash = next((i for i, o in enumerate(result)
                      if _boxes_overlap(box, o)), None)
        if clash is None:
            result.append(box)
        else:
            o = result[clash]
            result[clash] = (min(box[0], o[0]), max(box[1], o[1]),
                             _FULL_ARC[0], _FULL_ARC[1])
            degraded = True
    return result, degraded


# -- the set type --------------------------------------------------------

@dataclass(frozen=True)
class EnclosureSet:
    space: Space
    fragments: tuple
    variant: str = "exact"

    def is_empty(self) -> bool:
        return not self.fragments

    def fragment_count(self) -> int:
        return len(self.fragments)

    def measure(self):
        kind = self.space.kind
        if kind == "circle":
            return sum(l for _, l in self.fragments)
        if kind == "interval":
            return sum(hi - lo for lo, hi in self.fragments)
        return sum((rhi - rlo) * l for rlo, rhi, _, l in self.fragments)

    def contains(self, point) -> bool:
        kind = self.space.kind
        if kind == "circle":
            return any(_arc_contains(f, point[0]) for f in self.fragments)
        if kind == "interval":
            return any(lo <= point[0] <= hi for lo, hi in self.fragments)
        return any(rlo <= point[0] <= rhi and _arc_contains((s, l), point[1])
                   for rlo, rhi, s, l in self.fragments)

    def pick_point(self):
        """Deterministic representative: midpoint of the largest fragment."""
        if self.is_empty():
            raise UsageError("cannot pick a point from an empty set")
        kind = self.space.kind
        if kind == "circle":
            s, l = max(self.fragments, key=lambda f: (f[1], -f[0]))
            return ((s + l / 2) % 1,)
        if kind == "interval":
            lo, hi = max(self.fragments, key=lambda f: (f[1] - f[0], -f[0]))
            return ((lo + hi) / 2,)
        rlo, rhi, s, l = max(self.fragments,
                             key=lambda f: ((f[1] - f[0]) * f[3], -f[0]))
        return ((rlo + rhi) / 2, (s + l / 2) % 1)


def make(space: Space, fragments, variant: str = "exact",
         cap: int = DEFAULT_FRAGMENT_CAP) -> EnclosureSet:
    """Normalize fragments into a canonical EnclosureSet.

    Overlapping or touching fragments are merged. If the fragment count
    exceeds ``cap``, nearest fragments are hull-merged until it fits; the
    result is then a strict superset, so an exact/inner request fails with
    a resource error carrying the merged outer set.
    """
    kind = space.kind
    if kind == "circle":
        frags = _normalize_arcs(fragments)
        frags, degraded = _cap_arcs(frags, cap)
    elif kind == "interval":
        frags = _normalize_segs(fragments)
        frags, degraded = _cap_segs(frags, cap)
    else:
        frags, merged_overlap = _normalize_boxes(fragments)
        frags, capped = _cap_boxes_by_angle(frags, cap)
        degraded = merged_overlap or capped
    if degraded:
        outer = EnclosureSet(space, tuple(frags), "outer")
        if variant != "outer":
            raise EnclosureCapError(
                f"fragment cap {cap} exceeded for {variant} enclosure",
                partial=outer)
        return outer
    return EnclosureSet(space, tuple(frags), variant)


def _cap_boxes_by_angle(boxes, cap):
    degraded = False
    boxes = list(boxes)
    while len(boxes) > cap:
        a = boxes.pop()
        b = boxes.pop()
        boxes.append((min(a[0], b[0]), max(a[1], b[1]),
                      _FULL_ARC[0], _FULL_ARC[1]))
        merged, _ = _normalize_boxes(boxes)
        boxes = merged
        degraded = True
    return boxes, degraded


def empty(space: Space, variant: str = "exact") -> EnclosureSet:
    return EnclosureSet(space, (), variant)


def full(space: Space, variant: str = "exact") -> EnclosureSet:
    if space.kind == "circle":
        return EnclosureSet(space, (_FULL_ARC,), variant)
    if space.kind == "interval":
        return EnclosureSet(space, ((0, 1),), variant)
    return EnclosureSet(space, ((1 - space.w, 1 + space.w) + _FULL_ARC,),
                        variant)


def ball_set(space: Space, center, radius, variant: str = "exact") -> EnclosureSet:
    """The closed radius-ball around center, truncated to the space."""
    if radius <= 0:
        raise UsageError("ball radius must be positive")
    kind = space.kind
    if kind == "circle":
        if 2 * radius >= 1:
            return full(space, variant)
        return EnclosureSet(space, (((center[0] - radius) % 1, 2 * radius),),
                            variant)
    if kind == "interval":
        lo = max(center[0] - radius, 0)
        hi = min(center[0] + radius, 1)
        return EnclosureSet(space, ((lo, hi),), variant)
    rlo = max(center[0] - radius, 1 - space.w)
    rhi = min(center[0] + radius, 1 + space.w)
    if 2 * radius >= 1:
        s, l = _FULL_ARC
    else:
        s, l = (center[1] - radius) % 1, 2 * radius
    return EnclosureSet(space, ((rlo, rhi, s, l),), variant)


def intersect(a: EnclosureSet, b: EnclosureSet,
              cap: int = DEFAULT_FRAGMENT_CAP) -> EnclosureSet:
    if a.space != b.space:
        raise UsageError("cannot intersect sets over different spaces")
    variant = _combine_variant(a.variant, b.variant)
    kind = a.space.kind
    pieces = []
    for fa in a.fragments:
        for fb in b.fragments:
            if kind == "circle":
                pieces.extend(_intersect_arcs(fa, fb))
            elif kind == "interval":
                pieces.extend(_intersect_segs(fa, fb))
            else:
                pieces.extend(_intersect_boxes(fa, fb))
    return make(a.space, pieces, variant, cap)


def expand(a: EnclosureSet, pad) -> EnclosureSet:
    """Grow every fragment outward by pad; result is an outer enclosure."""
    if pad < 0:
        raise UsageError("pad must be nonnegative")
    kind = a.space.kind
    frags = []
    for f in a.fragments:
        if kind == "circle":
            frags.append(((f[0] - pad) % 1, f[1] + 2 * pad))
        elif kind == "interval":
            frags.append((max(f[0] - pad, 0), min(f[1] + pad, 1)))
        else:
            frags.append((max(f[0] - pad, 1 - a.space.w),
                          min(f[1] + pad, 1 + a.space.w),
                          (f[2] - pad) % 1, f[3] + 2 * pad))
    return make(a.space, frags, "outer")
