"""Security label algebras.

A label algebra is a join semilattice with an optional least element.  The
partial order is induced by the join (``a <= b`` iff ``join(a, b) == b``), so
every algebra only has to supply ``join`` and a way to enumerate a finite
sample of its carrier for exhaustive law checks.

Two algebras are registered:

* ``two_point``: ``L`` below ``H``.
* ``compartment``: the conference-manager lattice over users (``U``), authors
  (``A``) and programme-committee members (``PC``), indexed by ``Id`` values.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Optional


class LatticeError(Exception):
    """Base class for label algebra errors."""


class MismatchedAlgebra(LatticeError):
    """A label does not belong to the algebra it was used with."""


class UnboundedAlgebra(LatticeError):
    """The algebra has no least element."""


class Decision(enum.Enum):
    YES = "Yes"
    NO = "No"

    def __bool__(self) -> bool:
        return self is Decision.YES


# -- two-point lattice ------------------------------------------------------


class TwoPoint(enum.Enum):
    L = "L"
    H = "H"

    def __str__(self) -> str:
        return self.value


# -- conference compartments ------------------------------------------------


@dataclass(frozen=True)
class Bot:
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Nat:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Nat index must be natural, got {self.n}")

    def __str__(self) -> str:
        return str(self.n)


def id_join(a, b):
    if a == b:
        return a
    if isinstance(a, Bot):
        return b
    if isinstance(b, Bot):
        return a
    return Top()


def id_leq(a, b) -> bool:
    return id_join(a, b) == b


@dataclass(frozen=True)
class U:
    uid: object

    def __str__(self) -> str:
        return f"U({self.uid})"


@dataclass(frozen=True)
class A:
    uid: object
    sid: object

    def __str__(self) -> str:
        return f"A({self.uid},{self.sid})"


@dataclass(frozen=True)
class PC:
    uid: object
    sid: object

    def __str__(self) -> str:
        return f"PC({self.uid},{self.sid})"


_RANK = {U: 0, A: 1, PC: 2}


def compartment_join(x, y):
    # Order the pair so that the lower-ranked constructor comes first; the
    # table below is then only written for one direction.
    if _RANK[type(x)] > _RANK[type(y)]:
        x, y = y, x
    match x, y:
        case U(u), U(u2):
            return U(id_join(u, u2))
        case U(u), A(u2, s):
            return A(id_join(u, u2), s)
        case U(_), PC(u2, s):
            return PC(u2, s)
        case A(u, s), A(u2, s2):
            return A(id_join(u, u2), id_join(s, s2))
        case A(_, s), PC(u2, s2):
            return PC(u2, id_join(s, s2))
        case PC(u, s), PC(u2, s2):
            return PC(id_join(u, u2), id_join(s, s2))
    raise MismatchedAlgebra(f"not compartment labels: {x!r}, {y!r}")


def default_ids() -> list:
    return [Bot(), Nat(0), Nat(1), Nat(2), Top()]


def compartment_carrier(ids: Optional[Iterable] = None) -> list:
    ids = list(default_ids() if ids is None else ids)
    out: list = [U(i) for i in ids]
    out += [A(u, s) for u in ids for s in ids]
    out += [PC(u, s) for u in ids for s in ids]
    return out


# -- the algebra record -----------------------------------------------------


@dataclass(frozen=True)
class LabelAlgebra:
    """A pluggable join semilattice of security labels."""

    name: str
    join_fn: Callable[[Hashable, Hashable], Hashable]
    member: Callable[[Hashable], bool]
    carrier_fn: Callable[[], list]
    bottom_elem: Optional[Hashable] = None
    fmt: Callable[[Hashable], str] = str
    _joins: dict = field(default_factory=dict, init=False, repr=False,
                         compare=False, hash=False)

    def carrier(self) -> list:
        """A finite sample of the carrier (the whole carrier when finite)."""
        return self.carrier_fn()

    def check(self, *labels) -> None:
        for lab in labels:
            if not self.member(lab):
                raise MismatchedAlgebra(
                    f"{lab!r} is not a label of the {self.name} lattice")

    def join(self, a, b):
        try:
            return self._joins[a, b]
        except KeyError:
            pass
        except TypeError:  # unhashable, so certainly not a label
            self.check(a, b)
        self.check(a, b)
        j = self._joins[a, b] = self.join_fn(a, b)
        return j

    def leq(self, a, b) -> bool:
        return self.join(a, b) == b

    def dec_leq(self, a, b) -> Decision:
        # decidable equality on the join, exactly as the order is defined
        return Decision.YES if self.join(a, b) == b else Decision.NO

    @property
    def bounded(self) -> bool:
        return self.bottom_elem is not None

    def bottom(self):
        if self.bottom_elem is None:
            raise UnboundedAlgebra(f"{self.name} lattice has no least element")
        return self.bottom_elem

    def format(self, label) -> str:
        self.check(label)
        return self.fmt(label)

    def parse(self, text: str):
        return parse_label(text, self)


def _is_id(x) -> bool:
    return isinstance(x, (Bot, Top)) or isinstance(x, Nat)


def _is_compartment(x) -> bool:
    match x:
        case U(u):
            return _is_id(u)
        case A(u, s) | PC(u, s):
            return _is_id(u) and _is_id(s)
    return False


TWO_POINT = LabelAlgebra(
    name="two_point",
    join_fn=lambda a, b: TwoPoint.H if TwoPoint.H in (a, b) else TwoPoint.L,
    member=lambda x: isinstance(x, TwoPoint),
    carrier_fn=lambda: [TwoPoint.L, TwoPoint.H],
    bottom_elem=TwoPoint.L,
)

COMPARTMENT = LabelAlgebra(
    name="compartment",
    join_fn=compartment_join,
    member=_is_compartment,
    carrier_fn=compartment_carrier,
    bottom_elem=U(Bot()),
)

ALGEBRAS = {alg.name: alg for alg in (TWO_POINT, COMPARTMENT)}


def get_algebra(name: str) -> LabelAlgebra:
    try:
        return ALGEBRAS[name]
    except KeyError:
        raise LatticeError(
            f"unknown lattice {name!r} (choose from {', '.join(ALGEBRAS)})"
        ) from None


# Free functions mirroring the algebra methods.

def join(alg: LabelAlgebra, a, b):
    return alg.join(a, b)


def leq(alg: LabelAlgebra, a, b) -> bool:
    return alg.leq(a, b)


def dec_leq(alg: LabelAlgebra, a, b) -> Decision:
    return alg.dec_leq(a, b)


def bottom(alg: LabelAlgebra):
    return alg.bottom()


def law_violations(alg: LabelAlgebra, sample: Optional[list] = None) -> Iterator[str]:
    """Yield a description of every semilattice/poset law violation in ``sample``."""
    xs = alg.carrier() if sample is None else list(sample)
    j = alg.join_fn
    table = {(x, y): j(x, y) for x in xs for y in xs}

    def jt(a, b):
        r = table.get((a, b))
        return j(a, b) if r is None else r

    for x in xs:
        if table[x, x] != x:
            yield f"idempotence: {x}"
        if alg.bounded and j(x, alg.bottom_elem) != x:
            yield f"unit: {x}"
    for x, y in itertools.product(xs, xs):
        if table[x, y] != table[y, x]:
            yield f"commutativity: {x}, {y}"
        if table[x, y] == y and table[y, x] == x and x != y:
            yield f"antisymmetry: {x}, {y}"
    for x, y in itertools.product(xs, xs):
        xy = table[x, y]
        xy_leq = xy == y
        for z in xs:
            yz = table[y, z]
            if jt(x, yz) != jt(xy, z):
                yield f"associativity: {x}, {y}, {z}"
            if xy_leq and yz == z and table[x, z] != z:
                yield f"transitivity: {x}, {y}, {z}"


# -- textual syntax ----------------------------------------------------------

_ID = r"\s*(bot|top|\d+)\s*"
_LABEL_RE = re.compile(
    rf"^\s*(?:(L|H)|U\({_ID}\)|(A|PC)\({_ID},{_ID}\))\s*$", re.IGNORECASE)


def parse_id(text: str):
    t = text.strip().lower()
    if t == "bot":
        return Bot()
    if t == "top":
        return Top()
    return Nat(int(t))


def parse_label(text: str, alg: Optional[LabelAlgebra] = None):
    """Parse ``L``, ``H``, ``U(bot)``, ``A(1,2)``, ``PC(top,2)``.

    With ``alg`` given, the label must belong to it.
    """
    m = _LABEL_RE.match(text)
    if not m:
        raise LatticeError(f"malformed label {text!r}")
    if m.group(1):
        # two-point keywords are case sensitive; 'l'/'h' stay identifiers
        if m.group(1) not in ("L", "H"):
            raise LatticeError(f"malformed label {text!r}")
        lab = TwoPoint(m.group(1))
    elif m.group(2):
        lab = U(parse_id(m.group(2)))
    else:
        ctor = m.group(3).upper()
        uid, sid = parse_id(m.group(4)), parse_id(m.group(5))
        lab = A(uid, sid) if ctor == "A" else PC(uid, sid)
    if alg is not None:
        alg.check(lab)
    return lab


def format_label(label) -> str:
    return str(label)
