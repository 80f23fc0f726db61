from __future__ import annotations

from ttsec import typechecker as tc
from ttsec.evaluator import Configuration, Store
from ttsec.lattice import TWO_POINT
from ttsec.parser import parse


def term(src: str, alg=TWO_POINT):
    return parse(src, alg)


def ctx(alg=TWO_POINT, store=None, ambient=None) -> tc.Context:
    typing = store.typing() if store is not None else {}
    return tc.Context(alg, ambient=ambient, store_typing=typing)


def store(segs: dict | None = None, alg=TWO_POINT) -> Store:
    return Store.from_values(alg, {k: [parse(v, alg) for v in vs]
                                   for k, vs in (segs or {}).items()})


def config(src: str, segs: dict | None = None, alg=TWO_POINT,
           ambient=None) -> Configuration:
    s = store(segs, alg)
    typed = tc.elaborate(ctx(alg, s, ambient), parse(src, alg))
    return Configuration.typed_of(s, typed)
