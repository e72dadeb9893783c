"""Smoke test for the pydyntr extension.

Build first, e.g. `maturin develop -m crates/python/Cargo.toml`, or copy
target/release/libpydyntr.so next to this file as pydyntr.so.
"""

import random
import sys

import pydyntr


def check_d3():
    for kind in ("comb", "alg", "oracle"):
        eng = pydyntr.Engine(3, "dag", kind, seed=1)
        eng.insert(1, [(1, 2), (1, 3)])
        eng.insert(3, [(3, 2)])
        assert eng.reduction() == [(1, 3), (3, 2)], (kind, eng.reduction())
        assert eng.is_redundant(1, 2)
        assert pydyntr.brute_reduction(3, eng.edges()) == eng.reduction()
        eng.delete([(1, 3)])
        assert eng.reduction() == [(1, 2), (3, 2)]


def check_errors():
    eng = pydyntr.Engine(3)
    eng.insert(1, [(1, 2)])
    for bad in (lambda: eng.insert(2, [(2, 1)]), lambda: eng.delete([(2, 3)])):
        try:
            bad()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")
    try:
        pydyntr.Engine(3, "tree")
    except ValueError:
        pass
    else:
        raise AssertionError("bad mode accepted")


def check_random_general(seed=7, n=8, steps=60):
    rng = random.Random(seed)
    engines = [pydyntr.Engine(n, "general", k, seed) for k in ("comb", "alg")]
    for _ in range(steps):
        live = engines[0].edges()
        if live and rng.random() < 0.3:
            batch = rng.sample(live, rng.randint(1, min(3, len(live))))
            for e in engines:
                e.delete(batch)
        else:
            c = rng.randint(1, n)
            others = rng.sample([v for v in range(1, n + 1) if v != c], rng.randint(1, 3))
            batch = [(c, v) if rng.random() < 0.5 else (v, c) for v in others]
            batch = [e for e in batch if e not in live]
            if not batch:
                continue
            for e in engines:
                e.insert(c, batch)
        edges = engines[0].edges()
        for e in engines:
            assert pydyntr.validity_violation(n, edges, e.reduction()) is None
            kept = set(e.reduction())
            assert all(e.is_redundant(*x) == (x not in kept) for x in edges)


def check_stream():
    text = "dtr v1 n=3 mode=dag\nins 1 1 2 1 3\nins 3 3 2\ntr\nred 1 2\n"
    assert pydyntr.run_stream(text, "alg", check=True) == "tr m=2\n1 3\n3 2\nred 1 2 1\n"
    try:
        pydyntr.run_stream("dtr v1 n=3 mode=dag\nbogus\n")
    except ValueError as e:
        assert "line 2" in str(e)
    else:
        raise AssertionError("parse error not raised")


def main():
    for name, fn in list(globals().items()):
        if name.startswith("check_"):
            fn()
            print(f"{name[6:]}: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
