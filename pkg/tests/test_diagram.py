import random

import pytest
from hypothesis import given, settings, strategies as st

from moufang.diagram import (
    ARITY,
    ArityMismatch,
    DiagramError,
    DiagramSum,
    canonicalize,
    compose,
    count_plus,
    flip,
    generator,
    identity,
    raw_diagram,
    split_series_node,
    tensor,
    tensor_all,
)
from moufang.dsl import parse


def test_generator_arities():
    assert (generator("mul").n_in, generator("mul").n_out) == (2, 1)
    assert (generator("comul").n_in, generator("comul").n_out) == (1, 2)
    assert (generator("unit").n_in, generator("unit").n_out) == (0, 1)
    assert (generator("counit").n_in, generator("counit").n_out) == (1, 0)
    assert (generator("swap").n_in, generator("swap").n_out) == (2, 2)


def test_labels_only_on_mul_comul():
    generator("mul", "0")
    generator("comul", "+")
    with pytest.raises(DiagramError):
        generator("swap", "0")
    with pytest.raises(DiagramError):
        generator("unit", "+")


def test_compose_identity():
    assert compose(identity(1), identity(1)) == identity(1)


def test_compose_arity_error_names_both_counts():
    with pytest.raises(ArityMismatch) as err:
        compose(generator("comul"), generator("comul"))
    assert "2" in str(err.value) and "1" in str(err.value)


def test_q_diagram_shape():
    q = compose(generator("comul"), generator("mul"))
    assert (q.n_in, q.n_out) == (1, 1)
    assert len(q.slices) == 2


def test_double_coproduct_arities():
    d = compose(generator("comul"), tensor(identity(1), generator("comul")))
    assert (d.n_in, d.n_out) == (1, 3)


def test_tensor_adds_arities():
    assert tensor(identity(1), identity(1)) == identity(2)
    d = tensor(generator("mul"), generator("comul"))
    assert (d.n_in, d.n_out) == (3, 3)


def test_interchange_law():
    a = parse("(mul * id(1)) ; (id(1) * comul)")
    b = parse("(id(2) * comul) ; (mul * id(2))")
    assert a == b


def test_swap_involution_is_structural():
    assert parse("swap ; swap") == identity(2)


def test_swap_naturality():
    assert parse("(mul * id(1)) ; swap") == parse(
        "(id(1) * swap) ; (swap * id(1)) ; (id(1) * mul)"
    )


def test_canonicalize_idempotent():
    d = parse("comul ; id(1)*comul ; id(2)*comul ; id(1)*swap*id(1) ; mul*id(2)")
    assert canonicalize(d) == d
    assert (d.n_in, d.n_out) == (1, 3)
    # slice count is stable for this fixed slicing algorithm
    assert len(d.slices) == 5


def test_boundaries_preserved_by_canonicalize():
    d = raw_diagram(2, [("swap", None, 0), ("mul", None, 0), ("comul", None, 0)])
    c = canonicalize(d)
    assert (c.n_in, c.n_out) == (d.n_in, 2)


def test_wire_bound_enforced():
    wide = identity(8)
    with pytest.raises(DiagramError):
        big = wide
        for _ in range(12):
            big = tensor(big, generator("unit"))


def _random_slices(rng, n_in, n_steps, max_width=8):
    w = n_in
    out = []
    for _ in range(n_steps):
        options = []
        for kind, (k, m) in ARITY.items():
            if kind == "id":
                continue
            if k <= w and 0 <= w - k + m <= max_width:
                options.extend((kind, None, off) for off in range(w - k + 1))
        if not options:
            break
        choice = rng.choice(options)
        out.append(choice)
        k, m = ARITY[choice[0]]
        w += m - k
    return out


def _rebuild_as_term(slices, n_in):
    d = identity(n_in)
    for kind, label, off in slices:
        w = d.n_out
        k, _m = ARITY[kind]
        factors = []
        if off:
            factors.append(identity(off))
        factors.append(generator(kind, label))
        if w - off - k:
            factors.append(identity(w - off - k))
        d = compose(d, tensor_all(*factors))
    return d


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_reslicing_invariance(seed):
    rng = random.Random(seed)
    n_in = rng.randint(0, 4)
    slices = _random_slices(rng, n_in, rng.randint(0, 8))
    direct = canonicalize(raw_diagram(n_in, slices))
    rebuilt = _rebuild_as_term(slices, n_in)
    assert direct == rebuilt
    assert canonicalize(direct) == direct


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_interchange_of_independent_slices(seed):
    rng = random.Random(seed)
    n_in = rng.randint(0, 4)
    slices = _random_slices(rng, n_in, rng.randint(0, 8))
    shuffled = list(slices)
    for _ in range(16):
        if len(shuffled) < 2:
            break
        i = rng.randrange(len(shuffled) - 1)
        (k1, l1, o1), (k2, l2, o2) = shuffled[i], shuffled[i + 1]
        a1, b1 = ARITY[k1]
        a2, b2 = ARITY[k2]
        if o2 + a2 <= o1:
            shuffled[i], shuffled[i + 1] = (k2, l2, o2), (k1, l1, o1 - a2 + b2)
        elif o2 >= o1 + b1:
            shuffled[i], shuffled[i + 1] = (k2, l2, o2 - b1 + a1), (k1, l1, o1)
    assert canonicalize(raw_diagram(n_in, slices)) == canonicalize(
        raw_diagram(n_in, shuffled)
    )


def test_flip_exchanges_boundaries():
    d = parse("comul ; mul")
    assert flip(d) == d
    left = parse("comul ; comul * id(1)")
    assert flip(left) == parse("mul * id(1) ; mul")
    assert flip(flip(left)) == left


def test_diagram_sum_collects_like_terms():
    q = parse("comul ; mul")
    s = DiagramSum.of(q) + DiagramSum.of(q)
    assert s.terms == {(0, q): 2}
    assert (s - s.scale(1)).is_zero()


def test_diagram_sum_rejects_mixed_arities():
    with pytest.raises(ArityMismatch):
        DiagramSum.of(identity(1)) + DiagramSum.of(identity(2))


def test_split_series_node():
    q = parse("comul ; mul")
    split = split_series_node(q, 0)
    zero = parse("comul%0 ; mul")
    plus = parse("comul%+ ; mul")
    assert split.terms == {(0, zero): 1, (0, plus): 1}
    with pytest.raises(DiagramError):
        split_series_node(zero, 0)  # already labelled


def test_truncation_counts_plus_labels():
    plus = parse("comul%+ ; mul%+")
    assert count_plus(plus) == 2
    s = DiagramSum.of(plus, h_degree=1)
    assert s.truncate(2).is_zero()
    assert not s.truncate(3).is_zero()


def test_scalar_bubble_canonicalizes():
    bubble = compose(generator("unit"), generator("counit"))
    assert (bubble.n_in, bubble.n_out) == (0, 0)
    assert canonicalize(bubble) == bubble
    beside = tensor(identity(1), bubble)
    assert (beside.n_in, beside.n_out) == (1, 1)
    assert canonicalize(beside) == beside
