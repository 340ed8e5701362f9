import random
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from moufang.diagram import ARITY, ArityMismatch, canonicalize, raw_diagram
from moufang.dsl import SyntaxErrorAt, parse, print_diagram, render


def test_parse_q_diagram():
    q = parse("comul ; mul")
    assert (q.n_in, q.n_out) == (1, 1)
    assert parse("mul ∘ comul") == q


def test_parse_counit_composite():
    d = parse("comul ; (counit * id(1))")
    assert (d.n_in, d.n_out) == (1, 1)
    assert d == parse("comul ; counit ⊗ id(1)")


def test_bialgebra_compatibility_sides_parse():
    lhs = parse("mul ; comul")
    rhs = parse("comul*comul ; id(1)*swap*id(1) ; mul*mul")
    assert (lhs.n_in, lhs.n_out) == (rhs.n_in, rhs.n_out) == (2, 2)
    assert lhs != rhs


def test_labels_roundtrip():
    d = parse("comul%0 ; mul%+")
    assert parse(print_diagram(d)) == d


def test_syntax_error_carries_position():
    with pytest.raises(SyntaxErrorAt) as err:
        parse("comul ; $")
    assert err.value.position == 8


def test_arity_error_mentions_input():
    with pytest.raises(ArityMismatch):
        parse("comul ; comul ; mul")


def test_unknown_generator():
    with pytest.raises(SyntaxErrorAt):
        parse("frobnicate")


def _random_slices(rng, n_in, n_steps):
    w = n_in
    out = []
    for _ in range(n_steps):
        options = []
        for kind, (k, m) in ARITY.items():
            if kind == "id":
                continue
            if k <= w and 0 <= w - k + m <= 8:
                label_choices = (None, "0", "+") if kind in ("mul", "comul") else (None,)
                options.extend(
                    (kind, lab, off)
                    for off in range(w - k + 1) for lab in label_choices
                )
        if not options:
            break
        choice = rng.choice(options)
        out.append(choice)
        k, m = ARITY[choice[0]]
        w += m - k
    return out


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_print_parse_roundtrip(seed):
    rng = random.Random(seed)
    n_in = rng.randint(0, 4)
    d = canonicalize(raw_diagram(n_in, _random_slices(rng, n_in, rng.randint(0, 8))))
    assert parse(print_diagram(d)) == d


def test_render_identity_is_bars():
    out = render(parse("id(1)"), "ascii")
    assert set(out.replace("\n", "").replace(" ", "")) == {"|"}


def test_render_q_two_slices():
    out = render(parse("comul ; mul"), "ascii")
    assert out.count("/^\\") == 1 and out.count("\\_/") == 1


def test_render_svg_is_wellformed():
    lhs = parse("comul ; id(1)*comul ; id(2)*comul ; id(1)*swap*id(1) ; mul*id(2)")
    doc = render(lhs, "svg")
    root = ET.fromstring(doc)
    assert root.tag.endswith("svg")
    assert "http" not in doc.replace("http://www.w3.org/2000/svg", "")


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_render_never_fails_on_parsed_diagrams(seed):
    rng = random.Random(seed)
    n_in = rng.randint(0, 3)
    d = canonicalize(raw_diagram(n_in, _random_slices(rng, n_in, rng.randint(0, 6))))
    for fmt in ("ascii", "svg", "tikz"):
        out = render(d, fmt)
        assert out == render(d, fmt)  # deterministic


def test_tikz_contains_environment():
    out = render(parse("comul ; mul"), "tikz")
    assert out.startswith(r"\begin{tikzpicture}")
    assert out.endswith(r"\end{tikzpicture}")
