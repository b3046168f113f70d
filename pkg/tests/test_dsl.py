import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pball import dsl
from pball.dsl import BinOp, Call, Neg, Num, Var, arity_check, evaluate, functional, parse, to_text


def test_parse_examples():
    assert parse("x1^2") == BinOp("^", Var("x", 1), Num(2.0))
    arc = parse("sqrt(1+x1^2)")
    assert arc == Call("sqrt", (BinOp("+", Num(1.0), BinOp("^", Var("x", 1), Num(2.0))),))
    e = parse("sin(x1*x2)+cos(t1)")
    assert isinstance(e, BinOp) and e.op == "+"
    assert arity_check(e) == (2, True, "g")


def test_precedence():
    assert evaluate(parse("2+3*4^2"), {}) == 50
    assert evaluate(parse("-x1^2"), {"x1": 3.0}) == -9.0
    assert evaluate(parse("2^3^2"), {}) == 512
    assert evaluate(parse("2^-1"), {}) == 0.5
    assert evaluate(parse("8/2/2"), {}) == 2
    assert evaluate(parse("1-2-3"), {}) == -4


def test_eval_examples():
    assert evaluate(parse("x1^2"), {"x1": 3}) == 9
    assert evaluate(parse("sqrt(1+x1^2)"), {"x1": 1}) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert evaluate(parse("sin(x1*x2)"), {"x1": math.pi / 2, "x2": 1}) == pytest.approx(1.0, abs=1e-15)


def test_numbers():
    assert evaluate(parse("1.5e-3 + .25 + 2E2"), {}) == pytest.approx(200.2515, abs=1e-12)
    assert evaluate(parse("pow(2, 10)"), {}) == 1024


@pytest.mark.parametrize(
    "text,offset",
    [("x1 +", 4), ("(x1", 3), ("x1 x2", 3), ("foo(x1)", 0), ("sin(x1, x2)", 0), ("pow(x1)", 0), ("x0", 0),
     ("z1", 0), ("1 $ 2", 2), ("", 0)],
)
def test_parse_errors_carry_offset(text, offset):
    with pytest.raises(dsl.ParseError) as info:
        parse(text)
    assert info.value.offset == offset
    assert "offset" in str(info.value)


@pytest.mark.parametrize(
    "text,env,needle",
    [("log(x1)", {"x1": 0.0}, "log(x1)"), ("sqrt(x1 - 2)", {"x1": 1.0}, "sqrt"), ("1/x1", {"x1": 0.0}, "division"),
     ("x1^0.5", {"x1": -1.0}, "negative base"), ("x1^-1", {"x1": 0.0}, "zero"), ("x1 + x2", {"x1": 1.0}, "x2")],
)
def test_eval_errors(text, env, needle):
    with pytest.raises(dsl.EvalError) as info:
        evaluate(parse(text), env)
    assert needle in str(info.value)


def test_negative_base_integer_exponent():
    assert evaluate(parse("x1^3"), {"x1": -2.0}) == -8.0
    assert evaluate(parse("pow(x1, -2)"), {"x1": -2.0}) == 0.25


def test_eval_error_on_arrays():
    with pytest.raises(dsl.EvalError):
        evaluate(parse("log(x1)"), {"x1": np.array([1.0, 2.0, -1.0])})


def test_arity_examples():
    assert arity_check(parse("x1+x3")) == (3, False, "g")
    assert arity_check(parse("x1*t1")) == (1, True, "g")
    assert arity_check(parse("y1+y2")) == (2, False, "h")
    assert arity_check(parse("2")) == (0, False, "g")
    with pytest.raises(dsl.DSLError):
        arity_check(parse("y1+x1"))


def test_functional_spec():
    spec = functional("x1*t1 + x2", intervals=[(0, 0.5)])
    assert spec.m == 2 and spec.uses_t
    assert spec.intervals == ((0.0, 0.5), (0.0, 0.5))
    assert spec.interval_measure() == 0.25
    assert not spec.full_intervals
    assert functional("x1").full_intervals
    assert functional("1").m == 1
    with pytest.raises(dsl.DSLError):
        functional("x1", intervals=[(0.5, 1.5)])
    with pytest.raises(dsl.DSLError):
        functional("x1+x2", intervals=[(0, 1), (0, 1), (0, 1)])
    with pytest.raises(dsl.DSLError):
        functional("y1")


def test_parse_intervals():
    assert dsl.parse_intervals("0,0.3; 0.5,1") == [(0.0, 0.3), (0.5, 1.0)]
    with pytest.raises(dsl.DSLError):
        dsl.parse_intervals("0,1,2")


def test_array_broadcasting():
    x = np.linspace(0, 1, 5)
    t = np.linspace(0, 1, 3)[:, None]
    out = evaluate(parse("x1*t1 + 1"), {"x1": x, "t1": t})
    assert out.shape == (3, 5)
    assert np.allclose(out, x * t + 1)


CATALOG = [
    ("sqrt(1+x1^2)", lambda x1, x2, t1: math.sqrt(1 + x1 * x1)),
    ("x1", lambda x1, x2, t1: x1),
    ("x1^2", lambda x1, x2, t1: x1 * x1),
    ("x1^3 - 2*x1*x2", lambda x1, x2, t1: x1**3 - 2 * x1 * x2),
    ("cos(x1)", lambda x1, x2, t1: math.cos(x1)),
    ("sin(x1*x2)+cos(t1)", lambda x1, x2, t1: math.sin(x1 * x2) + math.cos(t1)),
    ("exp(-x1^2/2)*abs(x2)", lambda x1, x2, t1: math.exp(-(x1 * x1) / 2) * abs(x2)),
    ("log(1+x1^2)*t1", lambda x1, x2, t1: math.log(1 + x1 * x1) * t1),
]


@pytest.mark.parametrize("text,ref", CATALOG, ids=[c[0] for c in CATALOG])
def test_catalog_against_hand_evaluation(text, ref):
    e = parse(text)
    rng = np.random.default_rng(0)
    for x1, x2, t1 in rng.uniform(-2, 2, size=(50, 3)):
        got = evaluate(e, {"x1": x1, "x2": x2, "t1": t1})
        assert abs(got - ref(x1, x2, t1)) <= 1e-15 * max(1.0, abs(got))


def test_catalog_vectorized_matches_scalar():
    e = parse("sin(x1*x2)+cos(t1)")
    pts = np.random.default_rng(1).uniform(-2, 2, size=(3, 100))
    vec = evaluate(e, {"x1": pts[0], "x2": pts[1], "t1": pts[2]})
    scal = [evaluate(e, {"x1": a, "x2": b, "t1": c}) for a, b, c in pts.T]
    assert np.array_equal(vec, np.array(scal))


# random well-formed expressions

_leaves = st.one_of(
    st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Num),
    st.integers(0, 100).map(lambda k: Num(float(k))),
    st.builds(Var, st.sampled_from(["x", "t"]), st.integers(1, 4)),
)


def _extend(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
        st.builds(lambda f, a: Call(f, (a,)), st.sampled_from(["sin", "cos", "exp", "log", "sqrt", "abs"]), children),
        st.builds(lambda a, b: Call("pow", (a, b)), children, children),
    )


expressions = st.recursive(_leaves, _extend, max_leaves=12)


@settings(max_examples=1000, deadline=None)
@given(expressions)
def test_print_parse_is_idempotent(e):
    text = to_text(e)
    once = parse(text)
    assert parse(to_text(once)) == once
    assert once == e


@settings(max_examples=200, deadline=None)
@given(expressions)
def test_printed_text_evaluates_like_tree(e):
    env = {f"{k}{i}": 0.37 * i + (0.11 if k == "t" else 0.0) for k in "xt" for i in range(1, 5)}
    try:
        direct = evaluate(e, env)
    except dsl.EvalError:
        with pytest.raises(dsl.EvalError):
            evaluate(parse(to_text(e)), env)
        return
    again = evaluate(parse(to_text(e)), env)
    assert (np.isnan(direct) and np.isnan(again)) or direct == again
