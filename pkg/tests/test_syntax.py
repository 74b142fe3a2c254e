import pickle

import pytest
from hypothesis import given

from sltlrm.sltl import (
    FALSE,
    TRUE,
    And,
    Eventually,
    FormulaSyntaxError,
    Not,
    Or,
    Prop,
    Then,
    Until,
    canonical_string,
    conj,
    disj,
    is_normalized,
    neg,
    normalize,
    parse,
    parse_raw,
    propositions,
    then,
)

from .strategies import formulas, raw_formulas

c, m, o = Prop("c"), Prop("m"), Prop("o")
Fc, Fm, Fo = Eventually(c), Eventually(m), Eventually(o)


def test_parse_then_of_eventualities():
    assert parse("F c ; F o") == Then(Fc, Fo)


def test_unary_binds_tighter_than_until():
    assert parse("!star U c") == Until(Not(Prop("star")), c)


def test_parse_table_formula():
    f = parse("(F a & F f) ; F e")
    assert f == Then(And((Eventually(Prop("a")), Eventually(Prop("f")))), Eventually(Prop("e")))


def test_precedence_chain():
    f = parse_raw("a | b & c ; d")
    assert isinstance(f, Then)
    assert isinstance(f.left, Or)
    assert isinstance(f.left.args[1], And)


def test_then_is_left_associative():
    f = parse("F a ; F b ; F c")
    assert f == Then(Then(Eventually(Prop("a")), Eventually(Prop("b"))), Eventually(Prop("c")))


def test_until_is_right_associative():
    f = parse("a U b U c")
    assert f == Until(Prop("a"), Until(Prop("b"), c))


def test_next_and_constants():
    assert parse("X true") == parse("X (true)")
    assert parse("false") is FALSE
    assert parse("true") is TRUE


@pytest.mark.parametrize("text,line,col", [
    ("F c ;", 1, 6),
    ("(a & b", 1, 7),
    ("a\n& )", 2, 3),
    ("a $ b", 1, 3),
])
def test_syntax_errors_report_position(text, line, col):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, col)
    assert info.value.expected


def test_trailing_garbage_is_an_error():
    with pytest.raises(FormulaSyntaxError):
        parse("a b")


def test_props_are_interned():
    assert Prop("c") is c
    assert pickle.loads(pickle.dumps(c)) is c


@pytest.mark.parametrize("bad", ["", "1a", "U", "true", "a-b"])
def test_bad_prop_names(bad):
    with pytest.raises(ValueError):
        Prop(bad)


def test_nary_needs_two_operands():
    with pytest.raises(ValueError):
        And((c,))


# -- normalization ----------------------------------------------------------------


def test_true_is_identity_for_and():
    assert normalize(And((TRUE, Fo))) == Fo


def test_true_then_collapses():
    assert normalize(Then(TRUE, Fo)) == Fo


def test_or_idempotent():
    assert normalize(Or((Fc, Fc))) == Fc


@pytest.mark.parametrize("raw,expected", [
    (And((FALSE, Fo)), FALSE),
    (Or((TRUE, Fo)), TRUE),
    (Or((FALSE, Fo)), Fo),
    (Not(TRUE), FALSE),
    (Not(FALSE), TRUE),
    (Not(Not(Fo)), Fo),
    (And((Fo, Fo)), Fo),
    (Then(FALSE, Fo), FALSE),
])
def test_rewrite_rules(raw, expected):
    assert normalize(raw) == expected


def test_flatten_sort_dedup():
    f = normalize(And((Fo, And((Fc, Fo)), Fm)))
    assert isinstance(f, And)
    assert [canonical_string(a) for a in f.args] == sorted({"F c", "F m", "F o"})


def test_commutativity_gives_same_state():
    assert parse("F c & F m") == parse("F m & F c")
    assert parse("F c | F m") == parse("F m | F c")


def test_smart_constructors():
    assert conj() is TRUE
    assert disj() is FALSE
    assert conj(Fc) == Fc
    assert neg(neg(Fc)) == Fc
    assert then(TRUE, Fc) == Fc
    assert then(FALSE, Fc) is FALSE


def test_propositions():
    assert propositions(parse("(!star U c) ; F o")) == {"star", "c", "o"}


def test_walk_and_size():
    f = parse("F c ; F o")
    assert [canonical_string(n) for n in f.walk()] == ["F c ; F o", "F c", "c", "F o", "o"]
    assert f.size() == 5


# -- properties -------------------------------------------------------------------


@given(raw_formulas)
def test_normalize_idempotent(f):
    n = normalize(f)
    assert normalize(n) == n
    assert is_normalized(n)


@given(formulas)
def test_print_parse_roundtrip(f):
    assert parse(canonical_string(f)) == f


def _structure(f):
    if isinstance(f, Prop):
        return ("Prop", f.name)
    return (type(f).__name__, tuple(_structure(ch) for ch in f.children))


@given(formulas, formulas)
def test_canonical_string_is_injective(f, g):
    assert (canonical_string(f) == canonical_string(g)) == (_structure(f) == _structure(g))
    if f == g:
        assert hash(f) == hash(g)


@given(formulas)
def test_pickle_roundtrip(f):
    assert pickle.loads(pickle.dumps(f)) == f
