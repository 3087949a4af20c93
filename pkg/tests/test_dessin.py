from __future__ import annotations

import random

import numpy as np
import pytest

from dessinmm.dessin import (
    CyclicWord,
    apply_T,
    canonical_form,
    dual,
    dual_by_permutations,
    face_monodromies,
    find_isomorphism,
    format_faces,
    from_faces,
    graph_comb_holds,
    parse_faces,
    random_model,
    star_monodromies,
)
from dessinmm.errors import ArgumentError, ValidationError
from dessinmm.verification import FIGURE1

# faces, expected dual words, expected (V, F, euler)
EXAMPLES = {
    1: ([(1,), (-1,)], [(1, -1)], (1, 2, 2)),
    2: ([(1, 2, -1, -2)], [(1, -2, -1, 2)], (1, 1, 0)),
    3: ([(-1, -2), (1,), (2,)], [(1, -1, 2, -2)], (1, 3, 2)),
    4: ([(1, 2, -1), (-2,)], [(1, -2, 2), (-1,)], (2, 2, 2)),
    # the printed dual repeats C_2 in its first word; (1, -2, -5) is the consistent reading
    5: ([(1, 2, 3, 4), (-3, -2, 5), (-5, -1, -4)], [(-2, -5, 1), (2, -3), (5, 3, -4), (4, -1)], (4, 3, 2)),
    8: ([(1, -1, 2, -2, 3, -3)], [(-1, -2, -3), (1,), (2,), (3,)], (4, 1, 2)),
    # the right-hand tetrahedron; its dual differs from the printed left side by a relabeling only
    10: ([(1, 4, -3), (-5, -1, 2), (-6, -2, 3), (-4, 5, 6)], [(-1, -2, -3), (-4, -5, 1), (-6, 2, 5), (6, 4, 3)], (4, 4, 2)),
}


def chain(n: int) -> list[tuple[int, ...]]:
    return [tuple(range(1, n + 1)) + tuple(-k for k in range(n, 0, -1))]


def polygon(n: int) -> list[tuple[int, ...]]:
    return [tuple(range(1, n + 1)), tuple(-k for k in range(n, 0, -1))]


def genus_word(g: int) -> list[tuple[int, ...]]:
    word: list[int] = []
    for k in range(g):
        a, b = 2 * k + 1, 2 * k + 2
        word += [a, b, -a, -b]
    return [tuple(word)]


def all_tested_models():
    models = [from_faces(f) for f, _, _ in EXAMPLES.values()]
    models += [from_faces(w) for w in FIGURE1.values()]
    for n in range(1, 6):
        models += [from_faces(chain(n)), from_faces(polygon(n))]
    models += [from_faces(genus_word(g)) for g in range(1, 4)]
    return models


def test_cyclic_word_rotation_equality() -> None:
    assert CyclicWord((1, 2, -1)) == CyclicWord((-1, 1, 2))
    assert CyclicWord((1, 2, -1)) != CyclicWord((1, -1, 2))
    assert CyclicWord((-1, 2, 1)).canonical == (1, -1, 2)
    with pytest.raises(ValidationError):
        CyclicWord(())


def test_canonical_form_ordering() -> None:
    assert canonical_form([(2,), (-1, 1)]) == ((1, -1), (2,))


@pytest.mark.parametrize("number", sorted(EXAMPLES))
def test_printed_examples(number: int) -> None:
    faces, expected, (V, F, euler) = EXAMPLES[number]
    model = from_faces(faces)
    assert (model.V, model.F, model.euler) == (V, F, euler)
    assert canonical_form(dual(model).face_words()) == canonical_form(expected)
    assert canonical_form(model.vertex_words()) == canonical_form(expected)


def test_example_ten_is_self_dual() -> None:
    model = from_faces(EXAMPLES[10][0])
    iso = find_isomorphism(model, dual(model))
    assert iso is not None
    perm, signs = iso
    assert sorted(perm) == list(range(1, 7))


def test_example_ten_printed_left_is_not_a_tetrahedron() -> None:
    printed_left = from_faces([(-1, -2, -3), (-5, -4, 1), (-6, 5, 2), (6, 4, 3)])
    assert (printed_left.V, printed_left.euler) == (2, 0)


@pytest.mark.parametrize("n", range(1, 7))
def test_chain_example(n: int) -> None:
    model = from_faces(chain(n))
    expected = [(k, -(k + 1)) for k in range(1, n)] + [(n,), (-1,)]
    assert canonical_form(dual(model).face_words()) == canonical_form(expected)
    assert (model.V, model.F, model.euler) == (n + 1, 1, 2)


@pytest.mark.parametrize("n", range(1, 7))
def test_polygon_example(n: int) -> None:
    model = from_faces(polygon(n))
    expected = [(k, -(k % n + 1)) for k in range(1, n + 1)]
    assert canonical_form(dual(model).face_words()) == canonical_form(expected)
    assert (model.V, model.F, model.euler) == (n, 2, 2)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_genus_example(g: int) -> None:
    model = from_faces(genus_word(g))
    word: list[int] = []
    for k in range(g):
        a, b = 2 * k + 1, 2 * k + 2
        word += [-a, b, a, -b]
    assert canonical_form(dual(model).face_words()) == canonical_form([tuple(word)])
    assert (model.V, model.F, model.euler, model.genus) == (1, 1, 2 - 2 * g, g)


def test_figure_one_graphs() -> None:
    expected_euler = {"a": 0, "b": 2, "c": 2, "d": 2, "e": 2}
    for name, words in FIGURE1.items():
        model = from_faces(words)
        assert model.n == 2
        assert model.euler == expected_euler[name]


def test_graph_comb_on_every_tested_model() -> None:
    for model in all_tested_models():
        assert graph_comb_holds(model)
        assert graph_comb_holds(dual(model))


def test_dual_is_involution_on_random_models() -> None:
    rng = random.Random(2024)
    for _ in range(200):
        model = random_model(rng.randint(1, 6), rng)
        d = dual(model)
        assert dual(d).same_as(model)
        assert d.same_as(dual_by_permutations(model))
        assert model.V == d.F and model.F == d.V
        assert model.euler == d.euler
        assert graph_comb_holds(model)


def test_vertex_count_matches_cycle_count() -> None:
    rng = random.Random(5)
    for _ in range(500):
        model = random_model(rng.randint(1, 5), rng)
        seen: set[int] = set()
        cycles = 0
        succ = {w[k]: w[(k + 1) % len(w)] for w in model.face_words() for k in range(len(w))}
        for x in succ:
            if x in seen:
                continue
            cycles += 1
            y = x
            while y not in seen:
                seen.add(y)
                y = -succ[y]
        assert cycles == model.V


def test_apply_T_cut_and_join() -> None:
    assert apply_T([(1, -1)], 1) == [(1,), (-1,)]
    assert canonical_form(apply_T([(1,), (-1,)], 1)) == ((1, -1),)
    step = apply_T([(1, 2, -1, -2)], 1)
    assert canonical_form(apply_T(step, 2)) == canonical_form([(1, -2, -1, 2)])
    with pytest.raises(ArgumentError):
        apply_T([(1, -1)], 2)


def test_apply_T_is_an_involution_and_commutes() -> None:
    rng = random.Random(9)
    for _ in range(100):
        model = random_model(rng.randint(2, 5), rng)
        words = model.face_words()
        i, j = rng.sample(range(1, model.n + 1), 2)
        assert canonical_form(apply_T(apply_T(words, i), i)) == canonical_form(words)
        ij = apply_T(apply_T(words, i), j)
        ji = apply_T(apply_T(words, j), i)
        assert canonical_form(ij) == canonical_form(ji)


def test_validation_errors() -> None:
    with pytest.raises(ValidationError, match="duplicate"):
        from_faces([(1, 1), (-1,)])
    with pytest.raises(ValidationError, match="missing"):
        from_faces([(1, 2, -1)])
    with pytest.raises(ValidationError, match="disconnected"):
        from_faces([(1, -1), (2, -2)])
    with pytest.raises(ValidationError):
        from_faces([])


def test_monodromies() -> None:
    model = from_faces([(1,), (-1,)])
    a = np.array([[1.0, 2.0], [0.0, 3.0]])
    b = np.array([[0.0, 1.0], [1.0, 0.0]])
    sources = {1: a, -1: b}
    (w, spec), = star_monodromies(model, sources)
    assert np.allclose(w, a @ b)
    faces = face_monodromies(model, sources)
    assert len(faces) == 2 and np.allclose(faces[0][0], a)
    ident = {x: np.eye(3) for x in (1, -1, 2, -2)}
    for w, spec in star_monodromies(from_faces(FIGURE1["a"]), ident):
        assert np.allclose(w, np.eye(3)) and np.allclose(spec, 1)
    with pytest.raises(ArgumentError, match="shape"):
        star_monodromies(model, {1: np.eye(2), -1: np.eye(3)})


def test_parse_and_format_round_trip() -> None:
    words = [(1, 2, -1), (-2,)]
    assert parse_faces(format_faces(words)) == words
    assert parse_faces("[[1, 2, -1], [-2]]") == words
    assert parse_faces('{"faces": [[1, 2, -1], [-2]]}') == words
    assert parse_faces("1,2,-1  # comment\n\n-2\n") == words
    with pytest.raises(ArgumentError):
        parse_faces("1 x")
