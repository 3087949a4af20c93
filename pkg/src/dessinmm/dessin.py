"""Maps on oriented surfaces as sets of cyclic words over signed edge letters, and their duality."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ArgumentError, ValidationError

__all__ = [
    "SignedLetter",
    "CyclicWord",
    "DessinModel",
    "letter_key",
    "from_faces",
    "dual",
    "dual_by_permutations",
    "apply_T",
    "canonical_form",
    "face_permutation",
    "vertex_permutation",
    "graph_comb_holds",
    "find_isomorphism",
    "monodromy_products",
    "star_monodromies",
    "face_monodromies",
    "parse_faces",
    "format_faces",
    "random_model",
]

SignedLetter = int


def letter_key(letter: int) -> tuple[int, int]:
    """Order 1 < -1 < 2 < -2 < ..."""
    return (abs(letter), 0 if letter > 0 else 1)


def _word_key(word: Sequence[int]) -> tuple[tuple[int, int], ...]:
    return tuple(letter_key(x) for x in word)


def _least_rotation(word: Sequence[int]) -> tuple[int, ...]:
    word = tuple(word)
    rotations = [word[i:] + word[:i] for i in range(len(word))]
    return min(rotations, key=_word_key)


@dataclass(frozen=True)
class CyclicWord:
    """A word defined up to cyclic rotation. Letter order is kept as given; equality ignores rotation."""

    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        letters = tuple(int(x) for x in self.letters)
        if not letters:
            raise ValidationError("empty word")
        if 0 in letters:
            raise ValidationError("letter 0 is not allowed")
        object.__setattr__(self, "letters", letters)

    @property
    def canonical(self) -> tuple[int, ...]:
        return _least_rotation(self.letters)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CyclicWord):
            return self.canonical == other.canonical
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.canonical)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.letters)) + ")"


def canonical_form(words: Iterable[Sequence[int] | CyclicWord]) -> tuple[tuple[int, ...], ...]:
    rotated = [_least_rotation(tuple(w)) for w in words]
    return tuple(sorted(rotated, key=_word_key))


def _successor(words: Iterable[Sequence[int]]) -> dict[int, int]:
    succ: dict[int, int] = {}
    for word in words:
        w = tuple(word)
        for k, x in enumerate(w):
            succ[x] = w[(k + 1) % len(w)]
    return succ


def _cycles(perm: Mapping[int, int]) -> list[tuple[int, ...]]:
    seen: set[int] = set()
    out = []
    for start in sorted(perm, key=letter_key):
        if start in seen:
            continue
        cyc = []
        x = start
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = perm[x]
        out.append(tuple(cyc))
    return out


def face_permutation(words: Iterable[Sequence[int]]) -> dict[int, int]:
    """F: each letter to its successor in its word."""
    return _successor(words)


def vertex_permutation(words: Iterable[Sequence[int]]) -> dict[int, int]:
    """alpha o F, where alpha swaps i and -i; its cycles read forward are the vertex words."""
    succ = _successor(words)
    return {x: -succ[x] for x in succ}


def _validate(n: int, words: Sequence[tuple[int, ...]]) -> None:
    seen: set[int] = set()
    for word in words:
        for x in word:
            if abs(x) > n:
                raise ValidationError(f"letter {x} outside +-1..+-{n}")
            if x in seen:
                raise ValidationError(f"duplicate letter {x}")
            seen.add(x)
    missing = [x for i in range(1, n + 1) for x in (i, -i) if x not in seen]
    if missing:
        raise ValidationError(f"missing letters {missing}")
    parent = {x: x for x in seen}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        parent[find(a)] = find(b)

    for word in words:
        for x in word[1:]:
            union(word[0], x)
    for i in range(1, n + 1):
        union(i, -i)
    if len({find(x) for x in seen}) > 1:
        raise ValidationError("word set is disconnected")


@dataclass(frozen=True)
class DessinModel:
    n: int
    faces: tuple[CyclicWord, ...]
    vertices: tuple[CyclicWord, ...]

    @property
    def F(self) -> int:
        return len(self.faces)

    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def euler(self) -> int:
        return self.F - self.n + self.V

    @property
    def genus(self) -> int:
        return (2 - self.euler) // 2

    def face_words(self) -> list[tuple[int, ...]]:
        return [w.letters for w in self.faces]

    def vertex_words(self) -> list[tuple[int, ...]]:
        return [w.letters for w in self.vertices]

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        return canonical_form(self.face_words())

    def same_as(self, other: "DessinModel") -> bool:
        return self.n == other.n and self.canonical() == other.canonical()

    def stats(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "F": self.F,
            "V": self.V,
            "euler": self.euler,
            "faces": [list(w) for w in self.face_words()],
            "vertices": [list(w) for w in self.vertex_words()],
        }


def from_faces(words: Iterable[Sequence[int] | CyclicWord], n: int | None = None) -> DessinModel:
    """Validate a face word set and derive its vertex words from the cycles of alpha o F."""
    faces = [tuple(w) for w in words]
    if not faces:
        raise ValidationError("no words given")
    for w in faces:
        CyclicWord(w)
    if n is None:
        n = max(abs(x) for w in faces for x in w)
    _validate(n, faces)
    vertices = _cycles(vertex_permutation(faces))
    return DessinModel(n, tuple(CyclicWord(w) for w in faces), tuple(CyclicWord(w) for w in vertices))


def apply_T(words: Iterable[Sequence[int]], i: int) -> list[tuple[int, ...]]:
    """Cut the word holding both i and -i at those letters, or join the two words holding them."""
    words = [tuple(w) for w in words]
    pos = {x: k for k, w in enumerate(words) for x in w}
    if i not in pos or -i not in pos:
        raise ArgumentError(f"letters {i} and {-i} must both occur")
    a, b = pos[i], pos[-i]
    rest = [w for k, w in enumerate(words) if k not in (a, b)]
    if a == b:
        w = words[a]
        s = w.index(i)
        w = w[s:] + w[:s]
        t = w.index(-i)
        # i X -i Y  ->  (i X), (-i Y)
        return rest[:a] + [w[:t], w[t:]] + rest[a:]
    wa, wb = words[a], words[b]
    wa = wa[wa.index(i) :] + wa[: wa.index(i)]
    wb = wb[wb.index(-i) :] + wb[: wb.index(-i)]
    # (i X), (-i Y)  ->  i X -i Y
    return rest[: min(a, b)] + [wa + wb] + rest[min(a, b) :]


def dual(model: DessinModel) -> DessinModel:
    """Apply T_1, ..., T_n to the face words; the result is the dual map."""
    words = model.face_words()
    for i in range(1, model.n + 1):
        words = apply_T(words, i)
    return DessinModel(model.n, tuple(CyclicWord(w) for w in words), model.faces)


def dual_by_permutations(model: DessinModel) -> DessinModel:
    return DessinModel(model.n, model.vertices, model.faces)


def graph_comb_holds(model: DessinModel) -> bool:
    """Check alpha o F equals the permutation read from the stored vertex words."""
    composed = vertex_permutation(model.face_words())
    from_vertices = _successor(model.vertex_words())
    return composed == from_vertices


def _relabel(words: Sequence[tuple[int, ...]], perm: Sequence[int], signs: Sequence[int]) -> list[tuple[int, ...]]:
    def f(x: int) -> int:
        e = abs(x)
        return signs[e - 1] * perm[e - 1] * (1 if x > 0 else -1)

    return [tuple(f(x) for x in w) for w in words]


def find_isomorphism(a: DessinModel, b: DessinModel) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Search edge relabelings (permutation plus side swaps) taking a's faces to b's faces."""
    if (a.n, a.F, a.V) != (b.n, b.F, b.V):
        return None
    if sorted(map(len, a.faces)) != sorted(map(len, b.faces)):
        return None
    target = b.canonical()
    words = a.face_words()
    for perm in itertools.permutations(range(1, a.n + 1)):
        for signs in itertools.product((1, -1), repeat=a.n):
            if canonical_form(_relabel(words, perm, signs)) == target:
                return perm, signs
    return None


def _as_matrix_map(sources: Any) -> Mapping[int, Any]:
    return getattr(sources, "matrices", sources)


def monodromy_products(words: Iterable[Sequence[int]], sources: Any) -> list[Any]:
    """Ordered products C_{l1} C_{l2} ... for each word."""
    mats = _as_matrix_map(sources)
    out = []
    size = None
    for word in words:
        prod = None
        for x in word:
            if x not in mats:
                raise ArgumentError(f"no source matrix for letter {x}")
            m = np.asarray(mats[x])
            if size is None:
                size = m.shape
            elif m.shape != size:
                raise ArgumentError(f"source for letter {x} has shape {m.shape}, expected {size}")
            prod = m if prod is None else prod @ m
        out.append(prod)
    return out


def _spectrum(m: Any) -> np.ndarray:
    return np.linalg.eigvals(np.asarray(m, dtype=complex))


def star_monodromies(model: DessinModel, sources: Any) -> list[tuple[Any, np.ndarray]]:
    return [(w, _spectrum(w)) for w in monodromy_products(model.vertex_words(), sources)]


def face_monodromies(model: DessinModel, sources: Any) -> list[tuple[Any, np.ndarray]]:
    return [(w, _spectrum(w)) for w in monodromy_products(model.face_words(), sources)]


def parse_faces(text: str) -> list[tuple[int, ...]]:
    """One face per line, letters separated by spaces; a JSON array of integer arrays (or an object with a
    "faces" key) is also accepted."""
    stripped = text.strip()
    if stripped.startswith(("[", "{")):
        data = json.loads(stripped)
        if isinstance(data, dict):
            data = data["faces"]
        return [tuple(int(x) for x in w) for w in data]
    faces = []
    for line in stripped.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            faces.append(tuple(int(x) for x in line.replace(",", " ").split()))
        except ValueError as exc:
            raise ArgumentError(f"bad face line {line!r}") from exc
    return faces


def format_faces(words: Iterable[Sequence[int]]) -> str:
    return "\n".join(" ".join(map(str, w)) for w in words) + "\n"


def random_model(n: int, rng: random.Random) -> DessinModel:
    """Uniform random face permutation on 2n letters, retried until connected."""
    letters = [x for i in range(1, n + 1) for x in (i, -i)]
    while True:
        image = letters[:]
        rng.shuffle(image)
        perm = dict(zip(letters, image))
        words = _cycles(perm)
        try:
            return from_faces(words, n)
        except ValidationError:
            continue
