"""
Controlled caption grammar: `[det] adj* NOUN (REL [det] adj* NOUN)*`.

RuleBasedParser is the offline stand-in for LLM parsing, and
CaptionGenerator draws random sentences of the same language for
synthetic datasets and fuzzing.
"""
import logging
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from domain.exceptions.parser_exceptions import GrammarError
from domain.services.primitive_merger import PrimitiveMerger
from domain.value_objects.primitive_sets import PrimitiveSets

logger = logging.getLogger(__name__)

DETERMINERS = frozenset(
    {"a", "an", "the", "one", "some", "this", "that", "its", "his", "her", "their"}
)

RELATIONS: Tuple[str, ...] = (
    "on",
    "under",
    "wearing",
    "holding",
    "next to",
    "beside",
    "behind",
    "around",
    "in front of",
)

COMPOUND_NOUNS: Tuple[str, ...] = (
    "teddy bear",
    "traffic light",
    "fire hydrant",
    "stop sign",
    "parking meter",
    "baseball bat",
    "tennis racket",
    "wine glass",
    "hot dog",
    "potted plant",
    "dining table",
    "cell phone",
)

NON_RELATION_VERBS = frozenset(
    {
        "is", "are", "was", "were", "be", "sleep", "sleeps", "run", "runs",
        "eat", "eats", "sit", "sits", "stand", "stands", "walk", "walks",
        "jump", "jumps", "fly", "flies", "ride", "rides", "look", "looks",
        "hold", "holds", "wear", "wears", "play", "plays", "swim", "swims",
    }
)

LY_WORDS = frozenset(
    {
        "belly", "bully", "curly", "family", "friendly", "holly", "jelly",
        "jolly", "lily", "lonely", "lovely", "silly", "ugly", "woolly",
        "wooly", "fluffy", "early", "daily", "elderly", "chilly",
    }
)

_WORD = re.compile(r"^[\w'-]+$")
_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class _Token:
    text: str
    offset: int

    @property
    def lower(self) -> str:
        return self.text.lower()


def _tokenize(caption: str) -> List[_Token]:
    tokens = []
    matches = list(_TOKEN.finditer(caption))
    for position, match in enumerate(matches):
        text = match.group()
        offset = len(caption[: match.start()].encode("utf-8"))
        if position == len(matches) - 1 and text.endswith("."):
            text = text[:-1]
            if not text:
                continue
        if not _WORD.match(text):
            raise GrammarError(offset, match.group(), "punctuation is not allowed")
        tokens.append(_Token(text, offset))
    return tokens


def _match_phrase(tokens: List[_Token], i: int, phrases: Sequence[str]) -> int:
    """Word count of the longest phrase starting at tokens[i], 0 if none"""
    best = 0
    for phrase in phrases:
        words = phrase.split()
        n = len(words)
        if n > best and [t.lower for t in tokens[i : i + n]] == words:
            best = n
    return best


def _check_word(token: _Token) -> None:
    word = token.lower
    if word in NON_RELATION_VERBS:
        raise GrammarError(
            token.offset, token.text, "verb outside the relation lexicon"
        )
    if word.endswith("ly") and word not in LY_WORDS:
        raise GrammarError(token.offset, token.text, "adverbs are not allowed")


class RuleBasedParser:
    """Offline caption parser over an injected lexicon"""

    def __init__(
        self,
        relations: Sequence[str] = RELATIONS,
        determiners: Iterable[str] = DETERMINERS,
        compound_nouns: Sequence[str] = COMPOUND_NOUNS,
        merger: Optional[PrimitiveMerger] = None,
    ):
        self._relations = tuple(relations)
        self._determiners = frozenset(determiners)
        self._compound_nouns = tuple(compound_nouns)
        self._merger = merger or PrimitiveMerger()

    def parse(self, caption: str) -> PrimitiveSets:
        tokens = _tokenize(caption)
        if not tokens:
            raise GrammarError(0, caption, "empty caption")

        objects: List[Tuple[str, List[str]]] = []
        relations: List[Tuple[int, str, int]] = []
        i = 0
        pending_relation: Optional[Tuple[int, str]] = None

        while True:
            i, noun, adjectives = self._noun_phrase(tokens, i, caption)
            objects.append((noun, adjectives))
            if pending_relation is not None:
                subject, predicate = pending_relation
                relations.append((subject, predicate, len(objects) - 1))
            if i == len(tokens):
                break
            n = _match_phrase(tokens, i, self._relations)
            if n == 0:
                raise GrammarError(
                    tokens[i].offset, tokens[i].text, "expected a relation"
                )
            predicate = " ".join(t.lower for t in tokens[i : i + n])
            pending_relation = (len(objects) - 1, predicate)
            i += n
            if i == len(tokens):
                end = len(caption.encode("utf-8"))
                raise GrammarError(end, "", "relation without an object")

        return self._merger.merge(objects, relations)

    def _noun_phrase(
        self, tokens: List[_Token], i: int, caption: str
    ) -> Tuple[int, str, List[str]]:
        if i < len(tokens) and tokens[i].lower in self._determiners:
            i += 1

        words: List[_Token] = []
        while i < len(tokens) and _match_phrase(tokens, i, self._relations) == 0:
            token = tokens[i]
            if token.lower in self._determiners:
                raise GrammarError(
                    token.offset, token.text, "determiner inside a noun phrase"
                )
            _check_word(token)
            words.append(token)
            i += 1

        if not words:
            if i < len(tokens):
                raise GrammarError(tokens[i].offset, tokens[i].text, "expected a noun")
            raise GrammarError(len(caption.encode("utf-8")), "", "expected a noun")

        head = 1
        tail = " ".join(t.lower for t in words[-2:])
        if len(words) >= 2 and tail in self._compound_nouns:
            head = 2
        noun = " ".join(t.text for t in words[-head:])
        adjectives = [t.text for t in words[:-head]]
        return i, noun, adjectives


NOUNS: Tuple[str, ...] = (
    "ball", "table", "cat", "dog", "ribbon", "chair", "book", "cup", "horse",
    "man", "woman", "hat", "bench", "vase", "apple", "lamp", "bowl", "kite",
    "car", "umbrella", "bicycle", "clock", "box", "flower",
) + COMPOUND_NOUNS

ADJECTIVES: Tuple[str, ...] = (
    "red", "green", "blue", "yellow", "black", "white", "small", "large",
    "wooden", "shiny", "old", "striped", "round", "soft", "tall", "purple",
)

GENERATOR_DETERMINERS: Tuple[str, ...] = ("a", "the", "one", "some", "this", "that")


@dataclass(frozen=True)
class GeneratedCaption:
    caption: str
    expected: PrimitiveSets


class CaptionGenerator:
    """Random captions from the controlled grammar, with their parses.

    Nouns are drawn without replacement inside a caption so the expected
    parse needs no duplicate merging.
    """

    def __init__(self, max_objects: int = 4, max_adjectives: int = 2):
        self._max_objects = max_objects
        self._max_adjectives = max_adjectives

    def generate(self, rng: np.random.Generator) -> GeneratedCaption:
        count = int(rng.integers(1, self._max_objects + 1))
        nouns = [NOUNS[k] for k in rng.choice(len(NOUNS), size=count, replace=False)]

        words: List[str] = []
        attributes: List[Tuple[int, str]] = []
        relations: List[Tuple[int, str, int]] = []
        for index, noun in enumerate(nouns):
            if index > 0:
                predicate = RELATIONS[int(rng.integers(len(RELATIONS)))]
                relations.append((index - 1, predicate, index))
                words.append(predicate)
            if rng.random() < 0.7:
                pick = int(rng.integers(len(GENERATOR_DETERMINERS)))
                words.append(GENERATOR_DETERMINERS[pick])
            n_adj = int(rng.integers(0, self._max_adjectives + 1))
            picks = rng.choice(len(ADJECTIVES), size=n_adj, replace=False)
            adjectives = [ADJECTIVES[k] for k in picks]
            words.extend(adjectives)
            attributes.extend((index, adj) for adj in adjectives)
            words.append(noun)

        return GeneratedCaption(
            caption=" ".join(words),
            expected=PrimitiveSets(
                objects=tuple(nouns),
                relations=tuple(relations),
                attributes=tuple(attributes),
            ),
        )

    def generate_many(self, rng: np.random.Generator, n: int) -> List[GeneratedCaption]:
        return [self.generate(rng) for _ in range(n)]
