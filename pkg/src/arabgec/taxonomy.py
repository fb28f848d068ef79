"""Error tag vocabulary and projections between GED label granularities.

Fine labels (43-class) are ``+``-joined combinations of error tags, e.g.
``OH+XC``. Tags are either class letters (``O``, ``M``, ``X``, ``S``, ``P``),
two-letter ALC/ARETA tags whose first letter names the class (``OH`` -> O),
or structural tags.
"""

from __future__ import annotations

from typing import Iterable

CORRECT = "C"
ERROR = "E"
UNK = "UNK"
DELETE = "Delete"
INSERT = "Insert"
MERGE = "Merge"
SPLIT = "Split"
MERGE_B = "Merge-B"
MERGE_I = "Merge-I"

CLASSES = ("O", "M", "X", "S", "P")
# precedence for reducing compounds that have no entry of their own
PRECEDENCE = ("P", "O", "M", "X", "S")

STRUCTURAL = frozenset({CORRECT, UNK, DELETE, INSERT, MERGE, SPLIT, MERGE_B, MERGE_I})
# labels that are always modeled regardless of frequency
ALWAYS_MODELED = frozenset({CORRECT, UNK, DELETE, SPLIT, MERGE_B, MERGE_I})

COARSE_LABELS = (
    DELETE, MERGE_B, MERGE_I, "M", "M+O", "O", "O+X", "P", "S", "X", SPLIT, UNK, CORRECT,
)
_COARSE_SET = frozenset(COARSE_LABELS)

# ALC tags that are structural despite their first letter
_ALIASES = {"MG": MERGE, "SP": SPLIT}

GRANULARITIES = (43, 13, 2)


def tag_class(tag: str) -> str | None:
    """Map a single tag to its class, or None if it is not recognised."""
    if tag in STRUCTURAL or tag in CLASSES:
        return tag
    if tag in _ALIASES:
        return _ALIASES[tag]
    if len(tag) == 2 and tag.isupper() and tag[0] in CLASSES:
        return tag[0]
    return None


def split_label(label: str) -> list[str]:
    return [t for t in label.split("+") if t]


def join_tags(tags: Iterable[str]) -> str:
    return "+".join(sorted(set(tags)))


def is_known(tag: str) -> bool:
    return tag_class(tag) is not None


def to_coarse(label: str) -> str:
    """Reduce a fine label to the 13-class inventory."""
    if label in (CORRECT, UNK, DELETE, MERGE_B, MERGE_I):
        return label
    classes = {tag_class(t) for t in split_label(label)}
    classes.discard(None)
    if SPLIT in classes:
        return SPLIT
    if MERGE in classes:
        return MERGE_B
    if CORRECT in classes and len(classes) == 1:
        return CORRECT
    letters = classes & set(CLASSES)
    joined = join_tags(letters)
    if joined in _COARSE_SET:
        return joined
    for cls in PRECEDENCE:
        if cls in letters:
            return cls
    return UNK


def to_binary(label: str) -> str:
    return CORRECT if label == CORRECT else ERROR


def project_label(label: str, granularity: int) -> str:
    """Project a fine (43-class) label to the requested granularity."""
    if granularity == 43:
        return label
    if granularity == 13:
        return to_coarse(label)
    if granularity == 2:
        return to_binary(to_coarse(label))
    raise ValueError(f"unsupported granularity {granularity}")
