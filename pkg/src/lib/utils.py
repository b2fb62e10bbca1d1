"""
Utility functions for symdyn.

Contains shared text helpers used across multiple modules.
"""

from typing import Iterable, List, Sequence


def format_word(alphabet: Sequence[str], letters: Iterable[int]) -> str:
    """
    Render letter indices as a word.

    Args:
        alphabet: Letter names, indexed by letter
        letters: Letter indices in reading order

    Returns:
        The names glued together when every name is one character,
        otherwise joined with commas (e.g. "010" or "-1,1,0")
    """
    names = [alphabet[a] for a in letters]
    if all(len(name) == 1 for name in alphabet):
        return "".join(names)
    return ",".join(names)


def parse_word(alphabet: Sequence[str], text: str) -> List[int]:
    """
    Inverse of format_word; whitespace also separates letters.

    Raises:
        ValueError: if a letter is not in the alphabet
    """
    text = text.strip()
    if not text:
        return []
    if "," in text or " " in text:
        tokens = [t for t in text.replace(",", " ").split() if t]
    elif all(len(name) == 1 for name in alphabet):
        tokens = list(text)
    else:
        tokens = [text]
    index = {name: k for k, name in enumerate(alphabet)}
    try:
        return [index[t] for t in tokens]
    except KeyError as e:
        raise ValueError(f"unknown letter {e.args[0]!r}")


def strip_comment(line: str) -> str:
    """Drop a trailing '#' comment and surrounding whitespace."""
    return line.split("#", 1)[0].strip()


def plural(count: int, noun: str) -> str:
    return f"{count} {noun}" + ("" if count == 1 else "s")
